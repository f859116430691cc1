#pragma once
// One-dimensional nonuniform FFT (types 1 and 2) on the unit period, 2x oversampled
// grid with a Kaiser-Bessel spreading kernel.

#include <complex>
#include <vector>

namespace tfw {

class NufftPlan {
public:
    using cplx = std::complex<double>;
    static constexpr int kWidth = 16;

    // modes k = first_mode .. first_mode + n_modes - 1; sign selects e^{+-j2pi k x}
    NufftPlan(std::vector<double> points, int first_mode, int n_modes, int sign);
    ~NufftPlan();
    NufftPlan(const NufftPlan&) = delete;
    NufftPlan& operator=(const NufftPlan&) = delete;

    // f_k = sum_j c_j e^{sign j2pi k x_j}
    void type1(const cplx* c, cplx* f) const;
    // c_j = sum_k f_k e^{sign j2pi k x_j}
    void type2(const cplx* f, cplx* c) const;

    int grid_size() const { return n_; }
    std::size_t num_points() const { return x_.size(); }
    int num_modes() const { return K_; }

private:
    std::vector<double> x_;
    int k0_, K_, sign_, n_, kc_ = 0;
    std::vector<cplx> phase_;
    std::vector<int> start_;        // first padded grid index per point
    std::vector<double> weights_;   // kWidth per point
    std::vector<double> deconv_;    // 1 / (n psi_hat(k)) per mode
    void* plan_ = nullptr;
    cplx* buf_ = nullptr;
};

}  // namespace tfw
