#pragma once
// Sampling-after-filtering operators: tail factorisation E, aliasing A, and W_f, W_t.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tfw/domain.hpp"
#include "tfw/swf.hpp"
#include "tfw/symbolic_kernel.hpp"
#include "tfw/warp_map.hpp"

namespace tfw {

// D^i zeta(z), zeta(z) = pi cot(pi z) - 1/z, |z| < 1
double zeta_deriv(int i, double z);

// sum_{k != 0} e^{-j2pi k theta} (z - k)^{-s}, |z| < 1, theta in [0, 1)
std::complex<double> periodic_power_sum(int s, double z, double theta);

// sum_{m >= m0} e^{j2pi m delta} (c/m)^s for s >= 2, m0 >= 1
std::complex<double> tail_power_sum(int s, double delta, double c, int m0);

struct BasisSet {
    Eigen::MatrixXd V;          // R x N
    std::vector<int> tail_rows; // out-of-band m with |m| <= K_tail M
    Eigen::MatrixXd Y;          // tail rows x R
    Eigen::MatrixXd U;          // M x R, integer M xi
    int K_tail = 8;
};

BasisSet build_bases(const DomainSpec& spec, int R, int K_tail = 8);
// aliasing basis for a singularity with fractional part theta of M xi
Eigen::MatrixXcd aliasing_basis(const DomainSpec& spec, int R, double theta);

struct SafOptions {
    int R = 0;                 // 0: per-singularity size from kernel_tol
    double kernel_tol = 1e-12;
    int K_tail = 8;
    const CoeffTable* table = nullptr;
};

struct SingularTerm {
    double xi = 0.0;
    double w_xi = 0.0;
    double theta = 0.0;  // frac(M xi)
    KernelMatrix kernel;
    Eigen::VectorXcd P;  // e^{j2pi m xi}, in-band m
    Eigen::VectorXcd Q;  // e^{-j2pi n w(xi)}
    Eigen::MatrixXcd U;  // M x R aliasing basis for this theta
};

class TailFactorization {
public:
    TailFactorization(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});

    const DomainSpec& spec() const { return spec_; }
    double b() const { return b_; }
    const std::vector<SingularTerm>& terms() const { return terms_; }
    const Eigen::MatrixXd& V() const { return V_; }
    int compressed_size() const;

    // factored tail rows E(m, n) for arbitrary out-of-band m
    Eigen::MatrixXcd E_rows(const std::vector<int>& rows) const;
    // U-based aliasing, M x N
    Eigen::MatrixXcd A() const;
    // stacked S_i V Q_i
    Eigen::MatrixXcd H() const;
    // Gram blocks sum_{m out of band} conj(P_i' Y) (P_i Y), hermitian, compressed_size square
    Eigen::MatrixXcd gram() const;
    // F_M^dag conj(A) F_N via the Fourier-transformed bases
    Eigen::MatrixXcd A_time() const;

private:
    DomainSpec spec_;
    double b_;
    Eigen::MatrixXd V_;
    std::vector<SingularTerm> terms_;
};

OperatorMatrix build_W_f(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});
OperatorMatrix build_W_t(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});
// matrix-free W_t: NUFFT X_t minus the low-rank correction
LinearOp W_t_op(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt = {});

// throws InfeasibleError naming the offending singularity
void require_saf(const WarpMap& map, const DomainSpec& spec);

}  // namespace tfw
