#include "tfw/nufft.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include <boost/math/quadrature/gauss.hpp>

#include "tfw/simd.hpp"

namespace tfw {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

int smooth_size(int n) {
    for (;; ++n) {
        int r = n;
        for (int p : {2, 3, 5}) while (r % p == 0) r /= p;
        if (r == 1 && n % 2 == 0) return n;
    }
}

constexpr double kSigma = 2.0;

// FFTW requires the alignment the plan was made with
struct FftwBuffer {
    std::complex<double>* p;
    explicit FftwBuffer(int n) : p(reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(static_cast<std::size_t>(n)))) {
        std::fill(p, p + n, std::complex<double>(0.0));
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// (w/sigma)^2 (sigma - 1/2)^2 = 0.5625 w^2 for sigma = 2
double beta_for(int w) { return M_PI * std::sqrt(0.5625 * w * w - 0.8); }

double kernel(double z, double beta, double i0b) {
    if (std::abs(z) >= 1.0) return 0.0;
    return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - z * z)) / i0b;
}

}  // namespace

NufftPlan::NufftPlan(std::vector<double> points, int first_mode, int n_modes, int sign)
    : x_(std::move(points)), k0_(first_mode), K_(n_modes), sign_(sign >= 0 ? 1 : -1) {
    if (n_modes <= 0) throw std::invalid_argument("nufft needs at least one mode");
    const int w = kWidth;
    n_ = smooth_size(std::max(static_cast<int>(std::ceil(kSigma * n_modes)), 2 * w));
    const double beta = beta_for(w);
    const double i0b = std::cyl_bessel_i(0.0, beta);
    const double half = w / 2.0;
    // centre the mode range; the shift becomes a phase per point
    kc_ = k0_ + K_ / 2;
    phase_.resize(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) {
        const double t = kc_ * (x_[j] - std::floor(x_[j]));
        phase_[j] = std::polar(1.0, sign_ * 2.0 * M_PI * (t - std::floor(t)));
    }

    start_.resize(x_.size());
    weights_.resize(x_.size() * w);
    for (std::size_t j = 0; j < x_.size(); ++j) {
        const double u = (x_[j] - std::floor(x_[j])) * n_;
        const int l0 = static_cast<int>(std::ceil(u - half));
        start_[j] = l0 + w;  // padded index, always >= 0
        for (int i = 0; i < w; ++i) weights_[j * w + i] = kernel((l0 + i - u) / half, beta, i0b);
    }

    // psi_hat(k) = (w / 2n) int_{-1}^{1} phi(z) cos(pi k w z / n) dz
    using G = boost::math::quadrature::gauss<double, 100>;
    deconv_.resize(static_cast<std::size_t>(K_));
    for (int q = 0; q < K_; ++q) {
        const double k = k0_ + q - kc_;
        auto f = [&](double z) { return kernel(z, beta, i0b) * std::cos(M_PI * k * w * z / n_); };
        const double ph = (w / (2.0 * n_)) * G::integrate(f, -1.0, 1.0);
        deconv_[q] = 1.0 / (n_ * ph);
    }

    std::lock_guard<std::mutex> lock(fftw_mutex());
    buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n_));
    plan_ = fftw_plan_dft_1d(n_, reinterpret_cast<fftw_complex*>(buf_), reinterpret_cast<fftw_complex*>(buf_),
                             sign_ > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
}

NufftPlan::~NufftPlan() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    if (buf_) fftw_free(buf_);
}

void NufftPlan::type1(const cplx* c, cplx* f) const {
    const int w = kWidth;
    const auto& k = simd::active();
    std::vector<cplx> pad(static_cast<std::size_t>(n_ + 2 * w + 2), cplx(0.0));
    std::vector<cplx> cs(x_.size());
    k.cmul(cs.data(), c, phase_.data(), x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) k.axpy_real(pad.data() + start_[j], weights_.data() + j * w, cs[j], w);
    FftwBuffer buf(n_);
    cplx* grid = buf.p;
    for (std::size_t l = 0; l < pad.size(); ++l) grid[((static_cast<int>(l) - w) % n_ + n_) % n_] += pad[l];
    // plans are executed on private arrays so concurrent calls are safe
    fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(grid),
                     reinterpret_cast<fftw_complex*>(grid));
    for (int q = 0; q < K_; ++q) f[q] = grid[((k0_ + q - kc_) % n_ + n_) % n_] * deconv_[q];
}

void NufftPlan::type2(const cplx* f, cplx* c) const {
    const int w = kWidth;
    const auto& k = simd::active();
    FftwBuffer buf(n_);
    cplx* grid = buf.p;
    for (int q = 0; q < K_; ++q) grid[((k0_ + q - kc_) % n_ + n_) % n_] += f[q] * deconv_[q];
    fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(grid),
                     reinterpret_cast<fftw_complex*>(grid));
    std::vector<cplx> pad(static_cast<std::size_t>(n_ + 2 * w + 2));
    for (std::size_t l = 0; l < pad.size(); ++l) pad[l] = grid[((static_cast<int>(l) - w) % n_ + n_) % n_];
    for (std::size_t j = 0; j < x_.size(); ++j) c[j] = k.dot_real(pad.data() + start_[j], weights_.data() + j * w, w);
    k.cmul(c, c, phase_.data(), x_.size());
}

}  // namespace tfw
