#include "tfw/saf.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "tfw/rational.hpp"

namespace tfw {

namespace {

constexpr int kCoeffCount = 480;
constexpr int kBernoulliMax = 12;
constexpr int kDirectTerms = 30;

double bernoulli_poly(int n, double x) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += binomial(n, j).get_d() * bernoulli(j).get_d() * std::pow(x, n - j);
    return s;
}

// c_p = -sum_{k != 0} e^{-j2pi k theta} k^{-(p+1)}
std::vector<std::complex<double>> series_coeffs(double theta) {
    std::vector<std::complex<double>> c(kCoeffCount);
    const std::complex<double> mtwopii(0.0, -2.0 * M_PI);
    std::complex<double> pw = 1.0;
    double fact = 1.0;
    for (int p = 0; p < kCoeffCount; ++p) {
        const int q = p + 1;
        if (q <= kBernoulliMax) {
            pw *= mtwopii;
            fact *= q;
            c[p] = (p == 0 && theta == 0.0) ? 0.0 : pw * bernoulli_poly(q, theta) / fact;
        } else {
            std::complex<double> s = 0.0;
            for (int k = kDirectTerms; k >= 1; --k) {
                const double kp = std::pow(static_cast<double>(k), -q);
                const std::complex<double> e = std::polar(1.0, -2.0 * M_PI * k * theta);
                s += e * kp + std::conj(e) * ((q % 2 == 0) ? kp : -kp);
            }
            c[p] = -s;
        }
    }
    return c;
}

std::complex<double> series_sum(int s, double z, const std::vector<std::complex<double>>& c) {
    // (-1)^{s+1} sum_q C(q+s-1, s-1) c_{s+q-1} z^q, |z| <= 1/2
    std::complex<double> sum = 0.0;
    double binom = 1.0, zq = 1.0;
    int small = 0;
    for (int q = 0; s + q - 1 < kCoeffCount; ++q) {
        const std::complex<double> term = binom * zq * c[static_cast<std::size_t>(s + q - 1)];
        sum += term;
        // odd or even coefficients vanish at theta = 0 and 1/2
        small = std::abs(term) <= 1e-18 * std::abs(sum) ? small + 1 : 0;
        if (q > s && small >= 2) break;
        if (z == 0.0) break;
        binom *= static_cast<double>(q + s) / (q + 1);
        zq *= z;
    }
    return (s % 2 == 0) ? -sum : sum;
}

std::complex<double> periodic_sum_with(int s, double z, double theta, const std::vector<std::complex<double>>& c) {
    if (std::abs(z) <= 0.5) return series_sum(s, z, c);
    // F(z) = T(z) + z^{-s} satisfies F(z + 1) = e^{-j2pi theta} F(z)
    const std::complex<double> e = std::polar(1.0, -2.0 * M_PI * theta);
    if (z > 0.5) return e * (series_sum(s, z - 1.0, c) + std::pow(z - 1.0, -s)) - std::pow(z, -s);
    return std::conj(e) * (series_sum(s, z + 1.0, c) + std::pow(z + 1.0, -s)) - std::pow(z, -s);
}

const std::vector<std::complex<double>>& cached_coeffs(double theta) {
    static std::mutex mu;
    static std::map<double, std::vector<std::complex<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(theta);
    if (it == cache.end()) it = cache.emplace(theta, series_coeffs(theta)).first;
    return it->second;
}

}  // namespace

std::complex<double> periodic_power_sum(int s, double z, double theta) {
    if (s < 1 || s > kCoeffCount / 2) throw std::invalid_argument("periodic power sum needs 1 <= s <= 240");
    if (!(std::abs(z) < 1.0)) throw std::domain_error("periodic power sum needs |z| < 1");
    return periodic_sum_with(s, z, theta, cached_coeffs(theta));
}

double zeta_deriv(int i, double z) {
    if (i < 0) throw std::invalid_argument("derivative order must be non-negative");
    if (!(std::abs(z) < 1.0)) throw std::domain_error("zeta_deriv needs |z| < 1");
    double fact = 1.0;
    for (int k = 2; k <= i; ++k) fact *= k;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    // closed form only where the pole subtraction loses little precision
    if (i <= 12 && std::pow(std::abs(z), i + 1) >= 0.05) {
        // D^i cot(pi z) = pi^i P_i(cot pi z), P_0 = c, P_{i+1} = -(1 + c^2) P_i'
        std::vector<double> P{0.0, 1.0};
        for (int k = 0; k < i; ++k) {
            std::vector<double> d(P.size() > 1 ? P.size() - 1 : 1, 0.0);
            for (std::size_t j = 1; j < P.size(); ++j) d[j - 1] = j * P[j];
            std::vector<double> np(d.size() + 2, 0.0);
            for (std::size_t j = 0; j < d.size(); ++j) {
                np[j] -= d[j];
                np[j + 2] -= d[j];
            }
            P = np;
        }
        const double c = std::cos(M_PI * z) / std::sin(M_PI * z);
        double v = 0.0;
        for (std::size_t j = P.size(); j-- > 0;) v = v * c + P[j];
        return std::pow(M_PI, i + 1) * v - sign * fact / std::pow(z, i + 1);
    }
    return sign * fact * periodic_power_sum(i + 1, z, 0.0).real();
}

std::complex<double> tail_power_sum(int s, double delta, double c, int m0) {
    if (s < 2) throw std::invalid_argument("tail power sum needs s >= 2");
    if (m0 < 1) throw std::invalid_argument("tail power sum needs m0 >= 1");
    // (1/Gamma(s)) int_0^inf t^{s-1} e^{-(m0/c) t} e^{j2pi m0 delta} / (1 - e^{-t/c + j2pi delta}) dt
    const double lg = std::lgamma(static_cast<double>(s));
    const double fd = delta - std::round(delta);
    const std::complex<double> rot = std::polar(1.0, 2.0 * M_PI * fd);
    const std::complex<double> lead = std::polar(1.0, 2.0 * M_PI * (m0 * fd - std::floor(m0 * fd)));
    auto value = [&](double t) -> std::complex<double> {
        if (t <= 0.0) return 0.0;
        const double mag = std::exp((s - 1) * std::log(t) - (m0 / c) * t - lg);
        if (mag == 0.0) return 0.0;
        const std::complex<double> den = fd == 0.0 ? std::complex<double>(-std::expm1(-t / c)) : 1.0 - std::exp(-t / c) * rot;
        return mag * lead / den;
    };
    boost::math::quadrature::exp_sinh<double> integ;
    const double tol = 1e-14;
    const double re = integ.integrate([&](double t) { return value(t).real(); }, tol);
    const double im = integ.integrate([&](double t) { return value(t).imag(); }, tol);
    return {re, im};
}

BasisSet build_bases(const DomainSpec& spec, int R, int K_tail) {
    if (R < 1 || R > 64) throw std::invalid_argument("basis size R must be in [1, 64]");
    if (spec.output.mu >= 1.0) throw DomainError("causal output set (mu_M = 1) has no tail normalisation");
    BasisSet B;
    B.K_tail = K_tail;
    const int N = spec.N(), M = spec.M();
    const double vs = (N / 2.0) * (1.0 + spec.input.mu);
    B.V.resize(R, N);
    for (int c = 0; c < N; ++c) {
        const double t = spec.input.index(c) / vs;
        double p = 1.0;
        for (int k = 0; k < R; ++k) {
            B.V(k, c) = p;
            p *= t;
        }
    }
    const double cy = (M / 2.0) * (1.0 - spec.output.mu);
    for (int m = -K_tail * M; m <= K_tail * M; ++m)
        if (!spec.output.contains(m)) B.tail_rows.push_back(m);
    B.Y.resize(static_cast<Eigen::Index>(B.tail_rows.size()), R);
    for (std::size_t r = 0; r < B.tail_rows.size(); ++r) {
        const double t = cy / B.tail_rows[r];
        double p = t;
        for (int i = 0; i < R; ++i) {
            B.Y(static_cast<Eigen::Index>(r), i) = p;
            p *= t;
        }
    }
    B.U = aliasing_basis(spec, R, 0.0).real();
    return B;
}

Eigen::MatrixXcd aliasing_basis(const DomainSpec& spec, int R, double theta) {
    const int M = spec.M();
    const double h = (1.0 - spec.output.mu) / 2.0;
    const auto& c = cached_coeffs(theta);
    Eigen::MatrixXcd U(M, R);
    for (int r = 0; r < M; ++r) {
        const double z = static_cast<double>(spec.output.index(r)) / M;
        double scale = h;
        for (int i = 0; i < R; ++i) {
            U(r, i) = scale * periodic_sum_with(i + 1, z, theta, c);
            scale *= h;
        }
    }
    return U;
}

void require_saf(const WarpMap& map, const DomainSpec& spec) {
    auto r = check_feasibility(map, spec);
    if (!r.saf_feasible) throw InfeasibleError("SAF operator refused: " + r.summary(), r);
}

TailFactorization::TailFactorization(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt)
    : spec_(spec), b_(b) {
    require_saf(map, spec);
    const CoeffTable& table = opt.table ? *opt.table : default_coeff_table();
    const int N = spec.N(), M = spec.M();
    int Rmax = 1;
    for (const auto& s : map.singularities()) {
        SingularTerm t;
        t.xi = s.xi;
        t.w_xi = map.eval(s.xi);
        t.kernel = build_kernel_S(map, s.xi, spec, b, opt.R, opt.kernel_tol, table);
        const double mx = M * s.xi;
        t.theta = mx - std::floor(mx);
        if (t.theta > 1.0 - 1e-12 || t.theta < 1e-12) t.theta = 0.0;
        t.P.resize(M);
        for (int r = 0; r < M; ++r) t.P(r) = turn(spec.output.index(r) * s.xi);
        t.Q.resize(N);
        for (int c = 0; c < N; ++c) t.Q(c) = turn(-spec.input.index(c) * t.w_xi);
        t.U = aliasing_basis(spec, t.kernel.R, t.theta);
        Rmax = std::max(Rmax, t.kernel.R);
        terms_.push_back(std::move(t));
    }
    V_ = build_bases(spec, Rmax, opt.K_tail).V;
}

int TailFactorization::compressed_size() const {
    int n = 0;
    for (const auto& t : terms_) n += t.kernel.R;
    return n;
}

Eigen::MatrixXcd TailFactorization::H() const {
    Eigen::MatrixXcd H(compressed_size(), spec_.N());
    int off = 0;
    for (const auto& t : terms_) {
        const int R = t.kernel.R;
        H.middleRows(off, R) = (t.kernel.S * V_.topRows(R).cast<std::complex<double>>()) * t.Q.asDiagonal();
        off += R;
    }
    return H;
}

Eigen::MatrixXcd TailFactorization::E_rows(const std::vector<int>& rows) const {
    const int N = spec_.N();
    const double cy = (spec_.M() / 2.0) * (1.0 - spec_.output.mu);
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()), N);
    for (const auto& t : terms_) {
        const int R = t.kernel.R;
        Eigen::MatrixXcd SVQ = (t.kernel.S * V_.topRows(R).cast<std::complex<double>>()) * t.Q.asDiagonal();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const int m = rows[r];
            if (spec_.output.contains(m)) throw std::invalid_argument("tail rows must be out of band");
            Eigen::RowVectorXcd y(R);
            double p = cy / m, q = p;
            for (int i = 0; i < R; ++i) {
                y(i) = q;
                q *= p;
            }
            E.row(static_cast<Eigen::Index>(r)) += turn(m * t.xi) * (y * SVQ);
        }
    }
    return E;
}

Eigen::MatrixXcd TailFactorization::A() const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(spec_.M(), spec_.N());
    for (const auto& t : terms_) {
        const int R = t.kernel.R;
        A += t.P.asDiagonal() * (t.U * (t.kernel.S * (V_.topRows(R).cast<std::complex<double>>() * t.Q.asDiagonal())));
    }
    return A;
}

Eigen::MatrixXcd TailFactorization::gram() const {
    const int n = compressed_size();
    const int M = spec_.M();
    const double cy = (M / 2.0) * (1.0 - spec_.output.mu);
    const int m0p = M - spec_.output.L, m0n = spec_.output.L + 1;
    Eigen::MatrixXcd G(n, n);
    int ro = 0;
    for (const auto& a : terms_) {
        int co = 0;
        for (const auto& b : terms_) {
            const double delta = b.xi - a.xi;
            const int smax = a.kernel.R + b.kernel.R;
            std::vector<std::complex<double>> sums(static_cast<std::size_t>(smax + 1));
            for (int s = 2; s <= smax; ++s) {
                const double sg = (s % 2 == 0) ? 1.0 : -1.0;
                sums[s] = tail_power_sum(s, delta, cy, m0p) + sg * tail_power_sum(s, -delta, cy, m0n);
            }
            for (int r = 0; r < a.kernel.R; ++r)
                for (int c = 0; c < b.kernel.R; ++c) G(ro + r, co + c) = sums[static_cast<std::size_t>(r + c + 2)];
            co += b.kernel.R;
        }
        ro += a.kernel.R;
    }
    return G;
}

namespace {

// rows p of X moved to p + shift, modulo the index set
Eigen::MatrixXcd shift_rows(const Eigen::MatrixXcd& X, const IndexSet& s, int shift) {
    Eigen::MatrixXcd Y(X.rows(), X.cols());
    const int n = s.N;
    for (int r = 0; r < n; ++r) Y(((r + shift) % n + n) % n, Eigen::all) = X.row(r);
    return Y;
}

bool near_integer(double v, int* out) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) return false;
    *out = static_cast<int>(r);
    return true;
}

struct TimeFactors {
    std::vector<Eigen::MatrixXcd> left;   // F_M^dag conj(P_i) U_i
    std::vector<Eigen::MatrixXcd> core;   // conj(S_i)
    std::vector<Eigen::MatrixXcd> right;  // V_i conj(Q_i) F_N
};

TimeFactors time_factors(const TailFactorization& tf) {
    const DomainSpec& spec = tf.spec();
    const int M = spec.M();
    const Eigen::MatrixXcd FMh = dft_matrix(spec.output).adjoint();
    const Eigen::MatrixXcd FN = dft_matrix(spec.input);
    const Eigen::MatrixXcd VF = tf.V().cast<std::complex<double>>() * FN;
    Eigen::MatrixXcd FU;  // shared for integer M xi
    TimeFactors f;
    for (const auto& t : tf.terms()) {
        const int R = t.kernel.R;
        int sh = 0;
        if (t.theta == 0.0 && near_integer(M * t.xi, &sh)) {
            if (FU.rows() == 0 || FU.cols() < R) FU = FMh * t.U;
            // F_M^dag diag(e^{-j2pi m xi}) U is F_M^dag U with rows shifted by -M xi
            f.left.push_back(shift_rows(FU.leftCols(R), spec.output, sh));
        } else {
            f.left.push_back(FMh * (t.P.conjugate().asDiagonal() * t.U));
        }
        f.core.push_back(t.kernel.S.conjugate());
        int wsh = 0;
        if (near_integer(spec.N() * t.w_xi, &wsh)) {
            Eigen::MatrixXcd Vt = VF.topRows(R).transpose();
            f.right.push_back(shift_rows(Vt, spec.input, wsh).transpose());
        } else {
            f.right.push_back(tf.V().topRows(R).cast<std::complex<double>>() * t.Q.conjugate().asDiagonal() * FN);
        }
    }
    return f;
}

}  // namespace

Eigen::MatrixXcd TailFactorization::A_time() const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(spec_.M(), spec_.N());
    const TimeFactors f = time_factors(*this);
    for (std::size_t i = 0; i < f.left.size(); ++i) A += f.left[i] * (f.core[i] * f.right[i]);
    return A;
}

OperatorMatrix build_W_f(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    TailFactorization tf(map, spec, b, opt);
    OperatorMatrix op = X_f(map, spec, b);
    op.entries -= tf.A();
    op.kind = OperatorKind::saf_freq;
    return op;
}

OperatorMatrix build_W_t(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    require_tw(spec);
    TailFactorization tf(map, spec, b, opt);
    OperatorMatrix op = X_t(map, spec, b);
    op.entries -= tf.A_time();
    op.kind = OperatorKind::saf_time;
    return op;
}

LinearOp W_t_op(const WarpMap& map, const DomainSpec& spec, double b, const SafOptions& opt) {
    require_tw(spec);
    auto tf = std::make_shared<TailFactorization>(map, spec, b, opt);
    auto f = std::make_shared<TimeFactors>(time_factors(*tf));
    LinearOp base = X_t_op(map, spec, b);
    LinearOp op = base;
    op.apply = [base, f](const cplx* x, cplx* y) {
        base.apply(x, y);
        Eigen::Map<const Eigen::VectorXcd> xv(x, base.cols);
        Eigen::Map<Eigen::VectorXcd> yv(y, base.rows);
        for (std::size_t i = 0; i < f->left.size(); ++i) yv -= f->left[i] * (f->core[i] * (f->right[i] * xv));
    };
    op.adjoint = [base, f](const cplx* y, cplx* x) {
        base.adjoint(y, x);
        Eigen::Map<const Eigen::VectorXcd> yv(y, base.rows);
        Eigen::Map<Eigen::VectorXcd> xv(x, base.cols);
        for (std::size_t i = 0; i < f->left.size(); ++i)
            xv -= f->right[i].adjoint() * (f->core[i].adjoint() * (f->left[i].adjoint() * yv));
    };
    return op;
}

}  // namespace tfw
