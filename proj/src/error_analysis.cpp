#include "tfw/error_analysis.hpp"

#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include "tfw/dual.hpp"
#include "tfw/rational.hpp"

namespace tfw {

double spectral_norm(const Eigen::MatrixXcd& A, NormMethod method) {
    if (A.size() == 0) return 0.0;
    if (method == NormMethod::svd) return Eigen::JacobiSVD<Eigen::MatrixXcd>(A).singularValues()(0);
    // power iteration on A^dag A from a fixed start
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(A.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = {g(rng), g(rng)};
    x.normalize();
    double prev = 0.0, s = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXcd y = A.adjoint() * (A * x);
        const double n = y.norm();
        if (n == 0.0) return 0.0;
        s = std::sqrt(n);
        x = y / n;
        if (std::abs(s - prev) <= 1e-15 * s) break;
        prev = s;
    }
    return s;
}

double lambda_coefficient(int s) {
    if (s < 2 || s % 2) throw std::invalid_argument("lambda needs an even order >= 2");
    const double f = std::tgamma(s + 1.0);
    return std::pow(2.0 * M_PI, s) * std::abs(bernoulli(s).get_d()) / f;
}

namespace {

int delta0(double b) { return b == 0.0 ? 1 : 0; }

// sequence of the (Dw)^{b-1} D^{sigma+1} w term at level sigma
std::vector<int> leading_sequence(int sigma) {
    if (sigma == 0) return {0};
    std::vector<int> p(static_cast<std::size_t>(sigma + 1), 0);
    p[0] = -1;
    p[static_cast<std::size_t>(sigma)] = 1;
    return p;
}

double leading_gamma(int sigma, double b, const CoeffTable& table) {
    if (sigma == 0) return 1.0;
    if (sigma > table.max_level()) throw KernelError("smoothness order exceeds the coefficient table");
    const Level& lv = table.level(sigma);
    const auto seq = leading_sequence(sigma);
    for (std::size_t n = 0; n < lv.seqs.size(); ++n)
        if (lv.seqs[n] == seq) {
            const int k = sigma + 2 * delta0(b);
            return std::abs(table.gamma_values(b, k)[static_cast<std::size_t>(sigma)][n][static_cast<std::size_t>(k)]);
        }
    throw KernelError("leading sequence missing from level " + std::to_string(sigma));
}

double step_at(const WarpMap& map, const Singularity& s, int sigma, double b) {
    const auto seq = leading_sequence(sigma);
    const auto jr = map.jet(s.xi, sigma + 1, Side::right);
    const auto jl = map.jet(s.xi, sigma + 1, Side::left);
    const int e = 2 * delta0(b);
    return std::abs(std::pow(jr[1], e) * beta_eval(seq, jr, b) - std::pow(jl[1], e) * beta_eval(seq, jl, b));
}

}  // namespace

EstimateCoefficients estimate_coefficients(const WarpMap& map, double b, const CoeffTable& table) {
    EstimateCoefficients k;
    const double bd = 1.0 - b;
    k.sigma = map.sigma();
    k.c = 2 * (delta0(b) + delta0(bd));
    k.eta = (k.sigma + 1) % 2;
    k.lambda = lambda_coefficient(k.sigma + 1 + k.eta);
    k.rho = (b == 0.0 || b == 1.0) ? 1 : 2;
    // least regular singularity with the largest step
    const Singularity* best = nullptr;
    double best_val = -1.0;
    for (const auto& s : map.singularities()) {
        if (s.sigma != k.sigma) continue;
        const double v = step_at(map, s, k.sigma, b) * step_at(map, s, k.sigma, bd);
        if (v > best_val) {
            best_val = v;
            best = &s;
        }
    }
    if (!best) {
        k.step = k.step_dual = 0.0;
        return k;
    }
    k.xi = best->xi;
    k.step = step_at(map, *best, k.sigma, b);
    k.step_dual = step_at(map, *best, k.sigma, bd);
    k.gamma = leading_gamma(k.sigma, b, table);
    k.gamma_dual = leading_gamma(k.sigma, bd, table);
    k.theta = 0.5 * (std::pow(best->dw_right, b) + std::pow(best->dw_left, b));
    return k;
}

double estimate_saf(const WarpMap& map, const DomainSpec& spec, double b) {
    const auto k = estimate_coefficients(map, b);
    const double N = spec.N(), M = spec.M();
    const int s = k.sigma;
    const double num = k.step * k.step_dual * k.gamma * k.gamma_dual;
    const double den = std::pow(M_PI, 2 * s + 2) * (2 * s + 1 + k.c) * std::sqrt(1.0 + 2 * k.c);
    return num / den * std::pow(N, 1 + k.c) / std::pow(M, 2 * s + 1 + k.c);
}

double estimate_swf(const WarpMap& map, const DomainSpec& spec, double b) {
    const auto k = estimate_coefficients(map, b);
    const double N = spec.N(), M = spec.M();
    const int s = k.sigma, e = k.eta;
    const double num = k.rho * k.lambda * k.theta * std::sqrt(k.step * k.step_dual * k.gamma * k.gamma_dual);
    const double den = std::pow(M_PI, s + 1) * std::pow(2.0, s + 1 + e) * std::pow(3.0, e / 2.0);
    return num / den * std::pow(N, 1 + e) / std::pow(M, s + 1 + e);
}

double estimate_swf_corrected(const WarpMap& map, const DomainSpec& spec, double b) {
    double v = estimate_swf(map, spec, b);
    if (map.sigma() == 0 && b == 0.5) v += estimate_saf(map, spec, b);
    return v;
}

int odd_M_for(double redundancy, int N, double max_dw) {
    int M = static_cast<int>(std::ceil(redundancy * N * max_dw - 1e-9));
    if (M % 2 == 0) ++M;
    return M;
}

std::vector<double> redundancy_grid(double lo, double step, double hi) {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad redundancy grid");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-9 * step) break;
        g.push_back(v);
    }
    return g;
}

namespace {

CurvePoint measure_point(const std::shared_ptr<const WarpMap>& map, int N, double b, double r, NormMethod method) {
    CurvePoint p;
    p.redundancy = r;
    p.M = odd_M_for(r, N, map->max_dw());
    const DomainSpec spec = tw_spec(N, p.M, b);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
    const double bd = 1.0 - b;
    try {
        const auto X = X_t(*map, spec, b).entries;
        const auto Xd = X_t(*map, spec, bd).entries;
        InverseMap inv(map);
        const auto Xh = X_hat_t(inv, spec, b).entries;
        p.eps = spectral_norm(Xd.adjoint() * X - I, method);
        p.eps_hat = spectral_norm(Xh.adjoint() * X - I, method);
        p.est_swf = estimate_swf_corrected(*map, spec, b);
        p.swf_ok = true;
    } catch (const std::exception& e) {
        p.note = e.what();
        return p;
    }
    try {
        const auto W = build_W_t(*map, spec, b).entries;
        const auto Wd = build_W_t(*map, spec, bd).entries;
        const auto D = dual_W_t(*map, spec, b).entries;
        p.veps = spectral_norm(Wd.adjoint() * W - I, method);
        p.veps_tilde = spectral_norm(D.adjoint() * W - I, method);
        p.est_saf = estimate_saf(*map, spec, b);
        p.saf_ok = true;
    } catch (const std::exception& e) {
        p.note = e.what();
    }
    return p;
}

}  // namespace

ErrorCurve measure_norms(std::shared_ptr<const WarpMap> map, int N, double b, const std::vector<double>& grid,
                         unsigned threads, NormMethod method) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("redundancy grid must be strictly increasing");
    ErrorCurve curve;
    curve.map_name = map->name();
    curve.N = N;
    curve.b = b;
    curve.sigma = map->sigma();
    curve.points.resize(grid.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    while (next < grid.size()) {
        std::vector<std::future<CurvePoint>> batch;
        const std::size_t start = next;
        for (; next < grid.size() && next - start < threads; ++next)
            batch.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, measure_point, map, N,
                                       b, grid[next], method));
        for (std::size_t i = 0; i < batch.size(); ++i) curve.points[start + i] = batch[i].get();
    }
    return curve;
}

std::optional<NormId> norm_id(const std::string& name) {
    if (name == "eps_hat") return NormId::eps_hat;
    if (name == "eps") return NormId::eps;
    if (name == "veps") return NormId::veps;
    if (name == "veps_tilde") return NormId::veps_tilde;
    if (name == "est_saf") return NormId::est_saf;
    if (name == "est_swf") return NormId::est_swf;
    return std::nullopt;
}

namespace {
double pick(const CurvePoint& p, NormId id) {
    switch (id) {
        case NormId::eps_hat: return p.eps_hat;
        case NormId::eps: return p.eps;
        case NormId::veps: return p.veps;
        case NormId::veps_tilde: return p.veps_tilde;
        case NormId::est_saf: return p.est_saf;
        case NormId::est_swf: return p.est_swf;
    }
    return NAN;
}
}  // namespace

double slope_fit(const ErrorCurve& curve, NormId which, double lo, double hi) {
    std::vector<double> xs, ys;
    for (const auto& p : curve.points) {
        const double v = pick(p, which);
        if (p.redundancy < lo - 1e-12 || p.redundancy > hi + 1e-12 || !(v > 0.0) || !std::isfinite(v)) continue;
        xs.push_back(std::log(static_cast<double>(p.M)));
        ys.push_back(std::log(v));
    }
    if (xs.size() < 4) throw std::invalid_argument("slope fit needs at least 4 valid points in range");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_csv(std::ostream& os, const ErrorCurve& curve) {
    os << "redundancy,M,eps_hat,eps,veps,veps_tilde,est_saf,est_swf\n";
    os << std::setprecision(17);
    auto num = [&](double v) {
        if (std::isfinite(v)) os << v;
    };
    for (const auto& p : curve.points) {
        os << p.redundancy << ',' << p.M << ',';
        num(p.eps_hat);
        os << ',';
        num(p.eps);
        os << ',';
        num(p.veps);
        os << ',';
        num(p.veps_tilde);
        os << ',';
        num(p.est_saf);
        os << ',';
        num(p.est_swf);
        os << '\n';
    }
}

}  // namespace tfw
