#include "tfw/domain.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace tfw {

IndexSet make_index_set(int N, int L) {
    if (N <= 0) throw DomainError("index set size must be positive");
    if (L < 0 || L > N - 1) throw DomainError("index offset L must lie in [0, N-1]");
    IndexSet s;
    s.N = N;
    s.L = L;
    const double half_odd = (N % 2) / 2.0;
    s.z_left = L + half_odd;
    s.z_right = N - L - half_odd;
    s.mu = (std::max(s.z_left, s.z_right) - N / 2.0) / (N / 2.0);
    return s;
}

DomainSpec tw_spec(int N, int M, double b) {
    if (N % 2 == 0 || M % 2 == 0) throw DomainError("time warping needs odd N and M");
    DomainSpec d;
    d.input = make_index_set(N, (N - 1) / 2);
    d.output = make_index_set(M, (M - 1) / 2);
    d.mode = Mode::time_warping;
    d.b = b;
    return d;
}

DomainSpec fw_spec(int N, int L_N, int M, int L_M, double b) {
    DomainSpec d;
    d.input = make_index_set(N, L_N);
    d.output = make_index_set(M, L_M);
    d.mode = Mode::frequency_warping;
    d.b = b;
    return d;
}

namespace {
double safe_ratio(double a, double b) { return b == 0.0 ? std::numeric_limits<double>::infinity() : a / b; }
}  // namespace

FeasibilityReport check_feasibility(const WarpMap& map, const DomainSpec& spec) {
    FeasibilityReport r;
    r.N = spec.N();
    r.M = spec.M();
    r.L_N = spec.input.L;
    r.L_M = spec.output.L;
    r.mu_N = spec.input.mu;
    r.mu_M = spec.output.mu;
    r.max_dw = map.max_dw();
    r.redundancy = static_cast<double>(r.M) / r.N;
    // a map with constant slope causes no band enlargement, so equality is enough there
    const bool linear = map.max_dw() - map.min_dw() <= 1e-14 * map.max_dw();
    auto exceeds = [linear](double v, double bound) { return linear ? v >= bound : v > bound; };
    r.global_ok = exceeds(r.redundancy, r.max_dw);
    if (!r.global_ok) r.messages.push_back("global redundancy M/N must exceed max Dw");

    r.positive_ratio = safe_ratio(r.M - r.L_M, r.N - r.L_N);
    r.negative_ratio = r.L_N == 0 ? std::numeric_limits<double>::infinity() : safe_ratio(r.L_M, r.L_N);
    r.positive_ok = exceeds(r.positive_ratio, r.max_dw);
    r.negative_ok = exceeds(r.negative_ratio, r.max_dw);
    if (!r.positive_ok) r.messages.push_back("positive-side redundancy (M-L_M)/(N-L_N) must exceed max Dw");
    if (!r.negative_ok) r.messages.push_back("negative-side redundancy L_M/L_N must exceed max Dw");

    const double base = r.M / (r.N * r.max_dw);
    r.mu_form_plus = base * (1.0 + r.mu_M) / (1.0 + r.mu_N);
    r.mu_form_minus = r.mu_N >= 1.0 ? std::numeric_limits<double>::infinity() : base * (1.0 - r.mu_M) / (1.0 - r.mu_N);
    r.mu_form_ok = r.mu_form_plus > 1.0 && r.mu_form_minus > 1.0;

    const double jscale = (1.0 - r.mu_M) / (1.0 + r.mu_N);
    r.seam_J = r.M / (r.N * map.derivative(0.0, 1, Side::right)) * jscale;
    bool all_J = true;
    for (const auto& s : map.singularities()) {
        SingularityCheck c;
        c.xi = s.xi;
        c.dw_right = s.dw_right;
        c.dw_left = s.dw_left;
        c.dw_used = std::max(s.dw_right, s.dw_left);
        c.J = r.M / (r.N * c.dw_used) * jscale;
        c.pass = c.J > 1.0;
        if (!c.pass) {
            std::ostringstream os;
            os << "singularity at xi=" << s.xi << " has J=" << c.J << " <= 1, tail factorisation diverges";
            r.messages.push_back(os.str());
        }
        all_J = all_J && c.pass;
        r.singularities.push_back(c);
    }

    if (spec.mode == Mode::time_warping) {
        r.shape_ok = spec.input.symmetric() && spec.output.symmetric();
        if (!r.shape_ok) r.messages.push_back("time warping needs odd N, M with symmetric index sets");
    }
    r.swf_feasible = r.global_ok && r.positive_ok && r.negative_ok && r.shape_ok;
    if (r.mu_M >= 1.0) r.messages.push_back("causal output set (mu_M = 1) leaves no tail normalisation");
    r.saf_feasible = r.swf_feasible && all_J && r.mu_M < 1.0;
    return r;
}

nlohmann::json FeasibilityReport::to_json() const {
    nlohmann::json j;
    j["N"] = N;
    j["M"] = M;
    j["L_N"] = L_N;
    j["L_M"] = L_M;
    j["mu_N"] = mu_N;
    j["mu_M"] = mu_M;
    j["max_dw"] = max_dw;
    j["redundancy"] = {{"value", redundancy}, {"pass", global_ok}};
    j["positive_side"] = {{"value", positive_ratio}, {"pass", positive_ok}};
    j["negative_side"] = {{"value", negative_ratio}, {"pass", negative_ok}};
    j["mu_form"] = {{"plus", mu_form_plus}, {"minus", mu_form_minus}, {"pass", mu_form_ok}};
    j["seam_J"] = seam_J;
    nlohmann::json sing = nlohmann::json::array();
    for (const auto& s : singularities)
        sing.push_back({{"xi", s.xi}, {"dw_right", s.dw_right}, {"dw_left", s.dw_left}, {"dw_used", s.dw_used},
                        {"J", s.J}, {"pass", s.pass}});
    j["singularities"] = sing;
    j["shape_ok"] = shape_ok;
    j["swf_feasible"] = swf_feasible;
    j["saf_feasible"] = saf_feasible;
    j["messages"] = messages;
    return j;
}

std::string FeasibilityReport::summary() const {
    std::ostringstream os;
    os << "N=" << N << " M=" << M << " swf_feasible=" << swf_feasible << " saf_feasible=" << saf_feasible;
    for (const auto& m : messages) os << "; " << m;
    return os.str();
}

TwDomain tw_domain(int N) {
    if (N <= 0) throw DomainError("signal length must be positive");
    TwDomain d;
    d.original_N = N;
    d.resampled = N % 2 == 0;
    const int n = d.resampled ? N + 1 : N;
    d.set = make_index_set(n, (n - 1) / 2);
    return d;
}

std::vector<double> TwDomain::resample(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != original_N) throw DomainError("signal length does not match the domain");
    if (!resampled) return x;
    const int N = original_N, n = N + 1;
    // DFT coefficients over k = -N/2..N/2-1, bin -N/2 split over +-N/2, evaluated on n points
    std::vector<std::complex<double>> c(static_cast<std::size_t>(N));
    for (int k = -N / 2; k < N / 2; ++k) {
        std::complex<double> s = 0.0;
        for (int t = 0; t < N; ++t) s += x[t] * std::polar(1.0, -2.0 * M_PI * k * t / N);
        c[k + N / 2] = s / static_cast<double>(N);
    }
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double u = static_cast<double>(t) / n;
        std::complex<double> s = 0.0;
        for (int k = -N / 2 + 1; k < N / 2; ++k) s += c[k + N / 2] * std::polar(1.0, 2.0 * M_PI * k * u);
        const std::complex<double> half = 0.5 * c[0];
        s += half * std::polar(1.0, -M_PI * N * u) + half * std::polar(1.0, M_PI * N * u);
        y[t] = s.real();
    }
    return y;
}

std::vector<int> reverse_indexing(const IndexSet& set) {
    if (!set.symmetric()) throw DomainError("index reversal needs a symmetric odd set");
    std::vector<int> p(static_cast<std::size_t>(set.N));
    for (int pos = 0; pos < set.N; ++pos) p[pos] = set.position(-set.index(pos));
    return p;
}

}  // namespace tfw
