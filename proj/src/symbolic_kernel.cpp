#include "tfw/symbolic_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tfw {

PolyQ BKPoly::specialize_b(const Rational& b) const {
    std::vector<Rational> c(coeff.size());
    for (std::size_t m = 0; m < coeff.size(); ++m) c[m] = coeff[m].eval(b);
    return PolyQ(std::move(c));
}

Rational BKPoly::eval(const Rational& b, const Rational& k) const { return specialize_b(b).eval(k); }

BKPoly& BKPoly::operator+=(const BKPoly& o) {
    if (o.coeff.size() > coeff.size()) coeff.resize(o.coeff.size());
    for (std::size_t m = 0; m < o.coeff.size(); ++m) coeff[m] += o.coeff[m];
    trim();
    return *this;
}

void BKPoly::trim() {
    while (!coeff.empty() && coeff.back().is_zero()) coeff.pop_back();
}

std::string BKPoly::to_string() const {
    if (coeff.empty()) return "0";
    std::string out;
    for (int m = degree_k(); m >= 0; --m) {
        const PolyQ& c = coeff[m];
        if (c.is_zero()) continue;
        std::string term;
        bool neg = false;
        if (c.degree() == 0) {
            Rational v = c.c[0];
            neg = v < 0;
            if (neg) v = -v;
            if (v != 1 || m == 0) term = rational_string(v);
        } else {
            term = "(" + c.to_string("b") + ")";
        }
        if (m > 0) {
            if (!term.empty()) term += " ";
            term += "k";
            if (m > 1) term += "^" + std::to_string(m);
        }
        if (out.empty())
            out = (neg ? "-" : "") + term;
        else
            out += (neg ? " - " : " + ") + term;
    }
    return out;
}

BKPoly mul_linear(const BKPoly& p, const PolyQ& c0, const Rational& c1) {
    BKPoly r;
    r.coeff.resize(p.coeff.size() + 1);
    for (std::size_t m = 0; m < p.coeff.size(); ++m) {
        r.coeff[m] += p.coeff[m] * c0;
        if (c1 != 0) r.coeff[m + 1] += p.coeff[m] * c1;
    }
    r.trim();
    return r;
}

BKPoly antidifference_k(const BKPoly& p) {
    BKPoly r;
    for (int j = 0; j <= p.degree_k(); ++j) {
        if (p.coeff[j].is_zero()) continue;
        PolyQ s = antidifference(PolyQ::monomial(j));
        if (static_cast<int>(r.coeff.size()) < s.degree() + 1) r.coeff.resize(static_cast<std::size_t>(s.degree() + 1));
        for (int i = 0; i <= s.degree(); ++i)
            if (s.c[i] != 0) r.coeff[i] += p.coeff[j] * s.c[i];
    }
    r.trim();
    return r;
}

std::vector<int> generators(const std::vector<int>& seq) {
    std::vector<int> g{1};
    for (std::size_t m = 2; m <= seq.size(); ++m)
        if (seq[m - 1] > 0) g.push_back(static_cast<int>(m));
    return g;
}

Level enumerate_level(Level& prev) {
    Level next;
    next.l = prev.l + 1;
    prev.expansion.clear();
    std::vector<std::vector<int>> raw;
    for (std::size_t n = 0; n < prev.seqs.size(); ++n) {
        for (int m : generators(prev.seqs[n])) {
            std::vector<int> s = prev.seqs[n];
            s.resize(static_cast<std::size_t>(next.l + 1), 0);
            s[m - 1] -= 1;
            s[m] += 1;
            raw.push_back(s);
            prev.expansion.push_back({static_cast<int>(n), m, -1});
        }
    }
    next.seqs = raw;
    std::sort(next.seqs.begin(), next.seqs.end());
    next.seqs.erase(std::unique(next.seqs.begin(), next.seqs.end()), next.seqs.end());
    prev.partition.assign(next.seqs.size(), {});
    for (std::size_t q = 0; q < raw.size(); ++q) {
        auto it = std::lower_bound(next.seqs.begin(), next.seqs.end(), raw[q]);
        const int t = static_cast<int>(it - next.seqs.begin());
        prev.expansion[q].target = t;
        prev.partition[static_cast<std::size_t>(t)].push_back(static_cast<int>(q));
    }
    return next;
}

void gamma_level(const Level& prev, Level& next) {
    next.gamma.assign(next.seqs.size(), BKPoly{});
    for (std::size_t t = 0; t < next.seqs.size(); ++t) {
        BKPoly delta;
        for (int q : prev.partition[t]) {
            const ExpansionTerm& e = prev.expansion[static_cast<std::size_t>(q)];
            const auto& p = prev.seqs[static_cast<std::size_t>(e.source)];
            const int pm = p[static_cast<std::size_t>(e.generator - 1)];
            // factor p_m + (b + k - l) [m == 1]
            PolyQ c0 = e.generator == 1 ? PolyQ({Rational(pm - prev.l), Rational(1)}) : PolyQ::constant(pm);
            Rational c1 = e.generator == 1 ? 1 : 0;
            delta += mul_linear(prev.gamma[static_cast<std::size_t>(e.source)], c0, c1);
        }
        next.gamma[t] = antidifference_k(delta);
    }
}

CoeffTable::CoeffTable(int max_level) {
    if (max_level < 0) throw std::invalid_argument("max level must be non-negative");
    Level l0;
    l0.l = 0;
    l0.seqs = {{0}};
    BKPoly one;
    one.coeff = {PolyQ::constant(1)};
    l0.gamma = {one};
    levels_.push_back(l0);
    for (int l = 0; l < max_level; ++l) {
        Level next = enumerate_level(levels_.back());
        gamma_level(levels_.back(), next);
        levels_.push_back(std::move(next));
    }
}

const std::vector<std::vector<std::vector<double>>>& CoeffTable::gamma_values(double b, int kmax) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(b, kmax);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto vals = std::make_shared<std::vector<std::vector<std::vector<double>>>>();
    const Rational bq(b);
    for (const auto& lev : levels_) {
        std::vector<std::vector<double>> per_n;
        for (const auto& g : lev.gamma) {
            PolyQ pk = g.specialize_b(bq);
            std::vector<double> v(static_cast<std::size_t>(kmax + 1));
            for (int k = 0; k <= kmax; ++k) v[k] = pk.eval(Rational(k)).get_d();
            per_n.push_back(std::move(v));
        }
        vals->push_back(std::move(per_n));
    }
    cache_[key] = vals;
    return *vals;
}

nlohmann::json CoeffTable::dump(int max_level, const Rational* b) const {
    nlohmann::json out = nlohmann::json::array();
    for (int l = 0; l <= std::min(max_level, this->max_level()); ++l) {
        const Level& lev = level(l);
        nlohmann::json jl;
        jl["level"] = l;
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t n = 0; n < lev.seqs.size(); ++n) {
            nlohmann::json e;
            e["p"] = lev.seqs[n];
            std::string gamma;
            nlohmann::json coeffs = nlohmann::json::array();
            if (b) {
                PolyQ pk = lev.gamma[n].specialize_b(*b);
                gamma = pk.to_string("k");
                for (int m = 0; m <= std::max(pk.degree(), 0); ++m) coeffs.push_back(rational_string(pk.coeff(m)));
            } else {
                gamma = lev.gamma[n].to_string();
                for (const auto& c : lev.gamma[n].coeff) coeffs.push_back(c.to_string("b"));
            }
            e["gamma"] = gamma;
            e["gamma_coeffs"] = coeffs;
            std::vector<int> gens = generators(lev.seqs[n]);
            e["generators"] = gens;
            entries.push_back(e);
        }
        jl["sequences"] = entries;
        out.push_back(jl);
    }
    return out;
}

const CoeffTable& default_coeff_table() {
    static const CoeffTable table;
    return table;
}

double beta_eval(const std::vector<int>& seq, const std::vector<double>& jet, double b) {
    if (jet.size() < seq.size() + 1) throw KernelError("beta needs map jets up to order l+1");
    double v = std::pow(jet[1], b + seq[0]);
    for (std::size_t m = 2; m <= seq.size(); ++m)
        if (seq[m - 1] != 0) v *= std::pow(jet[m], seq[m - 1]);
    return v;
}

double alpha_eval(const WarpMap& map, double xi, Side side, int k, int l, double b, const CoeffTable& table) {
    if (l < 0 || l > k) throw std::invalid_argument("alpha needs 0 <= l <= k");
    if (l > table.max_level()) throw KernelError("level exceeds the coefficient table");
    if (l + 1 > WarpMap::kMaxTestedOrder) throw KernelError("map jets unavailable at the requested order");
    const auto jet = map.jet(xi, l + 1, side);
    const Level& lev = table.level(l);
    const Rational bq(b), kq(k);
    double s = 0.0;
    for (std::size_t n = 0; n < lev.seqs.size(); ++n) s += beta_eval(lev.seqs[n], jet, b) * lev.gamma[n].eval(bq, kq).get_d();
    return s;
}

int kernel_size(double J_value, double kernel_tol, int cap) {
    if (!(J_value > 1.0)) throw KernelError("kernel size needs J > 1");
    const int R = static_cast<int>(std::floor(std::log(1.0 / kernel_tol) / std::log(J_value))) + 1;
    return std::clamp(R, 1, cap);
}

namespace {

Eigen::MatrixXd side_kernel(const WarpMap& map, double xi, Side side, double b, int R, double scale,
                            const CoeffTable& table) {
    const int top = std::min(table.max_level(), R - 1);
    const auto jet = map.jet(xi, top + 1, side);
    const auto& g = table.gamma_values(b, std::max(R - 1, 0));
    // beta values per level
    std::vector<std::vector<double>> beta(static_cast<std::size_t>(top + 1));
    for (int l = 0; l <= top; ++l)
        for (const auto& s : table.level(l).seqs) beta[l].push_back(beta_eval(s, jet, b));
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(R, R);
    for (int i = 0; i < R; ++i)
        for (int k = std::max(0, i - top); k <= i; ++k) {
            const int l = i - k;
            double a = 0.0;
            for (std::size_t n = 0; n < beta[l].size(); ++n) a += beta[l][n] * g[l][n][i];
            K(i, k) = a * std::pow(scale, k);
        }
    return K;
}

}  // namespace

OneSidedKernels one_sided_kernels(const WarpMap& map, double xi, double b, int R, const CoeffTable& table) {
    static std::mutex mu;
    static std::map<std::string, OneSidedKernels> cache;
    std::ostringstream key;
    key.precision(17);
    key << map.name() << '|' << map.source().dump() << '|';
    if (map.source().empty()) key << static_cast<const void*>(&map);
    key << '|' << xi << '|' << b << '|' << R << '|' << static_cast<const void*>(&table);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key.str());
        if (it != cache.end()) return it->second;
    }
    OneSidedKernels k;
    k.dw_plus = map.derivative(xi, 1, Side::right);
    k.dw_minus = map.derivative(xi, 1, Side::left);
    const double ref = std::max(k.dw_plus, k.dw_minus);
    k.plus = side_kernel(map, xi, Side::right, b, R, k.dw_plus / ref, table);
    k.minus = side_kernel(map, xi, Side::left, b, R, k.dw_minus / ref, table);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key.str(), k);
    return k;
}

KernelMatrix build_kernel_S(const WarpMap& map, double xi, const DomainSpec& spec, double b, int R, double kernel_tol,
                            const CoeffTable& table) {
    KernelMatrix km;
    km.xi = xi;
    const double dwp = map.derivative(xi, 1, Side::right), dwm = map.derivative(xi, 1, Side::left);
    km.dw_ref = std::max(dwp, dwm);
    const double N = spec.N(), M = spec.M();
    const double mu_N = spec.input.mu, mu_M = spec.output.mu;
    km.J_value = M / (N * km.dw_ref) * (1.0 - mu_M) / (1.0 + mu_N);
    if (!(km.J_value > 1.0)) {
        std::ostringstream os;
        os << "singularity at xi=" << xi << " has J=" << km.J_value
           << " <= 1: the tail factorisation diverges (increase M)";
        throw KernelError(os.str());
    }
    km.R = R > 0 ? std::min(R, 64) : kernel_size(km.J_value, kernel_tol);
    auto k = one_sided_kernels(map, xi, b, km.R, table);
    km.K_plus = k.plus;
    km.K_minus = k.minus;
    km.J = Eigen::MatrixXcd::Zero(km.R, km.R);
    const std::complex<double> base(0.0, -M_PI * M * (1.0 - mu_M));
    for (int i = 0; i < km.R; ++i)
        for (int c = 0; c <= i; ++c) km.J(i, c) = std::pow(km.J_value, -c) * std::pow(base, c - i - 1);
    km.S = (km.K_plus - km.K_minus).cast<std::complex<double>>().cwiseProduct(km.J);
    return km;
}

}  // namespace tfw
