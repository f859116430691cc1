#include "tfw/warp_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tfw/taylor.hpp"

namespace tfw {

namespace {

constexpr double kBreakTol = 1e-14;
constexpr double kJetTol = 1e-10;

class PolyShape final : public PieceShape {
public:
    PolyShape(double origin, std::vector<double> coeffs) : origin_(origin), a_(std::move(coeffs)) {}
    std::vector<double> jet(double x, int order) const override {
        const double t = x - origin_;
        std::vector<double> d(static_cast<std::size_t>(order + 1), 0.0);
        std::vector<double> p = a_;
        for (int k = 0; k <= order && !p.empty(); ++k) {
            double s = 0.0;
            for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * t + *it;
            d[k] = s;
            for (std::size_t i = 1; i < p.size(); ++i) p[i - 1] = p[i] * static_cast<double>(i);
            p.pop_back();
        }
        return d;
    }

private:
    double origin_;
    std::vector<double> a_;
};

class ExpShape final : public PieceShape {
public:
    explicit ExpShape(double base) : base_(base), log_base_(std::log(base)), scale_(1.0 / (base - 1.0)) {}
    std::vector<double> jet(double x, int order) const override {
        std::vector<double> d(static_cast<std::size_t>(order + 1));
        const double e = std::pow(base_, x);
        d[0] = (e - 1.0) * scale_;
        double f = e * scale_;
        for (int k = 1; k <= order; ++k) {
            f *= log_base_;
            d[k] = f;
        }
        return d;
    }

private:
    double base_, log_base_, scale_;
};

// w(x) = x + atan((nu-1) s c / (c^2 + nu s^2)) / pi with s = sin(pi x), c = cos(pi x);
// equal to atan(nu tan(pi x))/pi on the principal branch, smooth across x = 1/2.
class AtanTanShape final : public PieceShape {
public:
    explicit AtanTanShape(double nu) : nu_(nu) {}
    std::vector<double> jet(double x, int order) const override {
        const int n = std::max(order, 1);
        // the correction term has period 1; reduce so 0 and 1 give identical jets
        const double shift = std::round(x);
        Jet<double> arg = Jet<double>::variable(n, x - shift) * M_PI;
        Jet<double> s, c;
        sincos(arg, s, c);
        Jet<double> num = s * c * (nu_ - 1.0);
        Jet<double> den = c * c + s * s * nu_;
        Jet<double> w = Jet<double>::variable(n, x) + atan(num / den) * (1.0 / M_PI);
        auto d = w.derivatives();
        d.resize(static_cast<std::size_t>(order + 1));
        return d;
    }

private:
    double nu_;
};

std::vector<std::pair<double, double>> knots_from_json(const nlohmann::json& j) {
    std::vector<std::pair<double, double>> k;
    if (!j.contains("knots")) return k;
    for (const auto& e : j.at("knots")) {
        if (!e.is_array() || e.size() != 2) throw MapError("knots must be [x, y] pairs");
        k.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return k;
}

void check_knots(const std::vector<std::pair<double, double>>& knots) {
    if (knots.empty() || knots[0].first != 0.0 || knots[0].second != 0.0)
        throw MapError("knot list must start with (0, 0)");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first) || !(knots[i].second > knots[i - 1].second))
            throw MapError("knots must be strictly increasing in x and y");
        if (knots[i].first >= 1.0 || knots[i].second >= 1.0) throw MapError("knots must lie in [0, 1)");
    }
}

nlohmann::json knots_json(const std::vector<std::pair<double, double>>& knots) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [x, y] : knots) a.push_back({x, y});
    return a;
}

double frac_floor(double x, double* k) {
    double fl = std::floor(x);
    double f = x - fl;
    if (f >= 1.0) {
        f = 0.0;
        fl += 1.0;
    }
    *k = fl;
    return f;
}

}  // namespace

WarpMap::WarpMap(std::string name, std::vector<MapPiece> pieces, nlohmann::json source)
    : name_(std::move(name)), pieces_(std::move(pieces)), source_(std::move(source)) {
    validate_and_analyse();
}

WarpMap WarpMap::identity() {
    return WarpMap("identity", {{0.0, 1.0, std::make_shared<PolyShape>(0.0, std::vector<double>{0.0, 1.0})}},
                   {{"type", "identity"}});
}

WarpMap WarpMap::exponential(double base) {
    if (!(base > 0.0) || base == 1.0) throw MapError("exponential map needs base > 0, base != 1");
    return WarpMap("exponential", {{0.0, 1.0, std::make_shared<ExpShape>(base)}},
                   {{"type", "exponential"}, {"params", {{"base", base}}}});
}

WarpMap WarpMap::atan_tan(double nu) {
    if (!(nu > 0.0)) throw MapError("atan_tan map needs nu > 0");
    return WarpMap("atan_tan", {{0.0, 1.0, std::make_shared<AtanTanShape>(nu)}},
                   {{"type", "atan_tan"}, {"params", {{"nu", nu}}}});
}

WarpMap WarpMap::c1_seam(double c) {
    if (!(c > -1.0 && c < 2.0)) throw MapError("c1_seam map needs -1 < c < 2");
    // w = x + c x (1-x)(1-2x): Dw(0+) = Dw(1-) = 1 + c, D2w jumps
    return WarpMap("c1_seam",
                   {{0.0, 1.0, std::make_shared<PolyShape>(0.0, std::vector<double>{0.0, 1.0 + c, -3.0 * c, 2.0 * c})}},
                   {{"type", "c1_seam"}, {"params", {{"c", c}}}});
}

WarpMap WarpMap::periodic_spline(const std::vector<std::pair<double, double>>& knots) {
    check_knots(knots);
    const int K = static_cast<int>(knots.size());
    nlohmann::json src = {{"type", "spline"}, {"knots", knots_json(knots)}};
    if (K == 1) return WarpMap("spline", {{0.0, 1.0, std::make_shared<PolyShape>(0.0, std::vector<double>{0.0, 1.0})}}, src);
    // periodic cubic spline of g(x) = w(x) - x, which vanishes at 0 and 1
    std::vector<double> x(K + 1), g(K + 1), h(K);
    for (int i = 0; i < K; ++i) {
        x[i] = knots[i].first;
        g[i] = knots[i].second - knots[i].first;
    }
    x[K] = 1.0;
    g[K] = g[0];
    for (int i = 0; i < K; ++i) h[i] = x[i + 1] - x[i];
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd rhs(K);
    for (int i = 0; i < K; ++i) {
        const int im = (i - 1 + K) % K, ip = (i + 1) % K;
        const double hm = h[im], hp = h[i];
        A(i, im) += hm;
        A(i, i) += 2.0 * (hm + hp);
        A(i, ip) += hp;
        rhs(i) = 6.0 * ((g[i + 1] - g[i]) / hp - (g[i] - g[(i - 1 + K) % K]) / hm);
    }
    Eigen::VectorXd Mv = A.fullPivLu().solve(rhs);
    std::vector<MapPiece> pieces;
    for (int i = 0; i < K; ++i) {
        const double Mi = Mv(i), Mn = Mv((i + 1) % K);
        const double bi = (g[i + 1] - g[i]) / h[i] - h[i] * (2.0 * Mi + Mn) / 6.0;
        pieces.push_back({x[i], x[i + 1],
                          std::make_shared<PolyShape>(
                              x[i], std::vector<double>{x[i] + g[i], 1.0 + bi, Mi / 2.0, (Mn - Mi) / (6.0 * h[i])})});
    }
    return WarpMap("spline", std::move(pieces), src);
}

WarpMap WarpMap::smoothed_linear(const std::vector<std::pair<double, double>>& knots, double halfwidth) {
    check_knots(knots);
    const int K = static_cast<int>(knots.size());
    if (K < 2) throw MapError("smoothed_linear map needs at least two knots");
    std::vector<double> x(K + 1), y(K + 1), s(K);
    for (int i = 0; i < K; ++i) {
        x[i] = knots[i].first;
        y[i] = knots[i].second;
    }
    x[K] = 1.0;
    y[K] = 1.0;
    double min_gap = 1.0;
    for (int i = 0; i < K; ++i) {
        s[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        min_gap = std::min(min_gap, x[i + 1] - x[i]);
    }
    const double hw = halfwidth;
    if (!(hw > 0.0) || !(2.0 * hw < min_gap)) throw MapError("smoothed_linear halfwidth must be in (0, min_gap/2)");
    // quadratic blend tangent to both segments at x_i -/+ hw, offset so that w(0) = 0
    auto blend = [&](int i, double cx, double cy, double shift) {
        const double sl = s[(i - 1 + K) % K], sr = s[i];
        const double a = 0.5 * (sl + sr), c = (sr - sl) / (4.0 * hw), d = (sr - sl) * hw / 4.0;
        return std::make_shared<PolyShape>(cx, std::vector<double>{cy + d - shift, a, c});
    };
    const double d0 = (s[0] - s[K - 1]) * hw / 4.0;
    std::vector<MapPiece> pieces;
    pieces.push_back({0.0, hw, blend(0, 0.0, 0.0, d0)});
    for (int i = 0; i < K; ++i) {
        const double lo = x[i] + hw, hi = x[i + 1] - hw;
        pieces.push_back({lo, hi, std::make_shared<PolyShape>(x[i], std::vector<double>{y[i] - d0, s[i]})});
        if (i + 1 < K)
            pieces.push_back({hi, x[i + 1] + hw, blend(i + 1, x[i + 1], y[i + 1], d0)});
        else
            pieces.push_back({hi, 1.0, blend(0, 1.0, 1.0, d0)});
    }
    return WarpMap("smoothed_linear", std::move(pieces),
                   {{"type", "smoothed_linear"}, {"knots", knots_json(knots)}, {"params", {{"halfwidth", hw}}}});
}

WarpMap WarpMap::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type")) throw MapError("map spec must be an object with a \"type\" field");
    const std::string type = j.at("type").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    try {
        if (type == "identity") return identity();
        if (type == "exponential") return exponential(params.value("base", 2.0));
        if (type == "atan_tan") return atan_tan(params.value("nu", 2.0));
        if (type == "c1_seam") return c1_seam(params.value("c", 0.5));
        if (type == "spline") return periodic_spline(knots_from_json(j));
        if (type == "smoothed_linear") return smoothed_linear(knots_from_json(j), params.value("halfwidth", 0.05));
    } catch (const nlohmann::json::exception& e) {
        throw MapError(std::string("bad map parameters: ") + e.what());
    }
    throw MapError("unknown map type '" + type + "'");
}

std::vector<double> WarpMap::raw_jet(double f, int order, Side side, int* piece_used) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), f,
                               [](double v, const MapPiece& p) { return v < p.x0; });
    int p = static_cast<int>(it - pieces_.begin()) - 1;
    p = std::clamp(p, 0, static_cast<int>(pieces_.size()) - 1);
    // snap onto a breakpoint within tolerance
    if (p + 1 < static_cast<int>(pieces_.size()) && std::abs(f - pieces_[p + 1].x0) <= kBreakTol) {
        ++p;
        f = pieces_[p].x0;
    }
    const bool at_start = std::abs(f - pieces_[p].x0) <= kBreakTol;
    if (side == Side::left && at_start) {
        if (p == 0) {
            const MapPiece& last = pieces_.back();
            auto d = last.shape->jet(last.x1, order);
            d[0] -= 1.0;
            if (piece_used) *piece_used = static_cast<int>(pieces_.size()) - 1;
            return d;
        }
        if (piece_used) *piece_used = p - 1;
        return pieces_[p - 1].shape->jet(pieces_[p - 1].x1, order);
    }
    if (piece_used) *piece_used = p;
    return pieces_[p].shape->jet(at_start ? pieces_[p].x0 : f, order);
}

const Singularity* WarpMap::singular_at(double x, double tol) const {
    double k;
    const double f = frac_floor(x, &k);
    for (const auto& s : diag_.singularities) {
        double d = std::abs(f - s.xi);
        d = std::min(d, 1.0 - d);
        if (d <= tol) return &s;
    }
    return nullptr;
}

std::vector<double> WarpMap::jet(double x, int order, Side side) const {
    double k;
    const double f = frac_floor(x, &k);
    std::vector<double> d;
    if (side == Side::two_sided) {
        if (const Singularity* s = singular_at(f, kBreakTol); s && order > s->sigma) {
            std::ostringstream os;
            os << "two-sided derivative of order " << s->sigma + 1 << " undefined at singularity xi=" << s->xi
               << " (one-sided jets differ)";
            throw MapError(os.str());
        }
        d = raw_jet(f, order, Side::right, nullptr);
    } else {
        d = raw_jet(f, order, side, nullptr);
    }
    d[0] += k;
    return d;
}

double WarpMap::eval(double x) const { return jet(x, 0, Side::right)[0]; }

double WarpMap::derivative(double x, int order, Side side) const {
    if (order < 1) throw MapError("derivative order must be >= 1");
    if (side == Side::two_sided) {
        if (const Singularity* s = singular_at(x, kBreakTol); s && order > s->sigma) {
            std::ostringstream os;
            os << "two-sided derivative of order " << order << " undefined at singularity xi=" << s->xi;
            throw MapError(os.str());
        }
        side = Side::right;
    }
    return jet(x, order, side)[static_cast<std::size_t>(order)];
}

double WarpMap::sample_weight(double x, double b) const {
    if (b == 0.0) return 1.0;
    if (const Singularity* s = singular_at(x)) return 0.5 * (std::pow(s->dw_right, b) + std::pow(s->dw_left, b));
    return std::pow(derivative(x, 1, Side::right), b);
}

void WarpMap::validate_and_analyse() {
    if (pieces_.empty()) throw MapError("map has no pieces");
    if (pieces_.front().x0 != 0.0 || pieces_.back().x1 != 1.0) throw MapError("pieces must cover [0, 1)");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (!pieces_[i].shape || !(pieces_[i].x1 > pieces_[i].x0)) throw MapError("degenerate map piece");
        if (i + 1 < pieces_.size() && pieces_[i].x1 != pieces_[i + 1].x0) throw MapError("map pieces are not contiguous");
    }
    const double w0 = pieces_.front().shape->value(0.0);
    const double w1 = pieces_.back().shape->value(1.0);
    if (std::abs(w0) > 1e-12) throw MapError("map must satisfy w(0) = 0");
    if (std::abs(w1 - 1.0) > 1e-12) throw MapError("map must satisfy w(1-) = 1");

    double max_dw = -1.0, min_dw = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
        const MapPiece& pc = pieces_[p];
        if (p + 1 < pieces_.size()) {
            const double jump = pc.shape->value(pc.x1) - pieces_[p + 1].shape->value(pc.x1);
            if (std::abs(jump) > 1e-12) throw MapError("map is discontinuous at x=" + std::to_string(pc.x1));
        }
        const int n = 64 + static_cast<int>((pc.x1 - pc.x0) * 4096.0);
        auto dw = [&](double x) { return pc.shape->jet(x, 1)[1]; };
        int best_max = 0, best_min = 0;
        double vmax = -1.0, vmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i) {
            const double x = pc.x0 + (pc.x1 - pc.x0) * i / n;
            const double d = dw(x);
            if (!std::isfinite(d) || !(d > 0.0))
                throw MapError("map is not strictly increasing near x=" + std::to_string(x));
            if (d > vmax) { vmax = d; best_max = i; }
            if (d < vmin) { vmin = d; best_min = i; }
        }
        // golden-section refinement of the sampled extrema
        auto refine = [&](int i, double sign) {
            double a = pc.x0 + (pc.x1 - pc.x0) * std::max(0, i - 1) / n;
            double b = pc.x0 + (pc.x1 - pc.x0) * std::min(n, i + 1) / n;
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = b - g * (b - a), d = a + g * (b - a);
            for (int it = 0; it < 80; ++it) {
                if (sign * dw(c) > sign * dw(d)) b = d; else a = c;
                c = b - g * (b - a);
                d = a + g * (b - a);
            }
            return dw(0.5 * (a + b));
        };
        vmax = std::max(vmax, refine(best_max, 1.0));
        vmin = std::min(vmin, refine(best_min, -1.0));
        if (!(vmin > 0.0)) throw MapError("map is not strictly increasing");
        max_dw = std::max(max_dw, vmax);
        min_dw = std::min(min_dw, vmin);
    }

    diag_ = MapDiagnostics{};
    std::vector<double> breaks{0.0};
    for (std::size_t p = 1; p < pieces_.size(); ++p) breaks.push_back(pieces_[p].x0);
    int sigma = kMaxTestedOrder;
    for (double xb : breaks) {
        auto jl = raw_jet(xb, kMaxTestedOrder, Side::left, nullptr);
        auto jr = raw_jet(xb, kMaxTestedOrder, Side::right, nullptr);
        int differ = -1;
        for (int m = 1; m <= kMaxTestedOrder; ++m) {
            const double scale = std::max({1.0, std::abs(jl[m]), std::abs(jr[m])});
            if (std::abs(jl[m] - jr[m]) > kJetTol * scale) {
                differ = m;
                break;
            }
        }
        if (differ < 0) continue;
        Singularity s;
        s.xi = xb;
        s.sigma = differ - 1;
        s.dw_right = jr[1];
        s.dw_left = jl[1];
        diag_.singularities.push_back(s);
        sigma = std::min(sigma, s.sigma);
        max_dw = std::max({max_dw, jl[1], jr[1]});
        min_dw = std::min({min_dw, jl[1], jr[1]});
    }
    diag_.sigma = sigma;
    diag_.sigma_capped = diag_.singularities.empty();
    diag_.max_dw = max_dw;
    diag_.min_dw = min_dw;
}

MapDiagnostics validate(const WarpMap& map) {
    WarpMap copy(map.name(), map.pieces(), map.source());
    return copy.diagnostics();
}

InverseMap::InverseMap(std::shared_ptr<const WarpMap> map, int grid) : map_(std::move(map)) {
    std::vector<double> xs;
    for (int i = 0; i <= grid; ++i) xs.push_back(static_cast<double>(i) / grid);
    for (const auto& p : map_->pieces()) xs.push_back(p.x0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
        xs_.push_back(x);
        ys_.push_back(x >= 1.0 ? 1.0 : map_->eval(x));
    }
}

double InverseMap::eval(double y) const {
    double k;
    const double g = frac_floor(y, &k);
    auto it = std::upper_bound(ys_.begin(), ys_.end(), g);
    std::size_t j = static_cast<std::size_t>(it - ys_.begin());
    j = std::clamp<std::size_t>(j, 1, ys_.size() - 1) - 1;
    double lo = xs_[j], hi = xs_[j + 1];
    const double ylo = ys_[j], yhi = ys_[j + 1];
    double x = (yhi > ylo) ? lo + (hi - lo) * (g - ylo) / (yhi - ylo) : lo;
    double best_x = x, best_f = std::numeric_limits<double>::infinity();
    for (int it2 = 0; it2 < 200; ++it2) {
        auto d = map_->jet(x, 1, Side::right);
        const double f = d[0] - g;
        if (std::abs(f) < std::abs(best_f)) {
            best_f = f;
            best_x = x;
        }
        if (std::abs(f) <= 1e-16) break;
        if (f > 0.0) hi = x; else lo = x;
        double xn = x - f / d[1];
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
        x = xn;
    }
    if (!(std::abs(best_f) <= kTolerance)) {
        std::ostringstream os;
        os << "inverse map did not converge at y=" << y << " (residual " << best_f << ")";
        throw MapError(os.str());
    }
    return best_x + k;
}

double InverseMap::derivative(double y) const { return 1.0 / map_->derivative(eval(y), 1, Side::right); }

double InverseMap::sample_weight(double y, double b) const {
    if (b == 0.0) return 1.0;
    double k;
    const double g = frac_floor(y, &k);
    for (const auto& s : map_->singularities()) {
        const double eta = map_->eval(s.xi);
        double d = std::abs(g - eta);
        d = std::min(d, 1.0 - d);
        if (d <= 1e-13) return 0.5 * (std::pow(1.0 / s.dw_right, b) + std::pow(1.0 / s.dw_left, b));
    }
    return std::pow(derivative(y), b);
}

}  // namespace tfw
