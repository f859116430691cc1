#include "tfw/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "tfw/taylor.hpp"

namespace tfw {

namespace {

template <unsigned P>
void gl_fill(std::vector<double>& x, std::vector<double>& w) {
    using G = boost::math::quadrature::gauss<double, P>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(wt[i]);
        } else {
            x.push_back(a[i]);
            w.push_back(wt[i]);
            x.push_back(-a[i]);
            w.push_back(wt[i]);
        }
    }
}

void gl_nodes(int order, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    switch (order) {
        case 10: gl_fill<10>(x, w); break;
        case 20: gl_fill<20>(x, w); break;
        case 30: gl_fill<30>(x, w); break;
        case 40: gl_fill<40>(x, w); break;
        default: throw std::invalid_argument("quadrature order must be 10, 20, 30 or 40");
    }
}

std::complex<double> unit(double turns) {
    const double f = turns - std::floor(turns);
    return {std::cos(2.0 * M_PI * f), std::sin(2.0 * M_PI * f)};
}

}  // namespace

QuadratureRule make_quadrature(const WarpMap& map, double max_m, double max_n, int order, double refine) {
    std::vector<double> gx, gw;
    gl_nodes(order, gx, gw);
    QuadratureRule q;
    q.order = order;
    const double rate = std::abs(max_m) + std::abs(max_n) * map.max_dw();
    for (const auto& p : map.pieces()) {
        const double len = p.x1 - p.x0;
        const int panels = std::max(1, static_cast<int>(std::ceil(refine * (4.0 * rate * len + 2.0))));
        const double h = len / panels;
        for (int i = 0; i < panels; ++i) {
            const double a = p.x0 + i * h;
            for (std::size_t j = 0; j < gx.size(); ++j) {
                q.x.push_back(a + 0.5 * h * (gx[j] + 1.0));
                q.weight.push_back(0.5 * h * gw[j]);
            }
        }
        q.panels += panels;
    }
    return q;
}

std::complex<double> W_entry(const WarpMap& map, int m, int n, double b, int order, double refine) {
    return dense_W(map, {m}, {n}, b, order, refine)(0, 0);
}

Eigen::MatrixXcd dense_W(const WarpMap& map, const std::vector<int>& ms, const std::vector<int>& ns, double b,
                         int order, double refine) {
    int mm = 0, nn = 0;
    for (int m : ms) mm = std::max(mm, std::abs(m));
    for (int n : ns) nn = std::max(nn, std::abs(n));
    const QuadratureRule q = make_quadrature(map, mm, nn, order, refine);
    const Eigen::Index Q = static_cast<Eigen::Index>(q.x.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ms.size()), static_cast<Eigen::Index>(ns.size()));
    const Eigen::Index block = 2048;
    for (Eigen::Index q0 = 0; q0 < Q; q0 += block) {
        const Eigen::Index nb = std::min(block, Q - q0);
        Eigen::MatrixXcd L(static_cast<Eigen::Index>(ms.size()), nb);
        Eigen::MatrixXcd Rm(nb, static_cast<Eigen::Index>(ns.size()));
        for (Eigen::Index j = 0; j < nb; ++j) {
            // nodes are interior to their piece, so one-sided issues never arise
            const double x = q.x[static_cast<std::size_t>(q0 + j)];
            const auto jet = map.jet(x, 1, Side::two_sided);
            const double amp = q.weight[static_cast<std::size_t>(q0 + j)] * std::pow(jet[1], b);
            for (std::size_t r = 0; r < ms.size(); ++r) L(static_cast<Eigen::Index>(r), j) = unit(ms[r] * x);
            for (std::size_t c = 0; c < ns.size(); ++c) Rm(j, static_cast<Eigen::Index>(c)) = amp * unit(-ns[c] * jet[0]);
        }
        out.noalias() += L * Rm;
    }
    return out;
}

std::vector<int> index_list(const IndexSet& s) {
    std::vector<int> v;
    for (int k = s.first(); k <= s.last(); ++k) v.push_back(k);
    return v;
}

std::vector<int> tail_rows(const IndexSet& out, int K_tail) {
    std::vector<int> v;
    const int lim = K_tail * out.N;
    for (int m = -lim; m <= lim; ++m)
        if (!out.contains(m)) v.push_back(m);
    return v;
}

Eigen::MatrixXcd dense_band(const WarpMap& map, const DomainSpec& spec, double b) {
    return dense_W(map, index_list(spec.output), index_list(spec.input), b);
}

TailMatrix dense_E(const WarpMap& map, const DomainSpec& spec, double b, int K_tail) {
    TailMatrix t;
    t.rows = tail_rows(spec.output, K_tail);
    t.E = dense_W(map, t.rows, index_list(spec.input), b);
    return t;
}

Eigen::MatrixXcd fold_tail(const TailMatrix& tail, const IndexSet& out) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(out.N, tail.E.cols());
    for (std::size_t r = 0; r < tail.rows.size(); ++r) {
        const int m = tail.rows[r];
        // fold m back into the band: m - kM for the unique k placing it inside
        const int M = out.N;
        const int pos = ((m + out.L) % M + M) % M;
        A.row(pos) += tail.E.row(static_cast<Eigen::Index>(r));
    }
    return A;
}

Eigen::MatrixXcd dense_A(const WarpMap& map, const DomainSpec& spec, double b, int K_tail) {
    return fold_tail(dense_E(map, spec, b, K_tail), spec.output);
}

std::complex<double> taylor_phi_deriv(const WarpMap& map, double x, std::complex<double> a, double b, int k, Side side) {
    if (k < 0) throw std::invalid_argument("derivative order must be non-negative");
    if (k + 1 > WarpMap::kMaxTestedOrder) throw std::invalid_argument("map jets unavailable at this order");
    using C = std::complex<double>;
    const auto d = map.jet(x, k + 1, side);
    // w(x0 + t) and Dw(x0 + t) as order-k series
    std::vector<double> dw(d.begin(), d.begin() + k + 1), ddw(d.begin() + 1, d.end());
    Jet<double> wj = Jet<double>::from_derivatives(dw);
    Jet<double> dj = Jet<double>::from_derivatives(ddw);
    Jet<double> amp = pow(dj, b);
    Jet<C> wc(k), ac(k);
    for (int i = 0; i <= k; ++i) {
        wc.c[i] = C(i == 0 ? 0.0 : wj.c[i]);
        ac.c[i] = C(amp.c[i]);
    }
    // keep the phase of the constant term exact
    Jet<C> e = exp(wc * a);
    e *= std::exp(a * C(wj.c[0]));
    return (e * ac).derivative(k);
}

}  // namespace tfw
