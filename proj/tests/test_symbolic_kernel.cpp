#include <cmath>
#include <random>

#include "doctest.h"
#include "tfw/oracle.hpp"
#include "tfw/symbolic_kernel.hpp"

using namespace tfw;
using doctest::Approx;

namespace {
const CoeffTable& table() { return default_coeff_table(); }

// independent partition count by dynamic programming
long partitions(int n) {
    std::vector<long> p(static_cast<std::size_t>(n + 1), 0);
    p[0] = 1;
    for (int part = 1; part <= n; ++part)
        for (int s = part; s <= n; ++s) p[s] += p[s - part];
    return p[n];
}

BKPoly bk(std::vector<std::vector<Rational>> rows) {
    BKPoly p;
    for (auto& r : rows) p.coeff.push_back(PolyQ(r));
    p.trim();
    return p;
}
}  // namespace

TEST_CASE("level enumeration") {
    CHECK(table().level(0).seqs == std::vector<std::vector<int>>{{0}});
    CHECK(table().level(1).seqs == std::vector<std::vector<int>>{{-1, 1}});
    CHECK(table().level(2).seqs == std::vector<std::vector<int>>{{-2, 2, 0}, {-1, 0, 1}});
    CHECK(table().level(3).seqs == std::vector<std::vector<int>>{{-3, 3, 0, 0}, {-2, 1, 1, 0}, {-1, 0, 0, 1}});
    for (int l = 0; l <= table().max_level(); ++l) {
        const auto& lev = table().level(l);
        CHECK(static_cast<long>(lev.seqs.size()) == partitions(l));
        for (std::size_t n = 0; n < lev.seqs.size(); ++n) {
            const auto& p = lev.seqs[n];
            int s = 0;
            for (std::size_t m = 0; m < p.size(); ++m) s += static_cast<int>(m + 1) * p[m];
            CHECK(s == l);
            CHECK(p[0] <= 0);
            for (std::size_t m = 1; m < p.size(); ++m) CHECK(p[m] >= 0);
            if (n > 0) CHECK(lev.seqs[n - 1] < p);
        }
    }
}

TEST_CASE("first gamma polynomial is exact") {
    // 1/2 k^2 + (b - 1/2) k
    auto expect = bk({{0}, {Rational(-1, 2), 1}, {Rational(1, 2)}});
    CHECK(table().level(1).gamma[0].coeff == expect.coeff);
    CHECK(table().level(1).gamma[0].to_string() == "1/2 k^2 + (b - 1/2) k");
    PolyQ g0 = table().level(1).gamma[0].specialize_b(0);
    CHECK(g0 == PolyQ({0, Rational(-1, 2), Rational(1, 2)}));
}

TEST_CASE("level-2 and level-3 tables at b = 0 and b = 1") {
    auto q = [](std::vector<int> c, int den) {
        std::vector<Rational> r;
        for (int v : c) r.emplace_back(v, den);
        return PolyQ(r);
    };
    const auto& l2 = table().level(2).gamma;
    const auto& l3 = table().level(3).gamma;
    CHECK(l2[0].specialize_b(0) == q({0, -6, 11, -6, 1}, 8));
    CHECK(l2[1].specialize_b(0) == q({0, 2, -3, 1}, 6));
    CHECK(l3[0].specialize_b(0) == q({0, -120, 274, -225, 85, -15, 1}, 48));
    CHECK(l3[1].specialize_b(0) == q({0, 24, -50, 35, -10, 1}, 12));
    CHECK(l3[2].specialize_b(0) == q({0, -6, 11, -6, 1}, 24));
    CHECK(l2[0].specialize_b(1) == q({0, 2, -1, -2, 1}, 8));
    CHECK(l2[1].specialize_b(1) == q({0, -1, 0, 1}, 6));
    CHECK(l3[0].specialize_b(1) == q({0, 24, -26, -15, 25, -9, 1}, 48));
    CHECK(l3[1].specialize_b(1) == q({0, -6, 5, 5, -5, 1}, 12));
    CHECK(l3[2].specialize_b(1) == q({0, 2, -1, -2, 1}, 24));
    // symbolic level-2 rows
    Rational h(1, 2);
    auto c21 = bk({{0}, {Rational(-3, 4), Rational(3, 2), -h}, {Rational(11, 8), -2, h}, {Rational(-3, 4), h}, {Rational(1, 8)}});
    auto c22 = bk({{0}, {Rational(1, 3), -h}, {-h, h}, {Rational(1, 6)}});
    CHECK(l2[0].coeff == c21.coeff);
    CHECK(l2[1].coeff == c22.coeff);
}

TEST_CASE("zero structure, shift identity and degree bound up to level 8") {
    for (int l = 1; l <= 8; ++l) {
        const auto& lev = table().level(l);
        for (std::size_t n = 0; n < lev.seqs.size(); ++n) {
            const BKPoly& g = lev.gamma[n];
            CHECK(g.degree_k() <= 2 * l);
            for (const auto& c : g.coeff) (void)c;
            CHECK(g.coeff[0].is_zero());
            PolyQ g0 = g.specialize_b(0), g1 = g.specialize_b(1);
            const int p1 = lev.seqs[n][0];
            CHECK(g0.degree() == l - p1);
            for (int k = 0; k <= l - p1 - 1; ++k) CHECK(g0.eval(Rational(k)) == 0);
            CHECK(g0.eval(Rational(l - p1)) != 0);
            CHECK(g1 == g0.shifted(1));
        }
    }
}

TEST_CASE("antidifference over Q[b] reproduces the worked example") {
    auto in = bk({{0, 1}, {1}});  // b + k
    auto out = antidifference_k(in);
    CHECK(out.coeff == bk({{0}, {Rational(-1, 2), 1}, {Rational(1, 2)}}).coeff);
}

TEST_CASE("alpha values") {
    auto id = WarpMap::identity();
    for (int l = 1; l <= 4; ++l) CHECK(alpha_eval(id, 0.3, Side::two_sided, 6, l, 0.5) == 0.0);
    auto e = WarpMap::exponential();
    for (int k = 0; k <= 5; ++k)
        CHECK(alpha_eval(e, 0.4, Side::two_sided, k, 0, 0.3) == Approx(std::pow(e.derivative(0.4, 1), 0.3)));
    // exponential at 0+, k=3, l=1, b=1/2: (Dw)^{-1/2} D2w (9/2 + 0*3)
    const double L2 = std::log(2.0);
    CHECK(alpha_eval(e, 0.0, Side::right, 3, 1, 0.5) == Approx(std::pow(L2, -0.5) * L2 * L2 * 4.5).epsilon(1e-13));
    // second level against the recursion alpha_{2,2} = b(b-1)(Dw)^{b-2}(D2w)^2 + b(Dw)^{b-1}D3w
    auto s = WarpMap::atan_tan(1.7);
    const double x = 0.21, b = 0.37;
    auto d = s.jet(x, 3, Side::two_sided);
    const double a22 = b * (b - 1) * std::pow(d[1], b - 2) * d[2] * d[2] + b * std::pow(d[1], b - 1) * d[3];
    CHECK(alpha_eval(s, x, Side::two_sided, 2, 2, b) == Approx(a22).epsilon(1e-12));
}

TEST_CASE("derivative expansion matches jet differentiation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.02, 0.98), A(-40.0, 40.0);
    std::vector<WarpMap> maps{WarpMap::exponential(), WarpMap::atan_tan(1.7)};
    for (const auto& w : maps)
        for (double b : {0.0, 0.25, 0.5, 1.0})
            for (int t = 0; t < 20; ++t) {
                const double x = U(rng);
                const std::complex<double> a(A(rng) * 0.1, A(rng));
                const auto d = w.jet(x, 8, Side::two_sided);
                for (int k = 0; k <= 6; ++k) {
                    // D^k phi = e^{aw} sum_l alpha_{k,l} (a Dw)^{k-l}
                    std::complex<double> s = 0.0;
                    for (int l = 0; l <= k; ++l)
                        s += alpha_eval(w, x, Side::two_sided, k, l, b) * std::pow(a * d[1], k - l);
                    s *= std::exp(a * d[0]);
                    const auto ref = taylor_phi_deriv(w, x, a, b, k);
                    CAPTURE(k);
                    CHECK(std::abs(s - ref) <= 1e-9 * std::abs(ref));
                }
            }
}

TEST_CASE("kernel matrix") {
    auto id = WarpMap::identity();
    auto spec = tw_spec(33, 67, 0.5);
    auto S0 = build_kernel_S(id, 0.0, spec, 0.5, 16);
    CHECK(S0.S.cwiseAbs().maxCoeff() == 0.0);

    auto e = WarpMap::exponential();
    auto k = build_kernel_S(e, 0.0, spec, 0.5, 16);
    CHECK(k.R == 16);
    CHECK(k.J_value == Approx(67.0 / (33.0 * 2 * std::log(2.0))));
    for (int i = 0; i < 16; ++i)
        for (int c = i + 1; c < 16; ++c) CHECK(k.S(i, c) == std::complex<double>(0.0));
    auto kd = build_kernel_S(e, 0.0, spec, 0.5);
    CHECK(kd.R == kernel_size(kd.J_value, 1e-12));
    // J = 1.465 needs 72 terms for 1e-12, so the cap applies
    CHECK(kd.R == 64);
    CHECK(kernel_size(kd.J_value, 1e-10) == 61);
    CHECK(std::pow(2.0, -kernel_size(2.0, 1e-12)) < 1e-12);
    CHECK(std::pow(2.0, -(kernel_size(2.0, 1e-12) - 1)) >= 1e-12);

    // b = 0: first column of S vanishes
    auto k0 = build_kernel_S(e, 0.0, spec, 0.0, 16);
    CHECK(k0.S.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(k.S.col(0).cwiseAbs().maxCoeff() > 0.0);

    CHECK_THROWS_AS(build_kernel_S(e, 0.0, tw_spec(33, 43, 0.5), 0.5), KernelError);
}

TEST_CASE("kernel dump json") {
    auto j = table().dump(1, nullptr);
    CHECK(j[1]["sequences"][0]["gamma"] == "1/2 k^2 + (b - 1/2) k");
    Rational zero(0);
    auto j0 = table().dump(2, &zero);
    CHECK(j0[2]["sequences"][1]["gamma"] == "1/6 k^3 - 1/2 k^2 + 1/3 k");
}
