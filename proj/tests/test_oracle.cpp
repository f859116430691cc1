#include <cmath>

#include "doctest.h"
#include "tfw/oracle.hpp"

using namespace tfw;
using doctest::Approx;

TEST_CASE("trivial entries") {
    auto id = WarpMap::identity();
    for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) CHECK(std::abs(W_entry(id, m, n, 0.5) - (m == n ? 1.0 : 0.0)) <= 1e-13);
    for (const auto& w : {WarpMap::exponential(), WarpMap::c1_seam(0.5), WarpMap::atan_tan(1.7)}) {
        CHECK(std::abs(W_entry(w, 0, 0, 1.0) - 1.0) <= 1e-13);
        CHECK(std::abs(W_entry(w, 0, 0, 0.0) - 1.0) <= 1e-13);
    }
}

TEST_CASE("closed form entry for the exponential map") {
    // b = 1, n = 1: int_0^1 Dw e^{j2pi(mx - w)} dx; m = 0 gives int_0^1 e^{-j2pi w} dw = 0
    auto e = WarpMap::exponential();
    CHECK(std::abs(W_entry(e, 0, 1, 1.0)) <= 1e-13);
    CHECK(std::abs(W_entry(e, 0, 3, 1.0)) <= 1e-13);
}

TEST_CASE("quadrature self-consistency") {
    auto e = WarpMap::exponential();
    for (auto [m, n] : {std::pair{5, 3}, {-40, 16}, {120, -16}, {0, 0}}) {
        auto a = W_entry(e, m, n, 0.5, 20, 1.0);
        auto b = W_entry(e, m, n, 0.5, 40, 2.0);
        CHECK(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("column energy of the infinite operator") {
    auto e = WarpMap::exponential();
    auto spec = tw_spec(17, 35, 0.5);
    std::vector<int> ms;
    for (int m = -8 * 35; m <= 8 * 35; ++m) ms.push_back(m);
    auto W = dense_W(e, ms, {-3, 0, 4}, 0.5);
    for (int c = 0; c < 3; ++c) CHECK(W.col(c).squaredNorm() == Approx(1.0).epsilon(2e-3));
    // smooth map: much tighter
    auto s = WarpMap::atan_tan(1.5);
    auto Ws = dense_W(s, ms, {-3, 0, 4}, 0.5);
    for (int c = 0; c < 3; ++c) CHECK(Ws.col(c).squaredNorm() == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("adjoint law between w and its inverse") {
    // the operator for v with exponent b has entries conj(W_w(n, m)) with exponent 1-b
    auto w = std::make_shared<WarpMap>(WarpMap::atan_tan(1.5));
    // v is again an atan-tan map with 1/nu
    auto v = WarpMap::atan_tan(1.0 / 1.5);
    for (double b : {0.5, 0.0, 0.3})
        for (auto [m, n] : {std::pair{2, 1}, {-3, 4}, {0, 5}, {7, -2}}) {
            auto a = W_entry(v, m, n, b);
            auto c = std::conj(W_entry(*w, n, m, 1.0 - b));
            CHECK(std::abs(a - c) <= 1e-10);
        }
}

TEST_CASE("tail folding and row decay") {
    auto e = WarpMap::exponential();
    auto spec = tw_spec(9, 19, 0.5);
    auto t = dense_E(e, spec, 0.5, 8);
    CHECK(t.rows.size() == static_cast<std::size_t>(2 * 8 * 19 + 1 - 19));
    auto A = fold_tail(t, spec.output);
    CHECK(A.rows() == 19);
    // rows decay like 1/m for b = 1/2 and like 1/m^2 for b = 0
    auto slope = [&](double b) {
        auto tb = dense_E(e, spec, b, 8);
        std::vector<double> lx, ly;
        for (std::size_t r = 0; r < tb.rows.size(); ++r)
            if (tb.rows[r] >= 40) {
                lx.push_back(std::log(tb.rows[r]));
                ly.push_back(std::log(tb.E.row(static_cast<Eigen::Index>(r)).norm()));
            }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= lx.size();
        my /= ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
        return sxy / sxx;
    };
    CHECK(slope(0.5) == Approx(-1.0).epsilon(0.05));
    CHECK(slope(0.0) == Approx(-2.0).epsilon(0.05));
}

TEST_CASE("jet differentiation of phi") {
    auto e = WarpMap::exponential();
    const double x = 0.3, b = 0.5;
    const std::complex<double> a(0.0, -2 * M_PI * 3);
    const auto d = e.jet(x, 3, Side::two_sided);
    auto phi = std::exp(a * d[0]) * std::pow(d[1], b);
    CHECK(std::abs(taylor_phi_deriv(e, x, a, b, 0) - phi) <= 1e-14);
    // first derivative: phi (a Dw + b D2w / Dw)
    auto d1 = phi * (a * d[1] + b * d[2] / d[1]);
    CHECK(std::abs(taylor_phi_deriv(e, x, a, b, 1) - d1) <= 1e-12 * std::abs(d1));
}
