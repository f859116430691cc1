#include <cmath>
#include <random>

#include <boost/math/special_functions/polygamma.hpp>

#include "doctest.h"
#include "tfw/oracle.hpp"
#include "tfw/saf.hpp"

using namespace tfw;
using doctest::Approx;

namespace {
double opnorm(const Eigen::MatrixXcd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(0);
}

double rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

// symmetric partial sum over 0 < |k| <= K
std::complex<double> brute_periodic(int s, double z, double theta, int K) {
    std::complex<double> acc = 0.0;
    for (int k = K; k >= 1; --k) {
        acc += std::polar(1.0, -2 * M_PI * k * theta) * std::pow(z - k, -s);
        acc += std::polar(1.0, 2 * M_PI * k * theta) * std::pow(z + k, -s);
    }
    return acc;
}

// sum_{k >= 0} (k + q)^{-s}
double hurwitz(int s, double q) {
    double f = 1.0;
    for (int k = 2; k < s; ++k) f *= k;
    return ((s % 2) ? -1.0 : 1.0) * boost::math::polygamma(s - 1, q) / f;
}

// adds the theta = 0 remainder beyond |k| = K
std::complex<double> periodic_reference(int s, double z, double theta, int K) {
    auto acc = brute_periodic(s, z, theta, K);
    if (theta == 0.0 && s >= 2) acc += ((s % 2) ? -1.0 : 1.0) * hurwitz(s, K + 1 - z) + hurwitz(s, K + 1 + z);
    return acc;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

Eigen::MatrixXcd ident(int n) { return Eigen::MatrixXcd::Identity(n, n); }
}  // namespace

TEST_CASE("zeta derivative special values") {
    CHECK(zeta_deriv(0, 0.0) == Approx(0.0));
    CHECK(zeta_deriv(0, 0.5) == Approx(-2.0).epsilon(1e-14));
    CHECK(zeta_deriv(1, 0.0) == Approx(-M_PI * M_PI / 3).epsilon(1e-14));
    CHECK(zeta_deriv(0, -0.5) == Approx(2.0).epsilon(1e-14));
    // odd function: even derivatives vanish at 0
    for (int i = 0; i <= 20; i += 2) CHECK(std::abs(zeta_deriv(i, 0.0)) < 1e-14);
    CHECK_THROWS(zeta_deriv(0, 1.0));
}

TEST_CASE("zeta derivative branches agree") {
    for (int i = 0; i <= 12; ++i)
        for (double z : {-0.9, -0.5, -0.3, -0.1, 0.1, 0.25, 0.5, 0.77, 0.95}) {
            const double cot_branch = zeta_deriv(i, z);
            const double series = ((i % 2) ? -1.0 : 1.0) * factorial(i) * periodic_power_sum(i + 1, z, 0.0).real();
            INFO("i=" << i << " z=" << z);
            CHECK(std::abs(cot_branch - series) <= 1e-12 * std::max(1.0, std::abs(series)));
        }
}

TEST_CASE("periodic power sum against direct summation") {
    for (int s : {2, 3, 5, 9, 20, 40, 64})
        for (double theta : {0.0, 0.2, 0.5, 0.731})
            for (double z : {-0.97, -0.6, -0.5, -0.2, 0.0, 0.3, 0.5, 0.8, 0.99}) {
                const auto got = periodic_power_sum(s, z, theta);
                const auto ref = periodic_reference(s, z, theta, s == 2 ? 200000 : 20000);
                INFO("s=" << s << " theta=" << theta << " z=" << z);
                CHECK(std::abs(got - ref) <= 2e-9 * std::max(1.0, std::abs(ref)));
            }
    // s = 1: symmetric pairs converge slowly when theta != 0
    for (double theta : {0.0, 0.2, 0.5})
        for (double z : {-0.7, 0.0, 0.4}) {
            const auto got = periodic_power_sum(1, z, theta);
            const auto ref = brute_periodic(1, z, theta, 2000000);
            CHECK(std::abs(got - ref) <= 2e-6);
        }
}

TEST_CASE("tail power sums against direct summation") {
    for (double c : {3.0, 16.5})
        for (int m0 : {1, 7, 40})
            for (double delta : {0.0, 0.13, 0.5, -0.31})
                for (int s : {3, 4, 7, 15, 30}) {
                    std::complex<double> ref = 0.0;
                    for (int m = 400000; m >= m0; --m) ref += std::polar(1.0, 2 * M_PI * m * delta) * std::pow(c / m, s);
                    if (delta == 0.0) ref += std::pow(c, s) * hurwitz(s, 400001.0);
                    const auto got = tail_power_sum(s, delta, c, m0);
                    INFO("c=" << c << " m0=" << m0 << " delta=" << delta << " s=" << s);
                    CHECK(std::abs(got - ref) <= 1e-11 * std::max(1.0, std::abs(ref)));
                }
    // s = 2, delta = 0 is c^2 times the trigamma function
    for (int m0 : {1, 5, 30}) {
        const double ref = 9.0 * boost::math::trigamma(static_cast<double>(m0));
        CHECK(tail_power_sum(2, 0.0, 3.0, m0).real() == Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("aliasing basis against direct summation") {
    auto spec = tw_spec(9, 41, 0.5);
    const double h = (1.0 - spec.output.mu) / 2.0;
    for (double theta : {0.0, 0.5}) {
        auto U = aliasing_basis(spec, 6, theta);
        for (int r = 0; r < spec.M(); ++r) {
            const double z = double(spec.output.index(r)) / spec.M();
            for (int i = 1; i < 6; ++i) {
                const auto ref = std::pow(h, i + 1) * periodic_reference(i + 1, z, theta, 200000);
                CHECK(std::abs(U(r, i) - ref) <= 1e-10);
            }
        }
    }
    auto B = build_bases(spec, 6);
    CHECK(rel(B.U.cast<std::complex<double>>(), aliasing_basis(spec, 6, 0.0)) < 1e-15);
    CHECK(B.V(0, 0) == 1.0);
    CHECK(B.tail_rows.size() == size_t(2 * 8 * 41 + 1 - 41));
}

TEST_CASE("factored tail rows match the quadrature oracle") {
    auto e = WarpMap::exponential();
    auto spec = tw_spec(9, 41, 0.5);
    TailFactorization tf(e, spec, 0.5);
    auto ref = dense_E(e, spec, 0.5, 2);
    auto got = tf.E_rows(ref.rows);
    CHECK(rel(got, ref.E) < 1e-9);
    // folding the factored rows reproduces the folded oracle
    auto fold_ref = fold_tail(ref, spec.output);
    auto fold_got = fold_tail(TailMatrix{ref.rows, got}, spec.output);
    CHECK(rel(fold_got, fold_ref) < 1e-9);

    auto seam = WarpMap::c1_seam();
    auto spec2 = tw_spec(9, 45, 1.0);
    TailFactorization ts(seam, spec2, 1.0);
    auto ref2 = dense_E(seam, spec2, 1.0, 2);
    CHECK(rel(ts.E_rows(ref2.rows), ref2.E) < 1e-9);
}

TEST_CASE("aliasing matches a long fold of the factored tail") {
    for (auto [map, b] : {std::pair{WarpMap::exponential(), 0.5}, std::pair{WarpMap::c1_seam(), 1.0}}) {
        auto spec = tw_spec(9, 45, b);
        TailFactorization tf(map, spec, b);
        auto fold = [&](int K) {
            // every in-band row sees k in [-K, K]
            std::vector<int> rows;
            for (int m = -K * 45 - 22; m <= K * 45 + 22; ++m)
                if (!spec.output.contains(m)) rows.push_back(m);
            return Eigen::MatrixXcd(fold_tail(TailMatrix{rows, tf.E_rows(rows)}, spec.output));
        };
        // symmetric partial sums of the 1/m column converge like 1/K; extrapolate
        Eigen::MatrixXcd folded = 2.0 * fold(3000) - fold(1500);
        CHECK(rel(tf.A(), folded) < 1e-6);
    }
}

TEST_CASE("gram blocks reproduce the tail energy") {
    auto seam = WarpMap::c1_seam();
    auto spec = tw_spec(9, 45, 0.5);
    TailFactorization tf(seam, spec, 0.5);
    auto G = tf.gram();
    CHECK(rel(G, G.adjoint()) < 1e-14);
    const int K = 4000;
    std::vector<int> rows;
    for (int m = -K * 45; m <= K * 45; ++m)
        if (!spec.output.contains(m)) rows.push_back(m);
    auto E = tf.E_rows(rows);
    auto H = tf.H();
    CHECK(rel(H.adjoint() * G * H, E.adjoint() * E) < 1e-5);
    CHECK(G.selfadjointView<Eigen::Lower>().toDenseMatrix().ldlt().info() == Eigen::Success);
}

TEST_CASE("identity map has no aliasing") {
    auto id = WarpMap::identity();
    auto spec = tw_spec(9, 21, 0.5);
    auto W = build_W_f(id, spec, 0.5);
    CHECK(rel(W.entries, X_f(id, spec, 0.5).entries) == 0.0);
    auto Wt = build_W_t(id, spec, 0.5);
    CHECK(rel(Wt.entries, X_t(id, spec, 0.5).entries) == 0.0);
}

TEST_CASE("time and frequency warping forms are related by conjugated DFTs") {
    for (auto [map, b] : {std::pair{WarpMap::exponential(), 0.5}, std::pair{WarpMap::c1_seam(), 1.0},
                          std::pair{WarpMap::c1_seam(), 0.0}}) {
        auto spec = tw_spec(17, 51, b);
        auto Wf = build_W_f(map, spec, b).entries;
        auto Wt = build_W_t(map, spec, b).entries;
        Eigen::MatrixXcd ref = dft_matrix(spec.output).adjoint() * Wf.conjugate() * dft_matrix(spec.input);
        CHECK(rel(Wt, ref) < 1e-12);
    }
}

TEST_CASE("fast applier matches the dense SAF operator") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto [map, b] : {std::pair{WarpMap::exponential(), 0.5}, std::pair{WarpMap::c1_seam(), 1.0}}) {
        auto spec = tw_spec(33, 91, b);
        auto W = build_W_t(map, spec, b).entries;
        auto op = W_t_op(map, spec, b);
        Eigen::VectorXcd x(33), y(91);
        for (int i = 0; i < x.size(); ++i) x(i) = {u(rng), u(rng)};
        for (int i = 0; i < y.size(); ++i) y(i) = {u(rng), u(rng)};
        CHECK((tfw::apply(op, x) - W * x).norm() <= 1e-12 * x.norm() * opnorm(W));
        CHECK((tfw::apply_adjoint(op, y) - W.adjoint() * y).norm() <= 1e-12 * y.norm() * opnorm(W));
    }
}

TEST_CASE("removing aliasing improves unitarity and keeps improving with M") {
    auto e = WarpMap::exponential();
    double prev = 1e9;
    for (int M : {67, 91, 131, 181}) {
        auto spec = tw_spec(33, M, 0.5);
        auto W = build_W_t(e, spec, 0.5).entries;
        auto X = X_t(e, spec, 0.5).entries;
        const double ew = opnorm(W.adjoint() * W - ident(33));
        const double ex = opnorm(X.adjoint() * X - ident(33));
        INFO("M=" << M << " eps_saf=" << ew << " eps_swf=" << ex);
        CHECK(ew < ex);
        CHECK(ew < prev);
        prev = ew;
    }
}

TEST_CASE("SAF refuses infeasible domains") {
    auto e = WarpMap::exponential();
    CHECK_THROWS_AS(build_W_t(e, tw_spec(33, 35, 0.5), 0.5), InfeasibleError);
    CHECK_THROWS_AS(build_W_t(e, fw_spec(32, 10, 96, 30, 0.5), 0.5), SwfError);
    try {
        build_W_f(e, tw_spec(33, 41, 0.5), 0.5);
        FAIL("expected refusal");
    } catch (const InfeasibleError& err) {
        CHECK(std::string(err.what()).find("0") != std::string::npos);
    }
}
