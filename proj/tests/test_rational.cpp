#include "doctest.h"
#include "tfw/rational.hpp"

using namespace tfw;

TEST_CASE("bernoulli numbers") {
    CHECK(bernoulli(0) == 1);
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(3) == 0);
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(12) == Rational(-691, 2730));
    CHECK_THROWS_AS(bernoulli(65), std::out_of_range);
}

TEST_CASE("bernoulli recurrence sum_{j<=n} C(n+1,j) B_j = 0") {
    for (int n = 1; n <= 40; ++n) {
        Rational s = 0;
        for (int j = 0; j <= n; ++j) s += binomial(n + 1, j) * bernoulli(j);
        CHECK(s == 0);
    }
}

TEST_CASE("antidifference examples") {
    // constant 1 -> k
    CHECK(antidifference(PolyQ::constant(1)) == PolyQ::monomial(1));
    // k^2 -> (2k^3 - 3k^2 + k)/6
    PolyQ expect({0, Rational(1, 6), Rational(-1, 2), Rational(1, 3)});
    CHECK(antidifference(PolyQ::monomial(2)) == expect);
    // [b, 1] at b = 0 and b = 3: sum_{j<k}(b + j) = bk + (k^2-k)/2
    for (int b : {0, 3}) {
        PolyQ in({Rational(b), Rational(1)});
        PolyQ out({0, Rational(b) - Rational(1, 2), Rational(1, 2)});
        CHECK(antidifference(in) == out);
    }
}

TEST_CASE("antidifference matches direct summation for random polynomials") {
    for (int deg = 0; deg <= 9; ++deg) {
        std::vector<Rational> c;
        for (int i = 0; i <= deg; ++i) c.emplace_back((i * 7 + deg * 3) % 11 - 5, 1 + (i + deg) % 4);
        PolyQ p(c);
        PolyQ q = antidifference(p);
        CHECK(q.eval(Rational(0)) == 0);
        Rational acc = 0;
        for (int k = 0; k <= 10; ++k) {
            CHECK(q.eval(Rational(k)) == acc);
            acc += p.eval(Rational(k));
        }
    }
}

TEST_CASE("polynomial shift and formatting") {
    PolyQ p({0, -1, 1});  // k^2 - k
    PolyQ s = p.shifted(1);  // k^2 + k
    CHECK(s == PolyQ({0, 1, 1}));
    CHECK(PolyQ({0, Rational(-1, 2), Rational(1, 2)}).to_string("k") == "1/2 k^2 - 1/2 k");
    CHECK(rational_string(Rational(-3, 4)) == "-3/4");
}
