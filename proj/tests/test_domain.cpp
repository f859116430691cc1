#include <cmath>

#include "doctest.h"
#include "tfw/domain.hpp"

using namespace tfw;
using doctest::Approx;

TEST_CASE("index set boundaries and shift") {
    auto a = make_index_set(8, 4);
    CHECK(a.z_left == 4);
    CHECK(a.z_right == 4);
    CHECK(a.mu == 0);
    auto b = make_index_set(9, 4);
    CHECK(b.z_left == 4.5);
    CHECK(b.z_right == 4.5);
    CHECK(b.mu == 0);
    auto c = make_index_set(8, 0);
    CHECK(c.z_left == 0);
    CHECK(c.z_right == 8);
    CHECK(c.mu == 1);
    CHECK_THROWS_AS(make_index_set(8, 8), DomainError);
    CHECK_THROWS_AS(make_index_set(8, -1), DomainError);
}

TEST_CASE("index set invariants for all (N, L)") {
    for (int N = 1; N <= 40; ++N)
        for (int L = 0; L < N; ++L) {
            auto s = make_index_set(N, L);
            CHECK(s.z_left + s.z_right == N);
            CHECK(s.mu >= 0.0);
            CHECK(s.mu <= 1.0);
            CHECK(std::max(s.z_left, s.z_right) == Approx((1 + s.mu) * N / 2.0));
            CHECK(std::min(s.z_left, s.z_right) == Approx((1 - s.mu) * N / 2.0));
            CHECK(static_cast<int>(s.z_left - (N % 2) / 2.0) == L);
            CHECK((s.mu == 0) == (L == N / 2 || (N % 2 == 1 && L == (N - 1) / 2)));
        }
}

TEST_CASE("feasibility examples") {
    auto id = WarpMap::identity();
    auto r = check_feasibility(id, tw_spec(33, 67, 0.5));
    CHECK(r.swf_feasible);
    CHECK(r.saf_feasible);
    CHECK(r.seam_J == Approx(67.0 / 33.0));

    auto e = WarpMap::exponential();
    auto r2 = check_feasibility(e, tw_spec(33, 67, 0.5));
    CHECK(r2.global_ok);
    REQUIRE(r2.singularities.size() == 1);
    CHECK(r2.singularities[0].dw_used == Approx(2 * std::log(2.0)));
    CHECK(r2.singularities[0].J == Approx(67.0 / (33.0 * 2 * std::log(2.0))));
    CHECK(r2.saf_feasible);

    auto r3 = check_feasibility(e, tw_spec(33, 35, 0.5));
    CHECK_FALSE(r3.global_ok);
    CHECK_FALSE(r3.swf_feasible);
    CHECK_FALSE(r3.saf_feasible);
    CHECK(r3.to_json()["redundancy"]["pass"] == false);
}

TEST_CASE("feasibility is monotone in M") {
    auto e = WarpMap::exponential();
    bool swf = false, saf = false;
    for (int M = 33; M <= 121; M += 2) {
        auto r = check_feasibility(e, tw_spec(33, M, 0.5));
        if (swf) CHECK(r.swf_feasible);
        if (saf) CHECK(r.saf_feasible);
        swf = r.swf_feasible;
        saf = r.saf_feasible;
        // symmetric sets with max Dw at the seam: the global test implies J > 1
        if (r.global_ok) CHECK(r.singularities[0].pass);
    }
    CHECK(swf);
}

TEST_CASE("tw domain and reversal") {
    auto d = tw_domain(65);
    CHECK(d.set.first() == -32);
    CHECK(d.set.last() == 32);
    CHECK_FALSE(d.resampled);
    auto e = tw_domain(64);
    CHECK(e.set.N == 65);
    CHECK(e.resampled);
    CHECK(tw_domain(1).set.first() == 0);
    CHECK_THROWS_AS(tw_domain(0), DomainError);

    CHECK(reverse_indexing(make_index_set(3, 1)) == std::vector<int>{2, 1, 0});
    CHECK(reverse_indexing(make_index_set(5, 2)) == std::vector<int>{4, 3, 2, 1, 0});
    CHECK_THROWS_AS(reverse_indexing(make_index_set(5, 0)), DomainError);
}

TEST_CASE("even-length resampling keeps band-limited content") {
    // x = cos(2 pi 3 t) + 0.5 cos(pi N t) sampled on N=16; bin 8 split over +-8
    const int N = 16;
    std::vector<double> x(N);
    for (int t = 0; t < N; ++t) x[t] = std::cos(2 * M_PI * 3 * t / N) + 0.5 * std::cos(M_PI * t);
    auto d = tw_domain(N);
    auto y = d.resample(x);
    REQUIRE(y.size() == 17u);
    for (int t = 0; t < 17; ++t) {
        double u = t / 17.0;
        double expect = std::cos(2 * M_PI * 3 * u) + 0.5 * std::cos(M_PI * N * u);
        CHECK(y[t] == Approx(expect).epsilon(1e-12));
    }
}
