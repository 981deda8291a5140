#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "alignlab/errors.hpp"
#include "alignlab/needspace.hpp"
#include "alignlab/rng.hpp"

#include <cmath>

using namespace alignlab;

TEST_CASE("sup_norm basics") {
    std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK(sup_norm(zero) == 0.0);

    std::vector<double> mixed{0.2, -0.7, 0.5};
    CHECK(sup_norm(mixed) == doctest::Approx(0.7).epsilon(1e-15));

    std::vector<double> single{-3.25};
    CHECK(sup_norm(single) == 3.25);

    std::vector<double> empty;
    CHECK_THROWS_AS(sup_norm(empty), InvalidInput);

    std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(sup_norm(bad), InvalidInput);
}

TEST_CASE("sup_norm is a norm on seeded random triples") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.next() % 8;
        std::vector<double> a(n), b(n), scaled(n), sum(n);
        double c = rng.uniform(-3.0, 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform(-1.0, 1.0);
            b[i] = rng.uniform(-1.0, 1.0);
            scaled[i] = c * a[i];
            sum[i] = a[i] + b[i];
        }
        // Non-negativity, absolute homogeneity, triangle inequality.
        CHECK(sup_norm(a) >= 0.0);
        CHECK(sup_norm(scaled) == doctest::Approx(std::fabs(c) * sup_norm(a))
                                      .epsilon(1e-12));
        CHECK(sup_norm(sum) <= sup_norm(a) + sup_norm(b) + 1e-12);
    }
}

TEST_CASE("l1_norm") {
    CHECK(l1_norm({{1.0}, {}}) == 1.0);
    CHECK(l1_norm({{0.6, 0.4}, {}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l1_norm({{0.0, 0.0}, {}}) == 0.0); // degenerate, caller's problem
}

TEST_CASE("utility") {
    CHECK(utility({{1.0}, {}}, {0.0, {0.5}}) == 0.5);
    CHECK(utility({{0.5, 0.5}, {}}, {0.0, {1.0, 0.0}}) == 0.5);
    // Full satisfaction recovers the l1 mass of the weights.
    WeightVector w{{0.6, 0.4}, {}};
    CHECK(utility(w, {0.0, {1.0, 1.0}}) == doctest::Approx(l1_norm(w)).epsilon(1e-15));

    CHECK_THROWS_AS(utility({{1.0}, {}}, {0.0, {0.5, 0.5}}), DimensionMismatch);
}

TEST_CASE("utility monotone in any positively weighted coordinate") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng.next() % 6;
        WeightVector w;
        ExperientialState x{0.0, {}};
        for (std::size_t i = 0; i < n; ++i) {
            w.w.push_back(rng.uniform(0.01, 1.0));
            x.sat.push_back(rng.uniform(0.0, 0.9));
        }
        std::size_t i = rng.next() % n;
        ExperientialState raised = x;
        raised.sat[i] += rng.uniform(1e-6, 0.1);
        CHECK(utility(w, raised) > utility(w, x));
    }
}

TEST_CASE("utility_gap_bound worked example") {
    WeightVector w{{0.6, 0.4}, {}};
    ExperientialState x{0.0, {0.6, 0.1}};
    ExperientialState xh{0.0, {0.5, 0.3}}; // difference {0.1, -0.2}
    auto r = utility_gap_bound(w, x, xh);
    CHECK(r.gap == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.holds);

    auto same = utility_gap_bound(w, x, x);
    CHECK(same.gap == 0.0);
    CHECK(same.bound == 0.0);
    CHECK(same.holds);

    ExperientialState wrong_time{1.0, {0.5, 0.3}};
    CHECK_THROWS_AS(utility_gap_bound(w, x, wrong_time), InvalidInput);
    ExperientialState wrong_dim{0.0, {0.5}};
    CHECK_THROWS_AS(utility_gap_bound(w, x, wrong_dim), DimensionMismatch);
}

TEST_CASE("utility_gap_bound holds on 1000 seeded draws") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.next() % 16;
        WeightVector w;
        ExperientialState x{0.0, {}}, xh{0.0, {}};
        for (std::size_t i = 0; i < n; ++i) {
            w.w.push_back(rng.uniform());
            x.sat.push_back(rng.uniform());
            xh.sat.push_back(rng.uniform());
        }
        // Oracle: evaluate both sides of the inequality directly.
        double lhs = 0.0, sup = 0.0, wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lhs += w.w[i] * (x.sat[i] - xh.sat[i]);
            sup = std::max(sup, std::fabs(x.sat[i] - xh.sat[i]));
            wsum += w.w[i];
        }
        auto r = utility_gap_bound(w, x, xh);
        CHECK(r.holds);
        CHECK(r.gap == doctest::Approx(std::fabs(lhs)).epsilon(1e-12));
        CHECK(r.bound == doctest::Approx(wsum * sup).epsilon(1e-12));
    }
}

TEST_CASE("extend_dimensions") {
    WeightVector w{{0.5, 0.5}, {}};
    ExperientialState x{2.0, {0.4, 0.8}};
    double base = utility(w, x);

    SUBCASE("zero-sat append leaves utility unchanged") {
        auto [x2, w2] = extend_dimensions(x, w, {{0.1, 0.0}});
        CHECK(utility(w2, x2) == base);
        CHECK(x2.dims() == 3);
    }
    SUBCASE("positive append adds exactly w*sat") {
        auto [x2, w2] = extend_dimensions(x, w, {{0.1, 0.5}});
        CHECK(utility(w2, x2) == doctest::Approx(base + 0.05).epsilon(1e-15));
    }
    SUBCASE("append then truncate restores the original") {
        auto [x2, w2] = extend_dimensions(x, w, {{0.1, 0.5}, {0.2, 0.3}, {0.3, 0.9}});
        auto [x3, w3] = truncate_dimensions(x2, w2, 3);
        CHECK(x3.sat == x.sat);
        CHECK(w3.w == w.w);
        CHECK(utility(w3, x3) == base);
    }
    SUBCASE("out-of-range satisfaction is rejected") {
        CHECK_THROWS_AS(extend_dimensions(x, w, {{0.1, 1.5}}), InvalidInput);
        CHECK_THROWS_AS(extend_dimensions(x, w, {{0.1, -0.1}}), InvalidInput);
        CHECK_THROWS_AS(extend_dimensions(x, w, {{-0.1, 0.5}}), InvalidInput);
    }
}
