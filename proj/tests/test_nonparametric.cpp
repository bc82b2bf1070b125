#include <doctest.h>

#include <cmath>

#include "survbench/nonparametric.hpp"
#include "survbench/rng.hpp"

using namespace survbench;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

Eigen::VectorXi ivec(std::initializer_list<int> v) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("kaplan_meier: three events step down 2/3, 1/3, 0") {
    const auto curve = kaplan_meier(vec({1, 2, 3}), ivec({1, 1, 1}));
    REQUIRE(curve.times == std::vector<double>{1, 2, 3});
    CHECK(std::abs(curve.survival[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(curve.survival[1] - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(curve.survival[2] - 0.0) < 1e-12);
    CHECK(curve.at(0.5) == 1.0);
    CHECK(curve.at(1.0) == curve.survival[0]);  // right-continuous
    CHECK(curve.at(99.0) == 0.0);
}

TEST_CASE("kaplan_meier: censoring reduces the risk set without a step") {
    const auto curve = kaplan_meier(vec({1, 2}), ivec({1, 0}));
    REQUIRE(curve.times == std::vector<double>{1});
    CHECK(curve.survival[0] == doctest::Approx(0.5));
    CHECK(curve.at(100.0) == doctest::Approx(0.5));  // stays at the last value
}

TEST_CASE("kaplan_meier: all censored keeps survival at 1") {
    const auto curve = kaplan_meier(vec({3, 5, 9}), ivec({0, 0, 0}));
    CHECK(curve.times.empty());
    CHECK(curve.at(0.0) == 1.0);
    CHECK(curve.at(10.0) == 1.0);
}

TEST_CASE("kaplan_meier: no censoring equals one minus the ECDF") {
    Rng rng(17);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y(i) = rng.exponential(0.2);
    const auto curve = kaplan_meier(y, Eigen::VectorXi::Ones(40));
    for (double t : {0.1, 1.0, 3.0, 7.0, 20.0}) {
        double above = 0;
        for (int i = 0; i < 40; ++i) above += y(i) > t;
        CHECK(curve.at(t) == doctest::Approx(above / 40.0).epsilon(1e-12));
    }
}

TEST_CASE("kaplan_meier: bands bracket the curve, live in [0,1], collapse at 0") {
    Rng rng(18);
    Eigen::VectorXd y(60);
    Eigen::VectorXi d(60);
    for (int i = 0; i < 60; ++i) {
        y(i) = rng.exponential(0.5);
        d(i) = rng.uniform01() < 0.7 ? 1 : 0;
    }
    const auto curve = kaplan_meier(y, d);
    REQUIRE(curve.has_bands());
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        CHECK(curve.lower95[k] >= 0.0);
        CHECK(curve.upper95[k] <= 1.0);
        CHECK(curve.lower95[k] <= curve.survival[k] + 1e-12);
        CHECK(curve.upper95[k] >= curve.survival[k] - 1e-12);
        if (curve.survival[k] == 0.0) {
            CHECK(curve.lower95[k] == 0.0);
            CHECK(curve.upper95[k] == 0.0);
        }
    }
}

TEST_CASE("breslow_baseline: beta=0 reduces to Nelson-Aalen") {
    const auto h = breslow_baseline(vec({1, 2, 3}), ivec({1, 1, 1}), Eigen::VectorXd::Zero(3));
    REQUIRE(h.times == std::vector<double>{1, 2, 3});
    CHECK(std::abs(h.cumulative[0] - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(h.cumulative[1] - 5.0 / 6.0) < 1e-12);
    CHECK(std::abs(h.cumulative[2] - 11.0 / 6.0) < 1e-12);
    CHECK(h.survival_at(0.5) == 1.0);
    CHECK(h.survival_at(1.5) == doctest::Approx(std::exp(-1.0 / 3.0)));
}

TEST_CASE("breslow_baseline: no events means zero hazard") {
    const auto h = breslow_baseline(vec({1, 2}), ivec({0, 0}), Eigen::VectorXd::Zero(2));
    CHECK(h.times.empty());
    CHECK(h.cumulative_at(5.0) == 0.0);
    CHECK(h.survival_at(5.0) == 1.0);
}

TEST_CASE("breslow_baseline: shifting every linear predictor by c scales by exp(-c)") {
    const auto y = vec({2, 3, 5, 7});
    const auto d = ivec({1, 0, 1, 1});
    const auto eta = vec({0.3, -0.8, 1.1, 0.0});
    const double c = 0.9;
    const auto base = breslow_baseline(y, d, eta);
    const auto shifted = breslow_baseline(y, d, eta + Eigen::VectorXd::Constant(4, c));
    REQUIRE(base.times == shifted.times);
    for (std::size_t k = 0; k < base.times.size(); ++k) {
        CHECK(shifted.cumulative[k] == doctest::Approx(base.cumulative[k] * std::exp(-c)));
    }
}

TEST_CASE("logrank_test: identical groups give statistic 0 and p 1") {
    const auto y = vec({1, 3, 4, 8});
    const auto d = ivec({1, 0, 1, 1});
    const auto [stat, p] = logrank_test(y, d, y, d);
    CHECK(stat == doctest::Approx(0.0));
    CHECK(p == doctest::Approx(1.0));
}

TEST_CASE("logrank_test: fully separated groups are significant") {
    Eigen::VectorXd ya(10), yb(10);
    for (int i = 0; i < 10; ++i) {
        ya(i) = i + 1;        // all events before
        yb(i) = 100 + i;      // any event in group b
    }
    const auto [stat, p] =
        logrank_test(ya, Eigen::VectorXi::Ones(10), yb, Eigen::VectorXi::Ones(10));
    CHECK(p < 0.01);
    CHECK(stat > 6.6);
}

TEST_CASE("logrank_test: six-subject case matches an independent O/E/V tabulation") {
    // group a: (1,event), (4,censored), (6,event); group b: (2,event), (5,event), (9,censored)
    const auto ya = vec({1, 4, 6});
    const auto da = ivec({1, 0, 1});
    const auto yb = vec({2, 5, 9});
    const auto db = ivec({1, 1, 0});

    // test-side tabulation over event times 1, 2, 5, 6
    struct RowCalc {
        double n_a, n_b, d_a, d_b;
    };
    const std::vector<RowCalc> table = {
        {3, 3, 1, 0},  // t=1
        {2, 3, 0, 1},  // t=2
        {1, 2, 0, 1},  // t=5 (a lost its censored subject at 4)
        {1, 1, 1, 0},  // t=6
    };
    double O = 0, E = 0, V = 0;
    for (const auto& r : table) {
        const double n = r.n_a + r.n_b, d = r.d_a + r.d_b;
        O += r.d_a;
        E += d * r.n_a / n;
        if (n > 1) V += d * (r.n_a / n) * (1 - r.n_a / n) * (n - d) / (n - 1);
    }
    const double expected_stat = (O - E) * (O - E) / V;

    const auto [stat, p] = logrank_test(ya, da, yb, db);
    CHECK(stat == doctest::Approx(expected_stat).epsilon(1e-12));
    CHECK(p <= 1.0);
    CHECK(p >= 0.0);
}

TEST_CASE("logrank_test: symmetric under swapping groups; no events gives p 1") {
    Rng rng(21);
    Eigen::VectorXd ya(15), yb(12);
    Eigen::VectorXi da(15), db(12);
    for (int i = 0; i < 15; ++i) {
        ya(i) = rng.exponential(0.3);
        da(i) = rng.uniform01() < 0.8;
    }
    for (int i = 0; i < 12; ++i) {
        yb(i) = rng.exponential(0.6);
        db(i) = rng.uniform01() < 0.8;
    }
    const auto ab = logrank_test(ya, da, yb, db);
    const auto ba = logrank_test(yb, db, ya, da);
    CHECK(ab.first == doctest::Approx(ba.first).epsilon(1e-12));
    CHECK(ab.second == doctest::Approx(ba.second).epsilon(1e-12));

    const auto none = logrank_test(vec({1, 2}), ivec({0, 0}), vec({3}), ivec({0}));
    CHECK(none.first == 0.0);
    CHECK(none.second == 1.0);
}
