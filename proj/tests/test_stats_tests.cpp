#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "survbench/rng.hpp"
#include "survbench/stats_tests.hpp"
#include "survbench/synthetic.hpp"

using namespace survbench;

namespace {

// rational-arithmetic reference: integer tail sum over the shared denominator
double fisher_oracle(long long a, long long b, long long c, long long d) {
    const long long r1 = a + b, r2 = c + d, c1 = a + c;
    if (r1 == 0 || r2 == 0 || c1 == 0 || b + d == 0) return 1.0;
    auto binom = [](long long n, long long k) {
        if (k < 0 || k > n) return static_cast<unsigned __int128>(0);
        unsigned __int128 r = 1;
        for (long long i = 0; i < k; ++i) r = r * static_cast<unsigned __int128>(n - i) / (i + 1);
        return r;
    };
    const auto w_obs = binom(r1, a) * binom(r2, c1 - a);
    unsigned __int128 tail = 0, total = 0;
    for (long long x = std::max(0LL, c1 - r2); x <= std::min(r1, c1); ++x) {
        const auto w = binom(r1, x) * binom(r2, c1 - x);
        total += w;
        if (w <= w_obs) tail += w;
    }
    return static_cast<double>(tail) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("fisher_exact: 34/70 on the [[3,1],[1,3]] table") {
    CHECK(fisher_exact(3, 1, 1, 3) == doctest::Approx(34.0 / 70.0).epsilon(1e-15));
}

TEST_CASE("fisher_exact: identical rows give p 1; zero margins give p 1") {
    CHECK(fisher_exact(4, 2, 4, 2) == 1.0);
    CHECK(fisher_exact(0, 0, 3, 5) == 1.0);
    CHECK(fisher_exact(3, 0, 5, 0) == 1.0);
    CHECK_THROWS_AS(fisher_exact(-1, 1, 1, 1), DataError);
}

TEST_CASE("fisher_exact: exact match with enumeration on a spread of small tables") {
    for (long long a = 0; a <= 8; ++a) {
        for (long long b = 0; b <= 8; b += 2) {
            for (long long c = 0; c <= 8; c += 3) {
                for (long long d = 0; d <= 8; ++d) {
                    CHECK(fisher_exact(a, b, c, d) == fisher_oracle(a, b, c, d));
                }
            }
        }
    }
}

TEST_CASE("fisher_exact: log-space path agrees with the exact path near the size cutoff") {
    // compare tables around N=60 against the rational oracle
    CHECK(fisher_exact(20, 15, 10, 20) == doctest::Approx(fisher_oracle(20, 15, 10, 20)));
    CHECK(fisher_exact(25, 10, 15, 20) == doctest::Approx(fisher_oracle(25, 10, 15, 20)));
    CHECK(fisher_exact(30, 12, 9, 20) ==
          doctest::Approx(fisher_oracle(30, 12, 9, 20)).epsilon(1e-9));
}

TEST_CASE("wilcoxon_rank_sum: small-sample approximation near the exact permutation value") {
    // exact two-sided p over the C(4,2) splits is 1/3
    const double p = wilcoxon_rank_sum({1.0, 2.0}, {3.0, 4.0});
    CHECK(std::abs(p - 1.0 / 3.0) < 0.15);

    // enumeration cross-check of the exact value: ranks equal values here,
    // so a split's statistic is just the sum of the two chosen ranks
    const std::vector<double> ranks = {1, 2, 3, 4};
    int more_extreme = 0, total = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const double w = ranks[static_cast<std::size_t>(i)] + ranks[static_cast<std::size_t>(j)];
            total += 1;
            if (std::abs(w - 5.0) >= std::abs(3.0 - 5.0)) more_extreme += 1;
        }
    }
    CHECK(static_cast<double>(more_extreme) / total == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("wilcoxon_rank_sum: identical samples give p near 1; empty sample errors") {
    const std::vector<double> a = {3.0, 1.0, 4.0, 1.0, 5.0};
    CHECK(wilcoxon_rank_sum(a, a) >= 0.99);
    CHECK(wilcoxon_rank_sum({2.0, 2.0}, {2.0, 2.0, 2.0}) == 1.0);
    CHECK_THROWS_AS(wilcoxon_rank_sum({}, {1.0}), DataError);
}

TEST_CASE("wilcoxon_rank_sum: large shift is detected in at least 9 of 10 seeds") {
    int detected = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        std::vector<double> a, b;
        for (int i = 0; i < 50; ++i) {
            a.push_back(rng.normal());
            b.push_back(3.0 + rng.normal());
        }
        detected += wilcoxon_rank_sum(a, b) < 1e-6;
    }
    CHECK(detected >= 9);
}

TEST_CASE("bonferroni: examples") {
    const auto r = bonferroni({0.01, 0.2}, 0.05);
    CHECK(r.corrected == std::vector<double>{0.02, 0.4});
    CHECK(r.reject == std::vector<bool>{true, false});

    const auto single = bonferroni({0.03}, 0.05);
    CHECK(single.corrected == std::vector<double>{0.03});

    CHECK(bonferroni({0.9, 0.9, 0.9, 0.9, 0.9}, 0.05).corrected[0] == 1.0);
    CHECK_THROWS_AS(bonferroni({1.5}, 0.05), DataError);
}

namespace {

Dataset battery_dataset(int n, int d, Rng& rng) {
    Dataset data;
    data.X.resize(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) data.X(i, j) = rng.normal();
    }
    data.y.resize(n);
    data.delta.resize(n);
    for (int i = 0; i < n; ++i) {
        data.y(i) = rng.exponential(0.1);
        data.delta(i) = rng.uniform01() < 0.7;
    }
    for (int j = 0; j < d; ++j) {
        data.names.push_back("v" + std::to_string(j));
        data.kinds.push_back(ColumnKind::continuous);
    }
    return data;
}

}  // namespace

TEST_CASE("group_test_battery: a covariate identical across groups is insignificant") {
    Rng rng(41);
    Dataset data = battery_dataset(80, 3, rng);
    std::vector<int> groups(80), eps_groups(80);
    for (int i = 0; i < 80; ++i) {
        groups[static_cast<std::size_t>(i)] = i % 2;
        eps_groups[static_cast<std::size_t>(i)] = (i / 2) % 2;
    }
    // make column 0 exactly group-independent
    for (int i = 0; i < 80; ++i) data.X(i, 0) = static_cast<double>((i / 2) % 5);

    const auto battery = group_test_battery(data, groups, eps_groups);
    CHECK(battery.rows[0].cmix_p > 0.9);
    CHECK(battery.rows[0].cmix_p_corrected >= battery.rows[0].cmix_p);
}

TEST_CASE("group_test_battery: the grouping indicator itself attains the smallest Fisher p") {
    Rng rng(43);
    Dataset data = battery_dataset(60, 4, rng);
    std::vector<int> groups(60), eps_groups(60);
    for (int i = 0; i < 60; ++i) {
        groups[static_cast<std::size_t>(i)] = i < 30 ? 0 : 1;
        eps_groups[static_cast<std::size_t>(i)] = i % 2;
    }
    // column 0 equals the grouping indicator
    for (int i = 0; i < 60; ++i) data.X(i, 0) = groups[static_cast<std::size_t>(i)];
    data.kinds[0] = ColumnKind::binary;

    const auto battery = group_test_battery(data, groups, eps_groups);
    for (std::size_t j = 1; j < battery.rows.size(); ++j) {
        CHECK(battery.rows[0].cmix_p <= battery.rows[j].cmix_p);
    }
}

TEST_CASE("group_test_battery: constant covariate flagged and skipped") {
    Rng rng(44);
    Dataset data = battery_dataset(40, 2, rng);
    data.X.col(1).setConstant(3.0);
    std::vector<int> groups(40), eps_groups(40);
    for (int i = 0; i < 40; ++i) {
        groups[static_cast<std::size_t>(i)] = i % 2;
        eps_groups[static_cast<std::size_t>(i)] = i < 20 ? (i % 2) : -1;
    }
    const auto battery = group_test_battery(data, groups, eps_groups);
    CHECK(battery.rows[1].skipped);
    CHECK(std::isnan(battery.rows[1].cmix_p));
    CHECK_FALSE(battery.rows[0].skipped);

    // Bonferroni count uses only the tested covariate
    CHECK(battery.rows[0].cmix_p_corrected == doctest::Approx(std::min(1.0, battery.rows[0].cmix_p)));
}

TEST_CASE("group_test_battery: summaries hold quartiles or proportions per risk group") {
    Rng rng(45);
    Dataset data = battery_dataset(50, 2, rng);
    for (int i = 0; i < 50; ++i) data.X(i, 1) = i % 3 == 0 ? 1.0 : 0.0;
    data.kinds[1] = ColumnKind::binary;
    std::vector<int> groups(50), eps_groups(50);
    for (int i = 0; i < 50; ++i) {
        groups[static_cast<std::size_t>(i)] = i % 2;
        eps_groups[static_cast<std::size_t>(i)] = i % 2;
    }
    const auto battery = group_test_battery(data, groups, eps_groups);
    REQUIRE(battery.summaries.size() == 4);  // 2 covariates x 2 groups
    const auto& cont = battery.summaries[0];
    CHECK(cont.kind == ColumnKind::continuous);
    CHECK(cont.min <= cont.q1);
    CHECK(cont.q1 <= cont.median);
    CHECK(cont.median <= cont.q3);
    CHECK(cont.q3 <= cont.max);
    CHECK(std::isnan(cont.proportion));
    const auto& bin = battery.summaries[2];
    CHECK(bin.kind == ColumnKind::binary);
    CHECK(bin.proportion >= 0.0);
    CHECK(bin.proportion <= 1.0);
    CHECK(std::isnan(bin.median));
}

TEST_CASE("group_test_battery: the driving covariate wins the corrected cmix column") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthConfig cfg;
        cfg.n = 250;
        cfg.d = 8;
        cfg.sparsity = 1;  // only x1 drives the latent grouping
        cfg.seed = seed;
        const SynthData synth = synth_generate(cfg);

        std::vector<int> groups(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i)
            groups[static_cast<std::size_t>(i)] = synth.latent_group[static_cast<std::size_t>(i)];
        std::vector<int> eps_groups(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i)
            eps_groups[static_cast<std::size_t>(i)] = synth.data.y(i) <= 10.0 ? 1 : 0;

        const auto battery = group_test_battery(synth.data, groups, eps_groups);
        bool smallest = true;
        for (std::size_t j = 1; j < battery.rows.size(); ++j) {
            if (battery.rows[j].cmix_p_corrected < battery.rows[0].cmix_p_corrected)
                smallest = false;
        }
        wins += smallest;
    }
    CHECK(wins >= 8);
}

TEST_CASE("group_test_battery: groupings must have two nonempty groups") {
    Rng rng(46);
    Dataset data = battery_dataset(10, 2, rng);
    std::vector<int> ok(10, 0), bad(10, 1);
    for (int i = 0; i < 5; ++i) ok[static_cast<std::size_t>(i)] = 1;
    CHECK_THROWS_AS(group_test_battery(data, bad, ok), DataError);
    CHECK_THROWS_AS(group_test_battery(data, ok, bad), DataError);
}
