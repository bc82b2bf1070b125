#include "survbench/stats_tests.hpp"

#include <algorithm>
#include <cmath>

#include "survbench/data.hpp"
#include "survbench/distributions.hpp"
#include "survbench/nonparametric.hpp"

namespace survbench {

namespace {

using u128 = unsigned __int128;

// C(n, k) exactly; safe for n <= 60.
u128 binomial_u128(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (long long i = 1; i <= k; ++i) {
        r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    }
    return r;
}

double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double fisher_exact_small(long long a, long long r1, long long r2, long long c1) {
    // numerators share the denominator C(N, c1), so table comparisons and the
    // final tail sum are exact integer arithmetic
    const long long x_lo = std::max(0LL, c1 - r2);
    const long long x_hi = std::min(r1, c1);
    const u128 w_obs = binomial_u128(r1, a) * binomial_u128(r2, c1 - a);
    u128 tail = 0, total = 0;
    for (long long x = x_lo; x <= x_hi; ++x) {
        const u128 w = binomial_u128(r1, x) * binomial_u128(r2, c1 - x);
        total += w;
        if (w <= w_obs) tail += w;
    }
    return static_cast<double>(tail) / static_cast<double>(total);
}

double fisher_exact_large(long long a, long long r1, long long r2, long long c1) {
    const long long x_lo = std::max(0LL, c1 - r2);
    const long long x_hi = std::min(r1, c1);
    auto log_w = [&](long long x) {
        return log_binomial(static_cast<double>(r1), static_cast<double>(x)) +
               log_binomial(static_cast<double>(r2), static_cast<double>(c1 - x));
    };
    const double log_obs = log_w(a);
    const double log_total = log_binomial(static_cast<double>(r1 + r2), static_cast<double>(c1));
    double p = 0.0;
    for (long long x = x_lo; x <= x_hi; ++x) {
        const double lw = log_w(x);
        if (lw <= log_obs + 1e-7) p += std::exp(lw - log_total);
    }
    return std::min(p, 1.0);
}

}  // namespace

double fisher_exact(long long a, long long b, long long c, long long d) {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw DataError("fisher_exact: negative count");
    const long long r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 1.0;
    if (r1 + r2 <= 60) return fisher_exact_small(a, r1, r2, c1);
    return fisher_exact_large(a, r1, r2, c1);
}

double wilcoxon_rank_sum(const std::vector<double>& sample_a,
                         const std::vector<double>& sample_b) {
    const std::size_t na = sample_a.size(), nb = sample_b.size();
    if (na == 0 || nb == 0) throw DataError("wilcoxon_rank_sum: empty sample");
    const std::size_t n = na + nb;

    struct Entry {
        double v;
        int from_a;
    };
    std::vector<Entry> all;
    all.reserve(n);
    for (double v : sample_a) all.push_back({v, 1});
    for (double v : sample_b) all.push_back({v, 0});
    std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return x.v < y.v; });

    // midranks and the tie correction sum(t^3 - t)
    double rank_sum_a = 0.0, tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && all[j].v == all[i].v) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].from_a) rank_sum_a += midrank;
        }
        tie_sum += t * t * t - t;
        i = j;
    }

    const double dn = static_cast<double>(n), dna = static_cast<double>(na),
                 dnb = static_cast<double>(nb);
    const double mean = dna * (dn + 1.0) / 2.0;
    const double var =
        dna * dnb / 12.0 * ((dn + 1.0) - tie_sum / (dn * (dn - 1.0)));
    if (!(var > 0.0)) return 1.0;  // every value identical

    const double z = (std::max(std::abs(rank_sum_a - mean) - 0.5, 0.0)) / std::sqrt(var);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
}

BonferroniResult bonferroni(const std::vector<double>& p_values, double alpha) {
    const double m = static_cast<double>(p_values.size());
    BonferroniResult r;
    r.corrected.reserve(p_values.size());
    r.reject.reserve(p_values.size());
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw DataError("bonferroni: p-value outside [0,1]");
        const double corrected = std::min(1.0, m * p);
        r.corrected.push_back(corrected);
        r.reject.push_back(corrected < alpha);
    }
    return r;
}

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fisher (binary) or Wilcoxon (continuous) across a 0/1 grouping; entries
// with group < 0 are left out.
double two_group_p(const Eigen::VectorXd& values, ColumnKind kind, const std::vector<int>& groups) {
    if (kind == ColumnKind::binary) {
        long long counts[2][2] = {{0, 0}, {0, 0}};
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            const int g = groups[static_cast<std::size_t>(i)];
            if (g < 0) continue;
            counts[g][values(i) == 1.0 ? 1 : 0] += 1;
        }
        return fisher_exact(counts[0][0], counts[0][1], counts[1][0], counts[1][1]);
    }
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const int g = groups[static_cast<std::size_t>(i)];
        if (g == 0) a.push_back(values(i));
        else if (g == 1) b.push_back(values(i));
    }
    return wilcoxon_rank_sum(a, b);
}

void check_grouping(const std::vector<int>& groups, const char* name, Eigen::Index n) {
    if (static_cast<Eigen::Index>(groups.size()) != n)
        throw DataError(std::string("group_test_battery: ") + name + " length mismatch");
    long n0 = 0, n1 = 0;
    for (int g : groups) {
        n0 += g == 0;
        n1 += g == 1;
    }
    if (n0 == 0 || n1 == 0)
        throw DataError(std::string("group_test_battery: ") + name + " needs two nonempty groups");
}

void correct_family(std::vector<CovariateTestRow>& rows, double CovariateTestRow::* raw,
                    double CovariateTestRow::* corrected) {
    long m = 0;
    for (const auto& r : rows) m += !std::isnan(r.*raw);
    for (auto& r : rows) {
        r.*corrected = std::isnan(r.*raw) ? kNaN
                                          : std::min(1.0, static_cast<double>(m) * (r.*raw));
    }
}

}  // namespace

TestBattery group_test_battery(const Dataset& data, const std::vector<int>& cmix_groups,
                               const std::vector<int>& epsilon_groups) {
    const Eigen::Index n = data.n();
    check_grouping(cmix_groups, "risk grouping", n);
    check_grouping(epsilon_groups, "epsilon grouping", n);

    TestBattery battery;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        CovariateTestRow row;
        row.name = data.names[j];
        row.kind = data.kinds[j];
        const Eigen::VectorXd col = data.X.col(j);

        const bool constant = (col.array() == col(0)).all();
        if (constant) {
            row.skipped = true;
            row.cmix_p = row.epsilon_p = row.logrank_p = kNaN;
            battery.rows.push_back(row);
            continue;
        }

        row.cmix_p = two_group_p(col, row.kind, cmix_groups);
        row.epsilon_p = two_group_p(col, row.kind, epsilon_groups);

        // covariate-driven grouping for the log-rank test
        double split_above;
        if (row.kind == ColumnKind::binary) {
            split_above = 0.5;
        } else {
            std::vector<double> vals(col.data(), col.data() + col.size());
            split_above = median(std::move(vals));
        }
        std::vector<int> lo_idx, hi_idx;
        for (Eigen::Index i = 0; i < n; ++i) {
            (col(i) > split_above ? hi_idx : lo_idx).push_back(static_cast<int>(i));
        }
        if (lo_idx.empty() || hi_idx.empty()) {
            row.logrank_p = kNaN;
        } else {
            auto gather = [&](const std::vector<int>& idx) {
                Eigen::VectorXd yy(static_cast<Eigen::Index>(idx.size()));
                Eigen::VectorXi dd(static_cast<Eigen::Index>(idx.size()));
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    yy(static_cast<Eigen::Index>(k)) = data.y(idx[k]);
                    dd(static_cast<Eigen::Index>(k)) = data.delta(idx[k]);
                }
                return std::make_pair(yy, dd);
            };
            const auto [ya, da] = gather(lo_idx);
            const auto [yb, db] = gather(hi_idx);
            row.logrank_p = logrank_test(ya, da, yb, db).second;
        }
        battery.rows.push_back(row);
    }

    correct_family(battery.rows, &CovariateTestRow::cmix_p, &CovariateTestRow::cmix_p_corrected);
    correct_family(battery.rows, &CovariateTestRow::epsilon_p,
                   &CovariateTestRow::epsilon_p_corrected);
    correct_family(battery.rows, &CovariateTestRow::logrank_p,
                   &CovariateTestRow::logrank_p_corrected);

    // per-group summaries over the model-risk grouping
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        for (int g = 0; g <= 1; ++g) {
            GroupSummaryRow s;
            s.covariate = data.names[j];
            s.kind = data.kinds[j];
            s.group = g;
            std::vector<double> vals;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (cmix_groups[static_cast<std::size_t>(i)] == g) vals.push_back(data.X(i, j));
            }
            s.count = static_cast<int>(vals.size());
            if (s.kind == ColumnKind::binary) {
                double ones = 0;
                for (double v : vals) ones += v == 1.0;
                s.proportion = ones / static_cast<double>(vals.size());
                s.min = s.q1 = s.median = s.q3 = s.max = kNaN;
            } else {
                s.proportion = kNaN;
                s.min = *std::min_element(vals.begin(), vals.end());
                s.max = *std::max_element(vals.begin(), vals.end());
                s.q1 = quantile(vals, 0.25);
                s.median = quantile(vals, 0.5);
                s.q3 = quantile(vals, 0.75);
            }
            battery.summaries.push_back(s);
        }
    }
    return battery;
}

}  // namespace survbench
