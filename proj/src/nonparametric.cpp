#include "survbench/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "survbench/distributions.hpp"

namespace survbench {

namespace {
constexpr double kZ95 = 1.959963984540054;  // normal 97.5% quantile
}

double StepSurvivalCurve::at(double t) const {
    // right-continuous: value of the last step time <= t
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 1.0;
    return survival[static_cast<std::size_t>(it - times.begin()) - 1];
}

double BaselineHazard::cumulative_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0.0;
    return cumulative[static_cast<std::size_t>(it - times.begin()) - 1];
}

StepSurvivalCurve kaplan_meier(const Eigen::VectorXd& y, const Eigen::VectorXi& delta) {
    const Eigen::Index n = y.size();
    if (n == 0) throw DataError("kaplan_meier: empty sample");

    // events and total observations per distinct time; an event tied with a
    // censoring keeps the censored subject in the risk set at that time
    std::map<double, std::pair<int, int>> counts;  // time -> (events, leavers)
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& c = counts[y(i)];
        c.first += delta(i) == 1;
        c.second += 1;
    }

    StepSurvivalCurve curve;
    double surv = 1.0;
    double varlog = 0.0;  // Greenwood sum d / (n (n - d))
    long at_risk = n;
    for (const auto& [t, c] : counts) {
        const auto [d, leavers] = c;
        if (d > 0) {
            const double nd = static_cast<double>(at_risk);
            surv *= 1.0 - static_cast<double>(d) / nd;
            if (at_risk > d)
                varlog += static_cast<double>(d) / (nd * (nd - d));
            else
                varlog = std::numeric_limits<double>::infinity();
            curve.times.push_back(t);
            curve.survival.push_back(surv);
            if (surv > 0.0 && std::isfinite(varlog)) {
                // log(-log) transform keeps the band inside [0,1]
                const double se = std::sqrt(varlog) / std::abs(std::log(surv));
                curve.lower95.push_back(std::pow(surv, std::exp(kZ95 * se)));
                curve.upper95.push_back(std::pow(surv, std::exp(-kZ95 * se)));
            } else {
                curve.lower95.push_back(0.0);
                curve.upper95.push_back(surv > 0.0 ? surv : 0.0);
            }
        }
        at_risk -= leavers;
    }
    return curve;
}

BaselineHazard breslow_baseline(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                                const Eigen::VectorXd& eta) {
    const Eigen::Index n = y.size();
    if (n == 0) throw DataError("breslow_baseline: empty sample");
    const double shift = eta.maxCoeff();

    // risk-set denominators via a descending sweep
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return y(a) > y(b); });

    std::map<double, double> increments;  // event time -> d / sum_{risk} exp(eta)
    std::map<double, int> events;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (delta(i) == 1) events[y(i)] += 1;
    }

    double risk_sum = 0.0;
    std::size_t pos = 0;
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
        const double t = it->first;
        while (pos < order.size() && y(order[pos]) >= t) {
            risk_sum += std::exp(eta(order[pos]) - shift);
            ++pos;
        }
        increments[t] = static_cast<double>(it->second) / (risk_sum * std::exp(shift));
    }

    BaselineHazard h;
    double cum = 0.0;
    for (const auto& [t, inc] : increments) {
        cum += inc;
        h.times.push_back(t);
        h.cumulative.push_back(cum);
    }
    return h;
}

std::pair<double, double> logrank_test(const Eigen::VectorXd& y_a, const Eigen::VectorXi& delta_a,
                                       const Eigen::VectorXd& y_b, const Eigen::VectorXi& delta_b) {
    if (y_a.size() == 0 || y_b.size() == 0) throw DataError("logrank_test: empty group");

    struct Obs {
        double t;
        int event;
        int group;
    };
    std::vector<Obs> obs;
    obs.reserve(static_cast<std::size_t>(y_a.size() + y_b.size()));
    for (Eigen::Index i = 0; i < y_a.size(); ++i) obs.push_back({y_a(i), delta_a(i), 0});
    for (Eigen::Index i = 0; i < y_b.size(); ++i) obs.push_back({y_b(i), delta_b(i), 1});
    std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) { return a.t < b.t; });

    long n_a = y_a.size(), n_b = y_b.size();
    double observed_a = 0.0, expected_a = 0.0, variance = 0.0;
    std::size_t i = 0;
    while (i < obs.size()) {
        const double t = obs[i].t;
        int d_a = 0, d_total = 0, leave_a = 0, leave_b = 0;
        for (; i < obs.size() && obs[i].t == t; ++i) {
            d_a += obs[i].event == 1 && obs[i].group == 0;
            d_total += obs[i].event == 1;
            (obs[i].group == 0 ? leave_a : leave_b) += 1;
        }
        const double n1 = static_cast<double>(n_a), ntot = static_cast<double>(n_a + n_b);
        if (d_total > 0 && n_a + n_b > 1) {
            observed_a += d_a;
            expected_a += d_total * n1 / ntot;
            variance += d_total * (n1 / ntot) * (1.0 - n1 / ntot) * (ntot - d_total) / (ntot - 1.0);
        }
        n_a -= leave_a;
        n_b -= leave_b;
    }

    if (!(variance > 0.0)) return {0.0, 1.0};
    const double diff = observed_a - expected_a;
    const double stat = diff * diff / variance;
    return {stat, chi_squared_1_upper(stat)};
}

}  // namespace survbench
