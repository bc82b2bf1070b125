#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "survbench/types.hpp"

namespace survbench {

// Right-continuous piecewise-constant survival estimate. The curve is 1
// before the first grid time and keeps its last value afterwards.
struct StepSurvivalCurve {
    std::vector<double> times;     // increasing distinct event times
    std::vector<double> survival;  // non-increasing values in [0,1]
    std::vector<double> lower95;   // empty when no bands were computed
    std::vector<double> upper95;

    double at(double t) const;

    bool has_bands() const { return !lower95.empty(); }
};

struct BaselineHazard {
    std::vector<double> times;
    std::vector<double> cumulative;  // non-decreasing Breslow estimate

    double cumulative_at(double t) const;
    double survival_at(double t) const { return std::exp(-cumulative_at(t)); }
};

// Product-limit estimator with Greenwood 95% bands on the log(-log) scale.
StepSurvivalCurve kaplan_meier(const Eigen::VectorXd& y, const Eigen::VectorXi& delta);

// Breslow cumulative baseline hazard at the given linear predictors
// eta_i = x_i' beta.
BaselineHazard breslow_baseline(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                                const Eigen::VectorXd& eta);

// Two-sample log-rank test; returns (chi-square statistic, p-value).
std::pair<double, double> logrank_test(const Eigen::VectorXd& y_a, const Eigen::VectorXi& delta_a,
                                       const Eigen::VectorXd& y_b, const Eigen::VectorXi& delta_b);

}  // namespace survbench
