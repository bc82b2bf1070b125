#pragma once

#include <Eigen/Core>

#include "survbench/nonparametric.hpp"
#include "survbench/optim.hpp"
#include "survbench/types.hpp"

namespace survbench {

struct CoxModel {
    Eigen::VectorXd beta;
    BaselineHazard baseline;
    PenaltyConfig penalty;
};

// Negative log partial likelihood with Breslow tie handling, over beta alone
// (no intercept; the partial likelihood cannot identify one).
SmoothObjective cox_partial_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const Eigen::VectorXi& delta);

// Elastic-Net penalized Cox proportional hazards fit; baseline hazard by the
// Breslow estimator at the fitted coefficients.
CoxModel cox_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                 const PenaltyConfig& penalty);

inline double cox_marker(const CoxModel& model, const Eigen::VectorXd& x) {
    return std::exp(model.beta.dot(x));
}

// S0(t)^exp(x' beta) with S0 from the Breslow baseline.
double cox_survival(const CoxModel& model, const Eigen::VectorXd& x, double t);

}  // namespace survbench
