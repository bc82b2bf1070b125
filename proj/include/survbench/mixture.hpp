#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "survbench/nonparametric.hpp"
#include "survbench/types.hpp"

namespace survbench {

enum class MixtureMode { cmix, cure };

// Censored mixture-of-durations model with logistic gating. High risk means
// the faster exponential subgroup (rate_high > rate_low); cure mode pins the
// low-risk rate to 0 so that subgroup never experiences the event.
struct MixtureDurationModel {
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double rate_high = 0.0;
    double rate_low = 0.0;
    MixtureMode mode = MixtureMode::cmix;
    StepSurvivalCurve km_high;
    StepSurvivalCurve km_low;  // the constant-1 curve in cure mode
    PenaltyConfig penalty;
    std::vector<double> em_trace;  // penalized observed-data log-likelihood per EM iteration
};

// E-step responsibilities q_i = P(high risk | y_i, delta_i, pi_i).
Eigen::VectorXd mixture_responsibilities(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                                         const Eigen::VectorXd& pi, double rate_high,
                                         double rate_low, MixtureMode mode);

// Penalized observed-data log-likelihood (mean per subject minus penalty).
double mixture_observed_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXi& delta, const Eigen::VectorXd& beta,
                               double intercept, double rate_high, double rate_low,
                               MixtureMode mode, const PenaltyConfig& penalty);

// EM fit: closed-form rate updates, one penalized-logistic proximal solve per
// M-step. Restarts from jittered initial values on degenerate responsibility
// collapse (up to 5 times), then throws NumericalError.
MixtureDurationModel cmix_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXi& delta, const PenaltyConfig& penalty,
                              MixtureMode mode, std::uint64_t seed = 0);

// High-risk membership probability pi(x) in (0,1).
double mixture_marker(const MixtureDurationModel& model, const Eigen::VectorXd& x);

Eigen::VectorXd mixture_markers(const MixtureDurationModel& model, const Eigen::MatrixXd& X);

// Posterior subgroup probability given the observed (y, delta) as well as x;
// this is the EM cluster assignment for fitted subjects.
Eigen::VectorXd mixture_posterior(const MixtureDurationModel& model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, const Eigen::VectorXi& delta);

// pi * S_high(t) + (1 - pi) * S_low(t) from the subgroup Kaplan-Meier curves.
double mixture_survival(const MixtureDurationModel& model, const Eigen::VectorXd& x, double t);

}  // namespace survbench
