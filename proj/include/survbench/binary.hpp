#pragma once

#include <Eigen/Core>
#include <vector>

#include "survbench/optim.hpp"
#include "survbench/types.hpp"

namespace survbench {

// Horizon labelling with the censored-exclusion rule: subjects censored at or
// before epsilon cannot be labelled and are excluded.
struct BinaryTask {
    double epsilon = 0.0;
    Eigen::VectorXi labels;      // per retained subject, 1 iff delta=1 and y <= epsilon
    std::vector<int> retained;   // indices into the input records
    std::vector<int> excluded;   // indices with delta=0 and y <= epsilon
};

BinaryTask make_binary_labels(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                              double epsilon);

enum class LinearModelKind { logistic, svm };

struct FittedLinearModel {
    LinearModelKind kind = LinearModelKind::logistic;
    Eigen::VectorXd beta;
    double intercept = 0.0;
    PenaltyConfig penalty;
};

// Elastic-Net logistic regression: mean negative Bernoulli log-likelihood
// plus penalty, intercept free. `balanced` reweights classes to equal total
// weight (off by default).
FittedLinearModel logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                               const PenaltyConfig& penalty, bool balanced = false);

// Elastic-Net linear SVM with the differentiable squared hinge loss.
FittedLinearModel svm_fit(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                          const PenaltyConfig& penalty, bool balanced = false);

// Probability for logistic models, raw decision value for SVM; higher means
// higher risk either way.
double predict_score(const FittedLinearModel& model, const Eigen::VectorXd& x);

Eigen::VectorXd predict_scores(const FittedLinearModel& model, const Eigen::MatrixXd& X);

// Weighted logistic objective over [beta; intercept] with real-valued targets
// in [0,1]; also drives the mixture model gating update.
SmoothObjective logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets,
                                   const Eigen::VectorXd& weights);

// Weighted mean squared hinge loss over [beta; intercept].
SmoothObjective squared_hinge_objective(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                                        const Eigen::VectorXd& weights);

}  // namespace survbench
