#pragma once

#include <Eigen/Core>
#include <functional>

#include "survbench/types.hpp"

namespace survbench {

// Harrell-style concordance of risk markers against censored durations:
// over pairs with y_i < y_j, delta_i = 1, y_i < tau, the fraction with
// M_i > M_j (ties count 1/2). Throws DataError when no pair is comparable.
double c_index(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
               const Eigen::VectorXd& markers, double tau);

// Mann-Whitney AUC with ties counted 1/2. Both classes must be present.
double auc(const Eigen::VectorXi& labels, const Eigen::VectorXd& scores);

// Evaluates a per-subject survival function at horizon t.
using SurvivalPredictor = std::function<double(const Eigen::VectorXd& x, double t)>;

// Survival-to-binary bridge: risk score 1 - S(epsilon | x) per row.
Eigen::VectorXd bridge_scores(const SurvivalPredictor& predictor, const Eigen::MatrixXd& X_test,
                              double epsilon);

// Pairwise Pearson correlation of absolute importance rows (model x
// covariate in, model x model out). Rows whose absolute values are constant
// yield NaN entries rather than 0.
Eigen::MatrixXd importance_similarity(const Eigen::MatrixXd& importances);

}  // namespace survbench
