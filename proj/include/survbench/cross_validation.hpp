#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "survbench/types.hpp"

namespace survbench {

enum class ModelKind { logistic, svm, cox, cure, cmix };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Display name matching the published model labels.
std::string display_name(ModelKind kind);

struct CVResult {
    std::vector<double> gamma_grid;
    Eigen::MatrixXd fold_scores;  // grid x fold; NaN for skipped folds
    double chosen_gamma = 0.0;    // argmax of the mean score, ties toward larger gamma
    std::vector<std::string> warnings;
};

// Held-out AUC over a seeded k-fold partition of the epsilon-labelled
// subjects. Folds whose training or validation part lacks a class are
// skipped with a warning; if every fold is skipped, throws DataError.
CVResult kfold_cv_binary(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels, ModelKind kind,
                         const std::vector<double>& gamma_grid, double eta, int k,
                         std::uint64_t seed);

// Held-out C-index (tau = the fold's largest observed time) over a seeded
// k-fold partition of the survival records.
CVResult kfold_cv_survival(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXi& delta, ModelKind kind,
                           const std::vector<double>& gamma_grid, double eta, int k,
                           std::uint64_t seed);

// Seeded balanced fold assignment; returns the fold id of every row.
std::vector<int> fold_assignment(Eigen::Index n, int k, std::uint64_t seed);

}  // namespace survbench
