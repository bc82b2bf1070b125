#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace survbench {

// Thrown when an input file or dataset violates its contract (CLI exit code 2).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an iterative procedure fails numerically (CLI exit code 3).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ColumnKind { continuous, binary };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

// One subject: observed duration y = min(T, C) in days, event indicator
// delta = 1{T <= C}, and the covariate row.
struct SurvivalRecord {
    double y = 0.0;
    int delta = 0;
    Eigen::VectorXd x;
};

// Covariate table straight after ingestion; NaN marks a missing cell.
struct RawSurvivalTable {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXi delta;
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }
};

// Fully imputed dataset; invariants checked by validate().
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXi delta;
    std::vector<std::string> names;
    std::vector<ColumnKind> kinds;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }

    SurvivalRecord record(Eigen::Index i) const {
        return SurvivalRecord{y(i), delta(i), X.row(i).transpose()};
    }

    Dataset subset(const std::vector<int>& rows) const;

    // Throws DataError on shape mismatch, negative durations, delta outside
    // {0,1}, non-finite cells, or non-{0,1} values in binary columns.
    void validate() const;
};

// Elastic-Net pair: penalty(beta) = gamma * ((1-eta)*||beta||_1 + eta/2*||beta||_2^2).
struct PenaltyConfig {
    double gamma = 0.0;
    double eta = 0.1;

    void validate() const {
        if (gamma < 0.0) throw DataError("PenaltyConfig: gamma must be >= 0");
        if (!(eta > 0.0 && eta < 1.0)) throw DataError("PenaltyConfig: eta must lie in (0,1)");
    }
};

// Per-column train-set moments; binary columns carry the identity transform.
struct StandardizationParams {
    Eigen::VectorXd means;
    Eigen::VectorXd sds;
};

}  // namespace survbench
