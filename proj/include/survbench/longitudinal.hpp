#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survbench/types.hpp"

namespace survbench {

// One subject's irregular series for one concept; hours relative to discharge
// (time 0), so times are typically non-positive.
class LongitudinalSeries {
  public:
    LongitudinalSeries(std::vector<double> times, std::vector<double> values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return times_.size(); }

  private:
    std::vector<double> times_;   // strictly increasing
    std::vector<double> values_;
};

// Mean and OLS slope over the window [-window_hours, infinity); NaN where the
// window is empty (mean) or has fewer than two points (slope). Missing values
// flow into the imputation stage rather than erroring.
struct WindowStats {
    double mean;
    double slope;
};

WindowStats window_mean_slope(const LongitudinalSeries& series, double window_hours);

double last_value(const LongitudinalSeries& series);

struct GPHyperParams {
    double const_var = 0.0;
    double rbf_var = 0.0;
    double rbf_len = 1.0;
    double noise_var = 0.0;
    double mean_slope = 0.0;
    double mean_intercept = 0.0;
};

// Gaussian-process log marginal likelihood of residuals under the
// constant + RBF + white sum-kernel; -inf when the kernel matrix is not
// positive definite even after jitter.
double gp_log_marginal(const Eigen::VectorXd& times, const Eigen::VectorXd& resid,
                       double const_var, double rbf_var, double rbf_len, double noise_var);

// Derivatives of gp_log_marginal with respect to the four kernel parameters.
Eigen::Vector4d gp_log_marginal_gradient(const Eigen::VectorXd& times,
                                         const Eigen::VectorXd& resid, double const_var,
                                         double rbf_var, double rbf_len, double noise_var);

// Maximum-marginal-likelihood kernel hyperparameters on the in-window points:
// linear mean fixed by OLS first, then multi-start simplex descent over the
// log kernel parameters. nullopt with fewer than 3 in-window points or when
// every start fails.
std::optional<GPHyperParams> gp_fit(const LongitudinalSeries& series, double window_hours,
                                    std::uint64_t seed = 0);

struct LongitudinalPanel {
    std::vector<std::string> subject_ids;  // order of first appearance
    std::map<std::string, std::map<std::string, LongitudinalSeries>> by_subject;
};

// Long-format CSV with columns subject_id, concept, time_hours, value.
LongitudinalPanel load_long_csv(const std::string& path);

// Concepts measured at least once for strictly more than `threshold` of the
// subjects; returned sorted by name.
std::vector<std::string> coverage_filter(const LongitudinalPanel& panel, double threshold);

struct FeatureTable {
    std::vector<std::string> subject_ids;
    std::vector<std::string> names;
    Eigen::MatrixXd values;  // NaN = missing
};

// Wide per-subject feature matrix: for every retained concept the window
// mean/slope, last value, and the five GP numbers. Per-series GP seeds derive
// from the run seed and the (subject, concept) pair, so the result does not
// depend on evaluation order.
FeatureTable extract_features(const LongitudinalPanel& panel, double window_hours = 48.0,
                              double coverage_threshold = 0.5, std::uint64_t seed = 0);

void save_feature_csv(const std::string& path, const FeatureTable& table);

}  // namespace survbench
