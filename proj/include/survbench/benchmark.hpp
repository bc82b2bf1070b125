#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survbench/cross_validation.hpp"
#include "survbench/nonparametric.hpp"
#include "survbench/stats_tests.hpp"
#include "survbench/types.hpp"

namespace survbench {

// 30 log-spaced penalty strengths spanning the published per-model range.
std::vector<double> default_gamma_grid();

struct BenchConfig {
    std::string data_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    double epsilon = 30.0;  // days
    double test_fraction = 0.3;
    double eta = 0.1;
    std::vector<double> gamma_grid = default_gamma_grid();
    int cv_folds = 5;
    std::vector<ModelKind> models = {ModelKind::logistic, ModelKind::svm, ModelKind::cox,
                                     ModelKind::cure, ModelKind::cmix};
    std::map<std::string, ColumnKind> kind_overrides;
    std::optional<double> cindex_tau;  // default: largest observed test time
};

BenchConfig load_bench_config(const std::string& path);

struct MetricRow {
    std::string setting;
    std::string metric;
    std::string model;
    double score = 0.0;
};

struct ComparisonReport {
    std::vector<MetricRow> metrics;
    std::vector<std::string> importance_models;
    std::vector<std::string> covariates;
    Eigen::MatrixXd importances;  // model x covariate, absolute values
    Eigen::MatrixXd similarity;   // model x model Pearson (NaN where undefined)
    std::map<std::string, CVResult> cv;  // keyed by display name
    bool has_battery = false;
    TestBattery battery;
    bool has_curves = false;
    StepSurvivalCurve curve_high, curve_low;  // model-risk subgroup survival
    int train_excluded = 0, test_excluded = 0;
    double epsilon = 0.0;
};

// The full pipeline: impute, split, standardize on train, cross-validate
// every requested model's penalty, fit, score both settings, and write the
// report files into config.output_dir.
ComparisonReport run_benchmark(const BenchConfig& config);

// File emission (report.json + the CSV tables); also used by the `report`
// subcommand to re-emit tables from a saved run.
void write_report_files(const ComparisonReport& report, const std::string& dir);
void write_report_json(const ComparisonReport& report, const std::string& path);
ComparisonReport read_report_json(const std::string& path);

}  // namespace survbench
