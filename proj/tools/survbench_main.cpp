#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "survbench/benchmark.hpp"
#include "survbench/binary.hpp"
#include "survbench/cox.hpp"
#include "survbench/cross_validation.hpp"
#include "survbench/data.hpp"
#include "survbench/longitudinal.hpp"
#include "survbench/mixture.hpp"
#include "survbench/model_io.hpp"
#include "survbench/synthetic.hpp"

namespace {

using namespace survbench;
using nlohmann::json;

std::map<std::string, ColumnKind> parse_kind_overrides(const std::vector<std::string>& specs) {
    std::map<std::string, ColumnKind> overrides;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw DataError("--kind expects name=binary|continuous, got '" + s + "'");
        overrides[s.substr(0, eq)] = column_kind_from_string(s.substr(eq + 1));
    }
    return overrides;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

std::vector<double> resolve_grid(const std::vector<double>& explicit_grid, double grid_min,
                                 double grid_max, int grid_count) {
    if (!explicit_grid.empty()) return explicit_grid;
    std::vector<double> grid;
    const double lo = std::log(grid_min), hi = std::log(grid_max);
    for (int i = 0; i < grid_count; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * i / std::max(grid_count - 1, 1)));
    return grid;
}

struct PreparedData {
    Dataset standardized;
    std::vector<std::string> names;
    StandardizationParams params;
};

PreparedData prepare(const std::string& path, const std::vector<std::string>& kind_specs) {
    const auto raw = load_survival_csv(path, parse_kind_overrides(kind_specs));
    const Dataset data = impute_missing(raw);
    PreparedData p;
    p.params = fit_standardizer(data);
    p.standardized = apply_standardizer(data, p.params);
    p.names = data.names;
    return p;
}

int run_synth(const std::string& out_dir, const SynthConfig& config) {
    const SynthData synth = synth_generate(config);
    std::filesystem::create_directories(out_dir);
    save_survival_csv(out_dir + "/data.csv", synth.data);
    json truth;
    truth["latent_group"] = synth.latent_group;
    truth["true_beta"] = std::vector<double>(synth.true_beta.data(),
                                             synth.true_beta.data() + synth.true_beta.size());
    truth["realized_censoring"] = synth.realized_censoring;
    write_json_file(out_dir + "/truth.json", truth);
    std::printf("wrote %s/data.csv (%d subjects, %d covariates)\n", out_dir.c_str(), config.n,
                config.d);
    return 0;
}

int run_fit(const std::string& data_path, const std::string& model_name, double gamma, double eta,
            double epsilon, std::uint64_t seed, const std::vector<std::string>& kind_specs,
            const std::string& out_path) {
    const ModelKind kind = model_kind_from_string(model_name);
    const PreparedData p = prepare(data_path, kind_specs);
    const PenaltyConfig penalty{gamma, eta};

    json doc;
    if (kind == ModelKind::logistic || kind == ModelKind::svm) {
        const BinaryTask task = make_binary_labels(p.standardized.y, p.standardized.delta, epsilon);
        Eigen::MatrixXd X(static_cast<Eigen::Index>(task.retained.size()), p.standardized.dim());
        for (std::size_t i = 0; i < task.retained.size(); ++i)
            X.row(static_cast<Eigen::Index>(i)) = p.standardized.X.row(task.retained[i]);
        const FittedLinearModel model = kind == ModelKind::logistic
                                            ? logistic_fit(X, task.labels, penalty)
                                            : svm_fit(X, task.labels, penalty);
        doc = model_to_json(model, p.names);
        doc["epsilon"] = epsilon;
        doc["excluded"] = task.excluded.size();
    } else if (kind == ModelKind::cox) {
        doc = model_to_json(cox_fit(p.standardized.X, p.standardized.y, p.standardized.delta,
                                    penalty),
                            p.names);
    } else {
        const MixtureMode mode = kind == ModelKind::cure ? MixtureMode::cure : MixtureMode::cmix;
        doc = model_to_json(cmix_fit(p.standardized.X, p.standardized.y, p.standardized.delta,
                                     penalty, mode, seed),
                            p.names);
    }
    doc["standardization"] = {
        {"means", std::vector<double>(p.params.means.data(),
                                      p.params.means.data() + p.params.means.size())},
        {"sds", std::vector<double>(p.params.sds.data(),
                                    p.params.sds.data() + p.params.sds.size())}};
    write_json_file(out_path, doc);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

int run_cv(const std::string& data_path, const std::string& model_name,
           const std::vector<double>& grid, double eta, double epsilon, int k, std::uint64_t seed,
           const std::vector<std::string>& kind_specs, const std::string& out_path) {
    const ModelKind kind = model_kind_from_string(model_name);
    const PreparedData p = prepare(data_path, kind_specs);

    CVResult cv;
    if (kind == ModelKind::logistic || kind == ModelKind::svm) {
        const BinaryTask task = make_binary_labels(p.standardized.y, p.standardized.delta, epsilon);
        Eigen::MatrixXd X(static_cast<Eigen::Index>(task.retained.size()), p.standardized.dim());
        for (std::size_t i = 0; i < task.retained.size(); ++i)
            X.row(static_cast<Eigen::Index>(i)) = p.standardized.X.row(task.retained[i]);
        cv = kfold_cv_binary(X, task.labels, kind, grid, eta, k, seed);
    } else {
        cv = kfold_cv_survival(p.standardized.X, p.standardized.y, p.standardized.delta, kind,
                               grid, eta, k, seed);
    }
    for (const auto& w : cv.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    json doc;
    doc["model"] = to_string(kind);
    doc["gamma_grid"] = cv.gamma_grid;
    doc["fold_scores"] = matrix_to_json(cv.fold_scores);
    doc["chosen_gamma"] = cv.chosen_gamma;
    doc["warnings"] = cv.warnings;
    write_json_file(out_path, doc);
    std::printf("chosen gamma: %g\n", cv.chosen_gamma);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"survbench: survival vs fixed-horizon prognosis benchmarking"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic censored-mixture dataset");
    std::string synth_out = "synth_out";
    SynthConfig synth_cfg;
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--n", synth_cfg.n, "subjects");
    synth->add_option("--d", synth_cfg.d, "covariates");
    synth->add_option("--sparsity", synth_cfg.sparsity, "nonzero gating coefficients");
    synth->add_option("--rate-high", synth_cfg.rate_high, "high-risk event rate (events/day)");
    synth->add_option("--rate-low", synth_cfg.rate_low, "low-risk event rate");
    synth->add_option("--censor-rate", synth_cfg.censor_rate, "target censoring fraction");
    synth->add_option("--seed", synth_cfg.seed, "random seed");

    // features
    auto* features = app.add_subcommand("features",
                                        "long-format series CSV -> wide feature matrix CSV");
    std::string feat_in, feat_out = "features.csv";
    double feat_window = 48.0, feat_coverage = 0.5;
    std::uint64_t feat_seed = 0;
    features->add_option("--input", feat_in, "long-format CSV")->required();
    features->add_option("--out", feat_out, "output CSV");
    features->add_option("--window", feat_window, "window length in hours");
    features->add_option("--coverage", feat_coverage, "coverage threshold in (0,1)");
    features->add_option("--seed", feat_seed, "random seed");

    // fit
    auto* fit = app.add_subcommand("fit", "fit one model on a survival CSV");
    std::string fit_data, fit_model, fit_out = "model.json";
    double fit_gamma = 0.0, fit_eta = 0.1, fit_epsilon = 30.0;
    std::uint64_t fit_seed = 0;
    std::vector<std::string> fit_kinds;
    fit->add_option("--data", fit_data, "survival CSV")->required();
    fit->add_option("--model", fit_model, "logistic|svm|cox|cure|cmix")->required();
    fit->add_option("--gamma", fit_gamma, "penalty strength")->required();
    fit->add_option("--eta", fit_eta, "Elastic-Net mixing in (0,1)");
    fit->add_option("--epsilon", fit_epsilon, "horizon in days (binary models)");
    fit->add_option("--seed", fit_seed, "random seed");
    fit->add_option("--kind", fit_kinds, "column kind override, name=binary|continuous");
    fit->add_option("--out", fit_out, "output model JSON");

    // cv
    auto* cv = app.add_subcommand("cv", "cross-validate the penalty strength for one model");
    std::string cv_data, cv_model, cv_out = "cv.json";
    std::vector<double> cv_grid;
    double cv_eta = 0.1, cv_epsilon = 30.0, cv_grid_min = 1e-4, cv_grid_max = 1e2;
    int cv_k = 5, cv_grid_count = 30;
    std::uint64_t cv_seed = 0;
    std::vector<std::string> cv_kinds;
    cv->add_option("--data", cv_data, "survival CSV")->required();
    cv->add_option("--model", cv_model, "logistic|svm|cox|cure|cmix")->required();
    cv->add_option("--gamma", cv_grid, "explicit gamma grid values");
    cv->add_option("--grid-min", cv_grid_min, "log-grid lower bound");
    cv->add_option("--grid-max", cv_grid_max, "log-grid upper bound");
    cv->add_option("--grid-count", cv_grid_count, "log-grid size");
    cv->add_option("--eta", cv_eta, "Elastic-Net mixing");
    cv->add_option("--epsilon", cv_epsilon, "horizon in days (binary models)");
    cv->add_option("--k", cv_k, "folds");
    cv->add_option("--seed", cv_seed, "random seed");
    cv->add_option("--kind", cv_kinds, "column kind override, name=binary|continuous");
    cv->add_option("--out", cv_out, "output JSON");

    // bench
    auto* bench = app.add_subcommand("bench", "run the full benchmark from a JSON config");
    std::string bench_config;
    bench->add_option("--config", bench_config, "config JSON")->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "re-emit CSV tables from a saved run");
    std::string report_dir;
    report_cmd->add_option("--run", report_dir, "benchmark output directory")->required();

    try {
        app.parse(argc, argv);

        if (*synth) return run_synth(synth_out, synth_cfg);
        if (*features) {
            const auto panel = load_long_csv(feat_in);
            const auto table = extract_features(panel, feat_window, feat_coverage, feat_seed);
            save_feature_csv(feat_out, table);
            std::printf("wrote %s (%zu subjects, %zu features)\n", feat_out.c_str(),
                        table.subject_ids.size(), table.names.size());
            return 0;
        }
        if (*fit)
            return run_fit(fit_data, fit_model, fit_gamma, fit_eta, fit_epsilon, fit_seed,
                           fit_kinds, fit_out);
        if (*cv)
            return run_cv(cv_data, cv_model,
                          resolve_grid(cv_grid, cv_grid_min, cv_grid_max, cv_grid_count), cv_eta,
                          cv_epsilon, cv_k, cv_seed, cv_kinds, cv_out);
        if (*bench) {
            const BenchConfig cfg = load_bench_config(bench_config);
            const ComparisonReport rep = run_benchmark(cfg);
            for (const auto& row : rep.metrics)
                std::printf("%-18s %-8s %-16s %.3f\n", row.setting.c_str(), row.metric.c_str(),
                            row.model.c_str(), row.score);
            std::printf("report written to %s\n", cfg.output_dir.c_str());
            return 0;
        }
        if (*report_cmd) {
            const ComparisonReport rep = read_report_json(report_dir + "/report.json");
            write_report_files(rep, report_dir);
            std::printf("tables re-emitted in %s\n", report_dir.c_str());
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const survbench::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const survbench::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
