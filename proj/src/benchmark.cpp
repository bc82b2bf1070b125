#include "survbench/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "survbench/binary.hpp"
#include "survbench/cox.hpp"
#include "survbench/csv.hpp"
#include "survbench/data.hpp"
#include "survbench/metrics.hpp"
#include "survbench/mixture.hpp"
#include "survbench/model_io.hpp"
#include "survbench/rng.hpp"

namespace survbench {

using nlohmann::json;

std::vector<double> default_gamma_grid() {
    std::vector<double> grid;
    const double lo = std::log(1e-4), hi = std::log(1e2);
    for (int i = 0; i < 30; ++i) grid.push_back(std::exp(lo + (hi - lo) * i / 29.0));
    return grid;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("config parse error in " + path + ": " + e.what());
    }

    BenchConfig cfg;
    try {
        cfg.data_path = j.at("data").get<std::string>();
        cfg.output_dir = j.at("output_dir").get<std::string>();
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.epsilon = j.value("epsilon", 30.0);
        cfg.test_fraction = j.value("test_fraction", 0.3);
        cfg.eta = j.value("eta", 0.1);
        cfg.cv_folds = j.value("cv_folds", 5);
        if (j.contains("gamma_grid")) {
            const auto& g = j.at("gamma_grid");
            if (g.is_array()) {
                cfg.gamma_grid = g.get<std::vector<double>>();
            } else {
                const double lo = std::log(g.at("min").get<double>());
                const double hi = std::log(g.at("max").get<double>());
                const int count = g.at("count").get<int>();
                cfg.gamma_grid.clear();
                for (int i = 0; i < count; ++i)
                    cfg.gamma_grid.push_back(
                        std::exp(lo + (hi - lo) * i / std::max(count - 1, 1)));
            }
        }
        if (j.contains("models")) {
            cfg.models.clear();
            for (const auto& m : j.at("models"))
                cfg.models.push_back(model_kind_from_string(m.get<std::string>()));
        }
        if (j.contains("column_kinds")) {
            for (const auto& [name, kind] : j.at("column_kinds").items())
                cfg.kind_overrides[name] = column_kind_from_string(kind.get<std::string>());
        }
        if (j.contains("cindex_tau")) cfg.cindex_tau = j.at("cindex_tau").get<double>();
    } catch (const json::exception& e) {
        throw DataError("bad config " + path + ": " + e.what());
    }
    return cfg;
}

namespace {

constexpr ModelKind kCanonicalOrder[] = {ModelKind::logistic, ModelKind::svm, ModelKind::cox,
                                         ModelKind::cure, ModelKind::cmix};

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
    return out;
}

std::string bridged_name(ModelKind kind, double epsilon) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s (eps=%g)", display_name(kind).c_str(), epsilon);
    return buf;
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

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& cell = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c));
            m(i, c) = cell.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : cell.get<double>();
        }
    }
    return m;
}

double json_to_double(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

ComparisonReport run_benchmark(const BenchConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw DataError("bench: epsilon must be positive");
    if (cfg.models.empty()) throw DataError("bench: empty model list");

    const RawSurvivalTable raw = load_survival_csv(cfg.data_path, cfg.kind_overrides);
    const Dataset full = impute_missing(raw);
    const auto [train, test] = train_test_split(full, cfg.test_fraction, cfg.seed);
    const StandardizationParams sp = fit_standardizer(train);
    const Dataset train_z = apply_standardizer(train, sp);
    const Dataset test_z = apply_standardizer(test, sp);
    const Dataset full_z = apply_standardizer(full, sp);

    const BinaryTask task_tr = make_binary_labels(train_z.y, train_z.delta, cfg.epsilon);
    const BinaryTask task_te = make_binary_labels(test_z.y, test_z.delta, cfg.epsilon);
    const Eigen::MatrixXd Xtr_bin = take_rows(train_z.X, task_tr.retained);
    const Eigen::MatrixXd Xte_bin = take_rows(test_z.X, task_te.retained);

    const double tau = cfg.cindex_tau ? *cfg.cindex_tau : test.y.maxCoeff();

    ComparisonReport report;
    report.epsilon = cfg.epsilon;
    report.covariates = full.names;
    report.train_excluded = static_cast<int>(task_tr.excluded.size());
    report.test_excluded = static_cast<int>(task_te.excluded.size());

    std::vector<ModelKind> requested;
    for (ModelKind kind : kCanonicalOrder) {
        if (std::find(cfg.models.begin(), cfg.models.end(), kind) != cfg.models.end())
            requested.push_back(kind);
    }

    std::vector<MetricRow> cindex_rows, auc_rows, bridged_rows;
    std::vector<Eigen::VectorXd> importance_rows;
    std::optional<MixtureDurationModel> cmix_model;
    json models_json = json::object();

    for (ModelKind kind : requested) {
        const std::string name = display_name(kind);
        const std::uint64_t cv_seed = mix_seed(cfg.seed, "cv", to_string(kind));
        const std::uint64_t fit_seed = mix_seed(cfg.seed, "fit", to_string(kind));
        try {
            if (kind == ModelKind::logistic || kind == ModelKind::svm) {
                const CVResult cv = kfold_cv_binary(Xtr_bin, task_tr.labels, kind, cfg.gamma_grid,
                                                    cfg.eta, cfg.cv_folds, cv_seed);
                const PenaltyConfig penalty{cv.chosen_gamma, cfg.eta};
                const FittedLinearModel model = kind == ModelKind::logistic
                                                    ? logistic_fit(Xtr_bin, task_tr.labels, penalty)
                                                    : svm_fit(Xtr_bin, task_tr.labels, penalty);
                auc_rows.push_back({"binary outcome", "AUC", name,
                                    auc(task_te.labels, predict_scores(model, Xte_bin))});
                importance_rows.push_back(model.beta.cwiseAbs());
                report.cv.emplace(name, cv);
                models_json[name] = model_to_json(model, full.names);
            } else {
                const CVResult cv = kfold_cv_survival(train_z.X, train_z.y, train_z.delta, kind,
                                                      cfg.gamma_grid, cfg.eta, cfg.cv_folds,
                                                      cv_seed);
                const PenaltyConfig penalty{cv.chosen_gamma, cfg.eta};
                Eigen::VectorXd markers(test_z.n());
                SurvivalPredictor predictor;
                if (kind == ModelKind::cox) {
                    const CoxModel model = cox_fit(train_z.X, train_z.y, train_z.delta, penalty);
                    markers = (test_z.X * model.beta).array().exp();
                    predictor = [model](const Eigen::VectorXd& x, double t) {
                        return cox_survival(model, x, t);
                    };
                    importance_rows.push_back(model.beta.cwiseAbs());
                    models_json[name] = model_to_json(model, full.names);
                } else {
                    const MixtureMode mode =
                        kind == ModelKind::cure ? MixtureMode::cure : MixtureMode::cmix;
                    const MixtureDurationModel model = cmix_fit(train_z.X, train_z.y,
                                                                train_z.delta, penalty, mode,
                                                                fit_seed);
                    markers = mixture_markers(model, test_z.X);
                    predictor = [model](const Eigen::VectorXd& x, double t) {
                        return mixture_survival(model, x, t);
                    };
                    importance_rows.push_back(model.beta.cwiseAbs());
                    models_json[name] = model_to_json(model, full.names);
                    if (kind == ModelKind::cmix) cmix_model = model;
                }
                cindex_rows.push_back({"survival analysis", "C-index", name,
                                       c_index(test.y, test.delta, markers, tau)});
                bridged_rows.push_back(
                    {"binary outcome", "AUC", bridged_name(kind, cfg.epsilon),
                     auc(task_te.labels, bridge_scores(predictor, Xte_bin, cfg.epsilon))});
                report.cv.emplace(name, cv);
            }
        } catch (const DataError& e) {
            throw DataError("[" + name + "] " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("[" + name + "] " + e.what());
        }
    }

    // Table rows: survival C-index block (CURE, Cox PH, C-mix), then the
    // binary AUC block (SVM, LR, then the bridged survival models)
    auto append_if = [&](std::vector<MetricRow>& rows, const std::string& model) {
        for (const auto& r : rows) {
            if (r.model == model || r.model.rfind(model + " (", 0) == 0)
                report.metrics.push_back(r);
        }
    };
    append_if(cindex_rows, "CURE");
    append_if(cindex_rows, "Cox PH");
    append_if(cindex_rows, "C-mix");
    append_if(auc_rows, "SVM");
    append_if(auc_rows, "LR");
    append_if(bridged_rows, "CURE");
    append_if(bridged_rows, "Cox PH");
    append_if(bridged_rows, "C-mix");

    for (ModelKind kind : requested) report.importance_models.push_back(display_name(kind));
    report.importances.resize(static_cast<Eigen::Index>(importance_rows.size()), full.dim());
    for (std::size_t i = 0; i < importance_rows.size(); ++i)
        report.importances.row(static_cast<Eigen::Index>(i)) = importance_rows[i].transpose();
    if (importance_rows.size() >= 2 && full.dim() >= 2)
        report.similarity = importance_similarity(report.importances);

    if (cmix_model) {
        std::vector<int> cmix_groups(static_cast<std::size_t>(full.n()), 0);
        const Eigen::VectorXd pis = mixture_markers(*cmix_model, full_z.X);
        for (Eigen::Index i = 0; i < full.n(); ++i)
            cmix_groups[static_cast<std::size_t>(i)] = pis(i) > 0.5 ? 1 : 0;

        const BinaryTask task_all = make_binary_labels(full.y, full.delta, cfg.epsilon);
        std::vector<int> eps_groups(static_cast<std::size_t>(full.n()), -1);
        for (std::size_t r = 0; r < task_all.retained.size(); ++r)
            eps_groups[static_cast<std::size_t>(task_all.retained[r])] =
                task_all.labels(static_cast<Eigen::Index>(r));

        report.battery = group_test_battery(full, cmix_groups, eps_groups);
        report.has_battery = true;
        report.curve_high = cmix_model->km_high;
        report.curve_low = cmix_model->km_low;
        report.has_curves = true;
    }

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        {
            std::ofstream out(cfg.output_dir + "/models.json", std::ios::binary);
            out << models_json.dump(2) << '\n';
        }
        write_report_files(report, cfg.output_dir);
    }
    return report;
}

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

namespace {

json cv_to_json(const CVResult& cv) {
    return {{"gamma_grid", cv.gamma_grid},
            {"fold_scores", matrix_to_json(cv.fold_scores)},
            {"chosen_gamma", cv.chosen_gamma},
            {"warnings", cv.warnings}};
}

CVResult cv_from_json(const json& j) {
    CVResult cv;
    cv.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    cv.fold_scores = matrix_from_json(j.at("fold_scores"));
    cv.chosen_gamma = j.at("chosen_gamma").get<double>();
    cv.warnings = j.at("warnings").get<std::vector<std::string>>();
    return cv;
}

json battery_to_json(const TestBattery& b) {
    json rows = json::array();
    for (const auto& r : b.rows) {
        rows.push_back({{"covariate", r.name},
                        {"kind", to_string(r.kind)},
                        {"skipped", r.skipped},
                        {"cmix_p", r.cmix_p},
                        {"cmix_p_corrected", r.cmix_p_corrected},
                        {"epsilon_p", r.epsilon_p},
                        {"epsilon_p_corrected", r.epsilon_p_corrected},
                        {"logrank_p", r.logrank_p},
                        {"logrank_p_corrected", r.logrank_p_corrected}});
    }
    json summaries = json::array();
    for (const auto& s : b.summaries) {
        summaries.push_back({{"covariate", s.covariate},
                             {"kind", to_string(s.kind)},
                             {"group", s.group},
                             {"count", s.count},
                             {"min", s.min},
                             {"q1", s.q1},
                             {"median", s.median},
                             {"q3", s.q3},
                             {"max", s.max},
                             {"proportion", s.proportion}});
    }
    return {{"tests", rows}, {"group_summaries", summaries}};
}

TestBattery battery_from_json(const json& j) {
    TestBattery b;
    for (const auto& r : j.at("tests")) {
        CovariateTestRow row;
        row.name = r.at("covariate").get<std::string>();
        row.kind = column_kind_from_string(r.at("kind").get<std::string>());
        row.skipped = r.at("skipped").get<bool>();
        row.cmix_p = json_to_double(r.at("cmix_p"));
        row.cmix_p_corrected = json_to_double(r.at("cmix_p_corrected"));
        row.epsilon_p = json_to_double(r.at("epsilon_p"));
        row.epsilon_p_corrected = json_to_double(r.at("epsilon_p_corrected"));
        row.logrank_p = json_to_double(r.at("logrank_p"));
        row.logrank_p_corrected = json_to_double(r.at("logrank_p_corrected"));
        b.rows.push_back(row);
    }
    for (const auto& s : j.at("group_summaries")) {
        GroupSummaryRow row;
        row.covariate = s.at("covariate").get<std::string>();
        row.kind = column_kind_from_string(s.at("kind").get<std::string>());
        row.group = s.at("group").get<int>();
        row.count = s.at("count").get<int>();
        row.min = json_to_double(s.at("min"));
        row.q1 = json_to_double(s.at("q1"));
        row.median = json_to_double(s.at("median"));
        row.q3 = json_to_double(s.at("q3"));
        row.max = json_to_double(s.at("max"));
        row.proportion = json_to_double(s.at("proportion"));
        b.summaries.push_back(row);
    }
    return b;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    csv::write_row(out, header);
    for (const auto& row : rows) csv::write_row(out, row);
}

}  // namespace

void write_report_json(const ComparisonReport& report, const std::string& path) {
    json j;
    j["epsilon"] = report.epsilon;
    j["exclusions"] = {{"train", report.train_excluded}, {"test", report.test_excluded}};
    json metrics = json::array();
    for (const auto& r : report.metrics)
        metrics.push_back(
            {{"setting", r.setting}, {"metric", r.metric}, {"model", r.model}, {"score", r.score}});
    j["metrics"] = metrics;
    j["importance"] = {{"models", report.importance_models},
                       {"covariates", report.covariates},
                       {"values", matrix_to_json(report.importances)}};
    j["similarity"] = matrix_to_json(report.similarity);
    json cvj = json::object();
    for (const auto& [name, cv] : report.cv) cvj[name] = cv_to_json(cv);
    j["cv"] = cvj;
    j["battery"] = report.has_battery ? battery_to_json(report.battery) : json();
    j["curves"] = report.has_curves ? json{{"high", curve_to_json(report.curve_high)},
                                           {"low", curve_to_json(report.curve_low)}}
                                    : json();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

ComparisonReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError("report parse error in " + path + ": " + e.what());
    }

    ComparisonReport r;
    r.epsilon = j.at("epsilon").get<double>();
    r.train_excluded = j.at("exclusions").at("train").get<int>();
    r.test_excluded = j.at("exclusions").at("test").get<int>();
    for (const auto& m : j.at("metrics")) {
        r.metrics.push_back({m.at("setting").get<std::string>(), m.at("metric").get<std::string>(),
                             m.at("model").get<std::string>(), m.at("score").get<double>()});
    }
    r.importance_models = j.at("importance").at("models").get<std::vector<std::string>>();
    r.covariates = j.at("importance").at("covariates").get<std::vector<std::string>>();
    r.importances = matrix_from_json(j.at("importance").at("values"));
    r.similarity = matrix_from_json(j.at("similarity"));
    for (const auto& [name, cv] : j.at("cv").items()) r.cv.emplace(name, cv_from_json(cv));
    if (!j.at("battery").is_null()) {
        r.battery = battery_from_json(j.at("battery"));
        r.has_battery = true;
    }
    if (!j.at("curves").is_null()) {
        r.curve_high = curve_from_json(j.at("curves").at("high"));
        r.curve_low = curve_from_json(j.at("curves").at("low"));
        r.has_curves = true;
    }
    return r;
}

void write_report_files(const ComparisonReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_report_json(report, dir + "/report.json");

    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : report.metrics)
            rows.push_back({r.setting, r.metric, r.model, csv::format(r.score)});
        write_csv(dir + "/metrics.csv", {"setting", "metric", "model", "score"}, rows);
    }

    {
        // covariates ordered by decreasing C-mix importance when present
        std::vector<int> order(report.covariates.size());
        std::iota(order.begin(), order.end(), 0);
        const auto cmix_it = std::find(report.importance_models.begin(),
                                       report.importance_models.end(), "C-mix");
        if (cmix_it != report.importance_models.end()) {
            const Eigen::Index row = cmix_it - report.importance_models.begin();
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return report.importances(row, a) > report.importances(row, b);
            });
        }
        std::vector<std::string> header = {"covariate"};
        header.insert(header.end(), report.importance_models.begin(),
                      report.importance_models.end());
        std::vector<std::vector<std::string>> rows;
        for (int c : order) {
            std::vector<std::string> row = {report.covariates[static_cast<std::size_t>(c)]};
            for (Eigen::Index m = 0; m < report.importances.rows(); ++m)
                row.push_back(csv::format(report.importances(m, c)));
            rows.push_back(std::move(row));
        }
        write_csv(dir + "/importance.csv", header, rows);
    }

    if (report.similarity.size() > 0) {
        std::vector<std::string> header = {"model"};
        header.insert(header.end(), report.importance_models.begin(),
                      report.importance_models.end());
        std::vector<std::vector<std::string>> rows;
        for (Eigen::Index i = 0; i < report.similarity.rows(); ++i) {
            std::vector<std::string> row = {report.importance_models[static_cast<std::size_t>(i)]};
            for (Eigen::Index k = 0; k < report.similarity.cols(); ++k)
                row.push_back(csv::format(report.similarity(i, k)));
            rows.push_back(std::move(row));
        }
        write_csv(dir + "/similarity.csv", header, rows);
    }

    if (report.has_battery) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : report.battery.rows) {
            rows.push_back({r.name, to_string(r.kind), r.skipped ? "1" : "0",
                            csv::format(r.cmix_p), csv::format(r.cmix_p_corrected),
                            csv::format(r.epsilon_p), csv::format(r.epsilon_p_corrected),
                            csv::format(r.logrank_p), csv::format(r.logrank_p_corrected)});
        }
        write_csv(dir + "/tests.csv",
                  {"covariate", "kind", "skipped", "cmix_p", "cmix_p_corrected", "epsilon_p",
                   "epsilon_p_corrected", "logrank_p", "logrank_p_corrected"},
                  rows);

        std::vector<std::vector<std::string>> srows;
        for (const auto& s : report.battery.summaries) {
            srows.push_back({s.covariate, to_string(s.kind), std::to_string(s.group),
                             std::to_string(s.count), csv::format(s.min), csv::format(s.q1),
                             csv::format(s.median), csv::format(s.q3), csv::format(s.max),
                             csv::format(s.proportion)});
        }
        write_csv(dir + "/group_summaries.csv",
                  {"covariate", "kind", "group", "count", "min", "q1", "median", "q3", "max",
                   "proportion"},
                  srows);
    }

    if (report.has_curves) {
        std::vector<std::vector<std::string>> rows;
        auto add_curve = [&](const char* label, const StepSurvivalCurve& c) {
            for (std::size_t i = 0; i < c.times.size(); ++i) {
                rows.push_back({label, csv::format(c.times[i]), csv::format(c.survival[i]),
                                csv::format(c.lower95[i]), csv::format(c.upper95[i])});
            }
        };
        add_curve("high", report.curve_high);
        add_curve("low", report.curve_low);
        write_csv(dir + "/subgroup_curves.csv",
                  {"group", "time", "survival", "lower95", "upper95"}, rows);
    }
}

}  // namespace survbench
