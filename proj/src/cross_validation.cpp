#include "survbench/cross_validation.hpp"

#include <cmath>
#include <numeric>

#include "survbench/binary.hpp"
#include "survbench/cox.hpp"
#include "survbench/metrics.hpp"
#include "survbench/mixture.hpp"
#include "survbench/rng.hpp"

namespace survbench {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::svm: return "svm";
        case ModelKind::cox: return "cox";
        case ModelKind::cure: return "cure";
        case ModelKind::cmix: return "cmix";
    }
    throw DataError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "logistic" || s == "lr") return ModelKind::logistic;
    if (s == "svm") return ModelKind::svm;
    if (s == "cox") return ModelKind::cox;
    if (s == "cure") return ModelKind::cure;
    if (s == "cmix") return ModelKind::cmix;
    throw DataError("unknown model '" + s + "' (expected logistic|svm|cox|cure|cmix)");
}

std::string display_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::logistic: return "LR";
        case ModelKind::svm: return "SVM";
        case ModelKind::cox: return "Cox PH";
        case ModelKind::cure: return "CURE";
        case ModelKind::cmix: return "C-mix";
    }
    throw DataError("unknown model kind");
}

std::vector<int> fold_assignment(Eigen::Index n, int k, std::uint64_t seed) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        fold[static_cast<std::size_t>(order[pos])] =
            static_cast<int>(pos % static_cast<std::size_t>(k));
    }
    return fold;
}

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FoldSplit {
    std::vector<int> train, valid;
};

std::vector<FoldSplit> make_splits(Eigen::Index n, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("kfold_cv: need k >= 2");
    if (n < k) throw DataError("kfold_cv: fewer rows than folds");
    const auto fold = fold_assignment(n, k, seed);
    std::vector<FoldSplit> splits(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int f = 0; f < k; ++f) {
            auto& s = splits[static_cast<std::size_t>(f)];
            (fold[static_cast<std::size_t>(i)] == f ? s.valid : s.train)
                .push_back(static_cast<int>(i));
        }
    }
    return splits;
}

template <typename ScoreFn>
CVResult run_grid(const std::vector<double>& gamma_grid, const std::vector<FoldSplit>& splits,
                  const std::vector<bool>& fold_ok, ScoreFn&& score) {
    CVResult res;
    res.gamma_grid = gamma_grid;
    const auto g = static_cast<Eigen::Index>(gamma_grid.size());
    const auto k = static_cast<Eigen::Index>(splits.size());
    res.fold_scores = Eigen::MatrixXd::Constant(g, k, kNaN);

    for (Eigen::Index gi = 0; gi < g; ++gi) {
        for (Eigen::Index f = 0; f < k; ++f) {
            if (!fold_ok[static_cast<std::size_t>(f)]) continue;
            res.fold_scores(gi, f) = score(gamma_grid[static_cast<std::size_t>(gi)],
                                           splits[static_cast<std::size_t>(f)]);
        }
    }

    double best_mean = -std::numeric_limits<double>::infinity();
    double best_gamma = kNaN;
    for (Eigen::Index gi = 0; gi < g; ++gi) {
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index f = 0; f < k; ++f) {
            if (!std::isnan(res.fold_scores(gi, f))) {
                sum += res.fold_scores(gi, f);
                ++count;
            }
        }
        if (count == 0) continue;
        const double mean = sum / count;
        const double gamma = gamma_grid[static_cast<std::size_t>(gi)];
        if (mean > best_mean || (mean == best_mean && gamma > best_gamma)) {
            best_mean = mean;
            best_gamma = gamma;
        }
    }
    if (std::isnan(best_gamma)) throw DataError("kfold_cv: every fold was skipped");
    res.chosen_gamma = best_gamma;
    return res;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
    return out;
}

template <typename Vec>
Vec take(const Vec& v, const std::vector<int>& idx) {
    Vec out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

}  // namespace

CVResult kfold_cv_binary(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels, ModelKind kind,
                         const std::vector<double>& gamma_grid, double eta, int k,
                         std::uint64_t seed) {
    if (kind != ModelKind::logistic && kind != ModelKind::svm)
        throw DataError("kfold_cv_binary: expected a binary-setting model");
    if (gamma_grid.empty()) throw DataError("kfold_cv: empty gamma grid");
    const auto splits = make_splits(X.rows(), k, seed);

    std::vector<std::string> warnings;
    std::vector<bool> fold_ok(splits.size(), true);
    auto both_classes = [&](const std::vector<int>& idx) {
        bool h0 = false, h1 = false;
        for (int i : idx) {
            h0 |= labels(i) == 0;
            h1 |= labels(i) == 1;
        }
        return h0 && h1;
    };
    for (std::size_t f = 0; f < splits.size(); ++f) {
        if (!both_classes(splits[f].train) || !both_classes(splits[f].valid)) {
            fold_ok[f] = false;
            warnings.push_back("fold " + std::to_string(f) + " skipped: missing a class");
        }
    }

    auto res = run_grid(gamma_grid, splits, fold_ok, [&](double gamma, const FoldSplit& s) {
        const PenaltyConfig penalty{gamma, eta};
        const Eigen::MatrixXd Xtr = take_rows(X, s.train);
        const Eigen::VectorXi ltr = take(labels, s.train);
        const FittedLinearModel model = kind == ModelKind::logistic
                                            ? logistic_fit(Xtr, ltr, penalty)
                                            : svm_fit(Xtr, ltr, penalty);
        return auc(take(labels, s.valid), predict_scores(model, take_rows(X, s.valid)));
    });
    res.warnings = warnings;
    return res;
}

CVResult kfold_cv_survival(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXi& delta, ModelKind kind,
                           const std::vector<double>& gamma_grid, double eta, int k,
                           std::uint64_t seed) {
    if (kind != ModelKind::cox && kind != ModelKind::cure && kind != ModelKind::cmix)
        throw DataError("kfold_cv_survival: expected a survival-setting model");
    if (gamma_grid.empty()) throw DataError("kfold_cv: empty gamma grid");
    const auto splits = make_splits(X.rows(), k, seed);

    std::vector<std::string> warnings;
    std::vector<bool> fold_ok(splits.size(), true);
    for (std::size_t f = 0; f < splits.size(); ++f) {
        bool train_event = false;
        for (int i : splits[f].train) train_event |= delta(i) == 1;
        // validation needs at least one comparable pair at tau = max fold time
        bool comparable = false;
        double tau = 0.0;
        for (int i : splits[f].valid) tau = std::max(tau, y(i));
        for (int i : splits[f].valid) {
            if (delta(i) != 1 || !(y(i) < tau)) continue;
            for (int j : splits[f].valid) {
                if (y(i) < y(j)) {
                    comparable = true;
                    break;
                }
            }
            if (comparable) break;
        }
        if (!train_event || !comparable) {
            fold_ok[f] = false;
            warnings.push_back("fold " + std::to_string(f) +
                               " skipped: no training event or no comparable validation pair");
        }
    }

    auto res = run_grid(gamma_grid, splits, fold_ok, [&](double gamma, const FoldSplit& s) {
        const PenaltyConfig penalty{gamma, eta};
        const Eigen::MatrixXd Xtr = take_rows(X, s.train);
        const Eigen::VectorXd ytr = take(y, s.train);
        const Eigen::VectorXi dtr = take(delta, s.train);
        const Eigen::MatrixXd Xv = take_rows(X, s.valid);
        const Eigen::VectorXd yv = take(y, s.valid);
        const Eigen::VectorXi dv = take(delta, s.valid);
        const double tau = yv.maxCoeff();

        Eigen::VectorXd markers(Xv.rows());
        if (kind == ModelKind::cox) {
            const CoxModel model = cox_fit(Xtr, ytr, dtr, penalty);
            markers = (Xv * model.beta).array().exp();
        } else {
            const auto model = cmix_fit(Xtr, ytr, dtr, penalty,
                                        kind == ModelKind::cure ? MixtureMode::cure
                                                                : MixtureMode::cmix,
                                        seed);
            markers = mixture_markers(model, Xv);
        }
        return c_index(yv, dv, markers, tau);
    });
    res.warnings = warnings;
    return res;
}

}  // namespace survbench
