#include "survbench/binary.hpp"

#include <cmath>

namespace survbench {

BinaryTask make_binary_labels(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw DataError("make_binary_labels: epsilon must be positive");
    BinaryTask task;
    task.epsilon = epsilon;
    std::vector<int> labels;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (delta(i) == 0 && y(i) <= epsilon) {
            task.excluded.push_back(static_cast<int>(i));
        } else {
            task.retained.push_back(static_cast<int>(i));
            labels.push_back(delta(i) == 1 && y(i) <= epsilon ? 1 : 0);
        }
    }
    if (task.retained.empty())
        throw DataError("make_binary_labels: every subject excluded at epsilon=" +
                        std::to_string(epsilon));
    task.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    return task;
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

Eigen::VectorXd class_weights(const Eigen::VectorXi& labels, bool balanced) {
    const Eigen::Index n = labels.size();
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    if (!balanced) return w;
    const double n_pos = labels.cast<double>().sum();
    const double n_neg = static_cast<double>(n) - n_pos;
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = labels(i) == 1 ? static_cast<double>(n) / (2.0 * n_pos)
                              : static_cast<double>(n) / (2.0 * n_neg);
    }
    return w;
}

void require_both_classes(const Eigen::VectorXi& labels, const char* what) {
    bool has0 = false, has1 = false;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        has0 |= labels(i) == 0;
        has1 |= labels(i) == 1;
    }
    if (!has0 || !has1) throw DataError(std::string(what) + ": both classes must be present");
}

}  // namespace

SmoothObjective squared_hinge_objective(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                                        const Eigen::VectorXd& weights) {
    const Eigen::Index n = X.rows(), d = X.cols();
    Eigen::VectorXd sign(n);
    for (Eigen::Index i = 0; i < n; ++i) sign(i) = labels(i) == 1 ? 1.0 : -1.0;

    SmoothObjective f;
    f.dim = d + 1;
    f.n_penalized = d;
    f.value = [X, sign, weights, n, d](const Eigen::VectorXd& w) {
        const Eigen::VectorXd z = X * w.head(d) + Eigen::VectorXd::Constant(n, w(d));
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = std::max(0.0, 1.0 - sign(i) * z(i));
            total += weights(i) * m * m;
        }
        return total / static_cast<double>(n);
    };
    f.gradient = [X, sign, weights, n, d](const Eigen::VectorXd& w) {
        const Eigen::VectorXd z = X * w.head(d) + Eigen::VectorXd::Constant(n, w(d));
        Eigen::VectorXd dz(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = std::max(0.0, 1.0 - sign(i) * z(i));
            dz(i) = weights(i) * -2.0 * m * sign(i) / static_cast<double>(n);
        }
        Eigen::VectorXd g(d + 1);
        g.head(d) = X.transpose() * dz;
        g(d) = dz.sum();
        return g;
    };
    return f;
}

namespace {

FittedLinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                             const PenaltyConfig& penalty, bool balanced, LinearModelKind kind) {
    penalty.validate();
    require_both_classes(labels, kind == LinearModelKind::logistic ? "logistic_fit" : "svm_fit");
    if (labels.size() != X.rows()) throw DataError("fit: label/row count mismatch");

    const Eigen::VectorXd w = class_weights(labels, balanced);
    const SmoothObjective f =
        kind == LinearModelKind::logistic
            ? logistic_objective(X, labels.cast<double>(), w)
            : squared_hinge_objective(X, labels, w);

    const auto res = fista_minimize(f, penalty, Eigen::VectorXd::Zero(X.cols() + 1));

    FittedLinearModel model;
    model.kind = kind;
    model.beta = res.x.head(X.cols());
    model.intercept = res.x(X.cols());
    model.penalty = penalty;
    return model;
}

}  // namespace

SmoothObjective logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& targets,
                                   const Eigen::VectorXd& weights) {
    const Eigen::Index n = X.rows(), d = X.cols();
    SmoothObjective f;
    f.dim = d + 1;
    f.n_penalized = d;
    f.value = [X, targets, weights, n, d](const Eigen::VectorXd& w) {
        const Eigen::VectorXd z = X * w.head(d) + Eigen::VectorXd::Constant(n, w(d));
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            // -q log(sigma) - (1-q) log(1-sigma), written with softplus
            total += weights(i) *
                     (targets(i) * softplus(-z(i)) + (1.0 - targets(i)) * softplus(z(i)));
        }
        return total / static_cast<double>(n);
    };
    f.gradient = [X, targets, weights, n, d](const Eigen::VectorXd& w) {
        const Eigen::VectorXd z = X * w.head(d) + Eigen::VectorXd::Constant(n, w(d));
        Eigen::VectorXd dz(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            dz(i) = weights(i) * (sigmoid(z(i)) - targets(i)) / static_cast<double>(n);
        }
        Eigen::VectorXd g(d + 1);
        g.head(d) = X.transpose() * dz;
        g(d) = dz.sum();
        return g;
    };
    return f;
}

FittedLinearModel logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                               const PenaltyConfig& penalty, bool balanced) {
    return fit_linear(X, labels, penalty, balanced, LinearModelKind::logistic);
}

FittedLinearModel svm_fit(const Eigen::MatrixXd& X, const Eigen::VectorXi& labels,
                          const PenaltyConfig& penalty, bool balanced) {
    return fit_linear(X, labels, penalty, balanced, LinearModelKind::svm);
}

double predict_score(const FittedLinearModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.beta.size()) throw DataError("predict_score: dimension mismatch");
    const double z = model.beta.dot(x) + model.intercept;
    return model.kind == LinearModelKind::logistic ? sigmoid(z) : z;
}

Eigen::VectorXd predict_scores(const FittedLinearModel& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_score(model, X.row(i).transpose());
    return out;
}

}  // namespace survbench
