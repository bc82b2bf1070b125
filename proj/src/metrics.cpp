#include "survbench/metrics.hpp"

#include <cmath>

namespace survbench {

double c_index(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
               const Eigen::VectorXd& markers, double tau) {
    const Eigen::Index n = y.size();
    if (delta.size() != n || markers.size() != n) throw DataError("c_index: length mismatch");
    long long twice_concordant = 0, comparable = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (delta(i) != 1 || !(y(i) < tau)) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(y(i) < y(j))) continue;
            ++comparable;
            if (markers(i) > markers(j)) twice_concordant += 2;
            else if (markers(i) == markers(j)) twice_concordant += 1;
        }
    }
    if (comparable == 0) throw DataError("c_index: no comparable pair");
    return static_cast<double>(twice_concordant) / static_cast<double>(2 * comparable);
}

double auc(const Eigen::VectorXi& labels, const Eigen::VectorXd& scores) {
    const Eigen::Index n = labels.size();
    if (scores.size() != n) throw DataError("auc: length mismatch");
    long long twice_wins = 0, pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels(i) != 1) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (labels(j) != 0) continue;
            ++pairs;
            if (scores(i) > scores(j)) twice_wins += 2;
            else if (scores(i) == scores(j)) twice_wins += 1;
        }
    }
    if (pairs == 0) throw DataError("auc: needs both classes");
    return static_cast<double>(twice_wins) / static_cast<double>(2 * pairs);
}

Eigen::VectorXd bridge_scores(const SurvivalPredictor& predictor, const Eigen::MatrixXd& X_test,
                              double epsilon) {
    if (!(epsilon > 0.0)) throw DataError("bridge_scores: epsilon must be positive");
    Eigen::VectorXd scores(X_test.rows());
    for (Eigen::Index i = 0; i < X_test.rows(); ++i) {
        scores(i) = 1.0 - predictor(X_test.row(i).transpose(), epsilon);
    }
    return scores;
}

Eigen::MatrixXd importance_similarity(const Eigen::MatrixXd& importances) {
    const Eigen::Index m = importances.rows(), d = importances.cols();
    if (m < 2 || d < 2) throw DataError("importance_similarity: need >=2 models and >=2 covariates");
    const Eigen::MatrixXd A = importances.cwiseAbs();

    Eigen::VectorXd mean(m), scale(m);
    std::vector<bool> constant(static_cast<std::size_t>(m));
    for (Eigen::Index a = 0; a < m; ++a) {
        mean(a) = A.row(a).mean();
        scale(a) = std::sqrt((A.row(a).array() - mean(a)).square().sum());
        constant[static_cast<std::size_t>(a)] = !(scale(a) > 0.0);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd r(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a; b < m; ++b) {
            double v;
            if (constant[static_cast<std::size_t>(a)] || constant[static_cast<std::size_t>(b)]) {
                v = nan;
            } else if (a == b) {
                v = 1.0;
            } else {
                const double cov =
                    ((A.row(a).array() - mean(a)) * (A.row(b).array() - mean(b))).sum();
                v = cov / (scale(a) * scale(b));
            }
            r(a, b) = v;
            r(b, a) = v;
        }
    }
    return r;
}

}  // namespace survbench
