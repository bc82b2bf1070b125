#include "survbench/cox.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace survbench {

namespace {

// Shared sweep for the partial likelihood and its gradient: walk event times
// in decreasing order while the risk-set sums of exp(eta) (and of
// exp(eta) * x for the gradient) grow.
struct CoxSweep {
    std::vector<int> order;  // rows sorted by descending y
    Eigen::VectorXd y;
    Eigen::VectorXi delta;
    long n_events = 0;
};

CoxSweep make_sweep(const Eigen::VectorXd& y, const Eigen::VectorXi& delta) {
    CoxSweep s;
    s.y = y;
    s.delta = delta;
    s.order.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) s.order[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::sort(s.order.begin(), s.order.end(), [&](int a, int b) { return y(a) > y(b); });
    for (Eigen::Index i = 0; i < delta.size(); ++i) s.n_events += delta(i) == 1;
    return s;
}

}  // namespace

SmoothObjective cox_partial_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const Eigen::VectorXi& delta) {
    if (y.size() != X.rows() || delta.size() != X.rows())
        throw DataError("cox_partial_objective: length mismatch");
    const auto sweep = std::make_shared<CoxSweep>(make_sweep(y, delta));
    if (sweep->n_events == 0) throw DataError("cox_partial_objective: no events");
    const Eigen::Index d = X.cols();

    SmoothObjective f;
    f.dim = d;
    f.n_penalized = d;
    f.value = [X, sweep](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd eta = X * beta;
        const double shift = eta.maxCoeff();
        double loglik = 0.0, risk_sum = 0.0;
        std::size_t i = 0;
        const auto& ord = sweep->order;
        while (i < ord.size()) {
            const double t = sweep->y(ord[i]);
            std::size_t j = i;
            int events = 0;
            for (; j < ord.size() && sweep->y(ord[j]) == t; ++j) {
                risk_sum += std::exp(eta(ord[j]) - shift);
                if (sweep->delta(ord[j]) == 1) {
                    loglik += eta(ord[j]);
                    ++events;
                }
            }
            if (events > 0) loglik -= events * (std::log(risk_sum) + shift);
            i = j;
        }
        return -loglik;
    };
    f.gradient = [X, sweep, d](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd eta = X * beta;
        const double shift = eta.maxCoeff();
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd risk_x = Eigen::VectorXd::Zero(d);
        double risk_sum = 0.0;
        std::size_t i = 0;
        const auto& ord = sweep->order;
        while (i < ord.size()) {
            const double t = sweep->y(ord[i]);
            std::size_t j = i;
            int events = 0;
            for (; j < ord.size() && sweep->y(ord[j]) == t; ++j) {
                const double w = std::exp(eta(ord[j]) - shift);
                risk_sum += w;
                risk_x += w * X.row(ord[j]).transpose();
                if (sweep->delta(ord[j]) == 1) {
                    grad -= X.row(ord[j]).transpose();
                    ++events;
                }
            }
            if (events > 0) grad += events * (risk_x / risk_sum);
            i = j;
        }
        return grad;
    };
    return f;
}

CoxModel cox_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                 const PenaltyConfig& penalty) {
    penalty.validate();
    const SmoothObjective f = cox_partial_objective(X, y, delta);
    // tight tolerance: the unnormalized partial likelihood is flat near the
    // optimum on small samples
    const auto res = fista_minimize(f, penalty, Eigen::VectorXd::Zero(X.cols()), 1e-11, 20000);
    if (!res.converged)
        throw NumericalError("cox_fit: solver did not converge in " +
                             std::to_string(res.iterations) + " iterations (objective " +
                             std::to_string(res.trace.back()) + ")");

    CoxModel model;
    model.beta = res.x;
    model.penalty = penalty;
    model.baseline = breslow_baseline(y, delta, X * res.x);
    return model;
}

double cox_survival(const CoxModel& model, const Eigen::VectorXd& x, double t) {
    if (t < 0.0) throw DataError("cox_survival: t must be non-negative");
    return std::pow(model.baseline.survival_at(t), std::exp(model.beta.dot(x)));
}

}  // namespace survbench
