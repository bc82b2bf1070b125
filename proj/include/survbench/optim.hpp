#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "survbench/types.hpp"

namespace survbench {

// Differentiable part of a penalized objective. The first `n_penalized`
// components carry the Elastic-Net penalty; trailing components (e.g. an
// intercept) are free.
struct SmoothObjective {
    Eigen::Index dim = 0;
    Eigen::Index n_penalized = 0;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

inline double soft_threshold(double z, double t) {
    const double m = std::abs(z) - t;
    return m > 0.0 ? (z > 0.0 ? m : -m) : 0.0;
}

// Proximal map of step * gamma*((1-eta)*||.||_1 + eta/2*||.||_2^2) applied to
// the first n_penalized components; the rest pass through unchanged.
Eigen::VectorXd prox_elastic_net(const Eigen::VectorXd& v, double step,
                                 const PenaltyConfig& penalty, Eigen::Index n_penalized);

inline Eigen::VectorXd prox_elastic_net(const Eigen::VectorXd& v, double step,
                                        const PenaltyConfig& penalty) {
    return prox_elastic_net(v, step, penalty, v.size());
}

// Penalty value over the first n_penalized components.
double elastic_net_value(const Eigen::VectorXd& x, const PenaltyConfig& penalty,
                         Eigen::Index n_penalized);

struct FistaResult {
    Eigen::VectorXd x;
    std::vector<double> trace;  // penalized objective after each accepted step
    int iterations = 0;
    bool converged = false;
};

// Accelerated proximal gradient (monotone variant) with backtracking line
// search. Initial step size from a power-iteration estimate of the gradient
// Lipschitz constant at the start point. Stops when the relative change of
// the penalized objective falls below tol. Throws NumericalError if the
// objective or gradient turns non-finite, reporting the iterate index.
FistaResult fista_minimize(const SmoothObjective& f, const PenaltyConfig& penalty,
                           const Eigen::VectorXd& init, double tol = 1e-8, int max_iter = 5000);

// Largest stationarity violation at x: for penalized coordinates the
// Elastic-Net subgradient residual, for free coordinates |grad|.
double kkt_max_violation(const SmoothObjective& f, const PenaltyConfig& penalty,
                         const Eigen::VectorXd& x);

}  // namespace survbench
