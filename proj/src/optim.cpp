#include "survbench/optim.hpp"

#include <cmath>

#include "survbench/rng.hpp"

namespace survbench {

Eigen::VectorXd prox_elastic_net(const Eigen::VectorXd& v, double step,
                                 const PenaltyConfig& penalty, Eigen::Index n_penalized) {
    if (!(step > 0.0)) throw NumericalError("prox_elastic_net: step must be positive");
    const double l1 = step * penalty.gamma * (1.0 - penalty.eta);
    const double l2 = step * penalty.gamma * penalty.eta;
    Eigen::VectorXd out = v;
    for (Eigen::Index j = 0; j < n_penalized; ++j) {
        out(j) = soft_threshold(v(j), l1) / (1.0 + l2);
    }
    return out;
}

double elastic_net_value(const Eigen::VectorXd& x, const PenaltyConfig& penalty,
                         Eigen::Index n_penalized) {
    const auto head = x.head(n_penalized);
    return penalty.gamma * ((1.0 - penalty.eta) * head.template lpNorm<1>() +
                            0.5 * penalty.eta * head.squaredNorm());
}

namespace {

// Power iteration on the Hessian at x0 via central differences of the
// gradient; a rough upper bound is enough to seed the backtracking search.
double lipschitz_estimate(const SmoothObjective& f, const Eigen::VectorXd& x0) {
    Rng rng(0x5eedULL);
    Eigen::VectorXd v(x0.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
    v.normalize();
    const double h = 1e-4 * std::max(1.0, x0.norm());
    double lambda = 0.0;
    for (int it = 0; it < 8; ++it) {
        Eigen::VectorXd w = (f.gradient(x0 + h * v) - f.gradient(x0 - h * v)) / (2.0 * h);
        lambda = w.norm();
        if (!(lambda > 1e-12) || !std::isfinite(lambda)) break;
        v = w / lambda;
    }
    return std::isfinite(lambda) ? std::max(lambda, 1e-8) : 1.0;
}

}  // namespace

FistaResult fista_minimize(const SmoothObjective& f, const PenaltyConfig& penalty,
                           const Eigen::VectorXd& init, double tol, int max_iter) {
    penalty.validate();
    if (init.size() != f.dim) throw NumericalError("fista_minimize: init dimension mismatch");

    const auto pen = [&](const Eigen::VectorXd& x) {
        return elastic_net_value(x, penalty, f.n_penalized);
    };

    FistaResult res;
    Eigen::VectorXd x = init, x_prev = init, y = init;
    double fx = f.value(x);
    if (!std::isfinite(fx)) throw NumericalError("fista_minimize: non-finite objective at init");
    double Fx = fx + pen(x);
    res.trace.push_back(Fx);

    double L = lipschitz_estimate(f, init);
    double t = 1.0;

    for (int k = 1; k <= max_iter; ++k) {
        res.iterations = k;
        const double fy = f.value(y);
        const Eigen::VectorXd gy = f.gradient(y);
        if (!std::isfinite(fy) || !gy.allFinite())
            throw NumericalError("fista_minimize: non-finite objective or gradient at iterate " +
                                 std::to_string(k));

        // backtracking: halve the step until the quadratic model majorizes f
        Eigen::VectorXd z;
        double fz = 0.0;
        for (;;) {
            z = prox_elastic_net(y - gy / L, 1.0 / L, penalty, f.n_penalized);
            fz = f.value(z);
            const Eigen::VectorXd dz = z - y;
            const double bound = fy + gy.dot(dz) + 0.5 * L * dz.squaredNorm();
            if (std::isfinite(fz) && fz <= bound + 1e-12 * std::max(1.0, std::abs(fy))) break;
            L *= 2.0;
            if (L > 1e30)
                throw NumericalError("fista_minimize: line search failed at iterate " +
                                     std::to_string(k));
        }

        const double Fz = fz + pen(z);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        // monotone update: keep the previous point if the accelerated
        // candidate overshoots, but let the momentum still use z
        const bool accept = Fz <= Fx;
        const Eigen::VectorXd x_new = accept ? z : x;
        y = x_new + (t / t_next) * (z - x_new) + ((t - 1.0) / t_next) * (x_new - x_prev);
        x_prev = x;
        x = x_new;
        t = t_next;

        const double F_new = accept ? Fz : Fx;
        res.trace.push_back(F_new);
        if (accept && std::abs(Fx - F_new) <= tol * std::max(1.0, std::abs(Fx))) {
            Fx = F_new;
            res.converged = true;
            break;
        }
        Fx = F_new;
    }
    res.x = x;
    return res;
}

double kkt_max_violation(const SmoothObjective& f, const PenaltyConfig& penalty,
                         const Eigen::VectorXd& x) {
    const Eigen::VectorXd g = f.gradient(x);
    const double l1 = penalty.gamma * (1.0 - penalty.eta);
    const double l2 = penalty.gamma * penalty.eta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < f.dim; ++j) {
        double v;
        if (j >= f.n_penalized) {
            v = std::abs(g(j));
        } else if (x(j) != 0.0) {
            v = std::abs(g(j) + l2 * x(j) + l1 * (x(j) > 0.0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(g(j)) - l1);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace survbench
