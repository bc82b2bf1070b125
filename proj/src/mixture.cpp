#include "survbench/mixture.hpp"

#include <cmath>

#include "survbench/binary.hpp"
#include "survbench/data.hpp"
#include "survbench/optim.hpp"
#include "survbench/rng.hpp"

namespace survbench {

namespace {

constexpr double kRateFloor = 1e-12;  // keeps log(rate) defined in cmix mode
constexpr int kMaxEmIterations = 500;
constexpr double kEmTol = 1e-8;
constexpr int kMaxRestarts = 5;

// logistic clamped inside the open interval so that log(pi) and log(1-pi)
// stay finite for any finite input
double sigmoid(double z) {
    const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::min(std::max(s, std::numeric_limits<double>::min()), hi);
}

// log of f_k(y)^delta * S_k(y)^(1-delta) for an exponential subgroup;
// a zero rate encodes the cured subgroup (no event mass).
double log_duration_term(double y, int delta, double rate) {
    if (rate == 0.0) return delta == 1 ? -std::numeric_limits<double>::infinity() : 0.0;
    return delta == 1 ? std::log(rate) - rate * y : -rate * y;
}

struct EmState {
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double rate_high = 0.0;
    double rate_low = 0.0;
};

EmState initial_state(const Eigen::VectorXd& y, const Eigen::VectorXi& delta, Eigen::Index d,
                      MixtureMode mode) {
    std::vector<double> ys(y.data(), y.data() + y.size());
    const double med = median(std::move(ys));

    auto event_rate = [&](bool short_side) {
        double events = 0.0, exposure = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if ((y(i) <= med) == short_side) {
                events += delta(i);
                exposure += y(i);
            }
        }
        // half-event pseudo-count keeps the starting rates positive
        return std::max(events, 0.5) / std::max(exposure, 1e-8);
    };

    EmState s;
    s.beta = Eigen::VectorXd::Zero(d);
    s.rate_high = event_rate(true);
    s.rate_low = mode == MixtureMode::cure ? 0.0 : event_rate(false);
    if (s.rate_high <= s.rate_low) s.rate_high = 2.0 * s.rate_low + 1e-8;

    double below = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) below += y(i) <= med;
    const double n = static_cast<double>(y.size());
    const double frac = std::min(std::max(below / n, 1.0 / (n + 1.0)), n / (n + 1.0));
    s.intercept = std::log(frac / (1.0 - frac));
    return s;
}

void jitter_state(EmState& s, MixtureMode mode, Rng& rng) {
    s.rate_high *= std::exp(rng.uniform(-1.0, 1.0));
    if (mode == MixtureMode::cmix) s.rate_low *= std::exp(rng.uniform(-1.0, 1.0));
    if (s.rate_high <= s.rate_low) std::swap(s.rate_high, s.rate_low);
    s.intercept += rng.uniform(-1.0, 1.0);
    s.beta.setZero();
}

}  // namespace

Eigen::VectorXd mixture_responsibilities(const Eigen::VectorXd& y, const Eigen::VectorXi& delta,
                                         const Eigen::VectorXd& pi, double rate_high,
                                         double rate_low, MixtureMode mode) {
    Eigen::VectorXd q(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double l1 = std::log(pi(i)) + log_duration_term(y(i), delta(i), rate_high);
        const double l0 = std::log1p(-pi(i)) +
                          log_duration_term(y(i), delta(i),
                                            mode == MixtureMode::cure ? 0.0 : rate_low);
        if (std::isinf(l0)) {
            q(i) = 1.0;
        } else {
            const double m = std::max(l1, l0);
            q(i) = std::exp(l1 - m) / (std::exp(l1 - m) + std::exp(l0 - m));
        }
    }
    return q;
}

double mixture_observed_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXi& delta, const Eigen::VectorXd& beta,
                               double intercept, double rate_high, double rate_low,
                               MixtureMode mode, const PenaltyConfig& penalty) {
    const Eigen::VectorXd z = X * beta + Eigen::VectorXd::Constant(X.rows(), intercept);
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double pi = sigmoid(z(i));
        const double l1 = std::log(pi) + log_duration_term(y(i), delta(i), rate_high);
        const double l0 = std::log1p(-pi) +
                          log_duration_term(y(i), delta(i),
                                            mode == MixtureMode::cure ? 0.0 : rate_low);
        const double m = std::max(l1, l0);
        total += std::isinf(l0) ? l1 : m + std::log(std::exp(l1 - m) + std::exp(l0 - m));
    }
    return total / static_cast<double>(X.rows()) - elastic_net_value(beta, penalty, beta.size());
}

MixtureDurationModel cmix_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXi& delta, const PenaltyConfig& penalty,
                              MixtureMode mode, std::uint64_t seed) {
    penalty.validate();
    const Eigen::Index n = X.rows(), d = X.cols();
    if (y.size() != n || delta.size() != n) throw DataError("cmix_fit: length mismatch");
    if (delta.sum() == 0) throw DataError("cmix_fit: no events");

    EmState state = initial_state(y, delta, d, mode);
    std::vector<double> trace;

    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        if (restart > 0) {
            Rng rng(mix_seed(seed, "cmix-restart", std::to_string(restart)));
            state = initial_state(y, delta, d, mode);
            jitter_state(state, mode, rng);
        }
        trace.clear();
        double prev_ll = mixture_observed_loglik(X, y, delta, state.beta, state.intercept,
                                                 state.rate_high, state.rate_low, mode, penalty);
        trace.push_back(prev_ll);
        bool degenerate = false;

        for (int it = 0; it < kMaxEmIterations; ++it) {
            const Eigen::VectorXd z =
                X * state.beta + Eigen::VectorXd::Constant(n, state.intercept);
            Eigen::VectorXd pi(n);
            for (Eigen::Index i = 0; i < n; ++i) pi(i) = sigmoid(z(i));
            Eigen::VectorXd q =
                mixture_responsibilities(y, delta, pi, state.rate_high, state.rate_low, mode);

            if (q.maxCoeff() < 1e-12 || q.minCoeff() > 1.0 - 1e-12) {
                degenerate = true;
                break;
            }

            // closed-form exponential rate updates
            const double ev_hi = (q.array() * delta.cast<double>().array()).sum();
            const double ex_hi = (q.array() * y.array()).sum();
            if (!(ex_hi > 0.0) || !(ev_hi > 0.0)) {
                degenerate = true;
                break;
            }
            state.rate_high = ev_hi / ex_hi;
            if (mode == MixtureMode::cmix) {
                const double ev_lo = ((1.0 - q.array()) * delta.cast<double>().array()).sum();
                const double ex_lo = ((1.0 - q.array()) * y.array()).sum();
                if (!(ex_lo > 0.0)) {
                    degenerate = true;
                    break;
                }
                state.rate_low = std::max(ev_lo / ex_lo, kRateFloor);
            }
            if (state.rate_high == state.rate_low) {
                degenerate = true;
                break;
            }
            if (state.rate_high < state.rate_low) {
                // relabel so the high-risk subgroup stays the faster one
                std::swap(state.rate_high, state.rate_low);
                state.beta = -state.beta;
                state.intercept = -state.intercept;
                q = Eigen::VectorXd::Ones(n) - q;
            }

            // one generalized M-step solve of the responsibility-weighted
            // penalized logistic loss, warm-started at the current gating
            const SmoothObjective gating =
                logistic_objective(X, q, Eigen::VectorXd::Ones(n));
            Eigen::VectorXd w0(d + 1);
            w0.head(d) = state.beta;
            w0(d) = state.intercept;
            const auto sol = fista_minimize(gating, penalty, w0, 1e-10, 200);
            state.beta = sol.x.head(d);
            state.intercept = sol.x(d);

            const double ll = mixture_observed_loglik(X, y, delta, state.beta, state.intercept,
                                                      state.rate_high, state.rate_low, mode,
                                                      penalty);
            trace.push_back(ll);
            if (std::abs(ll - prev_ll) <= kEmTol * std::max(1.0, std::abs(prev_ll))) break;
            prev_ll = ll;
        }

        if (!degenerate) {
            MixtureDurationModel model;
            model.beta = state.beta;
            model.intercept = state.intercept;
            model.rate_high = state.rate_high;
            model.rate_low = mode == MixtureMode::cure ? 0.0 : state.rate_low;
            model.mode = mode;
            model.penalty = penalty;
            model.em_trace = trace;

            // subgroup survival from the converged assignment (pi > 0.5)
            std::vector<int> hi, lo;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double pi = mixture_marker(model, X.row(i).transpose());
                (pi > 0.5 ? hi : lo).push_back(static_cast<int>(i));
            }
            auto km_of = [&](const std::vector<int>& idx) {
                if (idx.empty()) return StepSurvivalCurve{};
                Eigen::VectorXd yy(static_cast<Eigen::Index>(idx.size()));
                Eigen::VectorXi dd(static_cast<Eigen::Index>(idx.size()));
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    yy(static_cast<Eigen::Index>(k)) = y(idx[k]);
                    dd(static_cast<Eigen::Index>(k)) = delta(idx[k]);
                }
                return kaplan_meier(yy, dd);
            };
            model.km_high = km_of(hi);
            model.km_low = mode == MixtureMode::cure ? StepSurvivalCurve{} : km_of(lo);
            return model;
        }
    }
    throw NumericalError("cmix_fit: degenerate responsibilities after " +
                         std::to_string(kMaxRestarts) + " restarts");
}

double mixture_marker(const MixtureDurationModel& model, const Eigen::VectorXd& x) {
    return sigmoid(model.beta.dot(x) + model.intercept);
}

Eigen::VectorXd mixture_markers(const MixtureDurationModel& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out(i) = mixture_marker(model, X.row(i).transpose());
    return out;
}

Eigen::VectorXd mixture_posterior(const MixtureDurationModel& model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, const Eigen::VectorXi& delta) {
    return mixture_responsibilities(y, delta, mixture_markers(model, X), model.rate_high,
                                    model.rate_low, model.mode);
}

double mixture_survival(const MixtureDurationModel& model, const Eigen::VectorXd& x, double t) {
    if (t < 0.0) throw DataError("mixture_survival: t must be non-negative");
    const double pi = mixture_marker(model, x);
    return pi * model.km_high.at(t) + (1.0 - pi) * model.km_low.at(t);
}

}  // namespace survbench
