#include "survbench/synthetic.hpp"

#include <cmath>

#include "survbench/rng.hpp"

namespace survbench {

void SynthConfig::validate() const {
    if (n < 2 || d < 1) throw DataError("synth: need n >= 2 and d >= 1");
    if (sparsity < 0 || sparsity > d) throw DataError("synth: sparsity must lie in [0, d]");
    if (!(rate_high > rate_low && rate_low > 0.0))
        throw DataError("synth: need rate_high > rate_low > 0");
    if (!(censor_rate >= 0.0 && censor_rate < 1.0))
        throw DataError("synth: censor_rate must lie in [0,1)");
}

SynthData synth_generate(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const int n = config.n, d = config.d;

    SynthData out;
    out.true_beta = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < config.sparsity; ++j) out.true_beta(j) = j % 2 == 0 ? 1.0 : -1.0;

    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
    }

    out.latent_group.resize(static_cast<std::size_t>(n));
    Eigen::VectorXd T(n);
    for (int i = 0; i < n; ++i) {
        const double z = X.row(i).dot(out.true_beta);
        const double pi = 1.0 / (1.0 + std::exp(-z));
        const int group = rng.bernoulli(pi);
        out.latent_group[static_cast<std::size_t>(i)] = group;
        T(i) = rng.exponential(group == 1 ? config.rate_high : config.rate_low);
    }

    Eigen::VectorXd y(n);
    Eigen::VectorXi delta(n);
    if (config.censor_rate == 0.0) {
        y = T;
        delta.setOnes();
    } else {
        // one uniform draw per subject; the censoring times are then a
        // monotone function of the rate, so bisection on the log rate hits
        // the target censored fraction
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) u(i) = rng.uniform01();
        const auto censored_fraction = [&](double rate_c) {
            int censored = 0;
            for (int i = 0; i < n; ++i) censored += T(i) > -std::log(1.0 - u(i)) / rate_c;
            return static_cast<double>(censored) / static_cast<double>(n);
        };
        double lo = std::log(1e-12), hi = std::log(1e12);
        for (int step = 0; step < 50; ++step) {
            const double mid = 0.5 * (lo + hi);
            (censored_fraction(std::exp(mid)) < config.censor_rate ? lo : hi) = mid;
        }
        const double rate_c = std::exp(0.5 * (lo + hi));
        out.realized_censoring = censored_fraction(rate_c);
        if (std::abs(out.realized_censoring - config.censor_rate) > 0.05)
            throw NumericalError("synth: censoring calibration failed (realized " +
                                 std::to_string(out.realized_censoring) + ")");
        for (int i = 0; i < n; ++i) {
            const double c = -std::log(1.0 - u(i)) / rate_c;
            y(i) = std::min(T(i), c);
            delta(i) = T(i) <= c ? 1 : 0;
        }
    }

    out.data.X = std::move(X);
    out.data.y = std::move(y);
    out.data.delta = std::move(delta);
    for (int j = 0; j < d; ++j) {
        out.data.names.push_back("x" + std::to_string(j + 1));
        out.data.kinds.push_back(ColumnKind::continuous);
    }
    out.data.validate();
    return out;
}

}  // namespace survbench
