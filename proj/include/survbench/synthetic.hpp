#pragma once

#include <cstdint>

#include "survbench/types.hpp"

namespace survbench {

// Synthetic censored mixture data; serves as the ground-truth oracle for the
// acceptance suite.
struct SynthConfig {
    int n = 400;
    int d = 20;
    int sparsity = 5;
    double rate_high = 1.0 / 5.0;   // events per day, high-risk subgroup
    double rate_low = 1.0 / 80.0;
    double censor_rate = 0.3;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthData {
    Dataset data;
    std::vector<int> latent_group;  // 1 = high risk
    Eigen::VectorXd true_beta;
    double realized_censoring = 0.0;
};

// Standard-normal covariates, gating coefficients of magnitude 1 with
// alternating sign, exponential durations per latent group, independent
// exponential censoring calibrated by bisection to the target fraction.
SynthData synth_generate(const SynthConfig& config);

}  // namespace survbench
