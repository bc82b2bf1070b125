#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "survbench/types.hpp"

namespace survbench {

// Column-wise imputation: continuous cells get the column median of observed
// values, binary cells the most frequent observed value (ties toward the
// smaller encoding). A fully missing column is a DataError.
Dataset impute_missing(const RawSurvivalTable& raw);

// Train-set mean and standard deviation (divisor n-1) per continuous column.
// A zero-variance continuous column is a DataError naming the column.
StandardizationParams fit_standardizer(const Dataset& train);

// z-scores continuous columns with the supplied (train) parameters.
Dataset apply_standardizer(const Dataset& data, const StandardizationParams& params);

// Seeded uniform partition; test size = round(n * test_fraction).
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

// CSV with header; reserved columns `y` (days) and `delta` (0/1); empty cell
// = missing covariate. Kind inferred per column ({0,1,empty} observed =>
// binary) unless overridden by name.
RawSurvivalTable load_survival_csv(const std::string& path,
                                   const std::map<std::string, ColumnKind>& kind_overrides = {});

void save_survival_csv(const std::string& path, const Dataset& data);

// Median with the even-count mean-of-central-pair convention.
double median(std::vector<double> values);

// Lower quartile, median, upper quartile by linear interpolation of order
// statistics (used for the group summary tables).
double quantile(std::vector<double> values, double q);

}  // namespace survbench
