#pragma once

#include <cmath>

namespace survbench {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

// Upper tail of the chi-square distribution with one degree of freedom.
inline double chi_squared_1_upper(double x) { return std::erfc(std::sqrt(0.5 * x)); }

}  // namespace survbench
