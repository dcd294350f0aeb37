#pragma once

#include <cstddef>
#include <span>

namespace multinorm {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Monte Carlo value with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  [[nodiscard]] Interval ci95() const { return {value - 1.96 * std_error, value + 1.96 * std_error}; }

  /// A known number: zero error, zero samples.
  static Estimate exact(double value) { return {value, 0.0, 0}; }
};

/// Sample mean with CLT standard error.
Estimate mean_estimate(std::span<const double> values);

/// (mean of v^q)^(1/q) for q != 0, error by the delta method on the q-th
/// power scale. Values must be positive when q < 0.
Estimate power_mean_estimate(std::span<const double> values, double q);

/// sqrt(a.se^2 + b.se^2).
double combined_error(const Estimate& a, const Estimate& b);

/// Empirical quantile x_(k) with k = ceil(level * N) (1-based) of the sorted
/// sample, plus a normal-approximation order-statistic 95% interval.
struct QuantileResult {
  double value = 0.0;
  Interval ci95;
};
QuantileResult empirical_quantile(std::span<const double> sorted, double level);

}  // namespace multinorm
