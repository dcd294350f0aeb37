#include "multinorm/estimate.hpp"

#include "multinorm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace multinorm {

Estimate mean_estimate(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw ArgumentError("mean of an empty sample");
  // Welford, in index order so the result does not depend on threading.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

Estimate power_mean_estimate(std::span<const double> values, double q) {
  if (q == 0.0) throw ArgumentError("power mean needs q != 0");
  if (q == 1.0) return mean_estimate(values);
  std::vector<double> powered(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (q < 0.0 && !(values[i] > 0.0)) throw ArgumentError("negative moment of a non-positive value");
    powered[i] = std::pow(values[i], q);
  }
  const Estimate raw = mean_estimate(powered);
  const double value = std::pow(raw.value, 1.0 / q);
  // d/dm m^(1/q) = (1/q) m^(1/q - 1)
  const double slope = std::abs(value / (q * raw.value));
  return {value, slope * raw.std_error, raw.n_samples};
}

double combined_error(const Estimate& a, const Estimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

QuantileResult empirical_quantile(std::span<const double> sorted, double level) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ArgumentError("quantile of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw ArgumentError("quantile level must be in (0, 1]");
  auto at = [&](double rank) {
    const double k = std::clamp(std::ceil(rank), 1.0, static_cast<double>(n));
    return sorted[static_cast<std::size_t>(k) - 1];
  };
  const double center = level * static_cast<double>(n);
  const double half = 1.96 * std::sqrt(static_cast<double>(n) * level * (1.0 - level));
  return {at(center - 1e-9 * center), {at(center - half), at(center + half + 1.0)}};
}

}  // namespace multinorm
