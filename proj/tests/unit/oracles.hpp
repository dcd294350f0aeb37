#pragma once

// Reference computations used only by the tests. None of them call into the
// library's estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

inline double lp(const std::vector<double>& x, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Critical value of the two-sample KS statistic at level 0.01.
inline double ks_critical_001(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

/// Density at 0 of sum_j t_j U_j, U_j uniform on [-1/2, 1/2], by repeated
/// numerical convolution on a grid of step h.
inline double density_by_convolution(const std::vector<double>& t, double h = 2e-4) {
  std::vector<double> f{1.0 / h};  // point mass at 0 as a single cell
  for (double w : t) {
    const double a = std::abs(w);
    if (a == 0.0) continue;
    const auto half = static_cast<std::ptrdiff_t>(std::llround(a / (2.0 * h)));
    std::vector<double> g(f.size() + 2 * static_cast<std::size_t>(half), 0.0);
    // Box of width 2*half+1 cells and total mass 1, via prefix sums.
    std::vector<double> prefix(f.size() + 1, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) prefix[i + 1] = prefix[i] + f[i];
    const auto width = static_cast<double>(2 * half + 1);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(k) - 2 * half);
      const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(f.size()) - 1, static_cast<std::ptrdiff_t>(k));
      if (lo <= hi) g[k] = (prefix[hi + 1] - prefix[lo]) / width;
    }
    f = std::move(g);
  }
  return f[f.size() / 2];
}

}  // namespace oracle
