#pragma once

#include "multinorm/body.hpp"
#include "multinorm/estimate.hpp"
#include "multinorm/rng.hpp"
#include "multinorm/sampling.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace multinorm {

/// An MC value that may sit at the resolution floor of the sample size.
struct CensoredEstimate {
  double value = 0.0;
  /// True when the underlying probability was below 1/N; value is then
  /// min{n, log N}.
  bool censored = false;
  double probability = 0.0;
  std::size_t n_samples = 0;
};

struct FunctionalProfile {
  std::string body;
  int n = 0;
  Estimate M;
  std::vector<std::pair<double, Estimate>> M_q;
  Estimate mean_width;
  double b = 0.0;
  double R = 0.0;
  double vrad = 0.0;
  Estimate gaussian_median;
  double k = 0.0;
  CensoredEstimate d;
  std::size_t n_samples = 0;
  RngStream rng;
};

/// Per-sample gauges of N points uniform on the sphere.
std::vector<double> sphere_gauge_values(const BodySpec& body, std::size_t N, const RngStream& rng);

/// M(K): mean gauge over the sphere. N >= 1000.
Estimate estimate_M(const BodySpec& body, std::size_t N, const RngStream& rng);

/// M_q(K) for q != 0, q > -n. All q share one sample set.
std::vector<Estimate> estimate_Mq(const BodySpec& body, std::span<const double> qs, std::size_t N,
                                  const RngStream& rng);
Estimate estimate_Mq(const BodySpec& body, double q, std::size_t N, const RngStream& rng);

/// w(C): mean support function over the sphere.
Estimate estimate_mean_width(const BodySpec& body, std::size_t N, const RngStream& rng);

/// m(K): median of the gauge of a standard Gaussian vector. N >= 10^4.
/// The error is half the width of the binomial order-statistic 95% interval
/// divided by 1.96.
Estimate estimate_gaussian_median(const BodySpec& body, std::size_t N, const RngStream& rng);

/// k(K) = n (M / b)^2.
double compute_k(const BodySpec& body, const Estimate& M);

/// d(K) = min{n, -log P(gauge(G) <= m/2)} with the probability floored at 1/N.
CensoredEstimate estimate_d(const BodySpec& body, const Estimate& median, std::size_t N,
                            const RngStream& rng);

/// I_q(mu) = (E ||x||_2^q)^(1/q) under the pushforward; q != 0, q > -n.
std::vector<Estimate> estimate_Iq(const PushforwardMeasure& measure, std::span<const double> qs,
                                  std::size_t N, const RngStream& rng);
Estimate estimate_Iq(const PushforwardMeasure& measure, double q, std::size_t N, const RngStream& rng);

/// I_1(mu, K) = E ||x||_K under the pushforward.
Estimate estimate_I1K(const PushforwardMeasure& measure, const BodySpec& K, std::size_t N,
                      const RngStream& rng);

/// Fraction of pushforward samples with ||x||_2 >= threshold.
Estimate tail_fraction(const PushforwardMeasure& measure, double threshold, std::size_t N,
                       const RngStream& rng);

/// Everything above for one body, each functional on its own child stream.
FunctionalProfile compute_profile(const BodySpec& body, std::size_t N, const RngStream& rng,
                                  std::span<const double> qs = {});

}  // namespace multinorm
