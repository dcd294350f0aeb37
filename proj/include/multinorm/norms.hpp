#pragma once

#include "multinorm/body.hpp"
#include "multinorm/estimate.hpp"
#include "multinorm/rng.hpp"
#include "multinorm/sampling.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace multinorm {

/// Per-sample gauges ||sum_j t_j x_j||_K for every K in `Ks`, all evaluated on
/// the same N draws of the pushforward. Result is indexed [k][sample].
std::vector<std::vector<double>> sample_gauge_values(const PushforwardMeasure& measure,
                                                     std::span<const BodySpec> Ks, std::size_t N,
                                                     const RngStream& rng);

/// ||t||_{C,K}: mean of ||sum_j t_j x_j||_K with all s points redrawn in every
/// replicate. `C` holds one common body or one body per weight. N >= 1000.
Estimate estimate_norm(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K, std::size_t N,
                       const RngStream& rng);
Estimate estimate_norm(const BodySpec& C, const WeightVector& t, const BodySpec& K, std::size_t N,
                       const RngStream& rng);

/// ||t||_2 * L_C * I_1(mu_t, K). Needs a common volume-one body C.
Estimate estimate_norm_isotropic_route(const BodySpec& C, const WeightVector& t, const BodySpec& K,
                                       std::size_t N, const RngStream& rng);

/// How the law nu_t is parametrized in the pushforward identity.
enum class PushforwardConvention {
  /// nu_t = law of sum t_j X_j; ||t|| = E_nu ||x||_K.
  Raw,
  /// nu_t = law of sum t_j X_j / ||t||_2; ||t|| = ||t||_2 E_nu ||x||_K.
  UnitNormalized,
};

/// ||t||_{C,K} computed as an integral against nu_t in either convention.
Estimate estimate_norm_pushforward(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K,
                                   std::size_t N, const RngStream& rng, PushforwardConvention convention);

/// (E ||sum t_j x_j||_K^q)^(1/q) for each q >= 1, on one shared sample set.
std::vector<Estimate> estimate_moments(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K,
                                       std::span<const double> qs, std::size_t N, const RngStream& rng);
Estimate estimate_moment(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K, double q,
                         std::size_t N, const RngStream& rng);

/// Default cut-off u = max(1, round(ln n)) of the cube functional.
int default_qn_cutoff(int n);

/// q_n(t) = sum_{i<=u} t_i* + sqrt(u) (sum_{i>u} (t_i*)^2)^(1/2).
double q_n_cube(const WeightVector& t, int n, std::optional<int> cutoff = std::nullopt);

/// Density at 0 of sum_j t_j X_j with X_j uniform on [-1/2, 1/2]; ||t||_2 = 1.
/// Exact piecewise-polynomial formula when it is cheap (at most 30 nonzero
/// weights and at most 2^20 terms after merging equal weights) and
/// numerically safe, otherwise the Fourier integral of the product of sinc
/// factors.
double density_at_zero_1d(const WeightVector& t);

/// The Fourier-integral route alone: (1/pi) int_0^inf prod_j sinc(|t_j| w / 2) dw.
/// Needs at least three nonzero weights; the integrand tail is cut at 1e-10.
double density_at_zero_1d_fourier(const WeightVector& t);

}  // namespace multinorm
