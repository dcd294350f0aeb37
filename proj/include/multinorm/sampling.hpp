#pragma once

#include "multinorm/body.hpp"
#include "multinorm/rng.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace multinorm {

/// Coefficient vector t with cached norms and decreasing rearrangement.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> entries);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] double operator[](std::size_t j) const { return entries_[j]; }
  [[nodiscard]] std::span<const double> entries() const { return entries_; }
  [[nodiscard]] double l1() const { return l1_; }
  [[nodiscard]] double l2() const { return l2_; }
  [[nodiscard]] double linf() const { return linf_; }
  /// (t_i*) : |t_j| sorted non-increasing.
  [[nodiscard]] std::span<const double> rearranged() const { return rearranged_; }

  [[nodiscard]] WeightVector scaled(double factor) const;

 private:
  std::vector<double> entries_;
  std::vector<double> rearranged_;
  double l1_ = 0.0;
  double l2_ = 0.0;
  double linf_ = 0.0;
};

/// The fixed t-pattern library. All patterns have unit Euclidean norm.
enum class TPattern { Spiky, Flat, Geometric, TwoLevel, RandomUnit };

inline constexpr TPattern kAllPatterns[] = {TPattern::Spiky, TPattern::Flat, TPattern::Geometric,
                                            TPattern::TwoLevel, TPattern::RandomUnit};
inline constexpr double kGeometricRatio = 0.7;

std::string to_string(TPattern pattern);
TPattern parse_pattern(std::string_view name);

/// `rng` is only consumed by RandomUnit.
WeightVector make_weights(TPattern pattern, std::size_t s, const RngStream& rng = {});

/// Parses `1,-2,3`, `pattern:<name>:<s>` (names: spiky|e1, flat|uniform,
/// geometric|decay, two-level, random).
WeightVector parse_weights(std::string_view text, const RngStream& rng = {});

/// Law of sum_j t_j X_j with X_j uniform on the j-th body.
///
/// `bodies` holds either one common body or one body per weight.
/// With `isotropic_rescale` the sum is divided by L_C * ||t||_2 (the law mu_t);
/// otherwise, with `normalize_by_l2`, it is divided by ||t||_2 only (the
/// unit-vector convention for nu_t); with neither it is the raw sum.
struct PushforwardMeasure {
  std::vector<BodySpec> bodies;
  WeightVector weights;
  bool isotropic_rescale = false;
  bool normalize_by_l2 = false;

  PushforwardMeasure(std::vector<BodySpec> bodies, WeightVector weights, bool isotropic_rescale = false,
                     bool normalize_by_l2 = false);

  [[nodiscard]] const BodySpec& body(std::size_t j) const { return bodies.size() == 1 ? bodies[0] : bodies[j]; }
  [[nodiscard]] int dim() const { return bodies.front().dim(); }
  [[nodiscard]] bool common_body() const;
  /// Factor applied to the raw weighted sum.
  [[nodiscard]] double output_factor() const { return factor_; }

 private:
  double factor_ = 1.0;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine word.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

/// Exact uniform sampler on one body, reusable in tight loops.
///
/// Coordinates g_i have density proportional to exp(-|u|^p): Gaussian for
/// p = 2, Laplace for p = 1, a Gaussian-envelope rejection sampler for
/// 2 < p <= 8, and |g|^p ~ Gamma(1/p) with a random sign otherwise.
class UniformBodySampler {
 public:
  explicit UniformBodySampler(const BodySpec& body);

  /// Uniform point of the unrotated body lambda * B_p^n.
  void sample_unrotated(Engine& eng, Eigen::Ref<Vector> out);
  /// Uniform point of the body; `scratch` must have size n when rotated.
  void sample(Engine& eng, Eigen::Ref<Vector> out, Eigen::Ref<Vector> scratch);

  [[nodiscard]] const BodySpec& body() const { return body_; }

 private:
  enum class Method { Cube, Gaussian, Laplace, Envelope, Gamma };

  double sign_bit(Engine& eng);

  BodySpec body_;
  Method method_ = Method::Gamma;
  bool integer_p_ = false;
  // Envelope: u^p >= a u^2 - b, proposal N(0, 1/(2a)).
  double env_a_ = 0.0;
  double env_b_ = 0.0;
  std::uint64_t sign_bits_ = 0;
  int sign_left_ = 0;
  boost::random::exponential_distribution<double> exp_{1.0};
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::gamma_distribution<double> gamma_;
};

/// Draws Sum_j t_j X_j (times the measure's output factor) into `out`.
/// Terms with t_j == 0 are skipped; they do not change the law.
class WeightedSumSampler {
 public:
  explicit WeightedSumSampler(const PushforwardMeasure& measure);

  void sample(Engine& eng, Eigen::Ref<Vector> out);

 private:
  const PushforwardMeasure& measure_;
  std::vector<UniformBodySampler> samplers_;
  std::vector<std::size_t> active_;
  Vector point_;
  Vector scratch_;
  bool rotate_once_ = false;
};

Vector sample_lp_ball(const BodySpec& body, Engine& eng);
Vector sample_sphere(int n, Engine& eng);
Vector sample_gaussian(int n, Engine& eng);
/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of diag(R) folded into Q.
Matrix sample_haar_rotation(int n, Engine& eng);
Matrix haar_rotation_from_seed(int n, std::uint64_t seed);
std::vector<int> sample_signs(std::size_t s, Engine& eng);
Vector sample_weighted_sum(const PushforwardMeasure& measure, Engine& eng);

}  // namespace multinorm
