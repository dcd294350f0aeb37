#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace multinorm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A constant taken from the literature together with where it comes from.
struct LiteratureConstant {
  double value = 0.0;
  std::string source;
};

/// Per-body constants used by the bound checkers. These are never computed;
/// they are recorded inputs with a literature tag.
struct MetaConstants {
  std::optional<LiteratureConstant> psi2_constant;
  std::optional<LiteratureConstant> two_convex_alpha;
  std::optional<LiteratureConstant> cotype2;
  std::optional<LiteratureConstant> type2;
  bool unconditional = false;
};

enum class Family { LpBall, EuclideanBall, Cube, CrossPolytope };

/// Centrally symmetric body U(lambda * B_p^n).
///
/// Immutable. The rotation is shared between copies, so copying is cheap.
class BodySpec {
 public:
  /// lambda * B_p^n with p in [1, inf]; p == kInf is the cube.
  static BodySpec lp_ball(double p, int dim, double scale = 1.0);
  static BodySpec euclidean_ball(int dim, double scale = 1.0) { return lp_ball(2.0, dim, scale); }
  static BodySpec cube(int dim, double scale = 1.0) { return lp_ball(kInf, dim, scale); }
  static BodySpec cross_polytope(int dim, double scale = 1.0) { return lp_ball(1.0, dim, scale); }

  [[nodiscard]] Family family() const;
  [[nodiscard]] double p() const { return p_; }
  [[nodiscard]] bool is_cube() const { return p_ == kInf; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] const Matrix* rotation() const { return rotation_.get(); }
  [[nodiscard]] std::optional<std::uint64_t> rotation_seed() const { return rotation_seed_; }
  [[nodiscard]] const MetaConstants& meta() const { return meta_; }

  [[nodiscard]] BodySpec with_scale(double scale) const;
  /// Body U(C). `seed` is only recorded for the descriptor.
  [[nodiscard]] BodySpec with_rotation(Matrix rotation,
                                       std::optional<std::uint64_t> seed = std::nullopt) const;
  [[nodiscard]] BodySpec without_rotation() const;

  /// True when vol = 1 up to 1e-12 relative error.
  [[nodiscard]] bool volume_normalized() const;

  /// `lp:<p>:<n>[:vol1][:scale=<x>][:rot=<seed>]`
  [[nodiscard]] std::string descriptor() const;

 private:
  BodySpec() = default;

  double p_ = 2.0;
  int dim_ = 1;
  double scale_ = 1.0;
  std::shared_ptr<const Matrix> rotation_;
  std::optional<std::uint64_t> rotation_seed_;
  MetaConstants meta_;
};

/// Parses `lp:<p>:<n>[:vol1][:rot=<seed>]`. `ball`, `cube` and `cross` may
/// replace `lp:<p>`, e.g. `cube:16:vol1`. Throws ArgumentError.
BodySpec parse_body(std::string_view descriptor);

/// Dual exponent p' with 1/p + 1/p' = 1.
double dual_exponent(double p);

/// Plain l_p norm of x, p in [1, inf].
double lp_norm(VectorRef x, double p);

double gauge(const BodySpec& body, VectorRef x);
double support(const BodySpec& body, VectorRef y);

double log_volume(const BodySpec& body);
double volume(const BodySpec& body);
BodySpec normalize_to_volume_one(const BodySpec& body);

/// L_C of a volume-one body; ell_p balls are isotropic in that position and
/// stay isotropic under rotation. Throws StateError otherwise.
double isotropic_constant(const BodySpec& body);

/// b(K) = R(K polar) = max of the gauge on the Euclidean unit sphere.
double polar_radius(const BodySpec& body);

/// R(C): smallest R with C inside R * B_2^n.
double radius(const BodySpec& body);

/// (vol(C) / vol(B_2^n))^(1/n).
double volume_radius(const BodySpec& body);

/// Log-volume of the Euclidean unit ball in R^n.
double log_unit_ball_volume(int dim);

}  // namespace multinorm
