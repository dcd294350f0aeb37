#include "multinorm/body.hpp"

#include "multinorm/errors.hpp"
#include "multinorm/sampling.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace multinorm {

namespace {

constexpr double kVolumeTolerance = 1e-12;

MetaConstants lp_meta(double p, int dim) {
  MetaConstants meta;
  meta.unconditional = true;
  if (p >= 2.0) {
    meta.psi2_constant = LiteratureConstant{
        1.0, "Barthe-Guedon-Mendelson-Naor 2005: normalized l_q^n, q>=2, psi_2 with absolute constant"};
  }
  if (p > 1.0 && p <= 2.0) {
    meta.two_convex_alpha =
        LiteratureConstant{p - 1.0, "l_p, 1<p<=2: modulus of convexity >= (p-1) eps^2 (Ball-Carlen-Lieb)"};
  }
  if (p <= 2.0) {
    meta.cotype2 = LiteratureConstant{p == 2.0 ? 1.0 : std::sqrt(2.0),
                                      "l_p, 1<=p<=2: cotype-2 constant <= sqrt(2) (Szarek 1976)"};
  }
  if (p >= 2.0) {
    const double t2 = p == kInf ? std::sqrt(1.0 + std::log(static_cast<double>(dim)))
                                : std::sqrt(p - 1.0);
    meta.type2 = LiteratureConstant{
        t2, p == kInf ? "l_inf^n ~ l_(log n)^n: type-2 constant ~ sqrt(log n)"
                      : "l_p, p>=2: type-2 constant <= sqrt(p-1) (Khintchine-Kahane)"};
  }
  return meta;
}

std::string format_number(double x) {
  if (x == kInf) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parse_real(std::string_view text, std::string_view what) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "∞") return kInf;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ArgumentError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

BodySpec BodySpec::lp_ball(double p, int dim, double scale) {
  if (!(p >= 1.0)) throw ArgumentError("l_p ball needs p >= 1");
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("scale must be positive");
  BodySpec body;
  body.p_ = p;
  body.dim_ = dim;
  body.scale_ = scale;
  body.meta_ = lp_meta(p, dim);
  return body;
}

Family BodySpec::family() const {
  if (p_ == kInf) return Family::Cube;
  if (p_ == 1.0) return Family::CrossPolytope;
  if (p_ == 2.0) return Family::EuclideanBall;
  return Family::LpBall;
}

BodySpec BodySpec::with_scale(double scale) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("scale must be positive");
  BodySpec copy = *this;
  copy.scale_ = scale;
  return copy;
}

BodySpec BodySpec::with_rotation(Matrix rotation, std::optional<std::uint64_t> seed) const {
  if (rotation.rows() != dim_ || rotation.cols() != dim_) {
    throw ArgumentError("rotation must be " + std::to_string(dim_) + "x" + std::to_string(dim_));
  }
  const double defect = (rotation.transpose() * rotation - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw ArgumentError("rotation is not orthogonal");
  BodySpec copy = *this;
  copy.rotation_ = std::make_shared<const Matrix>(std::move(rotation));
  copy.rotation_seed_ = seed;
  return copy;
}

BodySpec BodySpec::without_rotation() const {
  BodySpec copy = *this;
  copy.rotation_.reset();
  copy.rotation_seed_.reset();
  return copy;
}

bool BodySpec::volume_normalized() const {
  return std::abs(std::expm1(log_volume(*this))) < kVolumeTolerance;
}

std::string BodySpec::descriptor() const {
  std::string out = "lp:" + format_number(p_) + ":" + std::to_string(dim_);
  if (volume_normalized()) {
    out += ":vol1";
  } else if (scale_ != 1.0) {
    out += ":scale=" + format_number(scale_);
  }
  if (rotation_) {
    out += rotation_seed_ ? ":rot=" + std::to_string(*rotation_seed_) : ":rot=custom";
  }
  return out;
}

double dual_exponent(double p) {
  if (p == 1.0) return kInf;
  if (p == kInf) return 1.0;
  return p / (p - 1.0);
}

double lp_norm(VectorRef x, double p) {
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.lpNorm<1>();
  if (p == kInf) return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  // Scale by the max entry so large p cannot overflow.
  const double top = x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  if (top == 0.0) return 0.0;
  const double inv_top = 1.0 / top;
  double acc = 0.0;
  if (p == std::floor(p) && p <= 64.0) {
    const auto k = static_cast<unsigned>(p);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double base = std::abs(x[i]) * inv_top;
      double r = 1.0;
      for (unsigned e = k; e > 0; e >>= 1) {
        if (e & 1U) r *= base;
        base *= base;
      }
      acc += r;
    }
  } else {
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) * inv_top, p);
  }
  return top * std::pow(acc, 1.0 / p);
}

namespace {
void check_dim(const BodySpec& body, VectorRef x) {
  if (x.size() != body.dim()) {
    throw ArgumentError("dimension mismatch: body has n=" + std::to_string(body.dim()) +
                        ", point has " + std::to_string(x.size()));
  }
}
}  // namespace

double gauge(const BodySpec& body, VectorRef x) {
  check_dim(body, x);
  if (const Matrix* u = body.rotation()) {
    const Vector y = u->transpose() * x;
    return lp_norm(y, body.p()) / body.scale();
  }
  return lp_norm(x, body.p()) / body.scale();
}

double support(const BodySpec& body, VectorRef y) {
  check_dim(body, y);
  const double q = dual_exponent(body.p());
  if (const Matrix* u = body.rotation()) {
    const Vector z = u->transpose() * y;
    return body.scale() * lp_norm(z, q);
  }
  return body.scale() * lp_norm(y, q);
}

double log_volume(const BodySpec& body) {
  const double n = body.dim();
  const double p = body.p();
  if (p == kInf) return n * std::log(2.0 * body.scale());
  return n * (std::log(2.0) + std::lgamma(1.0 + 1.0 / p) + std::log(body.scale())) -
         std::lgamma(1.0 + n / p);
}

double volume(const BodySpec& body) { return std::exp(log_volume(body)); }

BodySpec normalize_to_volume_one(const BodySpec& body) {
  return body.with_scale(body.scale() * std::exp(-log_volume(body) / body.dim()));
}

double isotropic_constant(const BodySpec& body) {
  if (!body.volume_normalized()) {
    throw StateError("isotropic_constant needs a volume-one body, got " + body.descriptor());
  }
  const double p = body.p();
  const double n = body.dim();
  // E y_1^2 for y uniform on the unit l_p ball.
  double second_moment = 1.0 / 3.0;
  if (p != kInf) {
    second_moment = std::exp(std::lgamma(3.0 / p) + std::lgamma(1.0 + n / p) - std::lgamma(1.0 / p) -
                             std::lgamma(1.0 + (n + 2.0) / p));
  }
  return body.scale() * std::sqrt(second_moment);
}

double polar_radius(const BodySpec& body) {
  const double p = body.p();
  if (p >= 2.0) return 1.0 / body.scale();
  return std::pow(static_cast<double>(body.dim()), 1.0 / p - 0.5) / body.scale();
}

double radius(const BodySpec& body) {
  const double p = body.p();
  if (p <= 2.0) return body.scale();
  const double inv_p = p == kInf ? 0.0 : 1.0 / p;
  return body.scale() * std::pow(static_cast<double>(body.dim()), 0.5 - inv_p);
}

double log_unit_ball_volume(int dim) {
  const double n = dim;
  return 0.5 * n * std::log(M_PI) - std::lgamma(1.0 + 0.5 * n);
}

double volume_radius(const BodySpec& body) {
  return std::exp((log_volume(body) - log_unit_ball_volume(body.dim())) / body.dim());
}

BodySpec parse_body(std::string_view descriptor) {
  const auto parts = split(descriptor, ':');
  std::size_t i = 0;
  double p = 0.0;
  const std::string_view head = parts[i++];
  if (head == "lp") {
    if (parts.size() < 3) throw ArgumentError("body descriptor needs lp:<p>:<n>, got '" + std::string(descriptor) + "'");
    p = parse_real(parts[i++], "exponent p");
  } else if (head == "ball") {
    p = 2.0;
  } else if (head == "cube") {
    p = kInf;
  } else if (head == "cross") {
    p = 1.0;
  } else {
    throw ArgumentError("unknown body family '" + std::string(head) + "' (expected lp, ball, cube or cross)");
  }
  if (i >= parts.size()) throw ArgumentError("body descriptor missing dimension: '" + std::string(descriptor) + "'");
  const double n_real = parse_real(parts[i++], "dimension");
  if (n_real < 1 || n_real != std::floor(n_real) || n_real > 1 << 20) {
    throw ArgumentError("dimension must be a positive integer");
  }
  if (!(p >= 1.0)) throw ArgumentError("exponent p must be >= 1");
  BodySpec body = BodySpec::lp_ball(p, static_cast<int>(n_real));
  bool vol1 = false;
  std::optional<std::uint64_t> rot_seed;
  for (; i < parts.size(); ++i) {
    const std::string_view opt = parts[i];
    if (opt == "vol1") {
      vol1 = true;
    } else if (opt.rfind("rot=", 0) == 0) {
      const std::string_view digits = opt.substr(4);
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw ArgumentError("invalid rotation seed '" + std::string(digits) + "'");
      }
      rot_seed = seed;
    } else if (opt.rfind("scale=", 0) == 0) {
      body = body.with_scale(parse_real(opt.substr(6), "scale"));
    } else {
      throw ArgumentError("unknown body option '" + std::string(opt) + "'");
    }
  }
  if (vol1) body = normalize_to_volume_one(body);
  if (rot_seed) body = body.with_rotation(haar_rotation_from_seed(body.dim(), *rot_seed), rot_seed);
  return body;
}

}  // namespace multinorm
