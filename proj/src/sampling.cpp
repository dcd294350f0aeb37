#include "multinorm/sampling.hpp"

#include "multinorm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

namespace multinorm {

WeightVector::WeightVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ArgumentError("weight vector t must be nonempty");
  rearranged_.reserve(entries_.size());
  double sq = 0.0;
  for (double t : entries_) {
    if (!std::isfinite(t)) throw ArgumentError("weight vector t has a non-finite entry");
    const double a = std::abs(t);
    rearranged_.push_back(a);
    l1_ += a;
    sq += t * t;
    linf_ = std::max(linf_, a);
  }
  l2_ = std::sqrt(sq);
  std::sort(rearranged_.begin(), rearranged_.end(), std::greater<>());
}

WeightVector WeightVector::scaled(double factor) const {
  std::vector<double> out = entries_;
  for (double& t : out) t *= factor;
  return WeightVector(std::move(out));
}

std::string to_string(TPattern pattern) {
  switch (pattern) {
    case TPattern::Spiky: return "spiky";
    case TPattern::Flat: return "flat";
    case TPattern::Geometric: return "geometric";
    case TPattern::TwoLevel: return "two-level";
    case TPattern::RandomUnit: return "random";
  }
  return "?";
}

TPattern parse_pattern(std::string_view name) {
  if (name == "spiky" || name == "e1") return TPattern::Spiky;
  if (name == "flat" || name == "uniform") return TPattern::Flat;
  if (name == "geometric" || name == "decay") return TPattern::Geometric;
  if (name == "two-level" || name == "twolevel") return TPattern::TwoLevel;
  if (name == "random" || name == "random-unit") return TPattern::RandomUnit;
  throw ArgumentError("unknown t-pattern '" + std::string(name) + "'");
}

WeightVector make_weights(TPattern pattern, std::size_t s, const RngStream& rng) {
  if (s == 0) throw ArgumentError("pattern length s must be >= 1");
  std::vector<double> t(s, 0.0);
  switch (pattern) {
    case TPattern::Spiky:
      t[0] = 1.0;
      break;
    case TPattern::Flat:
      std::fill(t.begin(), t.end(), 1.0);
      break;
    case TPattern::Geometric:
      for (std::size_t j = 0; j < s; ++j) t[j] = std::pow(kGeometricRatio, static_cast<double>(j));
      break;
    case TPattern::TwoLevel: {
      const std::size_t high = std::max<std::size_t>(1, s / 4);
      for (std::size_t j = 0; j < s; ++j) t[j] = j < high ? 1.0 : 0.25;
      break;
    }
    case TPattern::RandomUnit: {
      Engine eng = rng.child(0x7e57).engine();
      boost::random::normal_distribution<double> normal;
      double sq = 0.0;
      do {
        sq = 0.0;
        for (double& x : t) {
          x = normal(eng);
          sq += x * x;
        }
      } while (sq == 0.0);
      break;
    }
  }
  const double norm = std::sqrt(std::inner_product(t.begin(), t.end(), t.begin(), 0.0));
  for (double& x : t) x /= norm;
  return WeightVector(std::move(t));
}

WeightVector parse_weights(std::string_view text, const RngStream& rng) {
  if (text.rfind("pattern:", 0) == 0) {
    const std::string_view rest = text.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ArgumentError("expected pattern:<name>:<s>");
    std::size_t s = 0;
    const std::string_view digits = rest.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), s);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || s == 0) {
      throw ArgumentError("invalid pattern length '" + std::string(digits) + "'");
    }
    return make_weights(parse_pattern(rest.substr(0, colon)), s, rng);
  }
  std::vector<double> t;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ArgumentError("invalid weight entry '" + std::string(item) + "'");
    }
    t.push_back(value);
    start = comma + 1;
  }
  return WeightVector(std::move(t));
}

PushforwardMeasure::PushforwardMeasure(std::vector<BodySpec> bodies_in, WeightVector weights_in,
                                       bool isotropic, bool normalize)
    : bodies(std::move(bodies_in)),
      weights(std::move(weights_in)),
      isotropic_rescale(isotropic),
      normalize_by_l2(normalize) {
  if (bodies.empty()) throw ArgumentError("pushforward measure needs at least one body");
  if (bodies.size() != 1 && bodies.size() != weights.size()) {
    throw ArgumentError("body list must have length 1 or s = " + std::to_string(weights.size()));
  }
  for (const auto& b : bodies) {
    if (b.dim() != bodies.front().dim()) throw ArgumentError("dimension mismatch between bodies");
  }
  if (isotropic_rescale || normalize_by_l2) {
    if (weights.l2() == 0.0) throw ArgumentError("cannot rescale by ||t||_2 = 0");
    factor_ = 1.0 / weights.l2();
  }
  if (isotropic_rescale) {
    const double lc = isotropic_constant(bodies.front());
    for (const auto& b : bodies) {
      if (std::abs(isotropic_constant(b) - lc) > 1e-12 * lc) {
        throw ArgumentError("isotropic rescale needs a common isotropic constant L_C");
      }
    }
    factor_ /= lc;
  }
}

bool PushforwardMeasure::common_body() const { return bodies.size() == 1; }

namespace {

constexpr double kEnvelopeMaxP = 8.0;

// |u|^p, by repeated multiplication when p is a small integer.
double abs_pow(double u, double p, bool integer_p) {
  const double a = std::abs(u);
  if (!integer_p) return std::pow(a, p);
  double r = 1.0;
  double base = a;
  for (auto k = static_cast<unsigned>(p); k > 0; k >>= 1) {
    if (k & 1U) r *= base;
    base *= base;
  }
  return r;
}

}  // namespace

UniformBodySampler::UniformBodySampler(const BodySpec& body)
    : body_(body), gamma_(body.p() == kInf ? 1.0 : 1.0 / body.p(), 1.0) {
  const double p = body.p();
  integer_p_ = p != kInf && p == std::floor(p) && p <= 64.0;
  if (p == kInf) {
    method_ = Method::Cube;
  } else if (p == 2.0) {
    method_ = Method::Gaussian;
    normal_ = boost::random::normal_distribution<double>(0.0, std::sqrt(0.5));
  } else if (p == 1.0) {
    method_ = Method::Laplace;
  } else if (p > 2.0 && p <= kEnvelopeMaxP) {
    // Tangent to v -> v^(p/2) at v0 = p^(-2/p), the point that maximizes the
    // acceptance rate.
    method_ = Method::Envelope;
    const double v0 = std::pow(p, -2.0 / p);
    env_a_ = 0.5 * p * std::pow(v0, 0.5 * p - 1.0);
    env_b_ = (0.5 * p - 1.0) * std::pow(v0, 0.5 * p);
    normal_ = boost::random::normal_distribution<double>(0.0, std::sqrt(0.5 / env_a_));
  } else {
    method_ = Method::Gamma;
  }
}

double UniformBodySampler::sign_bit(Engine& eng) {
  if (sign_left_ == 0) {
    sign_bits_ = eng();
    sign_left_ = 64;
  }
  const bool negative = (sign_bits_ & 1U) != 0;
  sign_bits_ >>= 1;
  --sign_left_;
  return negative ? -1.0 : 1.0;
}

void UniformBodySampler::sample_unrotated(Engine& eng, Eigen::Ref<Vector> out) {
  const double p = body_.p();
  const double lambda = body_.scale();
  const Eigen::Index n = out.size();
  if (method_ == Method::Cube) {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = lambda * (2.0 * uniform01(eng) - 1.0);
    return;
  }
  // g_i with density ~ exp(-|u|^p), z ~ Exp(1): lambda g / (sum |g_i|^p + z)^(1/p)
  // is uniform on lambda B_p^n.
  double total = exp_(eng);
  switch (method_) {
    case Method::Gaussian:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double g = normal_(eng);
        out[i] = g;
        total += g * g;
      }
      out *= lambda / std::sqrt(total);
      return;
    case Method::Laplace:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = exp_(eng);
        out[i] = sign_bit(eng) * mag;
        total += mag;
      }
      out *= lambda / total;
      return;
    case Method::Envelope:
      for (Eigen::Index i = 0; i < n; ++i) {
        for (;;) {
          const double g = normal_(eng);
          const double g_p = abs_pow(g, p, integer_p_);
          // Accept with probability exp(-(g^p - a g^2 + b)).
          if (exp_(eng) >= g_p - env_a_ * g * g + env_b_) {
            out[i] = g;
            total += g_p;
            break;
          }
        }
      }
      break;
    default:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mag_p = gamma_(eng);
        out[i] = sign_bit(eng) * std::pow(mag_p, 1.0 / p);
        total += mag_p;
      }
      break;
  }
  out *= lambda / std::pow(total, 1.0 / p);
}

void UniformBodySampler::sample(Engine& eng, Eigen::Ref<Vector> out, Eigen::Ref<Vector> scratch) {
  if (const Matrix* u = body_.rotation()) {
    sample_unrotated(eng, scratch);
    out.noalias() = *u * scratch;
  } else {
    sample_unrotated(eng, out);
  }
}

WeightedSumSampler::WeightedSumSampler(const PushforwardMeasure& measure)
    : measure_(measure), point_(measure.dim()), scratch_(measure.dim()) {
  const std::size_t s = measure.weights.size();
  samplers_.reserve(measure.bodies.size());
  for (const auto& b : measure.bodies) samplers_.emplace_back(b);
  for (std::size_t j = 0; j < s; ++j) {
    if (measure.weights[j] != 0.0) active_.push_back(j);
  }
  rotate_once_ = measure.common_body() && measure.bodies.front().rotation() != nullptr;
}

void WeightedSumSampler::sample(Engine& eng, Eigen::Ref<Vector> out) {
  out.setZero();
  if (rotate_once_) {
    // U is linear: sum_j t_j U y_j = U sum_j t_j y_j.
    auto& sampler = samplers_.front();
    scratch_.setZero();
    for (std::size_t j : active_) {
      sampler.sample_unrotated(eng, point_);
      scratch_ += measure_.weights[j] * point_;
    }
    out.noalias() = *measure_.bodies.front().rotation() * scratch_;
  } else {
    for (std::size_t j : active_) {
      auto& sampler = samplers_.size() == 1 ? samplers_.front() : samplers_[j];
      sampler.sample(eng, point_, scratch_);
      out += measure_.weights[j] * point_;
    }
  }
  if (measure_.output_factor() != 1.0) out *= measure_.output_factor();
}

Vector sample_lp_ball(const BodySpec& body, Engine& eng) {
  UniformBodySampler sampler(body);
  Vector out(body.dim());
  Vector scratch(body.dim());
  sampler.sample(eng, out, scratch);
  return out;
}

Vector sample_gaussian(int n, Engine& eng) {
  if (n < 1) throw ArgumentError("dimension must be >= 1");
  boost::random::normal_distribution<double> normal;
  Vector g(n);
  for (int i = 0; i < n; ++i) g[i] = normal(eng);
  return g;
}

Vector sample_sphere(int n, Engine& eng) {
  for (;;) {
    Vector g = sample_gaussian(n, eng);
    const double norm = g.norm();
    if (norm > 0.0) return g / norm;
  }
}

Matrix sample_haar_rotation(int n, Engine& eng) {
  if (n < 1) throw ArgumentError("dimension must be >= 1");
  boost::random::normal_distribution<double> normal;
  Matrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = normal(eng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix haar_rotation_from_seed(int n, std::uint64_t seed) {
  Engine eng = RngStream{seed, 0}.engine();
  return sample_haar_rotation(n, eng);
}

std::vector<int> sample_signs(std::size_t s, Engine& eng) {
  if (s < 1) throw ArgumentError("sign vector length must be >= 1");
  std::vector<int> signs(s);
  // One engine word feeds 64 signs.
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < s; ++j) {
    if (j % 64 == 0) bits = eng();
    signs[j] = (bits >> (j % 64)) & 1U ? 1 : -1;
  }
  return signs;
}

Vector sample_weighted_sum(const PushforwardMeasure& measure, Engine& eng) {
  WeightedSumSampler sampler(measure);
  Vector out(measure.dim());
  sampler.sample(eng, out);
  return out;
}

}  // namespace multinorm
