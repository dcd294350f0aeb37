#include "multinorm/functionals.hpp"

#include "multinorm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace multinorm {

namespace {

void require_samples(std::size_t N, std::size_t minimum, const char* what) {
  if (N < minimum) {
    throw ArgumentError(std::string(what) + " needs N >= " + std::to_string(minimum) + ", got " +
                        std::to_string(N));
  }
}

void require_moment(double q, int n) {
  if (q == 0.0) throw ArgumentError("moment order q must be nonzero");
  if (!(q > -static_cast<double>(n))) {
    throw ArgumentError("moment order q = " + std::to_string(q) + " must exceed -n = " + std::to_string(-n));
  }
}

template <typename F>
std::vector<double> sphere_values(int n, std::size_t N, const RngStream& rng, F&& f) {
  std::vector<double> out(N);
  fill_chunked(N, rng, [&](Engine& eng, std::size_t begin, std::size_t end) {
    boost::random::normal_distribution<double> normal;
    Vector xi(n);
    for (std::size_t i = begin; i < end; ++i) {
      double norm = 0.0;
      do {
        for (int k = 0; k < n; ++k) xi[k] = normal(eng);
        norm = xi.norm();
      } while (norm == 0.0);
      xi /= norm;
      out[i] = f(xi);
    }
  });
  return out;
}

std::vector<double> gaussian_gauge_values(const BodySpec& body, std::size_t N, const RngStream& rng) {
  const int n = body.dim();
  std::vector<double> out(N);
  fill_chunked(N, rng, [&](Engine& eng, std::size_t begin, std::size_t end) {
    boost::random::normal_distribution<double> normal;
    Vector g(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (int k = 0; k < n; ++k) g[k] = normal(eng);
      out[i] = gauge(body, g);
    }
  });
  return out;
}

template <typename F>
std::vector<double> pushforward_values(const PushforwardMeasure& measure, std::size_t N, const RngStream& rng,
                                       F&& f) {
  std::vector<double> out(N);
  fill_chunked(N, rng, [&](Engine& eng, std::size_t begin, std::size_t end) {
    WeightedSumSampler sampler(measure);
    Vector x(measure.dim());
    for (std::size_t i = begin; i < end; ++i) {
      sampler.sample(eng, x);
      out[i] = f(x);
    }
  });
  return out;
}

}  // namespace

std::vector<double> sphere_gauge_values(const BodySpec& body, std::size_t N, const RngStream& rng) {
  return sphere_values(body.dim(), N, rng, [&](const Vector& xi) { return gauge(body, xi); });
}

Estimate estimate_M(const BodySpec& body, std::size_t N, const RngStream& rng) {
  require_samples(N, 1000, "estimate_M");
  // The gauge of a Euclidean ball is constant on the sphere.
  if (body.family() == Family::EuclideanBall) return {1.0 / body.scale(), 0.0, N};
  return mean_estimate(sphere_gauge_values(body, N, rng));
}

std::vector<Estimate> estimate_Mq(const BodySpec& body, std::span<const double> qs, std::size_t N,
                                  const RngStream& rng) {
  require_samples(N, 1000, "estimate_Mq");
  for (double q : qs) require_moment(q, body.dim());
  if (body.family() == Family::EuclideanBall) {
    return std::vector<Estimate>(qs.size(), Estimate{1.0 / body.scale(), 0.0, N});
  }
  const auto values = sphere_gauge_values(body, N, rng);
  std::vector<Estimate> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(power_mean_estimate(values, q));
  return out;
}

Estimate estimate_Mq(const BodySpec& body, double q, std::size_t N, const RngStream& rng) {
  return estimate_Mq(body, std::span<const double>(&q, 1), N, rng).front();
}

Estimate estimate_mean_width(const BodySpec& body, std::size_t N, const RngStream& rng) {
  require_samples(N, 1000, "estimate_mean_width");
  return mean_estimate(sphere_values(body.dim(), N, rng, [&](const Vector& xi) { return support(body, xi); }));
}

Estimate estimate_gaussian_median(const BodySpec& body, std::size_t N, const RngStream& rng) {
  require_samples(N, 10000, "estimate_gaussian_median");
  auto values = gaussian_gauge_values(body, N, rng);
  std::sort(values.begin(), values.end());
  const auto q = empirical_quantile(values, 0.5);
  return {q.value, (q.ci95.hi - q.ci95.lo) / (2.0 * 1.96), N};
}

double compute_k(const BodySpec& body, const Estimate& M) {
  const double ratio = M.value / polar_radius(body);
  return body.dim() * ratio * ratio;
}

CensoredEstimate estimate_d(const BodySpec& body, const Estimate& median, std::size_t N,
                            const RngStream& rng) {
  require_samples(N, 1000, "estimate_d");
  if (!(median.value > 0.0)) throw ArgumentError("estimate_d needs a positive median");
  const auto values = gaussian_gauge_values(body, N, rng);
  const double cut = 0.5 * median.value;
  const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v <= cut; });
  const double resolution = 1.0 / static_cast<double>(N);
  const double p_hat = static_cast<double>(hits) / static_cast<double>(N);
  CensoredEstimate out;
  out.probability = p_hat;
  out.censored = p_hat < resolution;
  out.value = std::min(static_cast<double>(body.dim()), -std::log(std::max(p_hat, resolution)));
  out.n_samples = N;
  return out;
}

std::vector<Estimate> estimate_Iq(const PushforwardMeasure& measure, std::span<const double> qs, std::size_t N,
                                  const RngStream& rng) {
  for (double q : qs) require_moment(q, measure.dim());
  const auto values = pushforward_values(measure, N, rng, [](const Vector& x) { return x.norm(); });
  std::vector<Estimate> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(power_mean_estimate(values, q));
  return out;
}

Estimate estimate_Iq(const PushforwardMeasure& measure, double q, std::size_t N, const RngStream& rng) {
  return estimate_Iq(measure, std::span<const double>(&q, 1), N, rng).front();
}

Estimate estimate_I1K(const PushforwardMeasure& measure, const BodySpec& K, std::size_t N,
                      const RngStream& rng) {
  if (K.dim() != measure.dim()) throw ArgumentError("dimension mismatch between measure and K");
  return mean_estimate(pushforward_values(measure, N, rng, [&](const Vector& x) { return gauge(K, x); }));
}

Estimate tail_fraction(const PushforwardMeasure& measure, double threshold, std::size_t N,
                       const RngStream& rng) {
  return mean_estimate(
      pushforward_values(measure, N, rng, [&](const Vector& x) { return x.norm() >= threshold ? 1.0 : 0.0; }));
}

FunctionalProfile compute_profile(const BodySpec& body, std::size_t N, const RngStream& rng,
                                  std::span<const double> qs) {
  FunctionalProfile p;
  p.body = body.descriptor();
  p.n = body.dim();
  p.n_samples = N;
  p.rng = rng;
  p.M = estimate_M(body, N, rng.child(1));
  if (!qs.empty()) {
    // Same stream as M: M_1 reproduces M exactly.
    const auto mq = estimate_Mq(body, qs, N, rng.child(1));
    for (std::size_t i = 0; i < qs.size(); ++i) p.M_q.emplace_back(qs[i], mq[i]);
  }
  p.mean_width = estimate_mean_width(body, N, rng.child(2));
  p.b = polar_radius(body);
  p.R = radius(body);
  p.vrad = volume_radius(body);
  p.gaussian_median = estimate_gaussian_median(body, std::max<std::size_t>(N, 10000), rng.child(3));
  p.k = compute_k(body, p.M);
  p.d = estimate_d(body, p.gaussian_median, N, rng.child(4));
  return p;
}

}  // namespace multinorm
