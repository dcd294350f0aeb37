#include "multinorm/norms.hpp"

#include "multinorm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace multinorm {

namespace {

void check_inputs(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K, std::size_t N) {
  if (C.empty()) throw ArgumentError("body list C is empty");
  if (C.size() != 1 && C.size() != t.size()) {
    throw ArgumentError("body list must have length 1 or s = " + std::to_string(t.size()));
  }
  for (const auto& c : C) {
    if (c.dim() != K.dim()) {
      throw ArgumentError("dimension mismatch: C has n=" + std::to_string(c.dim()) + ", K has n=" +
                          std::to_string(K.dim()));
    }
  }
  if (N < 1000) throw ArgumentError("norm estimates need N >= 1000, got " + std::to_string(N));
}

}  // namespace

std::vector<std::vector<double>> sample_gauge_values(const PushforwardMeasure& measure,
                                                     std::span<const BodySpec> Ks, std::size_t N,
                                                     const RngStream& rng) {
  for (const auto& K : Ks) {
    if (K.dim() != measure.dim()) throw ArgumentError("dimension mismatch between measure and K");
  }
  std::vector<std::vector<double>> out(Ks.size(), std::vector<double>(N));
  fill_chunked(N, rng, [&](Engine& eng, std::size_t begin, std::size_t end) {
    WeightedSumSampler sampler(measure);
    Vector x(measure.dim());
    for (std::size_t i = begin; i < end; ++i) {
      sampler.sample(eng, x);
      for (std::size_t k = 0; k < Ks.size(); ++k) out[k][i] = gauge(Ks[k], x);
    }
  });
  return out;
}

Estimate estimate_norm(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K, std::size_t N,
                       const RngStream& rng) {
  check_inputs(C, t, K, N);
  const PushforwardMeasure measure({C.begin(), C.end()}, t);
  return mean_estimate(sample_gauge_values(measure, std::span(&K, 1), N, rng).front());
}

Estimate estimate_norm(const BodySpec& C, const WeightVector& t, const BodySpec& K, std::size_t N,
                       const RngStream& rng) {
  return estimate_norm(std::span(&C, 1), t, K, N, rng);
}

Estimate estimate_norm_isotropic_route(const BodySpec& C, const WeightVector& t, const BodySpec& K,
                                       std::size_t N, const RngStream& rng) {
  check_inputs(std::span(&C, 1), t, K, N);
  const PushforwardMeasure mu({C}, t, /*isotropic_rescale=*/true);
  const double factor = t.l2() * isotropic_constant(C);
  const Estimate i1 = mean_estimate(sample_gauge_values(mu, std::span(&K, 1), N, rng).front());
  return {factor * i1.value, factor * i1.std_error, i1.n_samples};
}

Estimate estimate_norm_pushforward(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K,
                                   std::size_t N, const RngStream& rng, PushforwardConvention convention) {
  check_inputs(C, t, K, N);
  const bool unit = convention == PushforwardConvention::UnitNormalized;
  const PushforwardMeasure nu({C.begin(), C.end()}, t, false, unit);
  const Estimate integral = mean_estimate(sample_gauge_values(nu, std::span(&K, 1), N, rng).front());
  const double factor = unit ? t.l2() : 1.0;
  return {factor * integral.value, factor * integral.std_error, integral.n_samples};
}

std::vector<Estimate> estimate_moments(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K,
                                       std::span<const double> qs, std::size_t N, const RngStream& rng) {
  check_inputs(C, t, K, N);
  for (double q : qs) {
    if (!(q >= 1.0)) throw ArgumentError("moment order q must be >= 1");
  }
  const PushforwardMeasure measure({C.begin(), C.end()}, t);
  const auto values = sample_gauge_values(measure, std::span(&K, 1), N, rng).front();
  std::vector<Estimate> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(power_mean_estimate(values, q));
  return out;
}

Estimate estimate_moment(std::span<const BodySpec> C, const WeightVector& t, const BodySpec& K, double q,
                         std::size_t N, const RngStream& rng) {
  return estimate_moments(C, t, K, std::span(&q, 1), N, rng).front();
}

int default_qn_cutoff(int n) {
  return std::max(1, static_cast<int>(std::lround(std::log(static_cast<double>(n)))));
}

double q_n_cube(const WeightVector& t, int n, std::optional<int> cutoff) {
  if (n < 1 || t.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("q_n needs length(t) = n = " + std::to_string(n) + ", got " + std::to_string(t.size()));
  }
  const int u = std::min(n, cutoff.value_or(default_qn_cutoff(n)));
  if (u < 1) throw ArgumentError("q_n cut-off u must be >= 1");
  const auto star = t.rearranged();
  double head = 0.0;
  double tail_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i < u) {
      head += star[i];
    } else {
      tail_sq += star[i] * star[i];
    }
  }
  return head + std::sqrt(static_cast<double>(u)) * std::sqrt(tail_sq);
}

namespace {

constexpr std::size_t kMaxExactWeights = 30;
constexpr double kMaxExactTerms = 1 << 20;

void require_unit(const WeightVector& t) {
  if (std::abs(t.l2() - 1.0) > 1e-9) {
    throw ArgumentError("density_at_zero_1d needs ||t||_2 = 1, got " + std::to_string(t.l2()));
  }
}

// Half-widths a_j = |t_j|/2 of the nonzero terms.
std::vector<double> half_widths(const WeightVector& t) {
  std::vector<double> a;
  for (double x : t.entries()) {
    if (x != 0.0) a.push_back(0.5 * std::abs(x));
  }
  return a;
}

// f(0) for a sum of uniforms on [-a_j, a_j]:
//   1 / ((m-1)! prod 2a_j) * sum_S (-1)^|S| (A - 2 sum_{j in S} a_j)_+^(m-1)
// with equal widths merged into binomial multiplicities. The alternating sum
// cancels badly for skewed widths; returns nullopt when the cancellation
// leaves fewer than ~12 correct digits.
std::optional<double> exact_density(const std::vector<double>& a) {
  const std::size_t m = a.size();
  if (m == 1) return 1.0 / (2.0 * a[0]);
  std::map<double, int> counts;
  for (double x : a) ++counts[x];
  std::vector<double> widths;
  std::vector<int> mult;
  for (const auto& [w, c] : counts) {
    widths.push_back(w);
    mult.push_back(c);
  }
  long double total_a = 0.0L;
  long double log_norm = std::lgamma(static_cast<double>(m));
  for (double x : a) {
    total_a += x;
    log_norm += std::log(2.0L * x);
  }
  auto binom = [](int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  std::vector<int> pick(widths.size(), 0);
  long double sum = 0.0L;
  long double magnitude = 0.0L;
  for (;;) {
    long double shift = 0.0L;
    long double weight = 1.0L;
    int parity = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      shift += 2.0L * pick[k] * widths[k];
      weight *= binom(mult[k], pick[k]);
      parity += pick[k];
    }
    const long double x = total_a - shift;
    if (x > 0.0L) {
      long double power = 1.0L;
      for (std::size_t i = 0; i + 1 < m; ++i) power *= x;
      sum += (parity % 2 ? -weight : weight) * power;
      magnitude += weight * power;
    }
    std::size_t k = 0;
    while (k < pick.size() && pick[k] == mult[k]) pick[k++] = 0;
    if (k == pick.size()) break;
    ++pick[k];
  }
  if (!(sum > 0.0L) || magnitude * std::numeric_limits<long double>::epsilon() > 1e-12L * sum) {
    return std::nullopt;
  }
  return static_cast<double>(sum / std::exp(log_norm));
}

}  // namespace

double density_at_zero_1d_fourier(const WeightVector& t) {
  require_unit(t);
  const auto a = half_widths(t);
  if (a.size() < 3) throw ArgumentError("Fourier route needs at least three nonzero weights");
  const double a_max = *std::max_element(a.begin(), a.end());
  // Tail of the integrand is bounded by prod_j min(1, 1/(a_j w)).
  auto log_tail = [&](double omega) {
    double log_bound = std::log(omega);
    int active = 0;
    for (double x : a) {
      if (x * omega > 1.0) {
        log_bound -= std::log(x * omega);
        ++active;
      }
    }
    return active >= 2 ? log_bound - std::log(active - 1.0) : 0.0;
  };
  double omega_max = 8.0 / a_max;
  while (log_tail(omega_max) > std::log(1e-10)) omega_max *= 2.0;
  const double h = 0.01 / a_max;
  const auto steps = static_cast<std::size_t>(std::ceil(omega_max / h / 2.0)) * 2;
  if (steps > 100'000'000) throw CapacityError("Fourier density integral needs too many steps for these weights");
  const double step = omega_max / static_cast<double>(steps);
  auto integrand = [&](double omega) {
    double prod = 1.0;
    for (double x : a) {
      const double arg = x * omega;
      prod *= arg == 0.0 ? 1.0 : std::sin(arg) / arg;
    }
    return prod;
  };
  // Composite Simpson.
  double acc = integrand(0.0) + integrand(omega_max);
  for (std::size_t i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(step * static_cast<double>(i));
  return acc * step / 3.0 / M_PI;
}

double density_at_zero_1d(const WeightVector& t) {
  require_unit(t);
  const auto a = half_widths(t);
  std::map<double, int> counts;
  for (double x : a) ++counts[x];
  double terms = 1.0;
  for (const auto& [w, c] : counts) terms *= c + 1;
  if (a.size() <= kMaxExactWeights && terms <= kMaxExactTerms) {
    if (const auto exact = exact_density(a)) return *exact;
  }
  return density_at_zero_1d_fourier(t);
}

}  // namespace multinorm
