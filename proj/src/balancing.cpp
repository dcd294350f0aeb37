#include "multinorm/balancing.hpp"

#include "multinorm/errors.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace multinorm {

SignMethodSpec parse_sign_method(std::string_view text) {
  if (text == "brute" || text == "bruteforce") return {SignMethod::Bruteforce, 0};
  if (text == "greedy") return {SignMethod::Greedy, 0};
  if (text.rfind("random:", 0) == 0) {
    const std::string_view digits = text.substr(7);
    std::size_t m = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || m == 0) {
      throw ArgumentError("random:<m> needs a positive integer m, got '" + std::string(text) + "'");
    }
    return {SignMethod::RandomBestOf, m};
  }
  throw ArgumentError("unknown sign method '" + std::string(text) + "' (expected brute, greedy or random:<m>)");
}

std::string to_string(const SignMethodSpec& spec) {
  switch (spec.method) {
    case SignMethod::Bruteforce:
      return "brute";
    case SignMethod::Greedy:
      return "greedy";
    case SignMethod::RandomBestOf:
      return "random:" + std::to_string(spec.m);
  }
  return "greedy";
}

double signed_sum_gauge(const Matrix& points, const std::vector<int>& signs, const BodySpec& K) {
  if (static_cast<Eigen::Index>(signs.size()) != points.cols()) throw ArgumentError("one sign per point expected");
  Vector sum = Vector::Zero(points.rows());
  for (Eigen::Index j = 0; j < points.cols(); ++j) sum += static_cast<double>(signs[j]) * points.col(j);
  return gauge(K, sum);
}

namespace {

void check_points(const Matrix& points, const BodySpec& K) {
  if (points.cols() == 0) throw ArgumentError("need at least one point");
  if (points.rows() != K.dim()) {
    throw ArgumentError("dimension mismatch: points live in R^" + std::to_string(points.rows()) + ", K has n=" +
                        std::to_string(K.dim()));
  }
}

struct BlockBest {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t gray = 0;
};

constexpr std::uint64_t kResyncSteps = 1U << 14;

}  // namespace

SignAssignment min_signs_bruteforce(const Matrix& points, const BodySpec& K) {
  check_points(points, K);
  const auto s = static_cast<std::size_t>(points.cols());
  if (s > kMaxBruteforce) {
    throw CapacityError("bruteforce sign search handles s <= " + std::to_string(kMaxBruteforce) + " (got s = " +
                        std::to_string(s) + "); use --method greedy or random:<m>");
  }
  const std::size_t free_bits = s - 1;  // eps_1 = +1
  const std::size_t block_bits = std::min<std::size_t>(free_bits, 6);
  const std::size_t low_bits = free_bits - block_bits;
  const std::size_t n_blocks = std::size_t{1} << block_bits;
  const std::uint64_t steps = std::uint64_t{1} << low_bits;

  // Signs of one (block, gray code) state; index 0 is always +1, indices
  // 1..low_bits follow the Gray code, the rest the block number.
  auto signs_of = [&](std::size_t block, std::uint64_t gray) {
    std::vector<int> signs(s, 1);
    for (std::size_t j = 0; j < low_bits; ++j) signs[1 + j] = (gray >> j) & 1U ? -1 : 1;
    for (std::size_t j = 0; j < block_bits; ++j) signs[1 + low_bits + j] = (block >> j) & 1U ? -1 : 1;
    return signs;
  };

  std::vector<BlockBest> best(n_blocks);
  parallel_for(n_blocks, [&](std::size_t block) {
    std::vector<int> signs = signs_of(block, 0);
    auto resync = [&] {
      Vector sum = Vector::Zero(points.rows());
      for (std::size_t j = 0; j < s; ++j) sum += static_cast<double>(signs[j]) * points.col(j);
      return sum;
    };
    Vector sum = resync();
    BlockBest local{gauge(K, sum), 0};
    for (std::uint64_t k = 1; k < steps; ++k) {
      const std::size_t j = 1 + static_cast<std::size_t>(std::countr_zero(k));
      signs[j] = -signs[j];
      if (k % kResyncSteps == 0) {
        sum = resync();
      } else {
        sum += (2.0 * signs[j]) * points.col(static_cast<Eigen::Index>(j));
      }
      const double value = gauge(K, sum);
      if (value < local.value) local = {value, k ^ (k >> 1)};
    }
    best[block] = local;
  });

  std::size_t winner = 0;
  for (std::size_t b = 1; b < n_blocks; ++b) {
    if (best[b].value < best[winner].value) winner = b;
  }
  SignAssignment out;
  out.method = SignMethod::Bruteforce;
  out.signs = signs_of(winner, best[winner].gray);
  out.achieved = signed_sum_gauge(points, out.signs, K);
  return out;
}

SignAssignment min_signs_greedy(const Matrix& points, const BodySpec& K) {
  check_points(points, K);
  SignAssignment out;
  out.method = SignMethod::Greedy;
  Vector partial = Vector::Zero(points.rows());
  Vector plus(points.rows());
  Vector minus(points.rows());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    plus = partial + points.col(j);
    minus = partial - points.col(j);
    const double g_plus = gauge(K, plus);
    const double g_minus = gauge(K, minus);
    if (g_plus <= g_minus) {
      out.signs.push_back(1);
      partial = plus;
      out.max_partial = std::max(out.max_partial, g_plus);
    } else {
      out.signs.push_back(-1);
      partial = minus;
      out.max_partial = std::max(out.max_partial, g_minus);
    }
  }
  out.achieved = signed_sum_gauge(points, out.signs, K);
  return out;
}

SignAssignment min_signs_random(const Matrix& points, const BodySpec& K, std::size_t m, Engine& eng) {
  check_points(points, K);
  if (m == 0) throw ArgumentError("random sign search needs m >= 1");
  SignAssignment out;
  out.method = SignMethod::RandomBestOf;
  out.achieved = std::numeric_limits<double>::infinity();
  const auto s = static_cast<std::size_t>(points.cols());
  for (std::size_t i = 0; i < m; ++i) {
    auto signs = sample_signs(s, eng);
    const double value = signed_sum_gauge(points, signs, K);
    if (value < out.achieved) {
      out.achieved = value;
      out.signs = std::move(signs);
    }
  }
  return out;
}

SignAssignment min_signs(const Matrix& points, const BodySpec& K, const SignMethodSpec& spec, Engine& eng) {
  switch (spec.method) {
    case SignMethod::Bruteforce:
      return min_signs_bruteforce(points, K);
    case SignMethod::Greedy:
      return min_signs_greedy(points, K);
    case SignMethod::RandomBestOf:
      return min_signs_random(points, K, spec.m, eng);
  }
  throw ArgumentError("unknown sign method");
}

Matrix draw_tuple(const BodySpec& C, std::size_t s, Engine& eng) {
  Matrix points(C.dim(), static_cast<Eigen::Index>(s));
  UniformBodySampler sampler(C);
  Vector point(C.dim());
  Vector scratch(C.dim());
  for (std::size_t j = 0; j < s; ++j) {
    sampler.sample(eng, point, scratch);
    points.col(static_cast<Eigen::Index>(j)) = point;
  }
  return points;
}

Estimate BalancingEstimate::as_estimate() const {
  return {r, (quantile_ci.hi - quantile_ci.lo) / (2.0 * 1.96), n_tuples};
}

namespace {

void check_balancing_args(const BodySpec& C, const BodySpec& K, std::size_t s, double delta, std::size_t n_tuples) {
  if (C.dim() != K.dim()) throw ArgumentError("dimension mismatch between C and K");
  if (s == 0) throw ArgumentError("s must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  const auto needed = static_cast<std::size_t>(std::ceil(50.0 / delta));
  if (n_tuples < needed) {
    throw ArgumentError("need at least 50/delta = " + std::to_string(needed) + " tuples, got " +
                        std::to_string(n_tuples));
  }
}

BalancingEstimate finish(std::vector<double> values, double delta, std::size_t s, int n, std::string method) {
  std::sort(values.begin(), values.end());
  BalancingEstimate out;
  const auto q = empirical_quantile(values, 1.0 - delta);
  out.r = q.value;
  out.quantile_ci = q.ci95;
  out.delta = delta;
  out.s = s;
  out.n = n;
  out.method = std::move(method);
  out.n_tuples = values.size();
  out.values = std::move(values);
  return out;
}

}  // namespace

BalancingEstimate estimate_beta_R(const BodySpec& C, const BodySpec& K, std::size_t s, double delta,
                                  std::size_t n_tuples, const SignMethodSpec& method, const RngStream& rng) {
  check_balancing_args(C, K, s, delta, n_tuples);
  if (method.method == SignMethod::Bruteforce && s > kMaxBruteforce) {
    throw CapacityError("bruteforce sign search handles s <= " + std::to_string(kMaxBruteforce) +
                        "; use --method greedy or random:<m>");
  }
  std::vector<double> values(n_tuples);
  parallel_for(n_tuples, [&](std::size_t i) {
    Engine eng = rng.child(i).engine();
    const Matrix points = draw_tuple(C, s, eng);
    Engine sign_eng = rng.child(i).child(1).engine();
    values[i] = min_signs(points, K, method, sign_eng).achieved;
  });
  return finish(std::move(values), delta, s, C.dim(), to_string(method));
}

BalancingEstimate estimate_kappa_R(const BodySpec& C, const BodySpec& K, std::size_t s, double delta,
                                   std::size_t n_tuples, std::size_t N_eps, const RngStream& rng) {
  check_balancing_args(C, K, s, delta, n_tuples);
  if (N_eps == 0) throw ArgumentError("kappa needs N_eps >= 1");
  std::vector<double> values(n_tuples);
  parallel_for(n_tuples, [&](std::size_t i) {
    Engine eng = rng.child(i).engine();
    const Matrix points = draw_tuple(C, s, eng);
    Engine sign_eng = rng.child(i).child(2).engine();
    std::vector<double> inner(N_eps);
    for (auto& v : inner) v = signed_sum_gauge(points, sample_signs(s, sign_eng), K);
    std::sort(inner.begin(), inner.end());
    values[i] = empirical_quantile(inner, 1.0 - delta).value;
  });
  return finish(std::move(values), delta, s, C.dim(), "kappa:" + std::to_string(N_eps));
}

std::vector<BoundReport> check_barany_grinberg_randomized(const BodySpec& K, double delta, std::size_t n_tuples,
                                                          std::size_t N, const RngStream& rng, const Thresholds& th) {
  const int n = K.dim();
  const auto s = static_cast<std::size_t>(n);
  const SignMethodSpec method{n <= 20 ? SignMethod::Bruteforce : SignMethod::Greedy, 0};
  const auto tuples = std::max(n_tuples, static_cast<std::size_t>(std::ceil(50.0 / delta)));
  const BalancingEstimate beta = estimate_beta_R(K, K, s, delta, tuples, method, rng.child(1));

  const WeightVector ones(std::vector<double>(s, 1.0));
  const CheckCase c{{K}, K, ones, "ones"};
  const double log_term = std::log(2.0 / delta);
  const Estimate ones_norm = estimate_norm(K, ones, K, N, rng.child(2));

  std::ostringstream detail;
  detail << "delta=" << delta << ",method=" << to_string(method);

  std::vector<BoundReport> out;
  BoundReport r = make_report("barany_grinberg_delta", c, beta.as_estimate(),
                              {log_term * ones_norm.value, log_term * ones_norm.std_error, ones_norm.n_samples}, th);
  r.detail = detail.str();
  out.push_back(std::move(r));

  const BodySpec K_iso = normalize_to_volume_one(K.without_rotation());
  const Estimate M_iso = estimate_M(K_iso, N, rng.child(3));
  const double root_n = std::sqrt(static_cast<double>(n));
  double growth = 0.0;
  if (const auto& psi2 = K.meta().psi2_constant) {
    growth = psi2->value * psi2->value * root_n;
    detail << ",form=psi2";
  } else {
    growth = isotropic_constant(K_iso) * std::pow(static_cast<double>(n), 0.75);
    detail << ",form=general";
  }
  const double factor = log_term * growth * root_n;
  BoundReport t = make_report("barany_grinberg_theorem", c, beta.as_estimate(),
                              {factor * M_iso.value, factor * M_iso.std_error, M_iso.n_samples}, th);
  t.detail = detail.str();
  out.push_back(std::move(t));
  return out;
}

std::string to_string(RotationMode mode) { return mode == RotationMode::Lower ? "lower" : "upper"; }

RotationMode parse_rotation_mode(std::string_view text) {
  if (text == "lower") return RotationMode::Lower;
  if (text == "upper") return RotationMode::Upper;
  throw ArgumentError("rotation experiment must be 'lower' or 'upper', got '" + std::string(text) + "'");
}

RotationExperiment run_rotation_experiment(const BodySpec& C, const BodySpec& K, const WeightVector& t,
                                           std::string_view t_pattern, const RotationOptions& options,
                                           const RngStream& rng) {
  if (C.dim() != K.dim()) throw ArgumentError("dimension mismatch between C and K");
  if (options.n_rotations == 0) throw ArgumentError("need at least one rotation");
  if (options.n_tuples == 0) throw ArgumentError("need at least one tuple per rotation");
  const int n = C.dim();
  const std::size_t s = t.size();
  const double root_n = std::sqrt(static_cast<double>(n));

  RotationExperiment ex;
  ex.body_C = C.descriptor();
  ex.body_K = K.descriptor();
  ex.n = n;
  ex.s = s;
  ex.t_pattern = std::string(t_pattern);
  ex.mode = options.mode;

  const Estimate M = estimate_M(K, options.N, rng.child(1));
  const double ref_factor = isotropic_constant(C) * root_n * t.l2();
  ex.reference = {ref_factor * M.value, ref_factor * M.std_error, M.n_samples};

  double q_star = root_n;
  if (const auto& psi2 = C.meta().psi2_constant) q_star = n / (psi2->value * psi2->value);
  if (options.mode == RotationMode::Lower) {
    const Estimate median = estimate_gaussian_median(K, std::max<std::size_t>(options.N, 10000), rng.child(2));
    const CensoredEstimate d = estimate_d(K, median, options.N, rng.child(3));
    ex.exponent = std::min(q_star, d.value);
    ex.d_censored = d.censored;
  } else {
    ex.exponent = std::min(q_star, compute_k(K, M));
  }

  const double log_cap = std::log(static_cast<double>(kMaxSignSet));
  const std::size_t bound =
      ex.exponent >= log_cap ? kMaxSignSet : std::max<std::size_t>(1, static_cast<std::size_t>(std::exp(ex.exponent)));
  ex.S_size = options.S_size.value_or(bound);
  if (ex.S_size == 0) throw ArgumentError("sign set size must be >= 1");
  if (ex.S_size > bound) {
    ex.S_size = bound;
    ex.S_clamped = true;
  }
  if (!options.S_size && ex.exponent >= log_cap) ex.S_clamped = true;

  ex.threshold_constant = options.threshold_constant.value_or(options.mode == RotationMode::Lower ? 0.1 : 10.0);
  const double cut = ex.threshold_constant * ex.reference.value;

  // Sign set S as an s x |S| matrix, shared by all rotations.
  Matrix S(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(ex.S_size));
  {
    Engine eng = rng.child(4).engine();
    for (Eigen::Index k = 0; k < S.cols(); ++k) {
      const auto signs = sample_signs(s, eng);
      for (std::size_t j = 0; j < s; ++j) S(static_cast<Eigen::Index>(j), k) = signs[j];
    }
  }
  const Vector weights = Eigen::Map<const Vector>(t.entries().data(), static_cast<Eigen::Index>(s));

  std::vector<double> ratios;
  for (std::size_t r = 0; r < options.n_rotations; ++r) {
    const RngStream stream = rng.child(1000 + r);
    const std::uint64_t rot_seed = splitmix64(rng.seed ^ stream.stream_id);
    const BodySpec UC = C.with_rotation(haar_rotation_from_seed(n, rot_seed), rot_seed);
    RotationOutcome outcome;
    outcome.body_UC = UC.descriptor();
    outcome.norm = estimate_norm(UC, t, K, options.N, stream.child(1));
    outcome.n_tuples = options.n_tuples;

    std::vector<unsigned char> bad(options.n_tuples, 0);
    fill_chunked(options.n_tuples, stream.child(2), [&](Engine& eng, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Matrix points = draw_tuple(UC, s, eng) * weights.asDiagonal();
        const Matrix sums = points * S;
        for (Eigen::Index k = 0; k < sums.cols(); ++k) {
          const double g = gauge(K, sums.col(k));
          if (options.mode == RotationMode::Lower ? g < cut : g > cut) {
            bad[i] = 1;
            break;
          }
        }
      }
    });
    outcome.bad_tuples = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
    ratios.push_back(outcome.norm.value / ex.reference.value);
    ex.rotations.push_back(std::move(outcome));
  }
  ex.average_ratio = ratios.size() > 1 ? mean_estimate(ratios) : Estimate{ratios.front(), 0.0, 1};
  return ex;
}

std::vector<BoundReport> rotation_reports(const RotationExperiment& ex, const Thresholds& th) {
  BoundReport base;
  base.body_C = ex.body_C;
  base.body_K = ex.body_K;
  base.n = ex.n;
  base.s = ex.s;
  base.t_pattern = ex.t_pattern;

  std::vector<double> norms;
  std::size_t bad = 0;
  std::size_t total = 0;
  for (const auto& r : ex.rotations) {
    norms.push_back(r.norm.value);
    bad += r.bad_tuples;
    total += r.n_tuples;
  }

  std::vector<BoundReport> out;
  BoundReport avg = base;
  avg.theorem_id = "rotation_average";
  avg.lhs = norms.size() > 1 ? mean_estimate(norms) : Estimate{norms.front(), 0.0, 1};
  avg.rhs = ex.reference;
  avg.range = th.at(avg.theorem_id);
  avg.detail = "rotations=" + std::to_string(ex.rotations.size());
  apply_verdict(avg);
  out.push_back(std::move(avg));

  BoundReport frac = base;
  frac.theorem_id = "rotation_bad_fraction";
  const double p = total == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(total);
  frac.lhs = {p, total == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(total)), total};
  frac.rhs = Estimate::exact(0.05);
  frac.range = th.at(frac.theorem_id);
  std::ostringstream detail;
  detail << "mode=" << to_string(ex.mode) << ",S=" << ex.S_size << (ex.S_clamped ? "(clamped)" : "")
         << ",exponent=" << ex.exponent << (ex.d_censored ? "(d censored)" : "") << ",c=" << ex.threshold_constant;
  frac.detail = detail.str();
  apply_verdict(frac);
  out.push_back(std::move(frac));
  return out;
}

std::vector<std::string> balancing_theorem_ids() {
  return {"barany_grinberg_delta", "barany_grinberg_theorem", "rotation_average", "rotation_bad_fraction"};
}

std::vector<BoundReport> run_balancing_suite(const BalancingSuiteSpec& spec, std::size_t N, const Thresholds& th,
                                             const std::set<std::string>& ids, const RngStream& rng) {
  auto want = [&](const std::string& id) { return ids.empty() || ids.count(id) > 0; };
  std::vector<BoundReport> out;
  if (want("barany_grinberg_delta") || want("barany_grinberg_theorem")) {
    for (const auto& family : spec.bg_bodies) {
      for (int n : spec.bg_ns) {
        const BodySpec K = grid_body(family, n);
        for (double delta : spec.bg_deltas) {
          std::ostringstream key;
          key << "bg|" << K.descriptor() << "|delta=" << delta;
          for (auto& r : check_barany_grinberg_randomized(K, delta, spec.bg_tuples, N, keyed_child(rng, key.str()), th)) {
            if (want(r.theorem_id)) out.push_back(std::move(r));
          }
        }
      }
    }
  }
  if (want("rotation_average") || want("rotation_bad_fraction")) {
    const int n = spec.rotation_n;
    const WeightVector t = make_weights(TPattern::Flat, spec.rotation_s);
    struct Setup {
      const char* C;
      const char* K;
      RotationMode mode;
      std::optional<std::size_t> S_size;
    };
    for (const Setup& setup : {Setup{"lp:inf", "lp:1", RotationMode::Upper, std::nullopt},
                               Setup{"lp:2", "lp:2", RotationMode::Lower, spec.lower_S_size}}) {
      const BodySpec C = grid_body(setup.C, n);
      const BodySpec K = grid_body(setup.K, n);
      RotationOptions options;
      options.mode = setup.mode;
      options.n_rotations = spec.rotation_count;
      options.N = N;
      options.n_tuples = spec.rotation_tuples;
      options.S_size = setup.S_size;
      const auto ex = run_rotation_experiment(
          C, K, t, to_string(TPattern::Flat), options,
          keyed_child(rng, "rotation|" + C.descriptor() + "|" + K.descriptor() + "|" + to_string(setup.mode)));
      for (auto& r : rotation_reports(ex, th)) {
        if (want(r.theorem_id)) out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace multinorm
