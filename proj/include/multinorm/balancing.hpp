#pragma once

#include "multinorm/body.hpp"
#include "multinorm/bounds.hpp"
#include "multinorm/estimate.hpp"
#include "multinorm/rng.hpp"
#include "multinorm/sampling.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace multinorm {

enum class SignMethod { Bruteforce, Greedy, RandomBestOf };

struct SignMethodSpec {
  SignMethod method = SignMethod::Greedy;
  std::size_t m = 64;  // candidates for RandomBestOf
};

/// `brute`, `greedy` or `random:<m>`.
SignMethodSpec parse_sign_method(std::string_view text);
std::string to_string(const SignMethodSpec& spec);

inline constexpr std::size_t kMaxBruteforce = 25;

struct SignAssignment {
  std::vector<int> signs;
  /// gauge(K, sum_j eps_j x_j), recomputed from `signs`.
  double achieved = 0.0;
  SignMethod method = SignMethod::Greedy;
  /// Greedy only: max over k of the gauge of the k-th partial sum.
  double max_partial = 0.0;
};

/// Points are the columns of an n x s matrix.
double signed_sum_gauge(const Matrix& points, const std::vector<int>& signs, const BodySpec& K);

/// Exact minimum over {-1,+1}^s with eps_1 = +1 (the problem is symmetric
/// under eps -> -eps). Gray-code walk split into prefix blocks that run in
/// parallel; ties go to the block and step visited first. s <= 25.
SignAssignment min_signs_bruteforce(const Matrix& points, const BodySpec& K);

/// eps_k = argmin over +-1 of the gauge of the running sum; ties go to +1.
SignAssignment min_signs_greedy(const Matrix& points, const BodySpec& K);

/// Best of m uniform random sign vectors (first minimum wins).
SignAssignment min_signs_random(const Matrix& points, const BodySpec& K, std::size_t m, Engine& eng);

SignAssignment min_signs(const Matrix& points, const BodySpec& K, const SignMethodSpec& spec, Engine& eng);

/// s independent uniform points of C as columns.
Matrix draw_tuple(const BodySpec& C, std::size_t s, Engine& eng);

struct BalancingEstimate {
  double r = 0.0;
  double delta = 0.0;
  std::size_t s = 0;
  int n = 0;
  std::string method;
  std::size_t n_tuples = 0;
  Interval quantile_ci;
  /// Per-tuple values, sorted.
  std::vector<double> values;

  /// r with an error derived from the order-statistic interval.
  [[nodiscard]] Estimate as_estimate() const;
};

/// Tuple i is drawn from rng.child(i), so beta and kappa on the same stream
/// see the same tuples.
BalancingEstimate estimate_beta_R(const BodySpec& C, const BodySpec& K, std::size_t s, double delta,
                                  std::size_t n_tuples, const SignMethodSpec& method, const RngStream& rng);

/// Inner (1 - delta)-quantile over N_eps random sign vectors per tuple, then
/// the outer (1 - delta)-quantile over tuples.
BalancingEstimate estimate_kappa_R(const BodySpec& C, const BodySpec& K, std::size_t s, double delta,
                                   std::size_t n_tuples, std::size_t N_eps, const RngStream& rng);

/// Reports `barany_grinberg_delta` (beta against log(2/delta) ||1||_{K^n,K})
/// and `barany_grinberg_theorem` (against the theorem's right-hand side, in
/// the psi_2 form when K carries a psi_2 constant). Bruteforce up to n = 20,
/// greedy above.
std::vector<BoundReport> check_barany_grinberg_randomized(const BodySpec& K, double delta, std::size_t n_tuples,
                                                          std::size_t N, const RngStream& rng, const Thresholds& th);

enum class RotationMode { Lower, Upper };

std::string to_string(RotationMode mode);
RotationMode parse_rotation_mode(std::string_view text);

inline constexpr std::size_t kMaxSignSet = std::size_t{1} << 20;

struct RotationOutcome {
  std::string body_UC;
  Estimate norm;
  std::size_t bad_tuples = 0;
  std::size_t n_tuples = 0;
  [[nodiscard]] double bad_fraction() const {
    return n_tuples == 0 ? 0.0 : static_cast<double>(bad_tuples) / static_cast<double>(n_tuples);
  }
};

struct RotationExperiment {
  std::string body_C;
  std::string body_K;
  int n = 0;
  std::size_t s = 0;
  std::string t_pattern;
  RotationMode mode = RotationMode::Lower;
  /// q(t) = min{q_*, d(K)} (lower) or p(t) = min{q_*, k(K)} (upper), with
  /// q_* replaced by sqrt(n), or n / rho^2 when C has a psi_2 constant.
  double exponent = 0.0;
  bool d_censored = false;
  std::size_t S_size = 0;
  /// Requested |S| exceeded exp(exponent) or 2^20 and was reduced.
  bool S_clamped = false;
  double threshold_constant = 0.0;
  /// L_C sqrt(n) M(K) ||t||_2.
  Estimate reference;
  std::vector<RotationOutcome> rotations;
  /// Mean over rotations of norm / reference value, with the standard error
  /// of the mean over rotations.
  Estimate average_ratio;
};

struct RotationOptions {
  RotationMode mode = RotationMode::Lower;
  std::size_t n_rotations = 32;
  std::size_t N = 100000;         // samples per norm estimate
  std::size_t n_tuples = 2000;    // tuples per bad-fraction estimate
  std::optional<std::size_t> S_size;
  std::optional<double> threshold_constant;  // default 0.1 (lower), 10 (upper)
};

RotationExperiment run_rotation_experiment(const BodySpec& C, const BodySpec& K, const WeightVector& t,
                                           std::string_view t_pattern, const RotationOptions& options,
                                           const RngStream& rng);

/// `rotation_average` and `rotation_bad_fraction` reports for one experiment.
std::vector<BoundReport> rotation_reports(const RotationExperiment& experiment, const Thresholds& th);

/// The balancing part of the default suite.
struct BalancingSuiteSpec {
  std::vector<int> bg_ns{8, 16};
  std::vector<double> bg_deltas{0.5, 0.1};
  std::vector<std::string> bg_bodies{"lp:inf", "lp:2"};
  std::size_t bg_tuples = 500;
  int rotation_n = 16;
  std::size_t rotation_s = 16;
  std::size_t rotation_count = 32;
  std::size_t rotation_tuples = 200;
  std::size_t lower_S_size = 16;
};

/// Theorem ids produced by run_balancing_suite.
std::vector<std::string> balancing_theorem_ids();

std::vector<BoundReport> run_balancing_suite(const BalancingSuiteSpec& spec, std::size_t N, const Thresholds& th,
                                             const std::set<std::string>& ids, const RngStream& rng);

}  // namespace multinorm
