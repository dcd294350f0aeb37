#pragma once

#include "multinorm/body.hpp"
#include "multinorm/estimate.hpp"
#include "multinorm/rng.hpp"
#include "multinorm/sampling.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace multinorm {

enum class Verdict { Holds, Violated, Inconclusive };

std::string to_string(Verdict verdict);

// Margins are reported in combined standard errors and clamped to this value
// when a side has zero error, so outputs stay finite.
inline constexpr double kMarginCap = 1e6;
inline constexpr double kViolationSigmas = 3.0;

/// Acceptable range for the implied constant lhs / rhs.
struct ConstantRange {
  std::optional<double> min;
  std::optional<double> max;
};

/// Threshold table keyed by theorem id. Defaults are listed in
/// Thresholds::defaults(); any entry can be overridden from config.
class Thresholds {
 public:
  static Thresholds defaults();

  [[nodiscard]] const ConstantRange& at(const std::string& theorem_id) const;
  void set(const std::string& theorem_id, ConstantRange range) { table_[theorem_id] = range; }
  [[nodiscard]] const std::map<std::string, ConstantRange>& table() const { return table_; }

 private:
  std::map<std::string, ConstantRange> table_;
};

struct BoundReport {
  std::string theorem_id;
  std::string body_C;
  std::string body_K;
  int n = 0;
  std::size_t s = 0;
  std::string t_pattern;
  Estimate lhs;
  Estimate rhs;
  double implied_constant = 0.0;
  ConstantRange range;
  Verdict verdict = Verdict::Inconclusive;
  double margin_sigmas = 0.0;
  /// Free-form qualifier such as "q=4" or "n=16->32".
  std::string detail;
};

/// Fills implied_constant, margin and verdict of `report` from lhs, rhs and
/// range. For an upper range the margin is (max*rhs - lhs) / sigma with
/// sigma = hypot(se_lhs, max*se_rhs); the lower side is symmetric; with both
/// sides the smaller margin wins. Holds at margin >= 0, violated below -3.
void apply_verdict(BoundReport& report);

/// One (C, K, t) instance.
struct CheckCase {
  std::vector<BodySpec> C;  // one common body or one per weight
  BodySpec K;
  WeightVector t;
  std::string t_pattern;

  [[nodiscard]] int n() const { return K.dim(); }
  [[nodiscard]] bool common_C() const;
  [[nodiscard]] std::string C_descriptor() const;
};

/// The Monte Carlo inputs the checkers consume.
struct CaseEstimates {
  Estimate norm;       // ||t||_{C,K}
  Estimate M_K;        // M(K)
  Estimate single;     // int_C ||x||_K dx (common C only)
};

/// Report for `theorem_id` on case `c` with the configured threshold and verdict.
BoundReport make_report(const std::string& theorem_id, const CheckCase& c, const Estimate& lhs, const Estimate& rhs,
                        const Thresholds& th);

/// Computes all three estimates on child streams 1, 2, 3 of `rng`.
CaseEstimates estimate_case(const CheckCase& c, std::size_t N, const RngStream& rng);

// Checkers. Each is a pure function of the case and its estimates and
// throws ArgumentError when its preconditions do not hold.
BoundReport check_gm_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_sandwich_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_sandwich_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_general_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_psi2_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_two_convex_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
/// The C = K form with rhs ||t||_2 / alpha.
BoundReport check_two_convex_self(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_cotype_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_cotype_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_type_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_type_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);
BoundReport check_unconditional(const CheckCase& c, const CaseEstimates& e, const Thresholds& th);

/// Which grid checkers apply to a case, in report order.
std::vector<std::string> applicable_checks(const CheckCase& c);
BoundReport run_check(const std::string& theorem_id, const CheckCase& c, const CaseEstimates& e,
                      const Thresholds& th);

/// t = e_1, C = normalized B_1^n, K = (1/2) B_inf^n: ||e_1|| against log n.
BoundReport check_unconditional_e1(int n, std::size_t N, const RngStream& rng, const Thresholds& th);

/// C = K = (1/2) B_inf^n, s = n: ||t|| against q_n(t).
BoundReport check_cube_qn(const WeightVector& t, std::string_view t_pattern, int n, std::size_t N,
                          const RngStream& rng, const Thresholds& th, std::optional<int> cutoff = std::nullopt);

/// One report per q: c_q = moment(q) / (q * moment(1)), all q on one sample set.
std::vector<BoundReport> check_khinchine(const CheckCase& c, std::span<const double> qs, std::size_t N,
                                         const RngStream& rng, const Thresholds& th);

/// C = K = normalized B_p^n, s = n: ||t|| against ||t||_2 (p <= 2) or
/// min{sqrt(p), sqrt(log n)} ||t||_2 (p > 2).
BoundReport check_lp_diagonal(double p, int n, const WeightVector& t, std::string_view t_pattern, std::size_t N,
                              const RngStream& rng, const Thresholds& th);

/// Empirical mu_t(||x||_2 >= 3 sqrt(n)) against 0.01.
BoundReport check_paouris_tail(const CheckCase& c, std::size_t N, const RngStream& rng, const Thresholds& th);

/// Ratio reports c(2n) / c(n) for consecutive dimensions of one
/// series; pairs whose dimensions are not n and 2n are skipped. The input
/// must share one theorem id and differ only in n.
std::vector<BoundReport> drift_reports(std::span<const BoundReport> series, const Thresholds& th);

/// Default sweep grid.
struct GridSpec {
  std::vector<int> ns{4, 8, 16, 32};
  /// Integers or the token "n".
  std::vector<std::string> s_values{"1", "4", "16", "n"};
  /// Body families as `lp:<p>`; every body is used in volume-one position.
  std::vector<std::string> bodies{"lp:2", "lp:inf", "lp:1", "lp:4"};
  std::vector<TPattern> patterns{std::begin(kAllPatterns), std::end(kAllPatterns)};
  std::size_t n_samples = 100000;
};

/// Parameters of the suites that live off the main grid.
struct SuiteSpec {
  std::vector<int> cube_qn_ns{8, 16, 32};
  std::vector<double> khinchine_qs{2, 4, 8};
  int khinchine_n = 8;
  std::vector<double> lp_diagonal_ps{1.5, 2, 4, kInf};
  std::vector<int> lp_diagonal_ns{8, 16, 32, 64};
  std::vector<int> unconditional_e1_ns{16, 64};
  int paouris_n = 16;
  std::optional<int> qn_cutoff;
};

/// Distinct (n, s) pairs of the grid in sweep order.
std::vector<std::pair<int, std::size_t>> grid_points(const GridSpec& grid);

/// Volume-one body of family `family` (`lp:<p>`, `ball`, `cube`, `cross`) in dimension n.
BodySpec grid_body(std::string_view family, int n);

/// Runs the selected checkers over the grid plus the off-grid suites.
/// `ids` empty means everything. Every estimate is drawn from a stream keyed
/// by its grid coordinates, so reports do not depend on which suites run.
std::vector<BoundReport> run_suite(const GridSpec& grid, const SuiteSpec& suites, const Thresholds& th,
                                   const std::set<std::string>& ids, const RngStream& rng);

/// All theorem ids run_suite can produce.
std::vector<std::string> all_theorem_ids();

/// Estimator-route comparison on one grid point, used by the route
/// equivalence acceptance check.
struct RouteComparison {
  std::string body_C;
  std::string body_K;
  int n = 0;
  std::size_t s = 0;
  std::string t_pattern;
  Estimate direct;
  Estimate isotropic;
  double z = 0.0;  // (direct - isotropic) / combined error
};

std::vector<RouteComparison> compare_routes(const GridSpec& grid, const RngStream& rng);

}  // namespace multinorm
