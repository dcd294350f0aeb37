#include "multinorm/bounds.hpp"

#include "multinorm/errors.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

namespace multinorm {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Violated:
      return "violated";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Thresholds Thresholds::defaults() {
  Thresholds th;
  auto upper = [](double c) { return ConstantRange{std::nullopt, c}; };
  auto lower = [](double c) { return ConstantRange{c, std::nullopt}; };
  th.table_ = {
      {"gm_lower", lower(1.0)},
      {"sandwich_upper", upper(1.0)},
      {"sandwich_lower", lower(0.1)},
      {"general_upper", upper(10.0)},
      {"psi2_upper", upper(5.0)},
      {"psi2_upper_drift", {0.5, 2.0}},
      {"two_convex_upper", upper(5.0)},
      {"two_convex_self", upper(5.0)},
      {"cotype_upper", upper(5.0)},
      {"cotype_lower", lower(0.1)},
      {"type_upper", upper(5.0)},
      {"type_lower", lower(0.1)},
      {"unconditional_upper", upper(10.0)},
      {"unconditional_e1", {0.1, 10.0}},
      {"cube_qn", {0.1, 10.0}},
      {"cube_qn_spread", upper(10.0)},
      {"khinchine", upper(3.0)},
      {"lp_diagonal", upper(3.0)},
      {"lp_diagonal_drift", {0.5, 2.0}},
      {"paouris_tail", upper(1.0)},
      {"barany_grinberg_delta", upper(3.0)},
      {"barany_grinberg_theorem", upper(5.0)},
      {"rotation_average", {1.0 / 3.0, 3.0}},
      {"rotation_bad_fraction", upper(1.0)},
  };
  return th;
}

const ConstantRange& Thresholds::at(const std::string& theorem_id) const {
  const auto it = table_.find(theorem_id);
  if (it == table_.end()) throw ArgumentError("no threshold configured for '" + theorem_id + "'");
  return it->second;
}

void apply_verdict(BoundReport& r) {
  if (!r.range.min && !r.range.max) throw ArgumentError("report '" + r.theorem_id + "' has no threshold");
  r.implied_constant = r.rhs.value != 0.0 ? r.lhs.value / r.rhs.value : 0.0;
  auto side_margin = [&](double diff, double c) {
    const double sigma = std::hypot(r.lhs.std_error, c * r.rhs.std_error);
    if (sigma == 0.0) return diff > 0.0 ? kMarginCap : (diff < 0.0 ? -kMarginCap : 0.0);
    return std::clamp(diff / sigma, -kMarginCap, kMarginCap);
  };
  double margin = kMarginCap;
  if (r.range.max) margin = std::min(margin, side_margin(*r.range.max * r.rhs.value - r.lhs.value, *r.range.max));
  if (r.range.min) margin = std::min(margin, side_margin(r.lhs.value - *r.range.min * r.rhs.value, *r.range.min));
  r.margin_sigmas = margin;
  if (margin >= 0.0) {
    r.verdict = Verdict::Holds;
  } else if (margin < -kViolationSigmas) {
    r.verdict = Verdict::Violated;
  } else {
    r.verdict = Verdict::Inconclusive;
  }
}

bool CheckCase::common_C() const {
  if (C.size() == 1) return true;
  const std::string first = C.front().descriptor();
  return std::all_of(C.begin(), C.end(), [&](const BodySpec& b) { return b.descriptor() == first; });
}

std::string CheckCase::C_descriptor() const {
  if (common_C()) return C.front().descriptor();
  std::string out;
  for (const auto& b : C) {
    if (!out.empty()) out += ';';
    out += b.descriptor();
  }
  return out;
}

CaseEstimates estimate_case(const CheckCase& c, std::size_t N, const RngStream& rng) {
  CaseEstimates e;
  e.norm = estimate_norm(c.C, c.t, c.K, N, rng.child(1));
  e.M_K = estimate_M(c.K, N, rng.child(2));
  if (c.common_C()) e.single = estimate_norm(c.C.front(), WeightVector({1.0}), c.K, N, rng.child(3));
  return e;
}

BoundReport make_report(const std::string& id, const CheckCase& c, const Estimate& lhs, const Estimate& rhs,
                        const Thresholds& th) {
  BoundReport r;
  r.theorem_id = id;
  r.body_C = c.C_descriptor();
  r.body_K = c.K.descriptor();
  r.n = c.n();
  r.s = c.t.size();
  r.t_pattern = c.t_pattern;
  r.lhs = lhs;
  r.rhs = rhs;
  r.range = th.at(id);
  apply_verdict(r);
  return r;
}

namespace {

Estimate scaled(const Estimate& e, double factor) {
  return {e.value * factor, e.std_error * std::abs(factor), e.n_samples};
}

const BodySpec& require_common(const CheckCase& c, const char* what) {
  if (!c.common_C()) throw ArgumentError(std::string(what) + " needs one common body C");
  return c.C.front();
}

double common_L(const CheckCase& c, const char* what) { return isotropic_constant(require_common(c, what)); }

double require_constant(const std::optional<LiteratureConstant>& k, const char* what) {
  if (!k) throw ArgumentError(std::string(what) + " is not available for this body");
  return k->value;
}

bool is_unconditional(const BodySpec& b) { return b.meta().unconditional && b.rotation() == nullptr; }

}  // namespace

BoundReport check_gm_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  for (const auto& b : c.C) {
    if (!b.volume_normalized()) throw ArgumentError("gm_lower needs volume-one bodies C_j");
  }
  if (!c.K.volume_normalized()) throw ArgumentError("gm_lower needs a volume-one body K");
  const double n = c.n();
  return make_report("gm_lower", c, e.norm, Estimate::exact(n / (M_E * (n + 1.0)) * c.t.l2()), th);
}

BoundReport check_sandwich_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double rhs = std::sqrt(static_cast<double>(c.n())) * common_L(c, "sandwich_upper") * polar_radius(c.K) *
                     c.t.l2();
  return make_report("sandwich_upper", c, e.norm, Estimate::exact(rhs), th);
}

BoundReport check_sandwich_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double rhs = common_L(c, "sandwich_lower") * polar_radius(c.K) * c.t.l2();
  return make_report("sandwich_lower", c, e.norm, Estimate::exact(rhs), th);
}

BoundReport check_general_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double n = c.n();
  const double s = static_cast<double>(c.t.size());
  const double growth = std::max(std::pow(n, 0.25), std::sqrt(std::log1p(s)));
  const double factor = common_L(c, "general_upper") * growth * std::sqrt(n) * c.t.l2();
  return make_report("general_upper", c, e.norm, scaled(e.M_K, factor), th);
}

BoundReport check_psi2_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double rho = require_constant(require_common(c, "psi2_upper").meta().psi2_constant, "psi_2 constant of C");
  const double factor = rho * rho * std::sqrt(static_cast<double>(c.n())) * c.t.l2();
  return make_report("psi2_upper", c, e.norm, scaled(e.M_K, factor), th);
}

BoundReport check_two_convex_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double alpha = require_constant(c.K.meta().two_convex_alpha, "2-convexity constant of K");
  const double rhs = common_L(c, "two_convex_upper") / std::sqrt(alpha) * c.t.l2();
  return make_report("two_convex_upper", c, e.norm, Estimate::exact(rhs), th);
}

BoundReport check_two_convex_self(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double alpha = require_constant(c.K.meta().two_convex_alpha, "2-convexity constant of K");
  if (require_common(c, "two_convex_self").descriptor() != c.K.descriptor()) {
    throw ArgumentError("two_convex_self needs C = K");
  }
  return make_report("two_convex_self", c, e.norm, Estimate::exact(c.t.l2() / alpha), th);
}

BoundReport check_cotype_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double c2 = require_constant(c.K.meta().cotype2, "cotype-2 constant of K");
  const double factor = common_L(c, "cotype_upper") * c2 * std::sqrt(static_cast<double>(c.n())) * c.t.l2();
  return make_report("cotype_upper", c, e.norm, scaled(e.M_K, factor), th);
}

BoundReport check_cotype_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double c2 = require_constant(c.K.meta().cotype2, "cotype-2 constant of K");
  require_common(c, "cotype_lower");
  const double rhs = std::exp(-log_volume(c.K) / c.n()) / c2 * c.t.l2();
  return make_report("cotype_lower", c, e.norm, Estimate::exact(rhs), th);
}

BoundReport check_type_upper(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double t2 = require_constant(c.K.meta().type2, "type-2 constant of K");
  require_common(c, "type_upper");
  if (e.single.n_samples == 0) throw ArgumentError("type_upper needs the single-point estimate");
  return make_report("type_upper", c, e.norm, scaled(e.single, t2 * c.t.l2()), th);
}

BoundReport check_type_lower(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  const double t2 = require_constant(c.K.meta().type2, "type-2 constant of K");
  const double factor = common_L(c, "type_lower") * std::sqrt(static_cast<double>(c.n())) / t2 * c.t.l2();
  return make_report("type_lower", c, e.norm, scaled(e.M_K, factor), th);
}

BoundReport check_unconditional(const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  if (c.n() < 2) throw ArgumentError("unconditional_upper needs n >= 2");
  for (const auto& b : c.C) {
    if (!is_unconditional(b) || !b.volume_normalized()) {
      throw ArgumentError("unconditional_upper needs isotropic unconditional bodies C_j");
    }
  }
  if (!is_unconditional(c.K) || !c.K.volume_normalized()) {
    throw ArgumentError("unconditional_upper needs an isotropic unconditional body K");
  }
  const double log_n = std::log(static_cast<double>(c.n()));
  const double rhs = std::sqrt(log_n) * std::max(c.t.l2(), std::sqrt(log_n) * c.t.linf());
  return make_report("unconditional_upper", c, e.norm, Estimate::exact(rhs), th);
}

std::vector<std::string> applicable_checks(const CheckCase& c) {
  std::vector<std::string> ids;
  const bool normalized = c.K.volume_normalized() &&
                          std::all_of(c.C.begin(), c.C.end(), [](const BodySpec& b) { return b.volume_normalized(); });
  if (normalized) ids.emplace_back("gm_lower");
  const bool common = c.common_C() && c.C.front().volume_normalized();
  const MetaConstants& kmeta = c.K.meta();
  if (common) {
    ids.emplace_back("sandwich_upper");
    ids.emplace_back("sandwich_lower");
    ids.emplace_back("general_upper");
    if (c.C.front().meta().psi2_constant) ids.emplace_back("psi2_upper");
    if (kmeta.two_convex_alpha) {
      ids.emplace_back("two_convex_upper");
      if (c.C.front().descriptor() == c.K.descriptor()) ids.emplace_back("two_convex_self");
    }
    if (kmeta.cotype2) {
      ids.emplace_back("cotype_upper");
      ids.emplace_back("cotype_lower");
    }
    if (kmeta.type2) {
      ids.emplace_back("type_upper");
      ids.emplace_back("type_lower");
    }
  }
  const bool unconditional = normalized && c.n() >= 2 && is_unconditional(c.K) &&
                             std::all_of(c.C.begin(), c.C.end(), is_unconditional);
  if (unconditional) ids.emplace_back("unconditional_upper");
  return ids;
}

BoundReport run_check(const std::string& id, const CheckCase& c, const CaseEstimates& e, const Thresholds& th) {
  if (id == "gm_lower") return check_gm_lower(c, e, th);
  if (id == "sandwich_upper") return check_sandwich_upper(c, e, th);
  if (id == "sandwich_lower") return check_sandwich_lower(c, e, th);
  if (id == "general_upper") return check_general_upper(c, e, th);
  if (id == "psi2_upper") return check_psi2_upper(c, e, th);
  if (id == "two_convex_upper") return check_two_convex_upper(c, e, th);
  if (id == "two_convex_self") return check_two_convex_self(c, e, th);
  if (id == "cotype_upper") return check_cotype_upper(c, e, th);
  if (id == "cotype_lower") return check_cotype_lower(c, e, th);
  if (id == "type_upper") return check_type_upper(c, e, th);
  if (id == "type_lower") return check_type_lower(c, e, th);
  if (id == "unconditional_upper") return check_unconditional(c, e, th);
  throw ArgumentError("unknown grid check '" + id + "'");
}

BoundReport check_unconditional_e1(int n, std::size_t N, const RngStream& rng, const Thresholds& th) {
  if (n < 2) throw ArgumentError("unconditional_e1 needs n >= 2");
  CheckCase c{{normalize_to_volume_one(BodySpec::cross_polytope(n))},
              BodySpec::cube(n, 0.5),
              WeightVector({1.0}),
              "spiky"};
  const Estimate lhs = estimate_norm(c.C, c.t, c.K, N, rng);
  return make_report("unconditional_e1", c, lhs, Estimate::exact(std::log(static_cast<double>(n))), th);
}

BoundReport check_cube_qn(const WeightVector& t, std::string_view t_pattern, int n, std::size_t N,
                          const RngStream& rng, const Thresholds& th, std::optional<int> cutoff) {
  const BodySpec cube = BodySpec::cube(n, 0.5);
  CheckCase c{{cube}, cube, t, std::string(t_pattern)};
  const double qn = q_n_cube(t, n, cutoff);
  BoundReport r = make_report("cube_qn", c, estimate_norm(c.C, t, cube, N, rng), Estimate::exact(qn), th);
  r.detail = "u=" + std::to_string(std::min(n, cutoff.value_or(default_qn_cutoff(n))));
  return r;
}

std::vector<BoundReport> check_khinchine(const CheckCase& c, std::span<const double> qs, std::size_t N,
                                         const RngStream& rng, const Thresholds& th) {
  std::vector<double> all{1.0};
  all.insert(all.end(), qs.begin(), qs.end());
  const auto moments = estimate_moments(c.C, c.t, c.K, all, N, rng);
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    BoundReport r = make_report("khinchine", c, moments[i + 1], scaled(moments[0], qs[i]), th);
    std::ostringstream detail;
    detail << "q=" << qs[i];
    r.detail = detail.str();
    out.push_back(std::move(r));
  }
  return out;
}

BoundReport check_lp_diagonal(double p, int n, const WeightVector& t, std::string_view t_pattern, std::size_t N,
                              const RngStream& rng, const Thresholds& th) {
  const BodySpec body = normalize_to_volume_one(BodySpec::lp_ball(p, n));
  CheckCase c{{body}, body, t, std::string(t_pattern)};
  double growth = 1.0;
  if (p > 2.0) {
    const double root_log = std::sqrt(std::log(static_cast<double>(n)));
    growth = p == kInf ? root_log : std::min(std::sqrt(p), root_log);
  }
  return make_report("lp_diagonal", c, estimate_norm(c.C, t, body, N, rng), Estimate::exact(growth * t.l2()), th);
}

BoundReport check_paouris_tail(const CheckCase& c, std::size_t N, const RngStream& rng, const Thresholds& th) {
  const PushforwardMeasure mu(c.C, c.t, /*isotropic_rescale=*/true);
  const double cut = 3.0 * std::sqrt(static_cast<double>(c.n()));
  BoundReport r = make_report("paouris_tail", c, tail_fraction(mu, cut, N, rng), Estimate::exact(0.01), th);
  r.body_K = "-";
  return r;
}

std::vector<BoundReport> drift_reports(std::span<const BoundReport> series, const Thresholds& th) {
  std::vector<BoundReport> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end(), [](const BoundReport& a, const BoundReport& b) { return a.n < b.n; });
  auto constant_error = [](const BoundReport& r) {
    const double rel_l = r.lhs.value != 0.0 ? r.lhs.std_error / r.lhs.value : 0.0;
    const double rel_r = r.rhs.value != 0.0 ? r.rhs.std_error / r.rhs.value : 0.0;
    return std::hypot(rel_l, rel_r);
  };
  std::vector<BoundReport> out;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const BoundReport& a = sorted[i - 1];
    const BoundReport& b = sorted[i];
    if (b.n != 2 * a.n || a.implied_constant <= 0.0) continue;
    BoundReport r = b;
    r.theorem_id = b.theorem_id + "_drift";
    const double ratio = b.implied_constant / a.implied_constant;
    r.lhs = {ratio, ratio * std::hypot(constant_error(a), constant_error(b)), b.lhs.n_samples};
    r.rhs = Estimate::exact(1.0);
    r.range = th.at(r.theorem_id);
    r.detail = "n=" + std::to_string(a.n) + "->" + std::to_string(b.n);
    apply_verdict(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::pair<int, std::size_t>> grid_points(const GridSpec& grid) {
  std::vector<std::pair<int, std::size_t>> out;
  for (int n : grid.ns) {
    if (n < 1) throw ArgumentError("grid dimension must be >= 1");
    for (const auto& token : grid.s_values) {
      std::size_t s = 0;
      if (token == "n") {
        s = static_cast<std::size_t>(n);
      } else {
        const auto* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), end, s);
        if (ec != std::errc() || ptr != end || s == 0) {
          throw ArgumentError("grid s value must be a positive integer or 'n', got '" + token + "'");
        }
      }
      const std::pair<int, std::size_t> point{n, s};
      if (std::find(out.begin(), out.end(), point) == out.end()) out.push_back(point);
    }
  }
  return out;
}

BodySpec grid_body(std::string_view family, int n) {
  return normalize_to_volume_one(parse_body(std::string(family) + ":" + std::to_string(n)));
}

namespace {

std::string point_key(std::string_view what, const std::string& C, std::size_t s, TPattern pattern) {
  return std::string(what) + "|" + C + "|s=" + std::to_string(s) + "|" + to_string(pattern);
}

WeightVector grid_weights(TPattern pattern, std::size_t s, const RngStream& rng) {
  return make_weights(pattern, s, keyed_child(rng, "t|s=" + std::to_string(s)));
}

const std::vector<std::string> kGridIds = {
    "gm_lower",     "sandwich_upper", "sandwich_lower", "general_upper", "psi2_upper",         "two_convex_upper",
    "two_convex_self", "cotype_upper", "cotype_lower",  "type_upper",    "type_lower", "unconditional_upper"};

}  // namespace

std::vector<std::string> all_theorem_ids() {
  std::vector<std::string> ids = kGridIds;
  for (const char* id : {"psi2_upper_drift", "unconditional_e1", "cube_qn", "cube_qn_spread", "khinchine",
                         "lp_diagonal", "lp_diagonal_drift", "paouris_tail"}) {
    ids.emplace_back(id);
  }
  return ids;
}

std::vector<BoundReport> run_suite(const GridSpec& grid, const SuiteSpec& suites, const Thresholds& th,
                                   const std::set<std::string>& ids, const RngStream& rng) {
  auto want = [&](const std::string& id) { return ids.empty() || ids.count(id) > 0; };
  const std::size_t N = grid.n_samples;
  std::vector<BoundReport> reports;

  const bool any_grid =
      std::any_of(kGridIds.begin(), kGridIds.end(), want) || want("psi2_upper_drift");
  // Series for the psi_2 drift: keyed by (C family, K family, s token, pattern).
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<BoundReport>> psi2_series;
  if (any_grid) {
    for (int n : grid.ns) {
      std::vector<BodySpec> Ks;
      for (const auto& f : grid.bodies) Ks.push_back(grid_body(f, n));
      std::vector<Estimate> M_K;
      for (const auto& K : Ks) M_K.push_back(estimate_M(K, N, keyed_child(rng, "M|" + K.descriptor())));
      for (const auto& C_family : grid.bodies) {
        const BodySpec C = grid_body(C_family, n);
        const PushforwardMeasure single_measure({C}, WeightVector({1.0}));
        const auto single_values =
            sample_gauge_values(single_measure, Ks, N, keyed_child(rng, "single|" + C.descriptor()));
        for (const auto& token : grid.s_values) {
          const std::size_t s = token == "n" ? static_cast<std::size_t>(n) : std::stoul(token);
          // A literal s equal to n duplicates the "n" column; run it once.
          if (token != "n" && s == static_cast<std::size_t>(n) &&
              std::find(grid.s_values.begin(), grid.s_values.end(), "n") != grid.s_values.end()) {
            continue;
          }
          for (TPattern pattern : grid.patterns) {
            const WeightVector t = grid_weights(pattern, s, rng);
            const PushforwardMeasure measure({C}, t);
            const auto values =
                sample_gauge_values(measure, Ks, N, keyed_child(rng, point_key("norm", C.descriptor(), s, pattern)));
            for (std::size_t k = 0; k < Ks.size(); ++k) {
              const CheckCase c{{C}, Ks[k], t, to_string(pattern)};
              const CaseEstimates e{mean_estimate(values[k]), M_K[k], mean_estimate(single_values[k])};
              for (const auto& id : applicable_checks(c)) {
                if (id == "psi2_upper" && want("psi2_upper_drift")) {
                  psi2_series[{C_family, grid.bodies[k], token, to_string(pattern)}].push_back(
                      run_check(id, c, e, th));
                }
                if (want(id)) reports.push_back(run_check(id, c, e, th));
              }
            }
          }
        }
      }
    }
    if (want("psi2_upper_drift")) {
      for (const auto& [key, series] : psi2_series) {
        for (auto& r : drift_reports(series, th)) reports.push_back(std::move(r));
      }
    }
  }

  if (want("unconditional_e1")) {
    for (int n : suites.unconditional_e1_ns) {
      reports.push_back(check_unconditional_e1(n, N, keyed_child(rng, "e1|n=" + std::to_string(n)), th));
    }
  }

  if (want("cube_qn") || want("cube_qn_spread")) {
    std::vector<BoundReport> qn_reports;
    for (int n : suites.cube_qn_ns) {
      for (TPattern pattern : grid.patterns) {
        const WeightVector t = grid_weights(pattern, static_cast<std::size_t>(n), rng);
        qn_reports.push_back(check_cube_qn(t, to_string(pattern), n, N,
                                           keyed_child(rng, point_key("qn", std::to_string(n), n, pattern)), th,
                                           suites.qn_cutoff));
      }
    }
    if (want("cube_qn")) reports.insert(reports.end(), qn_reports.begin(), qn_reports.end());
    if (want("cube_qn_spread") && !qn_reports.empty()) {
      const auto [lo, hi] = std::minmax_element(
          qn_reports.begin(), qn_reports.end(),
          [](const BoundReport& a, const BoundReport& b) { return a.implied_constant < b.implied_constant; });
      BoundReport r;
      r.theorem_id = "cube_qn_spread";
      r.body_C = r.body_K = "cube:vol1";
      r.n = hi->n;
      r.s = hi->s;
      r.t_pattern = "all";
      // Ratios of ratios: relative errors add in quadrature.
      const auto rel = [](const BoundReport& x) { return x.lhs.std_error / x.lhs.value; };
      r.lhs = {hi->implied_constant, hi->implied_constant * rel(*hi), hi->lhs.n_samples};
      r.rhs = {lo->implied_constant, lo->implied_constant * rel(*lo), lo->lhs.n_samples};
      r.range = th.at(r.theorem_id);
      r.detail = "max=" + hi->t_pattern + "@" + std::to_string(hi->n) + ",min=" + lo->t_pattern + "@" +
                 std::to_string(lo->n);
      apply_verdict(r);
      reports.push_back(std::move(r));
    }
  }

  if (want("khinchine")) {
    const int n = suites.khinchine_n;
    const WeightVector t = grid_weights(TPattern::Flat, static_cast<std::size_t>(n), rng);
    for (const char* family : {"lp:inf", "lp:2"}) {
      const BodySpec body = grid_body(family, n);
      const CheckCase c{{body}, body, t, to_string(TPattern::Flat)};
      for (auto& r : check_khinchine(c, suites.khinchine_qs, N,
                                     keyed_child(rng, point_key("khinchine", body.descriptor(), n, TPattern::Flat)),
                                     th)) {
        reports.push_back(std::move(r));
      }
    }
  }

  if (want("lp_diagonal") || want("lp_diagonal_drift")) {
    for (double p : suites.lp_diagonal_ps) {
      std::vector<BoundReport> series;
      for (int n : suites.lp_diagonal_ns) {
        const WeightVector t = grid_weights(TPattern::Flat, static_cast<std::size_t>(n), rng);
        const std::string key = point_key("diag", BodySpec::lp_ball(p, n).descriptor(), n, TPattern::Flat);
        series.push_back(check_lp_diagonal(p, n, t, to_string(TPattern::Flat), N, keyed_child(rng, key), th));
      }
      if (want("lp_diagonal")) reports.insert(reports.end(), series.begin(), series.end());
      if (want("lp_diagonal_drift")) {
        for (auto& r : drift_reports(series, th)) reports.push_back(std::move(r));
      }
    }
  }

  if (want("paouris_tail")) {
    const int n = suites.paouris_n;
    for (const auto& family : grid.bodies) {
      const BodySpec C = grid_body(family, n);
      for (const auto& token : grid.s_values) {
        const std::size_t s = token == "n" ? static_cast<std::size_t>(n) : std::stoul(token);
        if (token != "n" && s == static_cast<std::size_t>(n)) continue;
        for (TPattern pattern : grid.patterns) {
          const CheckCase c{{C}, C, grid_weights(pattern, s, rng), to_string(pattern)};
          reports.push_back(
              check_paouris_tail(c, N, keyed_child(rng, point_key("paouris", C.descriptor(), s, pattern)), th));
        }
      }
    }
  }
  return reports;
}

std::vector<RouteComparison> compare_routes(const GridSpec& grid, const RngStream& rng) {
  const std::size_t N = grid.n_samples;
  std::vector<RouteComparison> out;
  const bool has_n = std::find(grid.s_values.begin(), grid.s_values.end(), "n") != grid.s_values.end();
  for (int n : grid.ns) {
    std::vector<BodySpec> Ks;
    for (const auto& f : grid.bodies) Ks.push_back(grid_body(f, n));
    for (const auto& C_family : grid.bodies) {
      const BodySpec C = grid_body(C_family, n);
      const double L = isotropic_constant(C);
      for (const auto& token : grid.s_values) {
        const std::size_t s = token == "n" ? static_cast<std::size_t>(n) : std::stoul(token);
        if (token != "n" && s == static_cast<std::size_t>(n) && has_n) continue;
        for (TPattern pattern : grid.patterns) {
          const WeightVector t = grid_weights(pattern, s, rng);
          const auto direct = sample_gauge_values(PushforwardMeasure({C}, t), Ks, N,
                                                  keyed_child(rng, point_key("norm", C.descriptor(), s, pattern)));
          const auto iso = sample_gauge_values(PushforwardMeasure({C}, t, true), Ks, N,
                                               keyed_child(rng, point_key("route", C.descriptor(), s, pattern)));
          for (std::size_t k = 0; k < Ks.size(); ++k) {
            RouteComparison rc;
            rc.body_C = C.descriptor();
            rc.body_K = Ks[k].descriptor();
            rc.n = n;
            rc.s = s;
            rc.t_pattern = to_string(pattern);
            rc.direct = mean_estimate(direct[k]);
            const Estimate i1 = mean_estimate(iso[k]);
            const double factor = t.l2() * L;
            rc.isotropic = {factor * i1.value, factor * i1.std_error, i1.n_samples};
            const double sigma = combined_error(rc.direct, rc.isotropic);
            rc.z = sigma > 0.0 ? (rc.direct.value - rc.isotropic.value) / sigma : 0.0;
            out.push_back(rc);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace multinorm
