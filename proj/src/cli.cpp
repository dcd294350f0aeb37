#include "multinorm/cli.hpp"

#include "multinorm/balancing.hpp"
#include "multinorm/bounds.hpp"
#include "multinorm/config.hpp"
#include "multinorm/errors.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"
#include "multinorm/report_io.hpp"
#include "multinorm/selftest.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

namespace multinorm::cli {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json to_json(const Estimate& e) {
  return {{"value", number(e.value)}, {"stderr", number(e.std_error)}, {"n_samples", e.n_samples}};
}

// Options shared by every subcommand.
struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> N;
  std::string config_path;
  std::string out_path;
};

void add_common(CLI::App* app, Common& c, bool with_config) {
  app->add_option("--seed", c.seed, "Master seed (default 42)");
  app->add_option("--threads", c.threads, "Worker threads (default 1)")->check(CLI::PositiveNumber);
  app->add_option("--N", c.N, "Monte Carlo samples per estimate")->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  app->add_option("--out", c.out_path, "Output file; .csv selects CSV, anything else JSON");
  if (with_config) {
    app->add_option("--grid,--config", c.config_path, "Run configuration (flat key = value or JSON)")
        ->check(CLI::ExistingFile);
  }
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (c.seed) config.seed = *c.seed;
  if (c.threads) config.threads = *c.threads;
  if (c.N) config.grid.n_samples = *c.N;
  set_thread_count(config.threads);
  return config;
}

// JSON documents that are not bound reports share this envelope.
Json envelope(const std::string& command, const RunConfig& config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "multinorm";
  j["command"] = command;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  return j;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
  } else {
    write_text_file(c.out_path, text);
  }
}

WeightVector weights_from(const std::string& text, const RunConfig& config) {
  return parse_weights(text, keyed_child(RngStream{config.seed, 0}, "cli|t"));
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ArgumentError("cannot read '" + item + "' as a number");
    out.push_back(v);
  }
  return out;
}

int count_violated(std::span<const BoundReport> reports) {
  return static_cast<int>(std::count_if(reports.begin(), reports.end(),
                                        [](const BoundReport& r) { return r.verdict == Verdict::Violated; }));
}

void print_summary(std::span<const BoundReport> reports, std::ostream& out) {
  int holds = 0;
  int violated = 0;
  int inconclusive = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Holds) ++holds;
    if (r.verdict == Verdict::Violated) ++violated;
    if (r.verdict == Verdict::Inconclusive) ++inconclusive;
  }
  out << reports.size() << " reports: " << holds << " holds, " << violated << " violated, " << inconclusive
      << " inconclusive\n";
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Violated) {
      out << "  violated: " << r.theorem_id << " C=" << r.body_C << " K=" << r.body_K << " s=" << r.s
          << " t=" << r.t_pattern << " implied=" << format_double(r.implied_constant) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------

struct EstimateNormArgs {
  Common common;
  std::vector<std::string> body_c;
  std::string body_k;
  std::string t = "1";
  std::string route = "direct";
  std::string moments;
};

int cmd_estimate_norm(const EstimateNormArgs& a, std::ostream& out) {
  const RunConfig config = resolve(a.common);
  const std::size_t N = a.common.N.value_or(100000);
  std::vector<BodySpec> C;
  for (const auto& d : a.body_c) C.push_back(parse_body(d));
  const BodySpec K = parse_body(a.body_k);
  const WeightVector t = weights_from(a.t, config);
  const RngStream rng{config.seed, 0};

  Json j = envelope("estimate-norm", config);
  j["body_C"] = a.body_c;
  j["body_K"] = K.descriptor();
  j["t"] = std::vector<double>(t.entries().begin(), t.entries().end());
  j["route"] = a.route;
  j["N"] = N;
  if (a.route == "direct") {
    j["estimate"] = to_json(estimate_norm(C, t, K, N, rng));
  } else if (a.route == "isotropic") {
    if (C.size() != 1) throw ArgumentError("the isotropic route needs one common body C");
    j["estimate"] = to_json(estimate_norm_isotropic_route(C.front(), t, K, N, rng));
  } else if (a.route == "raw" || a.route == "unit") {
    const auto convention = a.route == "raw" ? PushforwardConvention::Raw : PushforwardConvention::UnitNormalized;
    j["estimate"] = to_json(estimate_norm_pushforward(C, t, K, N, rng, convention));
  } else {
    throw ArgumentError("unknown route '" + a.route + "' (direct, isotropic, raw, unit)");
  }
  if (!a.moments.empty()) {
    const auto qs = parse_number_list(a.moments);
    const auto ms = estimate_moments(C, t, K, qs, N, rng.child(1));
    Json arr = Json::array();
    for (std::size_t i = 0; i < qs.size(); ++i) arr.push_back({{"q", qs[i]}, {"estimate", to_json(ms[i])}});
    j["moments"] = arr;
  }
  emit(a.common, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FunctionalsArgs {
  Common common;
  std::string body;
  std::string qs = "1,2,4";
};

int cmd_functionals(const FunctionalsArgs& a, std::ostream& out) {
  const RunConfig config = resolve(a.common);
  const std::size_t N = a.common.N.value_or(100000);
  const BodySpec K = parse_body(a.body);
  const auto qs = parse_number_list(a.qs);
  const FunctionalProfile p = compute_profile(K, N, RngStream{config.seed, 0}, qs);

  Json j = envelope("functionals", config);
  j["body"] = p.body;
  j["n"] = p.n;
  j["N"] = N;
  j["M"] = to_json(p.M);
  Json mq = Json::array();
  for (const auto& [q, e] : p.M_q) mq.push_back({{"q", q}, {"estimate", to_json(e)}});
  j["M_q"] = mq;
  j["mean_width"] = to_json(p.mean_width);
  j["b"] = number(p.b);
  j["R"] = number(p.R);
  j["vrad"] = number(p.vrad);
  j["gaussian_median"] = to_json(p.gaussian_median);
  j["k"] = number(p.k);
  j["d"] = {{"value", number(p.d.value)},
            {"censored", p.d.censored},
            {"probability", number(p.d.probability)},
            {"n_samples", p.d.n_samples}};
  j["L"] = K.volume_normalized() ? number(isotropic_constant(K)) : Json(nullptr);
  emit(a.common, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CheckBoundsArgs {
  Common common;
  std::string suite;
  bool list = false;
  bool print_config = false;
  std::vector<std::string> extra_out;
};

std::vector<BoundReport> run_all_checks(const RunConfig& config) {
  const RngStream rng{config.seed, 0};
  std::set<std::string> grid_ids;
  std::set<std::string> balancing_ids;
  const auto bal = balancing_theorem_ids();
  for (const auto& id : config.suite) {
    (std::find(bal.begin(), bal.end(), id) != bal.end() ? balancing_ids : grid_ids).insert(id);
  }
  const bool everything = config.suite.empty();
  std::vector<BoundReport> reports;
  if (everything || !grid_ids.empty()) {
    reports = run_suite(config.grid, config.suites, config.thresholds, grid_ids, keyed_child(rng, "suite"));
  }
  if (everything || !balancing_ids.empty()) {
    auto more = run_balancing_suite(config.balancing, config.grid.n_samples, config.thresholds, balancing_ids,
                                    keyed_child(rng, "balancing"));
    reports.insert(reports.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  return reports;
}

int cmd_check_bounds(const CheckBoundsArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& id : all_theorem_ids()) out << id << "\n";
    for (const auto& id : balancing_theorem_ids()) out << id << "\n";
    return kExitOk;
  }
  RunConfig config = resolve(a.common);
  if (!a.suite.empty()) config.set("suite", a.suite);
  if (a.print_config) {
    for (const auto& [k, v] : config.to_flat()) out << k << " = " << v << "\n";
    return kExitOk;
  }
  const auto reports = run_all_checks(config);
  if (a.common.out_path.empty()) {
    write_reports_csv(out, reports, config);
  } else {
    write_reports(a.common.out_path, reports, config);
    print_summary(reports, out);
  }
  for (const auto& path : a.extra_out) write_reports(path, reports, config);
  return count_violated(reports) > 0 ? kExitViolated : kExitOk;
}

// ---------------------------------------------------------------------------

struct BalancingArgs {
  Common common;
  std::string body_c;
  std::string body_k;
  std::size_t s = 8;
  double delta = 0.1;
  std::optional<std::size_t> tuples;
  std::string method = "greedy";
  std::optional<std::size_t> kappa;
  std::string rotation;
  std::optional<std::size_t> set_size;
  std::size_t rotations = 32;
  std::string t = "pattern:flat";
  std::optional<double> threshold_constant;
  std::size_t bins = 20;
};

Json histogram(const std::vector<double>& sorted, std::size_t bins) {
  Json rows = Json::array();
  if (sorted.empty() || bins == 0) return rows;
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : sorted) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)]++;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    rows.push_back({{"lo", lo + width * static_cast<double>(b)},
                    {"hi", lo + width * static_cast<double>(b + 1)},
                    {"count", counts[b]}});
  }
  return rows;
}

Json to_json(const BalancingEstimate& e, std::size_t bins) {
  return {{"r", number(e.r)},
          {"delta", e.delta},
          {"s", e.s},
          {"n", e.n},
          {"method", e.method},
          {"n_tuples", e.n_tuples},
          {"quantile_ci", {number(e.quantile_ci.lo), number(e.quantile_ci.hi)}},
          {"histogram", histogram(e.values, bins)},
          {"values", e.values}};
}

std::string histogram_csv(const BalancingEstimate& e, std::size_t bins, const RunConfig& config) {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# seed=" << config.seed << " method=" << e.method << " n=" << e.n << " s=" << e.s
      << " delta=" << format_double(e.delta) << " r=" << format_double(e.r) << "\n";
  out << "bin_lo,bin_hi,count\n";
  for (const auto& row : histogram(e.values, bins)) {
    out << format_double(row["lo"].get<double>()) << ',' << format_double(row["hi"].get<double>()) << ','
        << row["count"].get<std::size_t>() << "\n";
  }
  return out.str();
}

int cmd_balancing(const BalancingArgs& a, std::ostream& out) {
  const RunConfig config = resolve(a.common);
  const BodySpec C = parse_body(a.body_c);
  const BodySpec K = parse_body(a.body_k.empty() ? a.body_c : a.body_k);
  const RngStream rng{config.seed, 0};
  const bool csv = !a.common.out_path.empty() && format_for(a.common.out_path) == OutputFormat::Csv;

  if (!a.rotation.empty()) {
    RotationOptions options;
    options.mode = parse_rotation_mode(a.rotation);
    options.n_rotations = a.rotations;
    options.N = a.common.N.value_or(100000);
    options.n_tuples = a.tuples.value_or(200);
    options.S_size = a.set_size;
    options.threshold_constant = a.threshold_constant;
    std::string t_text = a.t;
    if (t_text == "pattern:flat") t_text += ":" + std::to_string(a.s);
    const WeightVector t = weights_from(t_text, config);
    const auto ex = run_rotation_experiment(C, K, t, a.t, options, rng);
    const auto reports = rotation_reports(ex, config.thresholds);
    if (csv) {
      write_reports(a.common.out_path, reports, config);
      print_summary(reports, out);
      return count_violated(reports) > 0 ? kExitViolated : kExitOk;
    }
    Json j = envelope("balancing", config);
    j["experiment"] = {{"body_C", ex.body_C},
                       {"body_K", ex.body_K},
                       {"n", ex.n},
                       {"s", ex.s},
                       {"t_pattern", ex.t_pattern},
                       {"mode", to_string(ex.mode)},
                       {"exponent", number(ex.exponent)},
                       {"d_censored", ex.d_censored},
                       {"S_size", ex.S_size},
                       {"S_clamped", ex.S_clamped},
                       {"threshold_constant", ex.threshold_constant},
                       {"reference", to_json(ex.reference)},
                       {"average_ratio", to_json(ex.average_ratio)}};
    Json rots = Json::array();
    for (const auto& r : ex.rotations) {
      rots.push_back({{"body_UC", r.body_UC},
                      {"norm", to_json(r.norm)},
                      {"bad_tuples", r.bad_tuples},
                      {"n_tuples", r.n_tuples},
                      {"bad_fraction", r.bad_fraction()}});
    }
    j["experiment"]["rotations"] = rots;
    j["reports"] = Json::parse(reports_to_json(reports, config))["reports"];
    emit(a.common, j.dump(2) + "\n", out);
    return count_violated(reports) > 0 ? kExitViolated : kExitOk;
  }

  const std::size_t tuples = a.tuples.value_or(static_cast<std::size_t>(std::ceil(50.0 / a.delta)));
  const auto method = parse_sign_method(a.method);
  const auto beta = estimate_beta_R(C, K, a.s, a.delta, tuples, method, rng);
  if (csv) {
    write_text_file(a.common.out_path, histogram_csv(beta, a.bins, config));
    out << "beta " << format_double(beta.r) << " (" << beta.method << ", " << beta.n_tuples << " tuples)\n";
    return kExitOk;
  }
  Json j = envelope("balancing", config);
  j["body_C"] = C.descriptor();
  j["body_K"] = K.descriptor();
  j["beta"] = to_json(beta, a.bins);
  if (a.kappa) {
    j["kappa"] = to_json(estimate_kappa_R(C, K, a.s, a.delta, tuples, *a.kappa, rng), a.bins);
  }
  emit(a.common, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const Common& c, std::ostream& out) {
  const RunConfig config = resolve(c);
  const auto rows = compare_routes(config.grid, keyed_child(RngStream{config.seed, 0}, "sweep"));
  const bool csv = c.out_path.empty() || format_for(c.out_path) == OutputFormat::Csv;
  std::ostringstream text;
  if (csv) {
    text << "# schema_version=" << kSchemaVersion << "\n# config=" << config.to_json_string() << "\n";
    text << "body_C,body_K,n,s,t_pattern,direct,direct_stderr,isotropic,isotropic_stderr,z,seed\n";
    for (const auto& r : rows) {
      text << r.body_C << ',' << r.body_K << ',' << r.n << ',' << r.s << ',' << r.t_pattern << ','
           << format_double(r.direct.value) << ',' << format_double(r.direct.std_error) << ','
           << format_double(r.isotropic.value) << ',' << format_double(r.isotropic.std_error) << ','
           << format_double(r.z) << ',' << config.seed << "\n";
    }
  } else {
    Json j = envelope("sweep", config);
    j["config"] = Json::parse(config.to_json_string());
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back({{"body_C", r.body_C},
                     {"body_K", r.body_K},
                     {"n", r.n},
                     {"s", r.s},
                     {"t_pattern", r.t_pattern},
                     {"direct", to_json(r.direct)},
                     {"isotropic", to_json(r.isotropic)},
                     {"z", number(r.z)}});
    }
    j["rows"] = arr;
    text << j.dump(2) << "\n";
  }
  emit(c, text.str(), out);
  return kExitOk;
}

int cmd_selftest(const Common& c, std::ostream& out) {
  const RunConfig config = resolve(c);
  const auto results = run_selftest(RngStream{config.seed, 0});
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed && !r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " passed\n";
  return failed == 0 ? kExitOk : kExitViolated;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo experiments on multi-body norms of sums of random vectors", "multinorm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "multinorm 0.1.0");

  EstimateNormArgs en;
  auto* sub_en = app.add_subcommand("estimate-norm", "Estimate ||t||_{C,K}");
  add_common(sub_en, en.common, false);
  sub_en->add_option("--body-c", en.body_c, "Body C (repeat once per weight for distinct bodies)")->required();
  sub_en->add_option("--body-k", en.body_k, "Body K, e.g. lp:1:16:vol1")->required();
  sub_en->add_option("--t", en.t, "Weights: `1,2,3` or `pattern:<name>:<s>`");
  sub_en->add_option("--route", en.route, "direct | isotropic | raw | unit");
  sub_en->add_option("--moments", en.moments, "Comma separated q >= 1 for higher moments");

  FunctionalsArgs fn;
  auto* sub_fn = app.add_subcommand("functionals", "M, M_q, w, b, R, vrad, median, k, d of one body");
  add_common(sub_fn, fn.common, false);
  sub_fn->add_option("--body", fn.body, "Body descriptor")->required();
  sub_fn->add_option("--q", fn.qs, "Comma separated q values for M_q");

  CheckBoundsArgs cb;
  auto* sub_cb = app.add_subcommand("check-bounds", "Run the bound checkers and write reports");
  add_common(sub_cb, cb.common, true);
  sub_cb->add_option("--suite", cb.suite, "all or a comma separated list of theorem ids");
  sub_cb->add_flag("--list", cb.list, "List theorem ids and exit");
  sub_cb->add_flag("--print-config", cb.print_config, "Print the resolved configuration and exit");
  sub_cb->add_option("--extra-out", cb.extra_out, "Further output files from the same run (repeatable)");

  BalancingArgs bl;
  auto* sub_bl = app.add_subcommand("balancing", "Randomized balancing parameters and rotation experiments");
  add_common(sub_bl, bl.common, false);
  sub_bl->add_option("--body-c", bl.body_c, "Body C")->required();
  sub_bl->add_option("--body-k", bl.body_k, "Body K (default: C)");
  sub_bl->add_option("--s", bl.s, "Tuple length")->check(CLI::PositiveNumber);
  sub_bl->add_option("--delta", bl.delta, "Failure probability in (0, 1)");
  sub_bl->add_option("--tuples", bl.tuples, "Number of tuples (default ceil(50 / delta))");
  sub_bl->add_option("--method", bl.method, "brute | greedy | random:<m>");
  sub_bl->add_option("--kappa", bl.kappa, "Also estimate kappa with this many random sign vectors per tuple");
  sub_bl->add_option("--rotation-experiment", bl.rotation, "lower | upper");
  sub_bl->add_option("--set-size", bl.set_size, "Size of the random sign set S");
  sub_bl->add_option("--rotations", bl.rotations, "Haar rotations in the rotation experiment");
  sub_bl->add_option("--t", bl.t, "Weights for the rotation experiment");
  sub_bl->add_option("--threshold-constant", bl.threshold_constant, "c (lower) or C (upper) multiplier");
  sub_bl->add_option("--bins", bl.bins, "Histogram bins")->check(CLI::PositiveNumber);

  Common sw;
  auto* sub_sw = app.add_subcommand("sweep", "Direct and isotropic-route norm estimates over the grid");
  add_common(sub_sw, sw, true);

  Common st;
  auto* sub_st = app.add_subcommand("selftest", "Quick closed-form checks");
  add_common(sub_st, st, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sub_en) return cmd_estimate_norm(en, out);
    if (*sub_fn) return cmd_functionals(fn, out);
    if (*sub_cb) return cmd_check_bounds(cb, out);
    if (*sub_bl) return cmd_balancing(bl, out);
    if (*sub_sw) return cmd_sweep(sw, out);
    if (*sub_st) return cmd_selftest(st, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace multinorm::cli
