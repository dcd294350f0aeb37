// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Criteria 3-8, 10 (the constant part), 11 and 12 read the reports of two
// full `check-bounds` runs of the shipped executable with the default
// configuration; the rest are computed here.

#include "multinorm/balancing.hpp"
#include "multinorm/body.hpp"
#include "multinorm/bounds.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace multinorm;
using Json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Json> with_id(const Json& doc, const std::string& id) {
  std::vector<Json> out;
  for (const auto& r : doc.at("reports")) {
    if (r.at("theorem_id") == id) out.push_back(r);
  }
  return out;
}

const std::vector<std::string> kFamilies{"lp:2", "lp:inf", "lp:1", "lp:4"};

// ---------------------------------------------------------------------------

Outcome polar_identity() {
  Outcome o;
  int checked = 0;
  double worst = 0.0;
  for (const auto& f : kFamilies) {
    for (int n : {2, 8, 32}) {
      const BodySpec K = grid_body(f, n);
      const Estimate e = estimate_norm(K, WeightVector({1.0}), K, 100000, keyed_child(RngStream{42, 0}, f + std::to_string(n)));
      const double z = (e.value - n / (n + 1.0)) / e.std_error;
      worst = std::max(worst, std::abs(z));
      ++checked;
      if (std::abs(z) > 3.0) {
        o.pass = false;
        o.detail += " off:" + f + "@" + std::to_string(n) + "(z=" + fmt(z) + ")";
      }
    }
  }
  o.detail = std::to_string(checked) + " cases, max |z| = " + fmt(worst) + o.detail;
  return o;
}

Outcome route_equivalence() {
  const auto rows = compare_routes(GridSpec{}, RngStream{42, 0});
  Outcome o;
  double worst = 0.0;
  int over = 0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.z));
    if (std::abs(r.z) > 3.0) ++over;
  }
  o.pass = over == 0;
  o.detail = std::to_string(rows.size()) + " comparisons, " + std::to_string(over) + " beyond 3 sigma, max |z| = " +
             fmt(worst);
  return o;
}

Outcome gm_lower(const Json& doc) {
  const auto rows = with_id(doc, "gm_lower");
  Outcome o;
  int violated = 0;
  double min_margin = INFINITY;
  for (const auto& r : rows) {
    if (r.at("verdict") == "violated") ++violated;
    min_margin = std::min(min_margin, num(r.at("margin_sigmas")));
  }
  o.pass = rows.size() >= 240 && violated == 0 && min_margin >= 3.0;
  o.detail = std::to_string(rows.size()) + " reports, " + std::to_string(violated) + " violated, min margin " +
             fmt(min_margin) + " sigma";
  return o;
}

Outcome sandwich(const Json& doc) {
  const auto upper = with_id(doc, "sandwich_upper");
  const auto lower = with_id(doc, "sandwich_lower");
  Outcome o;
  int violated = 0;
  for (const auto& r : upper) violated += r.at("verdict") == "violated" ? 1 : 0;
  double min_c1 = INFINITY;
  for (const auto& r : lower) min_c1 = std::min(min_c1, num(r.at("implied_constant")));
  o.pass = !upper.empty() && !lower.empty() && violated == 0 && min_c1 >= 0.1;
  o.detail = "upper: " + std::to_string(upper.size()) + " reports, " + std::to_string(violated) +
             " violated; lower: min c1 = " + fmt(min_c1);
  return o;
}

Outcome lp_diagonal(const Json& doc) {
  const auto rows = with_id(doc, "lp_diagonal_drift");
  Outcome o;
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& r : rows) {
    if (r.at("t_pattern") != "flat") continue;
    const double ratio = num(r.at("lhs"));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  o.pass = rows.size() == 12 && lo >= 0.5 && hi <= 2.0;
  o.detail = std::to_string(rows.size()) + " doublings, drift ratios in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return o;
}

Outcome cube_qn(const Json& doc) {
  const auto rows = with_id(doc, "cube_qn");
  const auto spread = with_id(doc, "cube_qn_spread");
  Outcome o;
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, num(r.at("implied_constant")));
    hi = std::max(hi, num(r.at("implied_constant")));
  }
  o.pass = rows.size() == 15 && spread.size() == 1 && lo >= 0.1 && hi <= 10.0 && hi / lo <= 10.0;
  o.detail = std::to_string(rows.size()) + " ratios in [" + fmt(lo) + ", " + fmt(hi) + "], max/min " + fmt(hi / lo);
  return o;
}

Outcome khinchine(const Json& doc) {
  const auto rows = with_id(doc, "khinchine");
  Outcome o;
  double hi = 0.0;
  bool cube = false;
  bool ball = false;
  for (const auto& r : rows) {
    hi = std::max(hi, num(r.at("implied_constant")));
    cube = cube || r.at("body_K").get<std::string>().rfind("lp:inf:8", 0) == 0;
    ball = ball || r.at("body_K").get<std::string>().rfind("lp:2:8", 0) == 0;
  }
  o.pass = rows.size() == 6 && cube && ball && hi <= 3.0;
  o.detail = std::to_string(rows.size()) + " moments, max c_q = " + fmt(hi);
  return o;
}

Outcome isotropy_paouris(const Json& doc) {
  Outcome o;
  int checked = 0;
  int over = 0;
  double worst = 0.0;
  const RngStream rng{42, 0};
  for (const auto& f : kFamilies) {
    for (int n : {4, 8, 16, 32}) {
      const BodySpec C = grid_body(f, n);
      for (std::size_t s : {std::size_t{1}, std::size_t{4}, static_cast<std::size_t>(n)}) {
        for (TPattern p : kAllPatterns) {
          const std::string key = "I2|" + C.descriptor() + "|" + std::to_string(s) + "|" + to_string(p);
          const PushforwardMeasure mu({C}, make_weights(p, s, keyed_child(rng, key + "|t")), true);
          const Estimate I2 = estimate_Iq(mu, 2.0, 20000, keyed_child(rng, key));
          const double z = (I2.value - std::sqrt(static_cast<double>(n))) / I2.std_error;
          worst = std::max(worst, std::abs(z));
          over += std::abs(z) > 3.0 ? 1 : 0;
          ++checked;
        }
      }
    }
  }
  const auto tails = with_id(doc, "paouris_tail");
  double tail_max = 0.0;
  for (const auto& r : tails) tail_max = std::max(tail_max, num(r.at("lhs")));
  o.pass = over == 0 && !tails.empty() && tail_max <= 0.01;
  o.detail = "I2: " + std::to_string(checked) + " cases, " + std::to_string(over) + " beyond 3 sigma, max |z| = " +
             fmt(worst) + "; tail: " + std::to_string(tails.size()) + " cases, max fraction " + fmt(tail_max);
  return o;
}

Outcome density_bound() {
  Outcome o;
  std::mt19937_64 eng(42);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> len(1, 8);
  double hi = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> t(static_cast<std::size_t>(len(eng)));
    for (auto& v : t) v = g(eng);
    const WeightVector w(t);
    hi = std::max(hi, density_at_zero_1d(w.scaled(1.0 / w.l2())));
  }
  const double e1 = density_at_zero_1d(WeightVector({1.0}));
  const double flat = density_at_zero_1d(make_weights(TPattern::Flat, 400));
  const double gauss = std::sqrt(6.0 / std::acos(-1.0));
  o.pass = hi <= std::exp(1.0) && std::abs(e1 - 1.0) < 1e-12 && std::abs(flat - gauss) < 1e-3;
  o.detail = "max over 100 random t = " + fmt(hi) + ", e1 -> " + fmt(e1) + ", flat(400) -> " + fmt(flat);
  return o;
}

Outcome balancing(const Json& doc) {
  Outcome o;
  const int n = 8;
  std::mt19937_64 pick(42);
  std::uniform_int_distribution<int> s_dist(2, 16);
  int brute_greedy = 0;
  int greedy_random = 0;
  int brute_random = 0;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    const auto s = static_cast<std::size_t>(s_dist(pick));
    const BodySpec C = grid_body(kFamilies[i % 4], n);
    const BodySpec K = grid_body(kFamilies[(i / 4) % 4], n);
    Engine eng = RngStream{42, 10}.child(static_cast<std::uint64_t>(i)).engine();
    const Matrix pts = draw_tuple(C, s, eng);
    const double b = min_signs_bruteforce(pts, K).achieved;
    const double g = min_signs_greedy(pts, K).achieved;
    const double r = min_signs_random(pts, K, 64, eng).achieved;
    brute_greedy += b <= g + 1e-12 ? 1 : 0;
    greedy_random += g <= r + 1e-12 ? 1 : 0;
    brute_random += b <= r + 1e-12 ? 1 : 0;
  }
  const bool ordering = brute_greedy == instances && greedy_random == instances && brute_random == instances;

  const BodySpec cube = BodySpec::cube(n);
  const RngStream shared{42, 11};
  const auto beta = estimate_beta_R(cube, cube, 12, 0.1, 500, SignMethodSpec{SignMethod::Bruteforce, 0}, shared);
  const auto kappa = estimate_kappa_R(cube, cube, 12, 0.1, 500, 256, shared);
  bool kappa_ok = kappa.r >= beta.r;
  for (std::size_t i = 0; i < beta.values.size(); ++i) kappa_ok = kappa_ok && kappa.values[i] >= beta.values[i];

  double bg_max = 0.0;
  int bg_cube = 0;
  for (const auto& r : with_id(doc, "barany_grinberg_delta")) {
    if (r.at("body_K").get<std::string>().rfind("lp:inf:", 0) != 0) continue;
    ++bg_cube;
    bg_max = std::max(bg_max, num(r.at("implied_constant")));
  }
  const bool bg_ok = bg_cube == 4 && bg_max <= 3.0;

  o.pass = ordering && kappa_ok && bg_ok;
  o.detail = "brute<=greedy " + std::to_string(brute_greedy) + "/200, greedy<=random64 " +
             std::to_string(greedy_random) + "/200, brute<=random64 " + std::to_string(brute_random) +
             "/200; kappa>=beta " + (kappa_ok ? "yes" : "no") + "; cube delta-constant max " + fmt(bg_max) + " over " +
             std::to_string(bg_cube) + " reports";
  return o;
}

Outcome rotation_average(const Json& doc) {
  Outcome o;
  int found = 0;
  for (const auto& r : with_id(doc, "rotation_average")) {
    if (r.at("body_C").get<std::string>().rfind("lp:inf:16", 0) != 0) continue;
    if (r.at("body_K").get<std::string>().rfind("lp:1:16", 0) != 0) continue;
    ++found;
    const double c = num(r.at("implied_constant"));
    o.pass = r.at("n") == 16 && r.at("s") == 16 && c >= 1.0 / 3.0 && c <= 3.0;
    o.detail = "average ratio " + fmt(c) + " (" + r.at("detail").get<std::string>() + ")";
  }
  if (found != 1) {
    o.pass = false;
    o.detail = "expected one cube / B1 report, found " + std::to_string(found);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "multinorm_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--workdir") workdir = argv[i + 1];
  }
  fs::create_directories(workdir);
  const std::string exe = MULTINORM_EXE;

  auto suite_run = [&](const std::string& tag) {
    const fs::path csv = workdir / (tag + ".csv");
    const fs::path json = workdir / (tag + ".json");
    const std::string cmd = "\"" + exe + "\" check-bounds --suite all --out \"" + csv.string() + "\" --extra-out \"" +
                            json.string() + "\" > \"" + (workdir / (tag + ".log")).string() + "\" 2>&1";
    const auto start = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "suite run " << tag << ": status " << status << ", " << fmt(secs) << " s\n";
    return status;
  };

  const int status_a = suite_run("run_a");
  const int status_b = suite_run("run_b");
  Json doc;
  try {
    doc = Json::parse(slurp(workdir / "run_a.json"));
  } catch (const std::exception& e) {
    std::cout << "FAIL  suite output unreadable: " << e.what() << "\n";
    return 1;
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "polar identity", polar_identity},
      {2, "route equivalence", route_equivalence},
      {3, "Gluskin-Milman lower bound", [&] { return gm_lower(doc); }},
      {4, "sandwich bound", [&] { return sandwich(doc); }},
      {5, "lp diagonal drift", [&] { return lp_diagonal(doc); }},
      {6, "cube equivalence with q_n", [&] { return cube_qn(doc); }},
      {7, "Khinchine moments", [&] { return khinchine(doc); }},
      {8, "isotropy and Paouris tail", [&] { return isotropy_paouris(doc); }},
      {9, "density bound at n = 1", density_bound},
      {10, "balancing consistency", [&] { return balancing(doc); }},
      {11, "rotation average", [&] { return rotation_average(doc); }},
      {12, "determinism",
       [&] {
         Outcome o;
         const bool csv = slurp(workdir / "run_a.csv") == slurp(workdir / "run_b.csv");
         const bool json = slurp(workdir / "run_a.json") == slurp(workdir / "run_b.json");
         o.pass = csv && json && !slurp(workdir / "run_a.csv").empty();
         o.detail = std::string("csv ") + (csv ? "identical" : "differs") + ", json " + (json ? "identical" : "differs") +
                    ", exit codes " + std::to_string(status_a) + "/" + std::to_string(status_b);
         return o;
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << o.detail << " [" << fmt(secs)
              << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
