#include <doctest.h>

#include "multinorm/config.hpp"
#include "multinorm/errors.hpp"
#include "multinorm/report_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace multinorm;

TEST_CASE("defaults round-trip through the flat text form") {
  const RunConfig def;
  const RunConfig back = parse_config_text(default_config_text());
  CHECK(back.to_flat() == def.to_flat());
  CHECK(def.seed == 42);
  CHECK(def.grid.ns == std::vector<int>{4, 8, 16, 32});
  CHECK(def.grid.n_samples == 100000);
}

TEST_CASE("shipped default grid matches the built-in defaults") {
  const auto path = std::filesystem::path(MULTINORM_SOURCE_DIR) / "configs" / "default.grid";
  CHECK(load_config(path).to_flat() == RunConfig{}.to_flat());
}

TEST_CASE("text parsing") {
  const RunConfig c = parse_config_text(
      "# comment\n"
      "seed = 7   # trailing comment\n"
      "\n"
      "grid.n = 4, 8\n"
      "grid.s = 2,n\n"
      "grid.patterns = flat\n"
      "suite = gm_lower,khinchine\n"
      "qn_cutoff = 2\n"
      "threshold.khinchine.max = 4.5\n"
      "threshold.gm_lower.min = none\n"
      "threshold.gm_lower.max = 9\n");
  CHECK(c.seed == 7);
  CHECK(c.grid.ns == std::vector<int>{4, 8});
  CHECK(c.grid.s_values == std::vector<std::string>{"2", "n"});
  CHECK(c.grid.patterns == std::vector<TPattern>{TPattern::Flat});
  CHECK(c.suite == std::set<std::string>{"gm_lower", "khinchine"});
  CHECK(c.suites.qn_cutoff == 2);
  CHECK(*c.thresholds.at("khinchine").max == 4.5);
  CHECK(!c.thresholds.at("gm_lower").min);
  CHECK(*c.thresholds.at("gm_lower").max == 9.0);
  CHECK(parse_config_text("suite = all").suite.empty());
  CHECK(!parse_config_text("qn_cutoff = auto").suites.qn_cutoff);
  CHECK(parse_config_text("lp_diagonal.p = 1.5, inf").suites.lp_diagonal_ps.back() == kInf);
}

TEST_CASE("text parsing errors name the line") {
  try {
    (void)parse_config_text("seed = 1\nbogus.key = 3\n");
    FAIL("expected an error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config_text("seed 1"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_text("grid.n = four"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_text("grid.patterns = zigzag"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_text("suite = not_a_check"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_text("threshold.nope.max = 1"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_text("threshold.khinchine.max = x"), ArgumentError);
}

TEST_CASE("JSON: nested, flat and the canonical dump") {
  const RunConfig nested = parse_config_json(R"({"seed": 5, "grid": {"n": [8], "N": 2000},
      "threshold": {"khinchine": {"max": 2.5}}, "balancing": {"bg": {"tuples": 600}}})");
  CHECK(nested.seed == 5);
  CHECK(nested.grid.ns == std::vector<int>{8});
  CHECK(nested.grid.n_samples == 2000);
  CHECK(*nested.thresholds.at("khinchine").max == 2.5);
  CHECK(nested.balancing.bg_tuples == 600);

  const RunConfig flat = parse_config_json(R"({"seed": "5", "grid.n": "8", "grid.N": 2000})");
  CHECK(flat.grid.ns == nested.grid.ns);

  RunConfig custom;
  custom.set("seed", "99");
  custom.set("grid.bodies", "lp:1,lp:3");
  const auto json = nlohmann::json::parse(custom.to_json_string());
  CHECK(json.at("seed") == "99");
  CHECK(parse_config_json(custom.to_json_string()).to_flat() == custom.to_flat());
  CHECK_THROWS_AS((void)parse_config_json("[1, 2]"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_json("{\"nope\": 1}"), ArgumentError);
  CHECK_THROWS_AS((void)parse_config_json("{not json"), ArgumentError);
}

TEST_CASE("load_config picks the encoding") {
  const auto dir = std::filesystem::temp_directory_path() / "multinorm_test_config";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.grid", "seed = 3\n");
  write_text_file(dir / "b.json", "{\"seed\": 4}");
  write_text_file(dir / "c.cfg", "  {\"seed\": 6}");
  CHECK(load_config(dir / "a.grid").seed == 3);
  CHECK(load_config(dir / "b.json").seed == 4);
  CHECK(load_config(dir / "c.cfg").seed == 6);
  CHECK_THROWS_AS((void)load_config(dir / "missing.grid"), ArgumentError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report writers") {
  BoundReport r;
  r.theorem_id = "khinchine";
  r.body_C = "lp:2:4:vol1";
  r.body_K = "lp:2:4:vol1";
  r.n = 4;
  r.s = 4;
  r.t_pattern = "flat";
  r.lhs = {1.25, 0.01, 1000};
  r.rhs = Estimate::exact(1.0);
  r.range = {std::nullopt, 3.0};
  r.detail = "q=2";
  apply_verdict(r);
  const std::vector<BoundReport> reports{r};
  const RunConfig cfg;

  std::ostringstream csv;
  write_reports_csv(csv, reports, cfg);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# schema_version=1");
  std::getline(lines, line);
  CHECK(line.rfind("# config={", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("theorem_id,body_C,body_K,n,s,", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("khinchine,lp:2:4:vol1,lp:2:4:vol1,4,4,flat,1.25,0.01,1,0,1.25,", 0) == 0);
  CHECK(line.find(",holds,") != std::string::npos);
  CHECK(!std::getline(lines, line));

  const auto json = nlohmann::json::parse(reports_to_json(reports, cfg));
  CHECK(json.at("schema_version") == kSchemaVersion);
  CHECK(json.at("reports").size() == 1);
  CHECK(json.at("reports")[0].at("verdict") == "holds");
  CHECK(json.at("config").at("seed") == "42");

  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_for("x.csv") == OutputFormat::Csv);
  CHECK(format_for("x.json") == OutputFormat::Json);
}
