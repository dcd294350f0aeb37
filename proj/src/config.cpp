#include "multinorm/config.hpp"

#include "multinorm/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace multinorm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ArgumentError("config key '" + std::string(key) + "': cannot read '" + std::string(value) + "' as " +
                      std::string(expected));
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "infinity") return kInf;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || std::isnan(v)) bad_value(key, text, "a number");
  return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view text, Int min_value) {
  text = trim(text);
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(key, text, "an integer");
  if (v < min_value) bad_value(key, text, "an integer >= " + std::to_string(min_value));
  return v;
}

std::vector<int> to_int_list(std::string_view key, std::string_view value, int min_value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) out.push_back(to_int<int>(key, item, min_value));
  if (out.empty()) bad_value(key, value, "a non-empty list");
  return out;
}

std::vector<double> to_double_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
  if (out.empty()) bad_value(key, value, "a non-empty list");
  return out;
}

std::vector<std::string> to_body_list(std::string_view key, std::string_view value) {
  auto out = split_list(value);
  if (out.empty()) bad_value(key, value, "a non-empty list of body families");
  for (const auto& family : out) {
    try {
      (void)grid_body(family, 2);
    } catch (const ArgumentError& e) {
      bad_value(key, family, std::string("a body family such as lp:4, ball, cube (") + e.what() + ")");
    }
  }
  return out;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += format(items[i]);
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) { return join(v, format_number); }
std::string join_ints(const std::vector<int>& v) {
  return join(v, [](int x) { return std::to_string(x); });
}
std::string join_strings(const std::vector<std::string>& v) {
  return join(v, [](const std::string& x) { return x; });
}

std::set<std::string> known_theorem_ids() {
  std::set<std::string> ids;
  for (auto& id : all_theorem_ids()) ids.insert(id);
  for (auto& id : balancing_theorem_ids()) ids.insert(id);
  return ids;
}

}  // namespace

void RunConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);

  if (key == "seed") {
    seed = to_int<std::uint64_t>(key, value, 0);
  } else if (key == "threads") {
    threads = to_int<unsigned>(key, value, 1);
  } else if (key == "suite") {
    suite.clear();
    if (value == "all") return;
    const auto known = known_theorem_ids();
    for (auto& id : split_list(value)) {
      if (!known.count(id)) bad_value(key, id, "a theorem id (see `multinorm check-bounds --list`)");
      suite.insert(id);
    }
  } else if (key == "grid.n") {
    grid.ns = to_int_list(key, value, 1);
  } else if (key == "grid.s") {
    grid.s_values = split_list(value);
    if (grid.s_values.empty()) bad_value(key, value, "a non-empty list");
    for (auto& s : grid.s_values) {
      if (s != "n") (void)to_int<int>(key, s, 1);
    }
  } else if (key == "grid.bodies") {
    grid.bodies = to_body_list(key, value);
  } else if (key == "grid.patterns") {
    grid.patterns.clear();
    for (auto& name : split_list(value)) grid.patterns.push_back(parse_pattern(name));
    if (grid.patterns.empty()) bad_value(key, value, "a non-empty list of t-patterns");
  } else if (key == "grid.N") {
    grid.n_samples = to_int<std::size_t>(key, value, 1000);
  } else if (key == "cube_qn.n") {
    suites.cube_qn_ns = to_int_list(key, value, 2);
  } else if (key == "khinchine.q") {
    suites.khinchine_qs = to_double_list(key, value);
  } else if (key == "khinchine.n") {
    suites.khinchine_n = to_int<int>(key, value, 1);
  } else if (key == "lp_diagonal.p") {
    suites.lp_diagonal_ps = to_double_list(key, value);
  } else if (key == "lp_diagonal.n") {
    suites.lp_diagonal_ns = to_int_list(key, value, 2);
  } else if (key == "e1.n") {
    suites.unconditional_e1_ns = to_int_list(key, value, 2);
  } else if (key == "paouris.n") {
    suites.paouris_n = to_int<int>(key, value, 1);
  } else if (key == "qn_cutoff") {
    if (value == "auto") {
      suites.qn_cutoff.reset();
    } else {
      suites.qn_cutoff = to_int<int>(key, value, 1);
    }
  } else if (key == "balancing.bg.n") {
    balancing.bg_ns = to_int_list(key, value, 1);
  } else if (key == "balancing.bg.delta") {
    balancing.bg_deltas = to_double_list(key, value);
    for (double d : balancing.bg_deltas) {
      if (!(d > 0.0 && d < 1.0)) bad_value(key, format_number(d), "a delta in (0, 1)");
    }
  } else if (key == "balancing.bg.bodies") {
    balancing.bg_bodies = to_body_list(key, value);
  } else if (key == "balancing.bg.tuples") {
    balancing.bg_tuples = to_int<std::size_t>(key, value, 1);
  } else if (key == "balancing.rotation.n") {
    balancing.rotation_n = to_int<int>(key, value, 1);
  } else if (key == "balancing.rotation.s") {
    balancing.rotation_s = to_int<std::size_t>(key, value, 1);
  } else if (key == "balancing.rotation.count") {
    balancing.rotation_count = to_int<std::size_t>(key, value, 1);
  } else if (key == "balancing.rotation.tuples") {
    balancing.rotation_tuples = to_int<std::size_t>(key, value, 1);
  } else if (key == "balancing.lower_set_size") {
    balancing.lower_S_size = to_int<std::size_t>(key, value, 1);
  } else if (key.rfind("threshold.", 0) == 0) {
    const auto dot = key.rfind('.');
    const std::string id = key.substr(10, dot - 10);
    const std::string side = key.substr(dot + 1);
    if (dot <= 10 || (side != "min" && side != "max")) {
      throw ArgumentError("config key '" + key + "': expected threshold.<theorem id>.min or .max");
    }
    if (!thresholds.table().count(id)) throw ArgumentError("config key '" + key + "': unknown theorem id '" + id + "'");
    ConstantRange range = thresholds.at(id);
    std::optional<double> bound;
    if (value != "none") bound = to_double(key, value);
    (side == "min" ? range.min : range.max) = bound;
    thresholds.set(id, range);
  } else {
    throw ArgumentError("unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> RunConfig::to_flat() const {
  std::map<std::string, std::string> m;
  m["seed"] = std::to_string(seed);
  m["threads"] = std::to_string(threads);
  m["suite"] = suite.empty() ? "all" : join_strings(std::vector<std::string>(suite.begin(), suite.end()));
  m["grid.n"] = join_ints(grid.ns);
  m["grid.s"] = join_strings(grid.s_values);
  m["grid.bodies"] = join_strings(grid.bodies);
  m["grid.patterns"] = join(grid.patterns, [](TPattern p) { return to_string(p); });
  m["grid.N"] = std::to_string(grid.n_samples);
  m["cube_qn.n"] = join_ints(suites.cube_qn_ns);
  m["khinchine.q"] = join_numbers(suites.khinchine_qs);
  m["khinchine.n"] = std::to_string(suites.khinchine_n);
  m["lp_diagonal.p"] = join_numbers(suites.lp_diagonal_ps);
  m["lp_diagonal.n"] = join_ints(suites.lp_diagonal_ns);
  m["e1.n"] = join_ints(suites.unconditional_e1_ns);
  m["paouris.n"] = std::to_string(suites.paouris_n);
  m["qn_cutoff"] = suites.qn_cutoff ? std::to_string(*suites.qn_cutoff) : "auto";
  m["balancing.bg.n"] = join_ints(balancing.bg_ns);
  m["balancing.bg.delta"] = join_numbers(balancing.bg_deltas);
  m["balancing.bg.bodies"] = join_strings(balancing.bg_bodies);
  m["balancing.bg.tuples"] = std::to_string(balancing.bg_tuples);
  m["balancing.rotation.n"] = std::to_string(balancing.rotation_n);
  m["balancing.rotation.s"] = std::to_string(balancing.rotation_s);
  m["balancing.rotation.count"] = std::to_string(balancing.rotation_count);
  m["balancing.rotation.tuples"] = std::to_string(balancing.rotation_tuples);
  m["balancing.lower_set_size"] = std::to_string(balancing.lower_S_size);
  for (const auto& [id, range] : thresholds.table()) {
    m["threshold." + id + ".min"] = range.min ? format_number(*range.min) : "none";
    m["threshold." + id + ".max"] = range.max ? format_number(*range.max) : "none";
  }
  return m;
}

std::string RunConfig::to_json_string(int indent) const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : to_flat()) j[k] = v;
  return j.dump(indent);
}

void apply_config_text(RunConfig& base, std::string_view text) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": expected `key = value`, got '" +
                          std::string(line) + "'");
    }
    try {
      base.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ArgumentError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

namespace {

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_null()) return "none";
  throw ArgumentError("config key '" + key + "': unsupported JSON value " + v.dump());
}

void flatten(const nlohmann::json& j, const std::string& prefix, RunConfig& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      flatten(v, key, out);
    } else if (v.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + scalar_text(v[i], key);
      out.set(key, joined);
    } else {
      out.set(key, scalar_text(v, key));
    }
  }
}

}  // namespace

void apply_config_json(RunConfig& base, std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ArgumentError("JSON config must be an object");
  flatten(j, "", base);
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig c;
  apply_config_text(c, text);
  return c;
}

RunConfig parse_config_json(std::string_view text) {
  RunConfig c;
  apply_config_json(c, text);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (path.extension() == ".json" || (first != std::string::npos && text[first] == '{')) {
    return parse_config_json(text);
  }
  return parse_config_text(text);
}

std::string default_config_text() {
  std::ostringstream out;
  out << "# multinorm run configuration (flat key = value; lists are comma separated)\n";
  for (const auto& [k, v] : RunConfig{}.to_flat()) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace multinorm
