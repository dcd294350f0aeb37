#pragma once

#include "multinorm/balancing.hpp"
#include "multinorm/bounds.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace multinorm {

inline constexpr int kSchemaVersion = 1;

/// Everything a run depends on. Output files embed it in full.
///
/// Flat text schema, one `key = value` per line, `#` starts a comment, lists
/// are comma separated:
///
///   seed, threads, suite (all | comma list of theorem ids)
///   grid.n, grid.s (integers or `n`), grid.bodies, grid.patterns, grid.N
///   cube_qn.n, khinchine.q, khinchine.n, lp_diagonal.p, lp_diagonal.n,
///   e1.n, paouris.n, qn_cutoff (integer or `auto`)
///   balancing.bg.n, balancing.bg.delta, balancing.bg.bodies,
///   balancing.bg.tuples, balancing.rotation.n, balancing.rotation.s,
///   balancing.rotation.count, balancing.rotation.tuples,
///   balancing.lower_set_size
///   threshold.<theorem id>.min, threshold.<theorem id>.max (number or `none`)
///
/// The JSON encoding is an object with the same keys, either flat
/// ("grid.n": [4, 8]) or nested ({"grid": {"n": [4, 8]}}).
struct RunConfig {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  /// Empty means every theorem id.
  std::set<std::string> suite;
  GridSpec grid;
  SuiteSpec suites;
  BalancingSuiteSpec balancing;
  Thresholds thresholds = Thresholds::defaults();

  /// Applies one key. Throws ArgumentError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Canonical flat key/value form; `from_flat(to_flat())` reproduces the config.
  [[nodiscard]] std::map<std::string, std::string> to_flat() const;
  [[nodiscard]] std::string to_json_string(int indent = -1) const;
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_json(std::string_view text);
/// JSON when the file name ends in .json or the content starts with `{`.
RunConfig load_config(const std::filesystem::path& path);
/// Applies `text` on top of `base`.
void apply_config_text(RunConfig& base, std::string_view text);
void apply_config_json(RunConfig& base, std::string_view text);

/// The flat text form of the built-in defaults, as shipped in configs/default.grid.
std::string default_config_text();

}  // namespace multinorm
