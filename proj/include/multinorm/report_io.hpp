#pragma once

#include "multinorm/bounds.hpp"
#include "multinorm/config.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

namespace multinorm {

enum class OutputFormat { Json, Csv };

/// By extension: `.csv` is CSV, anything else JSON.
OutputFormat format_for(const std::filesystem::path& path);

/// Column order of the bound-report CSV.
inline constexpr const char* kReportColumns[] = {
    "theorem_id", "body_C",         "body_K",  "n",           "s",           "t_pattern",    "lhs",
    "lhs_stderr", "rhs",            "rhs_stderr", "implied_constant", "range_min", "range_max", "verdict",
    "margin_sigmas", "seed",        "detail"};

/// CSV with `# schema_version=` and `# config=` header comment lines followed
/// by one row per report.
void write_reports_csv(std::ostream& out, std::span<const BoundReport> reports, const RunConfig& config);

/// {"schema_version", "tool", "config", "summary", "reports"}.
std::string reports_to_json(std::span<const BoundReport> reports, const RunConfig& config, int indent = 2);

/// Writes to `path` in the format its extension selects. Creates parent
/// directories.
void write_reports(const std::filesystem::path& path, std::span<const BoundReport> reports, const RunConfig& config);

/// Shortest round-trip decimal for finite values; `inf`, `-inf`, `nan` otherwise.
std::string format_double(double v);

/// Writes `text` to `path`, creating parent directories. Throws ArgumentError
/// when the file cannot be opened.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace multinorm
