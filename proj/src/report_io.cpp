#include "multinorm/report_io.hpp"

#include "multinorm/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace multinorm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

OutputFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? OutputFormat::Csv : OutputFormat::Json;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// JSON has no infinities; they are written as strings so nothing is lost.
nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::ordered_json json_optional(const std::optional<double>& v) {
  return v ? json_number(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void write_reports_csv(std::ostream& out, std::span<const BoundReport> reports, const RunConfig& config) {
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# config=" << config.to_json_string() << "\n";
  bool first = true;
  for (const char* col : kReportColumns) {
    out << (first ? "" : ",") << col;
    first = false;
  }
  out << "\n";
  for (const auto& r : reports) {
    out << csv_field(r.theorem_id) << ',' << csv_field(r.body_C) << ',' << csv_field(r.body_K) << ',' << r.n << ','
        << r.s << ',' << csv_field(r.t_pattern) << ',' << format_double(r.lhs.value) << ','
        << format_double(r.lhs.std_error) << ',' << format_double(r.rhs.value) << ','
        << format_double(r.rhs.std_error) << ',' << format_double(r.implied_constant) << ','
        << optional_number(r.range.min) << ',' << optional_number(r.range.max) << ',' << to_string(r.verdict) << ','
        << format_double(r.margin_sigmas) << ',' << config.seed << ',' << csv_field(r.detail) << "\n";
  }
}

std::string reports_to_json(std::span<const BoundReport> reports, const RunConfig& config, int indent) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "multinorm";
  j["config"] = nlohmann::ordered_json::parse(config.to_json_string());

  std::map<std::string, int> counts{{"holds", 0}, {"violated", 0}, {"inconclusive", 0}};
  for (const auto& r : reports) ++counts[to_string(r.verdict)];
  j["summary"] = {{"reports", reports.size()},
                  {"holds", counts["holds"]},
                  {"violated", counts["violated"]},
                  {"inconclusive", counts["inconclusive"]}};

  auto& rows = j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    rows.push_back({{"theorem_id", r.theorem_id},
                    {"body_C", r.body_C},
                    {"body_K", r.body_K},
                    {"n", r.n},
                    {"s", r.s},
                    {"t_pattern", r.t_pattern},
                    {"lhs", json_number(r.lhs.value)},
                    {"lhs_stderr", json_number(r.lhs.std_error)},
                    {"lhs_samples", r.lhs.n_samples},
                    {"rhs", json_number(r.rhs.value)},
                    {"rhs_stderr", json_number(r.rhs.std_error)},
                    {"rhs_samples", r.rhs.n_samples},
                    {"implied_constant", json_number(r.implied_constant)},
                    {"range_min", json_optional(r.range.min)},
                    {"range_max", json_optional(r.range.max)},
                    {"verdict", to_string(r.verdict)},
                    {"margin_sigmas", json_number(r.margin_sigmas)},
                    {"seed", config.seed},
                    {"detail", r.detail}});
  }
  return j.dump(indent) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write output file '" + path.string() + "'");
  out << text;
}

void write_reports(const std::filesystem::path& path, std::span<const BoundReport> reports, const RunConfig& config) {
  if (format_for(path) == OutputFormat::Csv) {
    std::ostringstream buf;
    write_reports_csv(buf, reports, config);
    write_text_file(path, buf.str());
  } else {
    write_text_file(path, reports_to_json(reports, config));
  }
}

}  // namespace multinorm
