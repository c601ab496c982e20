#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essk/config.hpp"
#include "essk/estimators.hpp"

namespace essk {

// One (scenario, method) cell of a run.
struct ReportRow {
  std::string scenario;
  Method method = Method::kRegression;
  std::optional<double> analytic_n0;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::optional<EssEstimate> estimate;  // empty when the cell failed
  std::string error;

  bool ok() const noexcept { return estimate.has_value(); }
};

struct RunReport {
  std::string tool_version;
  RunConfig config;
  std::vector<ReportRow> rows;

  bool all_succeeded() const noexcept;
};

Json report_to_json(const RunReport& report);
RunReport report_from_json(const Json& doc);

// JSON: stable key order, shortest round-trip doubles. CSV: header plus one
// row per cell; vector fields are semicolon-joined.
std::string emit_report(const RunReport& report, OutputFormat format);

// Removes every "elapsed_seconds" field, for comparing runs.
Json strip_timing(Json doc);

}  // namespace essk
