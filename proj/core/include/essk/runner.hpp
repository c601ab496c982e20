#pragma once

#include <ostream>

#include "essk/config.hpp"
#include "essk/report.hpp"

namespace essk {

struct RunOptions {
  unsigned threads = 0;           // 0 = hardware concurrency; results do not depend on it
  std::ostream* log = nullptr;    // progress lines, if set
};

// Simulates each scenario once and runs every requested method on the same
// draws. Estimator failures are recorded in their cell; the run continues.
// With cfg.dump_regression_data, writes one CSV of (summary, phi, fitted)
// sorted by summary per regression component into cfg.dump_directory.
RunReport run(const RunConfig& cfg, const RunOptions& options = {});

// Configuration for the built-in seven-scenario suite.
RunConfig benchmark_config(std::uint64_t seed, Eigen::Index draws, std::vector<Method> methods);

// Writes the report to its config's output_path, or to `fallback` when the
// path is empty.
void write_report(const RunReport& report, std::ostream& fallback);

}  // namespace essk
