#include "essk/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>

#include "essk/errors.hpp"

namespace essk {
namespace {

std::string file_safe(std::string name) {
  for (char& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return name;
}

void dump_components(const Scenario& s, std::size_t index, const DrawMatrix& draws,
                     const EssEstimate& e, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.dump_directory);
  fs::create_directories(dir);
  for (std::size_t j = 0; j < e.fits.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const auto& fitted = e.fits[j].fitted;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(draws.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return draws.summary(a, col) < draws.summary(b, col);
    });
    const auto path = dir / ("regression_" + std::to_string(index) + "_" + file_safe(s.name) +
                             "_c" + std::to_string(j) + ".csv");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << "summary,phi,fitted\n";
    for (auto i : order) {
      out << draws.summary(i, col) << ',' << draws.phi(i, col) << ',' << fitted[i] << '\n';
    }
  }
}

}  // namespace

RunReport run(const RunConfig& cfg, const RunOptions& options) {
  cfg.validate();
  RunReport report;
  report.tool_version = ESSK_VERSION;
  report.config = cfg;

  DrawOptions draw_options;
  draw_options.threads = options.threads;
  draw_options.retain_sufficient_stats = cfg.wants(Method::kMcmc);

  for (std::size_t si = 0; si < cfg.scenarios.size(); ++si) {
    const Scenario& s = cfg.scenarios[si];
    if (options.log) *options.log << "[essk] " << s.name << ": simulating " << cfg.M << " draws\n";

    std::optional<DrawMatrix> draws;
    std::string sim_error;
    try {
      draws = simulate_draws(s, cfg.M, cfg.seed, draw_options);
    } catch (const Error& e) {
      sim_error = std::string("simulation failed: ") + e.what();
    }

    for (Method m : cfg.methods) {
      ReportRow row;
      row.scenario = s.name;
      row.method = m;
      row.analytic_n0 = s.analytic_n0;
      row.seed = cfg.seed;
      row.n = s.n;
      if (!draws) {
        row.error = sim_error;
        report.rows.push_back(std::move(row));
        continue;
      }
      try {
        switch (m) {
          case Method::kRegression:
            row.estimate = ess_regression(*draws, s, cfg.spline, options.threads);
            if (cfg.dump_regression_data) dump_components(s, si, *draws, *row.estimate, cfg);
            break;
          case Method::kSummaryStats:
            row.estimate = ess_summary(*draws, s);
            break;
          case Method::kMcmc:
            row.estimate =
                ess_mcmc(s, *draws, cfg.mcmc, cfg.mcmc_dataset_subsample, options.threads);
            break;
        }
      } catch (const Error& e) {
        row.error = e.what();
      }
      if (options.log) {
        *options.log << "[essk]   " << to_string(m) << ": ";
        if (row.ok()) {
          *options.log << "n0 = " << row.estimate->n0 << " (" << row.estimate->elapsed_seconds
                       << " s)\n";
        } else {
          *options.log << "failed: " << row.error << '\n';
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

RunConfig benchmark_config(std::uint64_t seed, Eigen::Index draws, std::vector<Method> methods) {
  RunConfig cfg;
  cfg.scenarios = builtin_scenarios();
  cfg.M = draws;
  cfg.mcmc_dataset_subsample = std::min(draws, kDefaultMcmcDatasets);
  cfg.methods = std::move(methods);
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void write_report(const RunReport& report, std::ostream& fallback) {
  const std::string text = emit_report(report, report.config.output_format);
  if (report.config.output_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(report.config.output_path, std::ios::binary);
  if (!out) throw Error("cannot write " + report.config.output_path);
  out << text;
}

}  // namespace essk
