// essk: effective sample size estimation from the command line.
//
//   essk run --config run.json [--out PATH] [--format json|csv] [--seed N] [--m N]
//   essk benchmark [--m N] [--seed N] [--methods regression,summary,mcmc]
//   essk scenarios

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "essk/errors.hpp"
#include "essk/runner.hpp"

namespace {

constexpr int kExitCellFailed = 1;
constexpr int kExitBadInput = 2;

struct CommonFlags {
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<long> m;
  std::optional<long> mcmc_datasets;
  unsigned threads = 0;
  bool dump = false;
  bool force_metropolis = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out", f.out, "Write the report here instead of standard output");
  cmd->add_option("--format", f.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--m", f.m, "Number of simulated (phi, dataset) pairs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mcmc-datasets", f.mcmc_datasets, "Datasets given an MCMC chain")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--dump-regression-data", f.dump,
                "Write (summary, phi, fitted) CSVs for every regression fit");
  cmd->add_flag("--force-metropolis", f.force_metropolis,
                "Use Metropolis even where a conjugate posterior mean exists");
  cmd->add_flag("-q,--quiet", f.quiet, "No progress output on stderr");
}

void apply_common(essk::RunConfig& cfg, const CommonFlags& f) {
  if (!f.out.empty()) cfg.output_path = f.out;
  if (f.format == "csv") cfg.output_format = essk::OutputFormat::kCsv;
  if (f.format == "json") cfg.output_format = essk::OutputFormat::kJson;
  if (f.seed) cfg.seed = *f.seed;
  if (f.m) {
    const bool default_subsample =
        cfg.mcmc_dataset_subsample == std::min<Eigen::Index>(cfg.M, essk::kDefaultMcmcDatasets);
    cfg.M = *f.m;
    if (default_subsample) {
      cfg.mcmc_dataset_subsample = std::min<Eigen::Index>(cfg.M, essk::kDefaultMcmcDatasets);
    }
  }
  if (f.mcmc_datasets) cfg.mcmc_dataset_subsample = *f.mcmc_datasets;
  if (f.dump) cfg.dump_regression_data = true;
  if (f.force_metropolis) cfg.mcmc.force_metropolis = true;
  cfg.validate();
}

int execute(const essk::RunConfig& cfg, const CommonFlags& f) {
  essk::RunOptions options;
  options.threads = f.threads;
  if (!f.quiet) options.log = &std::cerr;
  const auto report = essk::run(cfg, options);
  essk::write_report(report, std::cout);
  return report.all_succeeded() ? 0 : kExitCellFailed;
}

std::vector<essk::Method> parse_methods(const std::string& list) {
  std::vector<essk::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = essk::parse_method(item);
    if (!m) throw essk::ConfigError("--methods", "unknown method '" + item + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw essk::ConfigError("--methods", "must not be empty");
  return out;
}

void list_scenarios() {
  std::cout << std::left << std::setw(30) << "name" << std::setw(42) << "prior"
            << std::setw(42) << "likelihood" << "analytic_n0\n";
  for (const auto& s : essk::builtin_scenarios()) {
    std::cout << std::setw(30) << s.name << std::setw(42) << s.prior.describe() << std::setw(42)
              << s.likelihood.describe();
    if (s.analytic_n0) {
      std::cout << *s.analytic_n0;
    } else {
      std::cout << "-";
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective sample size estimation under the Gaussian approximation"};
  app.set_version_flag("--version", ESSK_VERSION);
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the scenarios and methods of a JSON config");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(run_cmd, run_flags);

  CommonFlags bench_flags;
  std::string methods = "regression,summary,mcmc";
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the seven built-in scenarios");
  bench_cmd->add_option("--methods", methods, "Comma-separated subset of regression,summary,mcmc");
  add_common(bench_cmd, bench_flags);

  app.add_subcommand("scenarios", "List the built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      std::ifstream in(config_path, std::ios::binary);
      std::stringstream buffer;
      buffer << in.rdbuf();
      auto cfg = essk::parse_config(buffer.str());
      apply_common(cfg, run_flags);
      return execute(cfg, run_flags);
    }
    if (*bench_cmd) {
      auto cfg = essk::benchmark_config(bench_flags.seed.value_or(1), essk::kDefaultDrawCount,
                                        parse_methods(methods));
      apply_common(cfg, bench_flags);
      return execute(cfg, bench_flags);
    }
    list_scenarios();
    return 0;
  } catch (const essk::ConfigError& e) {
    std::cerr << "essk: invalid configuration: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const essk::Error& e) {
    std::cerr << "essk: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "essk: " << e.what() << '\n';
    return kExitBadInput;
  }
}
