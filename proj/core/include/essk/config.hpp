#pragma once

// Run configuration and its JSON schema.
//
//   {
//     "scenarios": ["beta-binomial",
//                   {"name": "mine",
//                    "prior": {"beta": {"alpha": 4, "beta": 6}},
//                    "likelihood": {"binomial": {"n": 20}}}],
//     "M": 10000,
//     "mcmc_dataset_subsample": 2000,
//     "methods": ["regression", "summary", "mcmc"],
//     "seed": 42,
//     "output_path": "out.json",
//     "output_format": "json",
//     "dump_regression_data": false,
//     "dump_directory": ".",
//     "spline": {"n_interior_knots": 30, "penalty_order": 2,
//                "lambda_grid": {"min": 1e-6, "max": 1e6, "points": 41}},
//     "mcmc": {"iterations": 5000, "burn_in": 1000, "initial_proposal_sd": 0.5,
//              "adapt_window": 500, "target_acceptance": 0.35,
//              "force_metropolis": false}
//   }
//
// Prior families: beta{alpha,beta}, gamma{shape,rate}, dirichlet{alphas},
// normal{mean,variance}, truncated_normal{mean,variance,lower,upper},
// transformed_beta_log_rate{alpha,beta}. Likelihood families: binomial{n},
// exponential{n}, poisson{n}, weibull{shape,n}, multinomial{n}.
// Unknown keys are rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "essk/estimators.hpp"
#include "essk/mcmc.hpp"
#include "essk/scenario.hpp"
#include "essk/spline.hpp"

namespace essk {

using Json = nlohmann::ordered_json;

enum class OutputFormat { kJson, kCsv };

std::string_view to_string(OutputFormat f) noexcept;

struct RunConfig {
  std::vector<Scenario> scenarios;
  Eigen::Index M = kDefaultDrawCount;
  Eigen::Index mcmc_dataset_subsample = kDefaultMcmcDatasets;
  std::vector<Method> methods;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: standard output
  OutputFormat output_format = OutputFormat::kJson;
  bool dump_regression_data = false;
  std::string dump_directory = ".";
  SplineConfig spline;
  McmcConfig mcmc;

  bool wants(Method m) const;
  // Throws ConfigError.
  void validate() const;
};

// Strict parse; throws ConfigError with a JSON-path-qualified message.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const Json& doc);

// Fully resolved echo; parse_config(config_to_json(c).dump()) reproduces c.
Json config_to_json(const RunConfig& cfg);

Scenario scenario_from_json(const Json& node, const std::string& path);
Json scenario_to_json(const Scenario& s);

}  // namespace essk
