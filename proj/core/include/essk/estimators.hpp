#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essk/mcmc.hpp"
#include "essk/scenario.hpp"
#include "essk/spline.hpp"

namespace essk {

enum class Method { kRegression, kSummaryStats, kMcmc };

std::string_view to_string(Method m) noexcept;
// Accepts "regression", "summary", "mcmc".
std::optional<Method> parse_method(std::string_view name) noexcept;

enum class AggregationRule { kMean };

// Spline diagnostics for one component of a regression estimate.
struct ComponentFit {
  double lambda = 0.0;
  double edf = 0.0;
  double gcv_score = 0.0;
  Vector fitted;
};

struct EssEstimate {
  Method method = Method::kRegression;
  double n0 = 0.0;           // aggregate over the informative components
  Vector per_component;      // length d; non-informative components keep their raw value
  Vector var_phi;
  Vector var_cond;           // Var of fitted values / posterior means, or of the summary
  Eigen::Index M = 0;        // datasets used
  std::int64_t n = 0;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;

  std::vector<ComponentFit> fits;          // regression only
  std::optional<double> mean_acceptance;   // mcmc only, when Metropolis ran
};

// n * (var_phi / var_cond - 1). Throws NonInformativeRatio when
// var_cond >= var_phi and DomainError for non-positive inputs.
double n0_from_conditional_variance(double var_phi, double var_cond, std::int64_t n);

// n * (var_summary / var_phi - 1). Throws NonInformativeRatio when
// var_summary <= var_phi.
double n0_from_summary_variance(double var_summary, double var_phi, std::int64_t n);

double aggregate_components(const Vector& per_component,
                            AggregationRule rule = AggregationRule::kMean);

// Regresses each phi column on its summary column with a GCV-tuned P-spline
// and converts the variance of the fitted values into n0.
EssEstimate ess_regression(const DrawMatrix& draws, const Scenario& s,
                           const SplineConfig& cfg = {}, unsigned threads = 0);

EssEstimate ess_summary(const DrawMatrix& draws, const Scenario& s);

inline constexpr Eigen::Index kDefaultMcmcDatasets = 2000;

// Posterior mean per dataset for the first `datasets` rows of `draws`
// (which must carry sufficient statistics).
EssEstimate ess_mcmc(const Scenario& s, const DrawMatrix& draws, const McmcConfig& cfg = {},
                     Eigen::Index datasets = kDefaultMcmcDatasets, unsigned threads = 0);

}  // namespace essk
