#pragma once

#include <functional>
#include <optional>

#include "essk/distributions.hpp"
#include "essk/scenario.hpp"

namespace essk {

struct McmcConfig {
  int iterations = 5000;
  int burn_in = 1000;
  double initial_proposal_sd = 0.5;  // on the unconstrained scale
  // Robbins-Monro adaptation of the proposal scale runs for the first
  // min(adapt_window, burn_in) iterations; the rest of burn-in uses the
  // adapted scale unchanged.
  int adapt_window = 500;
  double target_acceptance = 0.35;
  // Run Metropolis even when a conjugate closed form exists.
  bool force_metropolis = false;

  void validate() const;
};

struct MetropolisResult {
  Vector mean;                    // on the parameter's original scale
  double acceptance_rate = 0.0;   // over the retained iterations
  double mc_standard_error = 0.0; // batch-means estimate for the mean
  double proposal_sd = 0.0;       // after adaptation
};

// Closed-form posterior mean for the four conjugate pairs; nullopt for the
// others.
std::optional<Vector> posterior_mean_conjugate(const Scenario& s, const SufficientStats& data);

// Random-walk Metropolis on an unconstrained scale chosen from the prior's
// support (logit for bounded, log for half-bounded, identity otherwise),
// started at the prior mean. Univariate priors only.
MetropolisResult metropolis_posterior_mean(const Scenario& s, const SufficientStats& data,
                                           const McmcConfig& cfg, Stream& stream);

// Same sampler with a caller-supplied log-likelihood of the scalar parameter.
MetropolisResult metropolis_posterior_mean(const PriorSpec& prior,
                                           const std::function<double(double)>& log_likelihood,
                                           const McmcConfig& cfg, Stream& stream);

struct PosteriorMean {
  Vector mean;
  std::optional<double> acceptance_rate;  // set when Metropolis ran
};

// Conjugate closed form when available (unless forced), Metropolis otherwise.
PosteriorMean posterior_mean(const Scenario& s, const SufficientStats& data,
                             const McmcConfig& cfg, Stream& stream);

}  // namespace essk
