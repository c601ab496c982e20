#pragma once

// Prior families, likelihood families and the per-family primitives needed
// by the simulation and the three estimators: sampling, log densities,
// maximum likelihood summaries and closed-form moments.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "essk/rng.hpp"

namespace essk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

struct BetaPrior {
  double alpha;
  double beta;
  bool operator==(const BetaPrior&) const = default;
};

// Shape/rate parameterization: mean shape/rate, variance shape/rate^2.
struct GammaPrior {
  double shape;
  double rate;
  bool operator==(const GammaPrior&) const = default;
};

struct DirichletPrior {
  std::vector<double> alphas;
  bool operator==(const DirichletPrior&) const = default;
};

struct NormalPrior {
  double mean;
  double variance;
  bool operator==(const NormalPrior&) const = default;
};

// Normal(mean, variance) restricted to (lower, upper). `mean` and
// `variance` are those of the parent normal.
struct TruncatedNormalPrior {
  double mean;
  double variance;
  double lower;
  double upper;
  bool operator==(const TruncatedNormalPrior&) const = default;
};

// lambda = -log(1 - P) with P ~ Beta(alpha, beta).
struct TransformedBetaLogRatePrior {
  double alpha;
  double beta;
  bool operator==(const TransformedBetaLogRatePrior&) const = default;
};

class PriorSpec {
 public:
  using Variant = std::variant<BetaPrior, GammaPrior, DirichletPrior, NormalPrior,
                               TruncatedNormalPrior, TransformedBetaLogRatePrior>;

  // Each constructor validates its parameters and throws DomainError.
  PriorSpec(BetaPrior p);
  PriorSpec(GammaPrior p);
  PriorSpec(DirichletPrior p);
  PriorSpec(NormalPrior p);
  PriorSpec(TruncatedNormalPrior p);
  PriorSpec(TransformedBetaLogRatePrior p);

  const Variant& variant() const noexcept { return v_; }
  std::size_t dimension() const noexcept;
  std::string describe() const;

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

  bool operator==(const PriorSpec&) const = default;

 private:
  Variant v_;
};

// ---------------------------------------------------------------------------
// Likelihoods
// ---------------------------------------------------------------------------

struct BinomialLikelihood {
  std::int64_t trials;
  bool operator==(const BinomialLikelihood&) const = default;
};

// n i.i.d. Exponential observations with rate equal to the parameter.
struct ExponentialRateLikelihood {
  std::int64_t n;
  bool operator==(const ExponentialRateLikelihood&) const = default;
};

struct PoissonLikelihood {
  std::int64_t n;
  bool operator==(const PoissonLikelihood&) const = default;
};

// n i.i.d. Weibull observations with known shape and scale 1/theta, where
// theta is the parameter. With shape 1 this is Exponential with rate theta.
struct WeibullRateParamLikelihood {
  double shape;
  std::int64_t n;
  bool operator==(const WeibullRateParamLikelihood&) const = default;
};

struct MultinomialLikelihood {
  std::int64_t trials;
  bool operator==(const MultinomialLikelihood&) const = default;
};

class LikelihoodSpec {
 public:
  using Variant = std::variant<BinomialLikelihood, ExponentialRateLikelihood,
                               PoissonLikelihood, WeibullRateParamLikelihood,
                               MultinomialLikelihood>;

  LikelihoodSpec(BinomialLikelihood l);
  LikelihoodSpec(ExponentialRateLikelihood l);
  LikelihoodSpec(PoissonLikelihood l);
  LikelihoodSpec(WeibullRateParamLikelihood l);
  LikelihoodSpec(MultinomialLikelihood l);

  const Variant& variant() const noexcept { return v_; }

  // Trial count for Binomial/Multinomial, i.i.d. observation count otherwise.
  std::int64_t observation_count() const noexcept;
  bool vector_parameter() const noexcept;
  std::string describe() const;

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }

  bool operator==(const LikelihoodSpec&) const = default;

 private:
  Variant v_;
};

// One simulated dataset. Binomial stores a single count, Multinomial a count
// per category, the i.i.d. families their raw observations.
struct Dataset {
  std::vector<std::int64_t> counts;
  std::vector<double> observations;
};

// Low-dimensional reduction of a Dataset from which the log-likelihood and
// the MLE can be recomputed exactly.
struct SufficientStats {
  std::vector<double> counts;  // Binomial {x}, Multinomial {x_1..x_d}
  double sum = 0.0;            // sum x (Exp, Poisson) or sum x^shape (Weibull)
  double log_constant = 0.0;   // data-only term of the log-likelihood

  bool operator==(const SufficientStats&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// count x d matrix of i.i.d. prior draws.
Matrix sample_prior(const PriorSpec& spec, std::size_t count, Stream& stream);
Vector sample_prior_one(const PriorSpec& spec, Stream& stream);

bool in_parameter_space(const LikelihoodSpec& spec, const Vector& phi);

// Throws DomainError when phi is outside the parameter space.
Dataset generate_dataset(const LikelihoodSpec& spec, const Vector& phi, Stream& stream);

SufficientStats sufficient_statistics(const LikelihoodSpec& spec, const Dataset& data);

// Maximum likelihood estimate of the parameter.
Vector summary_statistic(const LikelihoodSpec& spec, const Dataset& data);
Vector summary_statistic(const LikelihoodSpec& spec, const SufficientStats& stats);

// -inf outside the support.
double log_prior_density(const PriorSpec& spec, const Vector& phi);

// -inf outside the parameter space.
double log_likelihood(const LikelihoodSpec& spec, const Vector& phi, const Dataset& data);
double log_likelihood(const LikelihoodSpec& spec, const Vector& phi,
                      const SufficientStats& stats);

// Exact prior mean; defined for every family (used to start MCMC chains).
Vector prior_mean(const PriorSpec& spec);

std::optional<Vector> analytic_prior_variance(const PriorSpec& spec);

}  // namespace essk
