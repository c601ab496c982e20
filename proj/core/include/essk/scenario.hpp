#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "essk/distributions.hpp"

namespace essk {

// A prior paired with a data-generating likelihood. `n` is the observation
// count that enters the variance-ratio formulas.
struct Scenario {
  std::string name;
  PriorSpec prior;
  LikelihoodSpec likelihood;
  std::int64_t n;
  std::optional<double> analytic_n0;

  std::size_t dimension() const noexcept { return prior.dimension(); }

  // Equality of everything except the name.
  bool same_model(const Scenario& other) const;
};

// Closed-form ESS for the conjugate pairs, nullopt otherwise.
std::optional<double> conjugate_analytic_n0(const PriorSpec& prior,
                                            const LikelihoodSpec& likelihood);

// Validates that prior and likelihood are compatible (dimension and
// support) and fills in n and analytic_n0. Throws DomainError.
Scenario make_scenario(std::string name, PriorSpec prior, LikelihoodSpec likelihood);

// The seven benchmark settings, in the order beta-binomial, gamma-exponential,
// gamma-poisson, normal-weibull, dirichlet-multinomial, truncnormal-binomial,
// transformed-beta-exponential.
const std::vector<Scenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(std::string_view name);

inline constexpr Eigen::Index kDefaultDrawCount = 10'000;

struct DrawOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  bool retain_sufficient_stats = false;
};

// M paired draws of (phi, T(X_n)). Row m depends only on (seed, m).
struct DrawMatrix {
  Matrix phi;
  Matrix summary;
  std::uint64_t seed = 0;
  // One entry per row when retained, empty otherwise.
  std::vector<SufficientStats> stats;

  Eigen::Index size() const noexcept { return phi.rows(); }
  Eigen::Index dimension() const noexcept { return phi.cols(); }
  bool has_sufficient_stats() const noexcept {
    return static_cast<Eigen::Index>(stats.size()) == size();
  }

  // First k rows.
  DrawMatrix head(Eigen::Index k) const;
};

DrawMatrix simulate_draws(const Scenario& scenario, Eigen::Index draws, std::uint64_t seed,
                          const DrawOptions& options = {});

// Unbiased (divisor M - 1) sample variance.
double sample_variance(const Eigen::Ref<const Vector>& x);
Vector column_variance(const Matrix& m);

}  // namespace essk
