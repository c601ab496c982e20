#pragma once

#include <cstdint>

namespace essk {

// Gaussian approximation of a prior: phi ~ N(mu0, sigma2 / n0) observed
// through a sample mean of n observations, X ~ N(phi, sigma2 / n).
class GaussianApproxModel {
 public:
  // Throws DomainError unless sigma2 > 0, n0 > 0 and n >= 1.
  GaussianApproxModel(double mu0, double sigma2, double n0, std::int64_t n);

  double mu0() const noexcept { return mu0_; }
  double sigma2() const noexcept { return sigma2_; }
  double n0() const noexcept { return n0_; }
  std::int64_t n() const noexcept { return n_; }

  // Weight on the data mean in the posterior mean, n / (n0 + n).
  double shrinkage() const noexcept;
  double prior_variance() const noexcept;
  double posterior_mean(double sample_mean) const noexcept;

  // Marginal variances over datasets of E[phi | X] and of the sample mean.
  double conditional_mean_variance() const noexcept;
  double sample_mean_variance() const noexcept;

 private:
  double mu0_;
  double sigma2_;
  double n0_;
  std::int64_t n_;
};

}  // namespace essk
