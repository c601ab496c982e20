#include "essk/gaussian_approx.hpp"

#include <cmath>

#include "essk/errors.hpp"

namespace essk {

GaussianApproxModel::GaussianApproxModel(double mu0, double sigma2, double n0, std::int64_t n)
    : mu0_(mu0), sigma2_(sigma2), n0_(n0), n_(n) {
  if (!std::isfinite(mu0)) throw DomainError("mu0 must be finite");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be positive");
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw DomainError("n0 must be positive");
  if (n < 1) throw DomainError("n must be >= 1");
}

double GaussianApproxModel::shrinkage() const noexcept {
  const double n = static_cast<double>(n_);
  return n / (n0_ + n);
}

double GaussianApproxModel::prior_variance() const noexcept { return sigma2_ / n0_; }

double GaussianApproxModel::posterior_mean(double sample_mean) const noexcept {
  const double v = shrinkage();
  return (1.0 - v) * mu0_ + v * sample_mean;
}

double GaussianApproxModel::conditional_mean_variance() const noexcept {
  return shrinkage() * sigma2_ / n0_;
}

double GaussianApproxModel::sample_mean_variance() const noexcept {
  return sigma2_ / (shrinkage() * n0_);
}

}  // namespace essk
