#include "essk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "essk/errors.hpp"

namespace essk {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSimplexTolerance = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be a positive finite number");
  }
}

void require_count(std::int64_t value, const char* what) {
  if (value < 1) throw DomainError(std::string(what) + " must be >= 1");
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_log_pdf(double a, double b, double x) {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

// x*log(p) with the 0*log(0) = 0 convention.
double xlogy(double x, double p) {
  if (x == 0.0) return 0.0;
  return x * std::log(p);
}

double draw_gamma(double shape, double rate, Stream& stream) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(stream);
}

double draw_beta(double a, double b, Stream& stream) {
  const double x = draw_gamma(a, 1.0, stream);
  const double y = draw_gamma(b, 1.0, stream);
  return x / (x + y);
}

const boost::math::normal& standard_normal() {
  static const boost::math::normal dist(0.0, 1.0);
  return dist;
}

// Probability mass of the standard normal on (a, b), computed on the tail
// that keeps precision.
double normal_mass(double a, double b) {
  const auto& n = standard_normal();
  if (a > 0.0) {
    return boost::math::cdf(boost::math::complement(n, a)) -
           boost::math::cdf(boost::math::complement(n, b));
  }
  return boost::math::cdf(n, b) - boost::math::cdf(n, a);
}

// Inverse-CDF draw from the standard normal truncated to (a, b).
double draw_standard_truncated(double a, double b, Stream& stream) {
  const auto& n = standard_normal();
  if (a > 0.0) return -draw_standard_truncated(-b, -a, stream);
  const double lo = std::isinf(a) ? 0.0 : boost::math::cdf(n, a);
  const double hi = std::isinf(b) ? 1.0 : boost::math::cdf(n, b);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double u = lo + unif(stream) * (hi - lo);
    if (u <= 0.0 || u >= 1.0) continue;
    const double z = boost::math::quantile(n, u);
    if (z > a && z < b) return z;
  }
}

bool is_simplex(const Vector& p) {
  if (p.size() < 2) return false;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return std::abs(p.sum() - 1.0) <= kSimplexTolerance;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

void require_size(const Dataset& data, std::size_t counts, std::size_t observations,
                  const char* family) {
  if (counts != static_cast<std::size_t>(-1) && data.counts.size() != counts) {
    throw DomainError(std::string(family) + " dataset has the wrong number of counts");
  }
  if (observations != static_cast<std::size_t>(-1) &&
      data.observations.size() != observations) {
    throw DomainError(std::string(family) + " dataset has the wrong number of observations");
  }
}

constexpr std::size_t kAny = static_cast<std::size_t>(-1);

}  // namespace

// ---------------------------------------------------------------------------
// PriorSpec
// ---------------------------------------------------------------------------

PriorSpec::PriorSpec(BetaPrior p) : v_(p) {
  require_positive(p.alpha, "beta.alpha");
  require_positive(p.beta, "beta.beta");
}

PriorSpec::PriorSpec(GammaPrior p) : v_(p) {
  require_positive(p.shape, "gamma.shape");
  require_positive(p.rate, "gamma.rate");
}

PriorSpec::PriorSpec(DirichletPrior p) : v_(p) {
  if (p.alphas.size() < 2) throw DomainError("dirichlet.alphas needs at least 2 components");
  for (double a : p.alphas) require_positive(a, "dirichlet.alphas[]");
}

PriorSpec::PriorSpec(NormalPrior p) : v_(p) {
  if (!std::isfinite(p.mean)) throw DomainError("normal.mean must be finite");
  require_positive(p.variance, "normal.variance");
}

PriorSpec::PriorSpec(TruncatedNormalPrior p) : v_(p) {
  if (!std::isfinite(p.mean)) throw DomainError("truncated_normal.mean must be finite");
  require_positive(p.variance, "truncated_normal.variance");
  if (std::isnan(p.lower) || std::isnan(p.upper) || !(p.lower < p.upper)) {
    throw DomainError("truncated_normal bounds must satisfy lower < upper");
  }
}

PriorSpec::PriorSpec(TransformedBetaLogRatePrior p) : v_(p) {
  require_positive(p.alpha, "transformed_beta_log_rate.alpha");
  require_positive(p.beta, "transformed_beta_log_rate.beta");
}

std::size_t PriorSpec::dimension() const noexcept {
  if (const auto* d = std::get_if<DirichletPrior>(&v_)) return d->alphas.size();
  return 1;
}

std::string PriorSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const BetaPrior& p) { os << "Beta(" << p.alpha << ", " << p.beta << ")"; },
                 [&](const GammaPrior& p) {
                   os << "Gamma(shape=" << p.shape << ", rate=" << p.rate << ")";
                 },
                 [&](const DirichletPrior& p) {
                   os << "Dirichlet(";
                   for (std::size_t i = 0; i < p.alphas.size(); ++i) {
                     os << (i ? ", " : "") << p.alphas[i];
                   }
                   os << ")";
                 },
                 [&](const NormalPrior& p) {
                   os << "Normal(" << p.mean << ", var=" << p.variance << ")";
                 },
                 [&](const TruncatedNormalPrior& p) {
                   os << "TruncatedNormal(" << p.mean << ", var=" << p.variance << ", ["
                      << p.lower << ", " << p.upper << "])";
                 },
                 [&](const TransformedBetaLogRatePrior& p) {
                   os << "-log(1-P), P~Beta(" << p.alpha << ", " << p.beta << ")";
                 },
             },
             v_);
  return os.str();
}

// ---------------------------------------------------------------------------
// LikelihoodSpec
// ---------------------------------------------------------------------------

LikelihoodSpec::LikelihoodSpec(BinomialLikelihood l) : v_(l) {
  require_count(l.trials, "binomial.n");
}
LikelihoodSpec::LikelihoodSpec(ExponentialRateLikelihood l) : v_(l) {
  require_count(l.n, "exponential.n");
}
LikelihoodSpec::LikelihoodSpec(PoissonLikelihood l) : v_(l) { require_count(l.n, "poisson.n"); }
LikelihoodSpec::LikelihoodSpec(WeibullRateParamLikelihood l) : v_(l) {
  require_positive(l.shape, "weibull.shape");
  require_count(l.n, "weibull.n");
}
LikelihoodSpec::LikelihoodSpec(MultinomialLikelihood l) : v_(l) {
  require_count(l.trials, "multinomial.n");
}

std::int64_t LikelihoodSpec::observation_count() const noexcept {
  return std::visit(overloaded{
                        [](const BinomialLikelihood& l) { return l.trials; },
                        [](const MultinomialLikelihood& l) { return l.trials; },
                        [](const ExponentialRateLikelihood& l) { return l.n; },
                        [](const PoissonLikelihood& l) { return l.n; },
                        [](const WeibullRateParamLikelihood& l) { return l.n; },
                    },
                    v_);
}

bool LikelihoodSpec::vector_parameter() const noexcept {
  return std::holds_alternative<MultinomialLikelihood>(v_);
}

std::string LikelihoodSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const BinomialLikelihood& l) { os << "Binomial(n=" << l.trials << ")"; },
                 [&](const ExponentialRateLikelihood& l) {
                   os << "Exponential(rate, n=" << l.n << ")";
                 },
                 [&](const PoissonLikelihood& l) { os << "Poisson(n=" << l.n << ")"; },
                 [&](const WeibullRateParamLikelihood& l) {
                   os << "Weibull(shape=" << l.shape << ", scale=1/theta, n=" << l.n << ")";
                 },
                 [&](const MultinomialLikelihood& l) {
                   os << "Multinomial(n=" << l.trials << ")";
                 },
             },
             v_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

Vector sample_prior_one(const PriorSpec& spec, Stream& stream) {
  return std::visit(
      overloaded{
          [&](const BetaPrior& p) { return scalar(draw_beta(p.alpha, p.beta, stream)); },
          [&](const GammaPrior& p) { return scalar(draw_gamma(p.shape, p.rate, stream)); },
          [&](const DirichletPrior& p) {
            Vector out(static_cast<Eigen::Index>(p.alphas.size()));
            for (std::size_t j = 0; j < p.alphas.size(); ++j) {
              out[static_cast<Eigen::Index>(j)] = draw_gamma(p.alphas[j], 1.0, stream);
            }
            out /= out.sum();
            return out;
          },
          [&](const NormalPrior& p) {
            return scalar(
                std::normal_distribution<double>(p.mean, std::sqrt(p.variance))(stream));
          },
          [&](const TruncatedNormalPrior& p) {
            const double sd = std::sqrt(p.variance);
            const double z = draw_standard_truncated((p.lower - p.mean) / sd,
                                                     (p.upper - p.mean) / sd, stream);
            return scalar(p.mean + sd * z);
          },
          [&](const TransformedBetaLogRatePrior& p) {
            return scalar(-std::log1p(-draw_beta(p.alpha, p.beta, stream)));
          },
      },
      spec.variant());
}

Matrix sample_prior(const PriorSpec& spec, std::size_t count, Stream& stream) {
  if (count == 0) throw DomainError("sample_prior: count must be >= 1");
  const auto d = static_cast<Eigen::Index>(spec.dimension());
  Matrix out(static_cast<Eigen::Index>(count), d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = sample_prior_one(spec, stream).transpose();
  }
  return out;
}

bool in_parameter_space(const LikelihoodSpec& spec, const Vector& phi) {
  if (spec.vector_parameter()) return is_simplex(phi);
  if (phi.size() != 1 || !std::isfinite(phi[0])) return false;
  const double x = phi[0];
  return std::visit(overloaded{
                        [&](const BinomialLikelihood&) { return x >= 0.0 && x <= 1.0; },
                        [&](const MultinomialLikelihood&) { return false; },
                        [&](const auto&) { return x > 0.0; },
                    },
                    spec.variant());
}

Dataset generate_dataset(const LikelihoodSpec& spec, const Vector& phi, Stream& stream) {
  if (!in_parameter_space(spec, phi)) {
    throw DomainError("generate_dataset: parameter outside the space of " + spec.describe());
  }
  Dataset data;
  std::visit(
      overloaded{
          [&](const BinomialLikelihood& l) {
            data.counts.push_back(
                std::binomial_distribution<std::int64_t>(l.trials, phi[0])(stream));
          },
          [&](const MultinomialLikelihood& l) {
            std::int64_t remaining = l.trials;
            double mass = 1.0;
            const auto d = phi.size();
            data.counts.resize(static_cast<std::size_t>(d), 0);
            for (Eigen::Index j = 0; j + 1 < d && remaining > 0; ++j) {
              const double p = mass > 0.0 ? std::clamp(phi[j] / mass, 0.0, 1.0) : 0.0;
              const auto x = std::binomial_distribution<std::int64_t>(remaining, p)(stream);
              data.counts[static_cast<std::size_t>(j)] = x;
              remaining -= x;
              mass -= phi[j];
            }
            data.counts.back() += remaining;
          },
          [&](const ExponentialRateLikelihood& l) {
            std::exponential_distribution<double> e(phi[0]);
            data.observations.resize(static_cast<std::size_t>(l.n));
            for (auto& x : data.observations) x = e(stream);
          },
          [&](const PoissonLikelihood& l) {
            std::poisson_distribution<std::int64_t> p(phi[0]);
            data.observations.resize(static_cast<std::size_t>(l.n));
            for (auto& x : data.observations) x = static_cast<double>(p(stream));
          },
          [&](const WeibullRateParamLikelihood& l) {
            std::weibull_distribution<double> w(l.shape, 1.0 / phi[0]);
            data.observations.resize(static_cast<std::size_t>(l.n));
            for (auto& x : data.observations) x = w(stream);
          },
      },
      spec.variant());
  return data;
}

// ---------------------------------------------------------------------------
// Sufficient statistics, MLE and log-likelihood
// ---------------------------------------------------------------------------

SufficientStats sufficient_statistics(const LikelihoodSpec& spec, const Dataset& data) {
  SufficientStats s;
  std::visit(
      overloaded{
          [&](const BinomialLikelihood& l) {
            require_size(data, 1, kAny, "binomial");
            const auto x = data.counts[0];
            if (x < 0 || x > l.trials) throw DomainError("binomial count out of range");
            s.counts = {static_cast<double>(x)};
            s.log_constant = std::lgamma(l.trials + 1.0) - std::lgamma(x + 1.0) -
                             std::lgamma(static_cast<double>(l.trials - x) + 1.0);
          },
          [&](const MultinomialLikelihood& l) {
            if (data.counts.size() < 2) throw DomainError("multinomial needs >= 2 categories");
            std::int64_t total = 0;
            s.log_constant = std::lgamma(l.trials + 1.0);
            for (auto x : data.counts) {
              if (x < 0) throw DomainError("multinomial count must be non-negative");
              total += x;
              s.counts.push_back(static_cast<double>(x));
              s.log_constant -= std::lgamma(x + 1.0);
            }
            if (total != l.trials) throw DomainError("multinomial counts must sum to n");
          },
          [&](const ExponentialRateLikelihood& l) {
            require_size(data, kAny, static_cast<std::size_t>(l.n), "exponential");
            for (double x : data.observations) {
              if (!(x >= 0.0)) throw DomainError("exponential observation must be >= 0");
              s.sum += x;
            }
          },
          [&](const PoissonLikelihood& l) {
            require_size(data, kAny, static_cast<std::size_t>(l.n), "poisson");
            for (double x : data.observations) {
              if (!(x >= 0.0) || x != std::floor(x)) {
                throw DomainError("poisson observation must be a non-negative integer");
              }
              s.sum += x;
              s.log_constant -= std::lgamma(x + 1.0);
            }
          },
          [&](const WeibullRateParamLikelihood& l) {
            require_size(data, kAny, static_cast<std::size_t>(l.n), "weibull");
            s.log_constant = static_cast<double>(l.n) * std::log(l.shape);
            for (double x : data.observations) {
              if (!(x > 0.0)) throw DomainError("weibull observation must be > 0");
              s.sum += std::pow(x, l.shape);
              s.log_constant += (l.shape - 1.0) * std::log(x);
            }
          },
      },
      spec.variant());
  return s;
}

Vector summary_statistic(const LikelihoodSpec& spec, const SufficientStats& stats) {
  const double n = static_cast<double>(spec.observation_count());
  return std::visit(overloaded{
                        [&](const BinomialLikelihood&) { return scalar(stats.counts.at(0) / n); },
                        [&](const MultinomialLikelihood&) {
                          Vector out(static_cast<Eigen::Index>(stats.counts.size()));
                          for (std::size_t j = 0; j < stats.counts.size(); ++j) {
                            out[static_cast<Eigen::Index>(j)] = stats.counts[j] / n;
                          }
                          return out;
                        },
                        [&](const ExponentialRateLikelihood&) { return scalar(n / stats.sum); },
                        [&](const PoissonLikelihood&) { return scalar(stats.sum / n); },
                        [&](const WeibullRateParamLikelihood& l) {
                          return scalar(std::pow(stats.sum / n, -1.0 / l.shape));
                        },
                    },
                    spec.variant());
}

Vector summary_statistic(const LikelihoodSpec& spec, const Dataset& data) {
  return summary_statistic(spec, sufficient_statistics(spec, data));
}

double log_likelihood(const LikelihoodSpec& spec, const Vector& phi,
                      const SufficientStats& stats) {
  if (!in_parameter_space(spec, phi)) return kNegInf;
  const double n = static_cast<double>(spec.observation_count());
  const double kernel = std::visit(
      overloaded{
          [&](const BinomialLikelihood&) {
            const double x = stats.counts.at(0);
            const double p = phi[0];
            if ((p == 0.0 && x > 0.0) || (p == 1.0 && x < n)) return kNegInf;
            return xlogy(x, p) + xlogy(n - x, 1.0 - p);
          },
          [&](const MultinomialLikelihood&) {
            if (static_cast<std::size_t>(phi.size()) != stats.counts.size()) return kNegInf;
            double acc = 0.0;
            for (std::size_t j = 0; j < stats.counts.size(); ++j) {
              const double p = phi[static_cast<Eigen::Index>(j)];
              if (p == 0.0 && stats.counts[j] > 0.0) return kNegInf;
              acc += xlogy(stats.counts[j], p);
            }
            return acc;
          },
          [&](const ExponentialRateLikelihood&) {
            return n * std::log(phi[0]) - phi[0] * stats.sum;
          },
          [&](const PoissonLikelihood&) { return xlogy(stats.sum, phi[0]) - n * phi[0]; },
          [&](const WeibullRateParamLikelihood& l) {
            return n * l.shape * std::log(phi[0]) - std::pow(phi[0], l.shape) * stats.sum;
          },
      },
      spec.variant());
  return kernel + stats.log_constant;
}

double log_likelihood(const LikelihoodSpec& spec, const Vector& phi, const Dataset& data) {
  return log_likelihood(spec, phi, sufficient_statistics(spec, data));
}

// ---------------------------------------------------------------------------
// Prior densities and moments
// ---------------------------------------------------------------------------

double log_prior_density(const PriorSpec& spec, const Vector& phi) {
  if (phi.size() != static_cast<Eigen::Index>(spec.dimension())) return kNegInf;
  for (double v : phi) {
    if (std::isnan(v)) return kNegInf;
  }
  return std::visit(
      overloaded{
          [&](const BetaPrior& p) { return beta_log_pdf(p.alpha, p.beta, phi[0]); },
          [&](const GammaPrior& p) {
            const double x = phi[0];
            if (!(x > 0.0) || std::isinf(x)) return kNegInf;
            return p.shape * std::log(p.rate) - std::lgamma(p.shape) +
                   (p.shape - 1.0) * std::log(x) - p.rate * x;
          },
          [&](const DirichletPrior& p) {
            for (double v : phi) {
              if (!(v > 0.0 && v < 1.0)) return kNegInf;
            }
            if (std::abs(phi.sum() - 1.0) > kSimplexTolerance) return kNegInf;
            double total = 0.0;
            double acc = 0.0;
            for (std::size_t j = 0; j < p.alphas.size(); ++j) {
              total += p.alphas[j];
              acc += (p.alphas[j] - 1.0) * std::log(phi[static_cast<Eigen::Index>(j)]) -
                     std::lgamma(p.alphas[j]);
            }
            return acc + std::lgamma(total);
          },
          [&](const NormalPrior& p) {
            const double x = phi[0];
            if (std::isinf(x)) return kNegInf;
            const double d = x - p.mean;
            return -0.5 * (std::log(2.0 * M_PI * p.variance) + d * d / p.variance);
          },
          [&](const TruncatedNormalPrior& p) {
            const double x = phi[0];
            if (!(x > p.lower && x < p.upper)) return kNegInf;
            const double sd = std::sqrt(p.variance);
            const double mass = normal_mass((p.lower - p.mean) / sd, (p.upper - p.mean) / sd);
            const double d = x - p.mean;
            return -0.5 * (std::log(2.0 * M_PI * p.variance) + d * d / p.variance) -
                   std::log(mass);
          },
          [&](const TransformedBetaLogRatePrior& p) {
            const double lambda = phi[0];
            if (!(lambda > 0.0) || std::isinf(lambda)) return kNegInf;
            // P = 1 - exp(-lambda), |dP/dlambda| = exp(-lambda).
            return beta_log_pdf(p.alpha, p.beta, -std::expm1(-lambda)) - lambda;
          },
      },
      spec.variant());
}

Vector prior_mean(const PriorSpec& spec) {
  return std::visit(
      overloaded{
          [](const BetaPrior& p) { return scalar(p.alpha / (p.alpha + p.beta)); },
          [](const GammaPrior& p) { return scalar(p.shape / p.rate); },
          [](const DirichletPrior& p) {
            const double total = std::accumulate(p.alphas.begin(), p.alphas.end(), 0.0);
            Vector out(static_cast<Eigen::Index>(p.alphas.size()));
            for (std::size_t j = 0; j < p.alphas.size(); ++j) {
              out[static_cast<Eigen::Index>(j)] = p.alphas[j] / total;
            }
            return out;
          },
          [](const NormalPrior& p) { return scalar(p.mean); },
          [](const TruncatedNormalPrior& p) {
            const double sd = std::sqrt(p.variance);
            const double a = (p.lower - p.mean) / sd;
            const double b = (p.upper - p.mean) / sd;
            const auto& n = standard_normal();
            const double pa = std::isinf(a) ? 0.0 : boost::math::pdf(n, a);
            const double pb = std::isinf(b) ? 0.0 : boost::math::pdf(n, b);
            return scalar(p.mean + sd * (pa - pb) / normal_mass(a, b));
          },
          [](const TransformedBetaLogRatePrior& p) {
            // E[-log(1-P)] with 1-P ~ Beta(beta, alpha).
            return scalar(boost::math::digamma(p.alpha + p.beta) - boost::math::digamma(p.beta));
          },
      },
      spec.variant());
}

std::optional<Vector> analytic_prior_variance(const PriorSpec& spec) {
  return std::visit(
      overloaded{
          [](const BetaPrior& p) -> std::optional<Vector> {
            const double s = p.alpha + p.beta;
            return scalar(p.alpha * p.beta / (s * s * (s + 1.0)));
          },
          [](const GammaPrior& p) -> std::optional<Vector> {
            return scalar(p.shape / (p.rate * p.rate));
          },
          [](const DirichletPrior& p) -> std::optional<Vector> {
            const double total = std::accumulate(p.alphas.begin(), p.alphas.end(), 0.0);
            Vector out(static_cast<Eigen::Index>(p.alphas.size()));
            for (std::size_t j = 0; j < p.alphas.size(); ++j) {
              out[static_cast<Eigen::Index>(j)] =
                  p.alphas[j] * (total - p.alphas[j]) / (total * total * (total + 1.0));
            }
            return out;
          },
          [](const NormalPrior& p) -> std::optional<Vector> { return scalar(p.variance); },
          [](const TruncatedNormalPrior&) -> std::optional<Vector> { return std::nullopt; },
          [](const TransformedBetaLogRatePrior&) -> std::optional<Vector> {
            return std::nullopt;
          },
      },
      spec.variant());
}

}  // namespace essk
