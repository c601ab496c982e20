#include "essk/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "essk/errors.hpp"

namespace essk {
namespace {

constexpr double kAdaptationExponent = 0.6;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// Bijection between the parameter's support and the real line.
class SupportTransform {
 public:
  explicit SupportTransform(const PriorSpec& prior) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (prior.get_if<BetaPrior>()) {
      lo_ = 0.0;
      hi_ = 1.0;
    } else if (prior.get_if<GammaPrior>() || prior.get_if<TransformedBetaLogRatePrior>()) {
      lo_ = 0.0;
      hi_ = inf;
    } else if (const auto* tn = prior.get_if<TruncatedNormalPrior>()) {
      lo_ = tn->lower;
      hi_ = tn->upper;
    } else if (prior.get_if<NormalPrior>()) {
      lo_ = -inf;
      hi_ = inf;
    } else {
      throw DomainError("metropolis: only univariate priors are supported");
    }
  }

  double to_unconstrained(double x) const {
    if (bounded()) {
      const double u = (x - lo_) / (hi_ - lo_);
      return std::log(u) - std::log1p(-u);
    }
    if (std::isfinite(lo_)) return std::log(x - lo_);
    if (std::isfinite(hi_)) return std::log(hi_ - x);
    return x;
  }

  double from_unconstrained(double z) const {
    if (bounded()) return lo_ + (hi_ - lo_) / (1.0 + std::exp(-z));
    if (std::isfinite(lo_)) return lo_ + std::exp(z);
    if (std::isfinite(hi_)) return hi_ - std::exp(z);
    return z;
  }

  // log |dx/dz|
  double log_jacobian(double z) const {
    if (bounded()) {
      // sigmoid'(z) = sigmoid(z) sigmoid(-z)
      return std::log(hi_ - lo_) - softplus(-z) - softplus(z);
    }
    if (std::isfinite(lo_) || std::isfinite(hi_)) return z;
    return 0.0;
  }

 private:
  bool bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

double batch_means_se(const std::vector<double>& chain) {
  const auto n = chain.size();
  const auto batch = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(n)));
  const auto batches = n / batch;
  if (batches < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < batch; ++i) acc += chain[b * batch + i];
    means[b] = acc / static_cast<double>(batch);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var_batch = ss / static_cast<double>(batches - 1);
  return std::sqrt(var_batch / static_cast<double>(batches));
}

}  // namespace

void McmcConfig::validate() const {
  if (iterations < 1) throw DomainError("mcmc.iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw DomainError("mcmc.burn_in must satisfy 0 <= burn_in < iterations");
  }
  if (!(initial_proposal_sd > 0.0) || !std::isfinite(initial_proposal_sd)) {
    throw DomainError("mcmc.initial_proposal_sd must be positive");
  }
  if (adapt_window < 0) throw DomainError("mcmc.adapt_window must be >= 0");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw DomainError("mcmc.target_acceptance must lie in (0, 1)");
  }
}

std::optional<Vector> posterior_mean_conjugate(const Scenario& s, const SufficientStats& data) {
  const double n = static_cast<double>(s.likelihood.observation_count());
  const auto one = [](double v) { return Vector::Constant(1, v); };
  if (const auto* b = s.prior.get_if<BetaPrior>(); b && s.likelihood.get_if<BinomialLikelihood>()) {
    return one((b->alpha + data.counts.at(0)) / (b->alpha + b->beta + n));
  }
  if (const auto* g = s.prior.get_if<GammaPrior>()) {
    if (s.likelihood.get_if<ExponentialRateLikelihood>()) {
      return one((g->shape + n) / (g->rate + data.sum));
    }
    if (s.likelihood.get_if<PoissonLikelihood>()) {
      return one((g->shape + data.sum) / (g->rate + n));
    }
  }
  if (const auto* d = s.prior.get_if<DirichletPrior>();
      d && s.likelihood.get_if<MultinomialLikelihood>()) {
    const double total = std::accumulate(d->alphas.begin(), d->alphas.end(), 0.0);
    Vector out(static_cast<Eigen::Index>(d->alphas.size()));
    for (std::size_t j = 0; j < d->alphas.size(); ++j) {
      out[static_cast<Eigen::Index>(j)] = (d->alphas[j] + data.counts.at(j)) / (total + n);
    }
    return out;
  }
  return std::nullopt;
}

MetropolisResult metropolis_posterior_mean(const PriorSpec& prior,
                                           const std::function<double(double)>& log_likelihood,
                                           const McmcConfig& cfg, Stream& stream) {
  cfg.validate();
  const SupportTransform transform(prior);
  const auto log_target = [&](double z) {
    const double x = transform.from_unconstrained(z);
    const double lp = log_prior_density(prior, Vector::Constant(1, x));
    if (lp == -std::numeric_limits<double>::infinity()) return lp;
    const double ll = log_likelihood(x);
    const double t = lp + ll + transform.log_jacobian(z);
    return std::isnan(t) ? -std::numeric_limits<double>::infinity() : t;
  };

  double z = transform.to_unconstrained(prior_mean(prior)[0]);
  double current = log_target(z);
  if (!std::isfinite(current)) {
    throw EstimatorError("metropolis: target is not finite at the prior mean");
  }

  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double log_sd = std::log(cfg.initial_proposal_sd);
  const int adapt_until = std::min(cfg.adapt_window, cfg.burn_in);

  std::vector<double> retained;
  retained.reserve(static_cast<std::size_t>(cfg.iterations - cfg.burn_in));
  long accepted = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    const double proposal = z + std::exp(log_sd) * step(stream);
    const double candidate = log_target(proposal);
    const double log_ratio = candidate - current;
    const double accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    const bool accept = unif(stream) < accept_prob;
    if (accept) {
      z = proposal;
      current = candidate;
    }
    if (t < adapt_until) {
      const double gain = std::pow(t + 1.0, -kAdaptationExponent);
      log_sd += gain * (accept_prob - cfg.target_acceptance);
    }
    if (t >= cfg.burn_in) {
      accepted += accept ? 1 : 0;
      retained.push_back(transform.from_unconstrained(z));
    }
  }

  MetropolisResult r;
  const double sum = std::accumulate(retained.begin(), retained.end(), 0.0);
  r.mean = Vector::Constant(1, sum / static_cast<double>(retained.size()));
  r.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(retained.size());
  r.mc_standard_error = batch_means_se(retained);
  r.proposal_sd = std::exp(log_sd);
  return r;
}

MetropolisResult metropolis_posterior_mean(const Scenario& s, const SufficientStats& data,
                                           const McmcConfig& cfg, Stream& stream) {
  if (s.dimension() != 1) throw DomainError("metropolis: only univariate scenarios are supported");
  return metropolis_posterior_mean(
      s.prior,
      [&](double x) { return log_likelihood(s.likelihood, Vector::Constant(1, x), data); }, cfg,
      stream);
}

PosteriorMean posterior_mean(const Scenario& s, const SufficientStats& data,
                             const McmcConfig& cfg, Stream& stream) {
  // The sampler is univariate; forcing it only applies where it can run.
  if (!cfg.force_metropolis || s.dimension() > 1) {
    if (auto closed = posterior_mean_conjugate(s, data)) return {std::move(*closed), std::nullopt};
  }
  auto r = metropolis_posterior_mean(s, data, cfg, stream);
  return {std::move(r.mean), r.acceptance_rate};
}

}  // namespace essk
