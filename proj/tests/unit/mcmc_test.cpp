#include "essk/mcmc.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "essk/errors.hpp"
#include "essk/rng.hpp"
#include "oracles.hpp"

namespace essk {
namespace {

SufficientStats binomial_stats(double x) {
  SufficientStats st;
  st.counts = {x};
  return st;
}

TEST(McmcConfigTest, Validation) {
  McmcConfig c;
  EXPECT_NO_THROW(c.validate());
  c.burn_in = c.iterations;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.target_acceptance = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.initial_proposal_sd = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.iterations = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(ConjugatePosteriorTest, ClosedForms) {
  const Scenario bb = *find_builtin("beta-binomial");
  EXPECT_DOUBLE_EQ((*posterior_mean_conjugate(bb, binomial_stats(8)))[0], 0.4);
  EXPECT_DOUBLE_EQ((*posterior_mean_conjugate(bb, binomial_stats(0)))[0], 4.0 / 30.0);

  SufficientStats expo;
  expo.sum = 50;
  EXPECT_DOUBLE_EQ((*posterior_mean_conjugate(*find_builtin("gamma-exponential"), expo))[0], 2.0);

  SufficientStats pois;
  pois.sum = 30;
  EXPECT_DOUBLE_EQ((*posterior_mean_conjugate(*find_builtin("gamma-poisson"), pois))[0],
                   80.0 / 200.0);

  SufficientStats multi;
  multi.counts = {20, 10, 20};
  const Vector dm = *posterior_mean_conjugate(*find_builtin("dirichlet-multinomial"), multi);
  EXPECT_DOUBLE_EQ(dm[0], 30.0 / 73.0);
  EXPECT_DOUBLE_EQ(dm[1], 15.0 / 73.0);
  EXPECT_DOUBLE_EQ(dm[2], 28.0 / 73.0);

  for (const char* name : {"normal-weibull", "truncnormal-binomial", "transformed-beta-exponential"}) {
    EXPECT_FALSE(posterior_mean_conjugate(*find_builtin(name), binomial_stats(3))) << name;
  }
}

TEST(MetropolisTest, BetaBinomialPosterior) {
  const Scenario bb = *find_builtin("beta-binomial");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = substream(seed, 0, StreamPurpose::kTest);
    const auto r = metropolis_posterior_mean(bb, binomial_stats(8), McmcConfig{}, s);
    EXPECT_NEAR(r.mean[0], 0.4, 0.01);
    EXPECT_GT(r.acceptance_rate, 0.15);
    EXPECT_LT(r.acceptance_rate, 0.55);
    EXPECT_GT(r.mc_standard_error, 0.0);
  }
}

TEST(MetropolisTest, FlatLikelihoodReturnsPrior) {
  auto s = substream(1, 0, StreamPurpose::kTest);
  const auto r = metropolis_posterior_mean(PriorSpec(NormalPrior{1, 0.04}),
                                           [](double) { return 0.0; }, McmcConfig{}, s);
  EXPECT_NEAR(r.mean[0], 1.0, 0.02);
}

TEST(MetropolisTest, RejectsMultivariateAndBadStart) {
  auto s = substream(1, 0, StreamPurpose::kTest);
  SufficientStats multi;
  multi.counts = {20, 10, 20};
  EXPECT_THROW(metropolis_posterior_mean(*find_builtin("dirichlet-multinomial"), multi,
                                         McmcConfig{}, s),
               DomainError);
  EXPECT_THROW(metropolis_posterior_mean(
                   PriorSpec(GammaPrior{2, 1}),
                   [](double) { return -std::numeric_limits<double>::infinity(); }, McmcConfig{},
                   s),
               Error);
}

TEST(MetropolisTest, SeedDeterministic) {
  const Scenario tn = *find_builtin("truncnormal-binomial");
  auto a = substream(3, 0, StreamPurpose::kTest), b = substream(3, 0, StreamPurpose::kTest);
  const auto ra = metropolis_posterior_mean(tn, binomial_stats(5), McmcConfig{}, a);
  const auto rb = metropolis_posterior_mean(tn, binomial_stats(5), McmcConfig{}, b);
  EXPECT_EQ(ra.mean, rb.mean);
  EXPECT_EQ(ra.acceptance_rate, rb.acceptance_rate);
}

// Quadrature oracle for the truncated-normal/binomial posterior, written
// from the model definition rather than the library's densities.
TEST(MetropolisTest, TruncatedNormalBinomialMatchesQuadrature) {
  const Scenario tn = *find_builtin("truncnormal-binomial");
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  const DrawMatrix d = simulate_draws(tn, 200, 17, opts);
  double total = 0.0;
  for (Eigen::Index m = 0; m < d.size(); ++m) {
    const double x = d.stats[static_cast<std::size_t>(m)].counts[0];
    auto log_post = [x](double p) -> double {
      if (p <= 0.0 || p >= 1.0) return -INFINITY;
      return -0.5 * (p - 0.2) * (p - 0.2) / 0.01 + x * std::log(p) + (20 - x) * std::log1p(-p);
    };
    const double oracle = testing::quadrature_posterior_mean(log_post, 0.0, 1.0);
    auto s = substream(17, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
    const auto r = metropolis_posterior_mean(tn, d.stats[static_cast<std::size_t>(m)],
                                             McmcConfig{}, s);
    total += std::abs(r.mean[0] - oracle);
  }
  EXPECT_LT(total / 200.0, 0.01);
}

TEST(MetropolisTest, TransformedBetaExponentialMatchesQuadrature) {
  const Scenario tb = *find_builtin("transformed-beta-exponential");
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  const DrawMatrix d = simulate_draws(tb, 50, 18, opts);
  double total = 0.0;
  for (Eigen::Index m = 0; m < d.size(); ++m) {
    const double sum = d.stats[static_cast<std::size_t>(m)].sum;
    // lambda = -log(1 - P): density Beta(P) * (1 - P) with P = 1 - exp(-lambda).
    auto log_post = [sum](double l) -> double {
      if (l <= 0.0) return -INFINITY;
      const double p = -std::expm1(-l);
      return 3 * std::log(p) + 5 * (-l) - l + 100 * std::log(l) - l * sum;
    };
    const double mode = 100.0 / sum;
    const double oracle = testing::quadrature_posterior_mean(log_post, 1e-9, 6 * mode);
    auto s = substream(18, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
    const auto r = metropolis_posterior_mean(tb, d.stats[static_cast<std::size_t>(m)],
                                             McmcConfig{}, s);
    total += std::abs(r.mean[0] - oracle) / oracle;
  }
  EXPECT_LT(total / 50.0, 0.01);
}

// Forced through Metropolis, conjugate targets reproduce the closed form:
// the signed error averaged over 100 datasets is within 1% of the prior sd,
// and the typical per-dataset error stays a small fraction of it.
TEST(MetropolisTest, ForcedConjugateAgreesWithClosedForm) {
  McmcConfig forced;
  forced.force_metropolis = true;
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  for (const char* name : {"beta-binomial", "gamma-exponential", "gamma-poisson"}) {
    const Scenario s = *find_builtin(name);
    const double prior_sd = std::sqrt((*analytic_prior_variance(s.prior))[0]);
    const DrawMatrix d = simulate_draws(s, 100, 23, opts);
    double signed_sum = 0.0, abs_sum = 0.0;
    for (Eigen::Index m = 0; m < d.size(); ++m) {
      const auto& st = d.stats[static_cast<std::size_t>(m)];
      auto stream = substream(23, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
      const auto pm = posterior_mean(s, st, forced, stream);
      ASSERT_TRUE(pm.acceptance_rate);
      const double err = pm.mean[0] - (*posterior_mean_conjugate(s, st))[0];
      signed_sum += err;
      abs_sum += std::abs(err);
    }
    EXPECT_LT(std::abs(signed_sum) / 100.0, 0.01 * prior_sd) << name;
    EXPECT_LT(abs_sum / 100.0, 0.05 * prior_sd) << name;
  }
}

TEST(MetropolisTest, AcceptanceRatesOnBenchmarkDatasets) {
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  for (const char* name : {"normal-weibull", "truncnormal-binomial", "transformed-beta-exponential"}) {
    const Scenario s = *find_builtin(name);
    const DrawMatrix d = simulate_draws(s, 200, 31, opts);
    int inside = 0;
    for (Eigen::Index m = 0; m < d.size(); ++m) {
      auto stream = substream(31, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
      const auto r = metropolis_posterior_mean(s, d.stats[static_cast<std::size_t>(m)],
                                               McmcConfig{}, stream);
      if (r.acceptance_rate >= 0.15 && r.acceptance_rate <= 0.55) ++inside;
    }
    EXPECT_GE(inside, 190) << name;
  }
}

TEST(MetropolisTest, DoublingIterationsStaysWithinMonteCarloError) {
  const Scenario s = *find_builtin("transformed-beta-exponential");
  DrawOptions opts;
  opts.retain_sufficient_stats = true;
  const DrawMatrix d = simulate_draws(s, 20, 41, opts);
  McmcConfig doubled;
  doubled.iterations = 2 * McmcConfig{}.iterations;
  for (Eigen::Index m = 0; m < d.size(); ++m) {
    const auto& st = d.stats[static_cast<std::size_t>(m)];
    auto a = substream(41, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
    auto b = substream(41, static_cast<std::uint64_t>(m), StreamPurpose::kTest);
    const auto base = metropolis_posterior_mean(s, st, McmcConfig{}, a);
    const auto longer = metropolis_posterior_mean(s, st, doubled, b);
    EXPECT_LE(std::abs(longer.mean[0] - base.mean[0]), 3 * base.mc_standard_error);
  }
}

TEST(PosteriorMeanTest, Dispatch) {
  auto s = substream(1, 0, StreamPurpose::kTest);
  const auto closed = posterior_mean(*find_builtin("beta-binomial"), binomial_stats(8), {}, s);
  EXPECT_FALSE(closed.acceptance_rate);
  EXPECT_DOUBLE_EQ(closed.mean[0], 0.4);
  const auto sampled =
      posterior_mean(*find_builtin("truncnormal-binomial"), binomial_stats(8), {}, s);
  EXPECT_TRUE(sampled.acceptance_rate);

  // The sampler is univariate, so forcing it on the Dirichlet keeps the closed form.
  McmcConfig forced;
  forced.force_metropolis = true;
  SufficientStats multi;
  multi.counts = {20, 10, 20};
  const auto dm = posterior_mean(*find_builtin("dirichlet-multinomial"), multi, forced, s);
  EXPECT_FALSE(dm.acceptance_rate);
}

}  // namespace
}  // namespace essk
