#include "essk/scenario.hpp"

#include <cmath>
#include <numeric>

#include "essk/errors.hpp"
#include "parallel.hpp"

namespace essk {
namespace {

// Closed interval the prior's support lies in.
std::pair<double, double> prior_support(const PriorSpec& prior) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (prior.get_if<BetaPrior>() || prior.get_if<DirichletPrior>()) return {0.0, 1.0};
  if (prior.get_if<GammaPrior>() || prior.get_if<TransformedBetaLogRatePrior>()) {
    return {0.0, inf};
  }
  if (const auto* tn = prior.get_if<TruncatedNormalPrior>()) return {tn->lower, tn->upper};
  return {-inf, inf};
}

}  // namespace

bool Scenario::same_model(const Scenario& other) const {
  return prior == other.prior && likelihood == other.likelihood && n == other.n &&
         analytic_n0 == other.analytic_n0;
}

std::optional<double> conjugate_analytic_n0(const PriorSpec& prior,
                                            const LikelihoodSpec& likelihood) {
  if (const auto* b = prior.get_if<BetaPrior>(); b && likelihood.get_if<BinomialLikelihood>()) {
    return b->alpha + b->beta;
  }
  if (const auto* g = prior.get_if<GammaPrior>()) {
    if (likelihood.get_if<ExponentialRateLikelihood>()) return g->shape;
    if (likelihood.get_if<PoissonLikelihood>()) return g->rate;
  }
  if (const auto* d = prior.get_if<DirichletPrior>();
      d && likelihood.get_if<MultinomialLikelihood>()) {
    return std::accumulate(d->alphas.begin(), d->alphas.end(), 0.0);
  }
  return std::nullopt;
}

Scenario make_scenario(std::string name, PriorSpec prior, LikelihoodSpec likelihood) {
  const bool dirichlet = prior.get_if<DirichletPrior>() != nullptr;
  if (dirichlet != likelihood.vector_parameter()) {
    throw DomainError("scenario '" + name + "': " + prior.describe() +
                      " is not a parameter prior for " + likelihood.describe());
  }
  const auto [lo, hi] = prior_support(prior);
  const bool probability = likelihood.get_if<BinomialLikelihood>() != nullptr;
  if (probability && (lo < 0.0 || hi > 1.0)) {
    throw DomainError("scenario '" + name + "': binomial needs a prior supported on [0, 1]");
  }
  if (!probability && !dirichlet && prior.get_if<BetaPrior>()) {
    throw DomainError("scenario '" + name + "': a Beta prior only pairs with binomial data");
  }
  if (const auto* tn = prior.get_if<TruncatedNormalPrior>(); tn && !probability && tn->lower < 0) {
    throw DomainError("scenario '" + name + "': rate parameters need a non-negative support");
  }
  const auto n = likelihood.observation_count();
  auto analytic = conjugate_analytic_n0(prior, likelihood);
  return Scenario{std::move(name), std::move(prior), std::move(likelihood), n, analytic};
}

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> s;
    s.push_back(make_scenario("beta-binomial", BetaPrior{4, 6}, BinomialLikelihood{20}));
    s.push_back(
        make_scenario("gamma-exponential", GammaPrior{20, 10}, ExponentialRateLikelihood{100}));
    s.push_back(make_scenario("gamma-poisson", GammaPrior{50, 100}, PoissonLikelihood{100}));
    s.push_back(make_scenario("normal-weibull", NormalPrior{1.0, 0.04},
                              WeibullRateParamLikelihood{1.0, 100}));
    s.push_back(make_scenario("dirichlet-multinomial", DirichletPrior{{10, 5, 8}},
                              MultinomialLikelihood{50}));
    s.push_back(make_scenario("truncnormal-binomial", TruncatedNormalPrior{0.2, 0.01, 0.0, 1.0},
                              BinomialLikelihood{20}));
    s.push_back(make_scenario("transformed-beta-exponential", TransformedBetaLogRatePrior{4, 6},
                              ExponentialRateLikelihood{100}));
    return s;
  }();
  return all;
}

std::optional<Scenario> find_builtin(std::string_view name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

DrawMatrix DrawMatrix::head(Eigen::Index k) const {
  if (k < 1 || k > size()) throw DomainError("DrawMatrix::head: row count out of range");
  DrawMatrix out;
  out.phi = phi.topRows(k);
  out.summary = summary.topRows(k);
  out.seed = seed;
  if (has_sufficient_stats()) {
    out.stats.assign(stats.begin(), stats.begin() + k);
  }
  return out;
}

DrawMatrix simulate_draws(const Scenario& scenario, Eigen::Index draws, std::uint64_t seed,
                          const DrawOptions& options) {
  if (draws < 2) throw DomainError("simulate_draws: need at least 2 draws");
  const auto d = static_cast<Eigen::Index>(scenario.dimension());
  DrawMatrix out;
  out.seed = seed;
  out.phi.resize(draws, d);
  out.summary.resize(draws, d);
  if (options.retain_sufficient_stats) out.stats.resize(static_cast<std::size_t>(draws));

  detail::parallel_for(static_cast<std::size_t>(draws), options.threads, [&](std::size_t i) {
    auto stream = substream(seed, i, StreamPurpose::kSimulation);
    const Vector phi = sample_prior_one(scenario.prior, stream);
    const Dataset data = generate_dataset(scenario.likelihood, phi, stream);
    SufficientStats stats = sufficient_statistics(scenario.likelihood, data);
    const Vector t = summary_statistic(scenario.likelihood, stats);
    if (!phi.allFinite() || !t.allFinite()) {
      throw DomainError("simulate_draws: non-finite draw in scenario '" + scenario.name + "'");
    }
    const auto row = static_cast<Eigen::Index>(i);
    out.phi.row(row) = phi.transpose();
    out.summary.row(row) = t.transpose();
    if (options.retain_sufficient_stats) out.stats[i] = std::move(stats);
  });
  return out;
}

double sample_variance(const Eigen::Ref<const Vector>& x) {
  const auto m = x.size();
  if (m < 2) throw DomainError("sample_variance: need at least 2 values");
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(m - 1);
}

Vector column_variance(const Matrix& m) {
  Vector out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[j] = sample_variance(m.col(j));
  return out;
}

}  // namespace essk
