#include "essk/estimators.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "essk/errors.hpp"
#include "parallel.hpp"

namespace essk {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_std(const Eigen::Ref<const Vector>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Converts per-component (var_phi, var_other) pairs into n0 values and
// fills the aggregate. Components whose ratio is non-informative keep their
// raw, non-positive value and are excluded from the aggregate.
template <class Formula>
void finish_components(EssEstimate& e, Formula&& formula, const char* estimator) {
  const auto d = e.var_phi.size();
  e.per_component.resize(d);
  std::vector<double> good;
  for (Eigen::Index j = 0; j < d; ++j) {
    try {
      e.per_component[j] = formula(j);
      good.push_back(e.per_component[j]);
    } catch (const NonInformativeRatio& err) {
      const double raw = formula.raw(j);
      e.per_component[j] = std::isfinite(raw) ? raw : 0.0;
      std::ostringstream os;
      os << "component " << j << ": " << err.what();
      e.warnings.push_back(os.str());
    }
  }
  if (good.empty()) {
    throw EstimatorError(std::string(estimator) +
                         ": every component gave a non-informative variance ratio");
  }
  e.n0 = aggregate_components(Eigen::Map<const Vector>(good.data(),
                                                       static_cast<Eigen::Index>(good.size())));
}

struct ConditionalFormula {
  const EssEstimate& e;
  double operator()(Eigen::Index j) const {
    return n0_from_conditional_variance(e.var_phi[j], e.var_cond[j], e.n);
  }
  double raw(Eigen::Index j) const {
    return static_cast<double>(e.n) * (e.var_phi[j] / e.var_cond[j] - 1.0);
  }
};

struct SummaryFormula {
  const EssEstimate& e;
  double operator()(Eigen::Index j) const {
    return n0_from_summary_variance(e.var_cond[j], e.var_phi[j], e.n);
  }
  double raw(Eigen::Index j) const {
    return static_cast<double>(e.n) * (e.var_cond[j] / e.var_phi[j] - 1.0);
  }
};

void check_draws(const DrawMatrix& draws, const Scenario& s) {
  if (draws.dimension() != static_cast<Eigen::Index>(s.dimension()) ||
      draws.summary.cols() != draws.phi.cols() || draws.summary.rows() != draws.phi.rows()) {
    throw DomainError("draw matrix does not match scenario '" + s.name + "'");
  }
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kRegression:
      return "regression";
    case Method::kSummaryStats:
      return "summary";
    case Method::kMcmc:
      return "mcmc";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  if (name == "regression") return Method::kRegression;
  if (name == "summary") return Method::kSummaryStats;
  if (name == "mcmc") return Method::kMcmc;
  return std::nullopt;
}

double n0_from_conditional_variance(double var_phi, double var_cond, std::int64_t n) {
  if (!(var_phi > 0.0) || !std::isfinite(var_phi)) throw DomainError("var_phi must be positive");
  if (!(var_cond > 0.0) || !std::isfinite(var_cond)) {
    throw DomainError("conditional-mean variance must be positive");
  }
  if (n < 1) throw DomainError("n must be >= 1");
  if (var_cond >= var_phi) {
    std::ostringstream os;
    os << "non-informative ratio: Var[E[phi|X]] = " << var_cond << " >= Var[phi] = " << var_phi;
    throw NonInformativeRatio(os.str());
  }
  return static_cast<double>(n) * (var_phi / var_cond - 1.0);
}

double n0_from_summary_variance(double var_summary, double var_phi, std::int64_t n) {
  if (!(var_phi > 0.0) || !std::isfinite(var_phi)) throw DomainError("var_phi must be positive");
  if (!std::isfinite(var_summary)) throw DomainError("summary variance must be finite");
  if (n < 1) throw DomainError("n must be >= 1");
  if (var_summary <= var_phi) {
    std::ostringstream os;
    os << "non-informative ratio: Var[T] = " << var_summary << " <= Var[phi] = " << var_phi;
    throw NonInformativeRatio(os.str());
  }
  return static_cast<double>(n) * (var_summary / var_phi - 1.0);
}

double aggregate_components(const Vector& per_component, AggregationRule rule) {
  if (per_component.size() == 0) throw DomainError("aggregate_components: empty input");
  switch (rule) {
    case AggregationRule::kMean:
      return per_component.mean();
  }
  throw DomainError("aggregate_components: unknown rule");
}

EssEstimate ess_regression(const DrawMatrix& draws, const Scenario& s, const SplineConfig& cfg,
                           unsigned threads) {
  const auto start = Clock::now();
  check_draws(draws, s);
  cfg.validate();
  EssEstimate e;
  e.method = Method::kRegression;
  e.M = draws.size();
  e.n = s.n;
  const auto d = draws.dimension();
  e.var_phi = column_variance(draws.phi);
  e.var_cond.resize(d);
  e.fits.resize(static_cast<std::size_t>(d));

  detail::parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const auto x = to_std(draws.summary.col(col));
    const auto y = to_std(draws.phi.col(col));
    auto [lambda, fit] = select_lambda_gcv(x, y, cfg);
    e.var_cond[col] = sample_variance(fit.fitted);
    e.fits[j] = ComponentFit{lambda, fit.edf, fit.gcv_score, std::move(fit.fitted)};
  });

  finish_components(e, ConditionalFormula{e}, "ess_regression");
  e.elapsed_seconds = seconds_since(start);
  return e;
}

EssEstimate ess_summary(const DrawMatrix& draws, const Scenario& s) {
  const auto start = Clock::now();
  check_draws(draws, s);
  EssEstimate e;
  e.method = Method::kSummaryStats;
  e.M = draws.size();
  e.n = s.n;
  e.var_phi = column_variance(draws.phi);
  e.var_cond = column_variance(draws.summary);
  finish_components(e, SummaryFormula{e}, "ess_summary");
  e.elapsed_seconds = seconds_since(start);
  return e;
}

EssEstimate ess_mcmc(const Scenario& s, const DrawMatrix& draws, const McmcConfig& cfg,
                     Eigen::Index datasets, unsigned threads) {
  constexpr double kMinAcceptance = 0.1;
  constexpr double kMaxAcceptance = 0.6;
  constexpr double kMaxFlaggedFraction = 0.05;

  const auto start = Clock::now();
  check_draws(draws, s);
  cfg.validate();
  if (!draws.has_sufficient_stats()) {
    throw DomainError("ess_mcmc: draws were simulated without retaining datasets");
  }
  if (datasets < 2 || datasets > draws.size()) {
    throw DomainError("ess_mcmc: dataset count must lie in [2, M]");
  }
  const auto d = draws.dimension();
  Matrix means(datasets, d);
  std::vector<double> acceptance(static_cast<std::size_t>(datasets),
                                 std::numeric_limits<double>::quiet_NaN());

  detail::parallel_for(static_cast<std::size_t>(datasets), threads, [&](std::size_t m) {
    auto stream = substream(draws.seed, m, StreamPurpose::kMcmc);
    auto pm = posterior_mean(s, draws.stats[m], cfg, stream);
    means.row(static_cast<Eigen::Index>(m)) = pm.mean.transpose();
    if (pm.acceptance_rate) acceptance[m] = *pm.acceptance_rate;
  });

  EssEstimate e;
  e.method = Method::kMcmc;
  e.M = datasets;
  e.n = s.n;
  // Paired with the same datasets the posterior means came from.
  e.var_phi = column_variance(draws.phi.topRows(datasets));
  e.var_cond = column_variance(means);

  std::size_t ran = 0;
  std::size_t flagged = 0;
  double acc_sum = 0.0;
  for (double a : acceptance) {
    if (std::isnan(a)) continue;
    ++ran;
    acc_sum += a;
    if (a < kMinAcceptance || a > kMaxAcceptance) ++flagged;
  }
  if (ran > 0) {
    e.mean_acceptance = acc_sum / static_cast<double>(ran);
    if (flagged > 0) {
      std::ostringstream os;
      os << flagged << " of " << ran << " chains finished with acceptance outside ["
         << kMinAcceptance << ", " << kMaxAcceptance << "]";
      e.warnings.push_back(os.str());
    }
    if (static_cast<double>(flagged) > kMaxFlaggedFraction * static_cast<double>(ran)) {
      throw EstimatorError("ess_mcmc: too many chains failed the acceptance-rate check (" +
                           std::to_string(flagged) + " of " + std::to_string(ran) + ")");
    }
  }

  finish_components(e, ConditionalFormula{e}, "ess_mcmc");
  e.elapsed_seconds = seconds_since(start);
  return e;
}

}  // namespace essk
