#include "essk/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include "essk/errors.hpp"

namespace essk {
namespace {

void expect_object(const Json& node, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const Json& node, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : node.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(path + "." + key, "unknown key");
    }
  }
}

const Json& require(const Json& node, const std::string& path, const char* key) {
  auto it = node.find(key);
  if (it == node.end()) throw ConfigError(path + "." + key, "missing required key");
  return *it;
}

double number(const Json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::int64_t integer(const Json& node, const std::string& path) {
  if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
  return node.get<std::int64_t>();
}

std::int64_t positive_integer(const Json& node, const std::string& path) {
  const auto v = integer(node, path);
  if (v < 1) throw ConfigError(path, "expected a positive integer");
  return v;
}

bool boolean(const Json& node, const std::string& path) {
  if (!node.is_boolean()) throw ConfigError(path, "expected true or false");
  return node.get<bool>();
}

std::string string(const Json& node, const std::string& path) {
  if (!node.is_string()) throw ConfigError(path, "expected a string");
  return node.get<std::string>();
}

// Single-key object {"family": {params}}.
std::pair<std::string, const Json*> family(const Json& node, const std::string& path) {
  expect_object(node, path);
  if (node.size() != 1) throw ConfigError(path, "expected exactly one distribution family");
  const auto it = node.begin();
  expect_object(it.value(), path + "." + it.key());
  return {it.key(), &it.value()};
}

template <class Make>
auto with_domain_path(const std::string& path, Make&& make) {
  try {
    return make();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

std::pair<PriorSpec, std::string> prior_from_json(const Json& node, const std::string& path) {
  const auto [name, params] = family(node, path);
  const std::string p = path + "." + name;
  const Json& j = *params;
  auto num = [&](const char* key) { return number(require(j, p, key), p + "." + key); };
  return with_domain_path(p, [&]() -> std::pair<PriorSpec, std::string> {
    if (name == "beta") {
      reject_unknown(j, p, {"alpha", "beta"});
      return {BetaPrior{num("alpha"), num("beta")}, "beta"};
    }
    if (name == "gamma") {
      reject_unknown(j, p, {"shape", "rate"});
      return {GammaPrior{num("shape"), num("rate")}, "gamma"};
    }
    if (name == "dirichlet") {
      reject_unknown(j, p, {"alphas"});
      const Json& a = require(j, p, "alphas");
      if (!a.is_array()) throw ConfigError(p + ".alphas", "expected an array");
      std::vector<double> alphas;
      for (std::size_t i = 0; i < a.size(); ++i) {
        alphas.push_back(number(a[i], p + ".alphas[" + std::to_string(i) + "]"));
      }
      return {DirichletPrior{std::move(alphas)}, "dirichlet"};
    }
    if (name == "normal") {
      reject_unknown(j, p, {"mean", "variance"});
      return {NormalPrior{num("mean"), num("variance")}, "normal"};
    }
    if (name == "truncated_normal") {
      reject_unknown(j, p, {"mean", "variance", "lower", "upper"});
      return {TruncatedNormalPrior{num("mean"), num("variance"), num("lower"), num("upper")},
              "truncnormal"};
    }
    if (name == "transformed_beta_log_rate") {
      reject_unknown(j, p, {"alpha", "beta"});
      return {TransformedBetaLogRatePrior{num("alpha"), num("beta")}, "transformed-beta"};
    }
    throw ConfigError(p, "unknown prior family");
  });
}

std::pair<LikelihoodSpec, std::string> likelihood_from_json(const Json& node,
                                                            const std::string& path) {
  const auto [name, params] = family(node, path);
  const std::string p = path + "." + name;
  const Json& j = *params;
  auto count = [&]() { return positive_integer(require(j, p, "n"), p + ".n"); };
  return with_domain_path(p, [&]() -> std::pair<LikelihoodSpec, std::string> {
    if (name == "binomial") {
      reject_unknown(j, p, {"n"});
      return {BinomialLikelihood{count()}, "binomial"};
    }
    if (name == "exponential") {
      reject_unknown(j, p, {"n"});
      return {ExponentialRateLikelihood{count()}, "exponential"};
    }
    if (name == "poisson") {
      reject_unknown(j, p, {"n"});
      return {PoissonLikelihood{count()}, "poisson"};
    }
    if (name == "weibull") {
      reject_unknown(j, p, {"shape", "n"});
      const double shape = j.contains("shape") ? number(j["shape"], p + ".shape") : 1.0;
      return {WeibullRateParamLikelihood{shape, count()}, "weibull"};
    }
    if (name == "multinomial") {
      reject_unknown(j, p, {"n"});
      return {MultinomialLikelihood{count()}, "multinomial"};
    }
    throw ConfigError(p, "unknown likelihood family");
  });
}

std::vector<double> lambda_grid_from_json(const Json& node, const std::string& path) {
  if (node.is_array()) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < node.size(); ++i) {
      grid.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    }
    return grid;
  }
  expect_object(node, path);
  reject_unknown(node, path, {"min", "max", "points"});
  const double lo = number(require(node, path, "min"), path + ".min");
  const double hi = number(require(node, path, "max"), path + ".max");
  const auto points = positive_integer(require(node, path, "points"), path + ".points");
  return with_domain_path(path, [&] { return geometric_grid(lo, hi, static_cast<int>(points)); });
}

int small_int(const Json& node, const std::string& path) {
  const auto v = integer(node, path);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "integer out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

std::string_view to_string(OutputFormat f) noexcept {
  return f == OutputFormat::kCsv ? "csv" : "json";
}

bool RunConfig::wants(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

void RunConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("$.scenarios", "must not be empty");
  if (methods.empty()) throw ConfigError("$.methods", "must not be empty");
  if (M < 100) throw ConfigError("$.M", "must be >= 100");
  if (mcmc_dataset_subsample < 2) throw ConfigError("$.mcmc_dataset_subsample", "must be >= 2");
  if (mcmc_dataset_subsample > M) {
    throw ConfigError("$.mcmc_dataset_subsample", "must not exceed M");
  }
  try {
    spline.validate();
  } catch (const DomainError& e) {
    throw ConfigError("$.spline", e.what());
  }
  if (spline.n_interior_knots + BSplineBasis::kOrder > M) {
    throw ConfigError("$.spline.n_interior_knots", "needs at least n_interior_knots + 4 draws");
  }
  try {
    mcmc.validate();
  } catch (const DomainError& e) {
    throw ConfigError("$.mcmc", e.what());
  }
}

Scenario scenario_from_json(const Json& node, const std::string& path) {
  if (node.is_string()) {
    const auto name = node.get<std::string>();
    auto s = find_builtin(name);
    if (!s) throw ConfigError(path, "unknown scenario name '" + name + "'");
    return *s;
  }
  expect_object(node, path);
  reject_unknown(node, path, {"name", "prior", "likelihood"});
  auto [prior, prior_name] = prior_from_json(require(node, path, "prior"), path + ".prior");
  auto [likelihood, lik_name] =
      likelihood_from_json(require(node, path, "likelihood"), path + ".likelihood");
  std::string name = node.contains("name") ? string(node["name"], path + ".name")
                                           : prior_name + "-" + lik_name;
  return with_domain_path(path, [&] {
    return make_scenario(std::move(name), std::move(prior), std::move(likelihood));
  });
}

Json scenario_to_json(const Scenario& s) {
  Json prior;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BetaPrior>) {
          prior["beta"] = {{"alpha", p.alpha}, {"beta", p.beta}};
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          prior["gamma"] = {{"shape", p.shape}, {"rate", p.rate}};
        } else if constexpr (std::is_same_v<T, DirichletPrior>) {
          prior["dirichlet"] = {{"alphas", p.alphas}};
        } else if constexpr (std::is_same_v<T, NormalPrior>) {
          prior["normal"] = {{"mean", p.mean}, {"variance", p.variance}};
        } else if constexpr (std::is_same_v<T, TruncatedNormalPrior>) {
          prior["truncated_normal"] = {
              {"mean", p.mean}, {"variance", p.variance}, {"lower", p.lower}, {"upper", p.upper}};
        } else {
          prior["transformed_beta_log_rate"] = {{"alpha", p.alpha}, {"beta", p.beta}};
        }
      },
      s.prior.variant());
  Json lik;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, BinomialLikelihood>) {
          lik["binomial"] = {{"n", l.trials}};
        } else if constexpr (std::is_same_v<T, ExponentialRateLikelihood>) {
          lik["exponential"] = {{"n", l.n}};
        } else if constexpr (std::is_same_v<T, PoissonLikelihood>) {
          lik["poisson"] = {{"n", l.n}};
        } else if constexpr (std::is_same_v<T, WeibullRateParamLikelihood>) {
          lik["weibull"] = {{"shape", l.shape}, {"n", l.n}};
        } else {
          lik["multinomial"] = {{"n", l.trials}};
        }
      },
      s.likelihood.variant());
  return Json{{"name", s.name}, {"prior", prior}, {"likelihood", lik}};
}

RunConfig config_from_json(const Json& doc) {
  const std::string root = "$";
  expect_object(doc, root);
  reject_unknown(doc, root,
                 {"scenarios", "M", "mcmc_dataset_subsample", "methods", "seed", "output_path",
                  "output_format", "dump_regression_data", "dump_directory", "spline", "mcmc"});
  RunConfig cfg;

  const Json& scenarios = require(doc, root, "scenarios");
  if (!scenarios.is_array()) throw ConfigError("$.scenarios", "expected an array");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    cfg.scenarios.push_back(
        scenario_from_json(scenarios[i], "$.scenarios[" + std::to_string(i) + "]"));
  }

  const Json& methods = require(doc, root, "methods");
  if (!methods.is_array()) throw ConfigError("$.methods", "expected an array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const std::string p = "$.methods[" + std::to_string(i) + "]";
    const auto m = parse_method(string(methods[i], p));
    if (!m) throw ConfigError(p, "expected one of regression, summary, mcmc");
    if (!cfg.wants(*m)) cfg.methods.push_back(*m);
  }

  if (doc.contains("M")) cfg.M = positive_integer(doc["M"], "$.M");
  if (doc.contains("mcmc_dataset_subsample")) {
    cfg.mcmc_dataset_subsample =
        positive_integer(doc["mcmc_dataset_subsample"], "$.mcmc_dataset_subsample");
  } else {
    cfg.mcmc_dataset_subsample = std::min(cfg.M, kDefaultMcmcDatasets);
  }
  if (doc.contains("seed")) {
    const Json& s = doc["seed"];
    if (!s.is_number_unsigned()) throw ConfigError("$.seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output_path")) cfg.output_path = string(doc["output_path"], "$.output_path");
  if (doc.contains("output_format")) {
    const auto f = string(doc["output_format"], "$.output_format");
    if (f == "json") {
      cfg.output_format = OutputFormat::kJson;
    } else if (f == "csv") {
      cfg.output_format = OutputFormat::kCsv;
    } else {
      throw ConfigError("$.output_format", "expected json or csv");
    }
  }
  if (doc.contains("dump_regression_data")) {
    cfg.dump_regression_data = boolean(doc["dump_regression_data"], "$.dump_regression_data");
  }
  if (doc.contains("dump_directory")) {
    cfg.dump_directory = string(doc["dump_directory"], "$.dump_directory");
  }

  if (doc.contains("spline")) {
    const Json& s = doc["spline"];
    const std::string p = "$.spline";
    expect_object(s, p);
    reject_unknown(s, p, {"n_interior_knots", "penalty_order", "lambda_grid"});
    if (s.contains("n_interior_knots")) {
      cfg.spline.n_interior_knots = small_int(s["n_interior_knots"], p + ".n_interior_knots");
    }
    if (s.contains("penalty_order")) {
      cfg.spline.penalty_order = small_int(s["penalty_order"], p + ".penalty_order");
    }
    if (s.contains("lambda_grid")) {
      cfg.spline.lambda_grid = lambda_grid_from_json(s["lambda_grid"], p + ".lambda_grid");
    }
  }

  if (doc.contains("mcmc")) {
    const Json& m = doc["mcmc"];
    const std::string p = "$.mcmc";
    expect_object(m, p);
    reject_unknown(m, p,
                   {"iterations", "burn_in", "initial_proposal_sd", "adapt_window",
                    "target_acceptance", "force_metropolis"});
    if (m.contains("iterations")) cfg.mcmc.iterations = small_int(m["iterations"], p + ".iterations");
    if (m.contains("burn_in")) cfg.mcmc.burn_in = small_int(m["burn_in"], p + ".burn_in");
    if (m.contains("initial_proposal_sd")) {
      cfg.mcmc.initial_proposal_sd = number(m["initial_proposal_sd"], p + ".initial_proposal_sd");
    }
    if (m.contains("adapt_window")) {
      cfg.mcmc.adapt_window = small_int(m["adapt_window"], p + ".adapt_window");
    }
    if (m.contains("target_acceptance")) {
      cfg.mcmc.target_acceptance = number(m["target_acceptance"], p + ".target_acceptance");
    }
    if (m.contains("force_metropolis")) {
      cfg.mcmc.force_metropolis = boolean(m["force_metropolis"], p + ".force_metropolis");
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig parse_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(doc);
}

Json config_to_json(const RunConfig& cfg) {
  Json scenarios = Json::array();
  for (const auto& s : cfg.scenarios) scenarios.push_back(scenario_to_json(s));
  Json methods = Json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
  return Json{
      {"scenarios", scenarios},
      {"M", cfg.M},
      {"mcmc_dataset_subsample", cfg.mcmc_dataset_subsample},
      {"methods", methods},
      {"seed", cfg.seed},
      {"output_path", cfg.output_path},
      {"output_format", std::string(to_string(cfg.output_format))},
      {"dump_regression_data", cfg.dump_regression_data},
      {"dump_directory", cfg.dump_directory},
      {"spline",
       {{"n_interior_knots", cfg.spline.n_interior_knots},
        {"penalty_order", cfg.spline.penalty_order},
        {"lambda_grid", cfg.spline.lambda_grid}}},
      {"mcmc",
       {{"iterations", cfg.mcmc.iterations},
        {"burn_in", cfg.mcmc.burn_in},
        {"initial_proposal_sd", cfg.mcmc.initial_proposal_sd},
        {"adapt_window", cfg.mcmc.adapt_window},
        {"target_acceptance", cfg.mcmc.target_acceptance},
        {"force_metropolis", cfg.mcmc.force_metropolis}}},
  };
}

}  // namespace essk
