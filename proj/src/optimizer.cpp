#include "hebo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "hebo/acquisition.hpp"
#include "hebo/errors.hpp"

namespace hebo {

namespace {

constexpr int kSnapshotVersion = 1;

nlohmann::json config_to_json(const HeboConfig& c) {
  return nlohmann::json{{"n_init", c.n_init},
                        {"sigma_n", c.sigma_n},
                        {"beta", c.beta},
                        {"enable_input_warp", c.enable_input_warp},
                        {"enable_output_transform", c.enable_output_transform},
                        {"enable_robust", c.enable_robust},
                        {"enable_moo_ensemble", c.enable_moo_ensemble},
                        {"seed", c.seed},
                        {"moo",
                         {{"pop_size", c.moo.pop_size},
                          {"generations", c.moo.generations},
                          {"crossover_prob", c.moo.crossover_prob},
                          {"mutation_prob", c.moo.mutation_prob},
                          {"sbx_eta", c.moo.sbx_eta},
                          {"pm_eta", c.moo.pm_eta}}}};
}

HeboConfig config_from_json(const nlohmann::json& j) {
  HeboConfig c;
  c.n_init = j.value("n_init", c.n_init);
  c.sigma_n = j.value("sigma_n", c.sigma_n);
  c.beta = j.value("beta", c.beta);
  c.enable_input_warp = j.value("enable_input_warp", c.enable_input_warp);
  c.enable_output_transform = j.value("enable_output_transform", c.enable_output_transform);
  c.enable_robust = j.value("enable_robust", c.enable_robust);
  c.enable_moo_ensemble = j.value("enable_moo_ensemble", c.enable_moo_ensemble);
  c.seed = j.value("seed", c.seed);
  if (j.contains("moo")) {
    const auto& m = j["moo"];
    c.moo.pop_size = m.value("pop_size", c.moo.pop_size);
    c.moo.generations = m.value("generations", c.moo.generations);
    c.moo.crossover_prob = m.value("crossover_prob", c.moo.crossover_prob);
    c.moo.mutation_prob = m.value("mutation_prob", c.moo.mutation_prob);
    c.moo.sbx_eta = m.value("sbx_eta", c.moo.sbx_eta);
    c.moo.pm_eta = m.value("pm_eta", c.moo.pm_eta);
  }
  return c;
}

}  // namespace

HeboOptimizer::HeboOptimizer(DesignSpace space, HeboConfig config)
    : space_(std::move(space)), config_(std::move(config)) {
  if (config_.n_init != 0 && config_.n_init < 2)
    throw ValidationError("hebo: n_init must be >= 2 (or 0 for automatic)");
  if (config_.sigma_n < 0.0 || config_.beta < 0.0)
    throw ValidationError("hebo: sigma_n and beta must be >= 0");
  history_X_.resize(0, space_.dim());
}

int HeboOptimizer::effective_n_init() const {
  return config_.n_init > 0 ? config_.n_init : std::max(4, 2 * space_.dim());
}

void HeboOptimizer::fit_model() {
  if (model_) return;  // cached model is always trained on the full history
  FitConfig fc;
  fc.enable_input_warp = config_.enable_input_warp;
  fc.enable_output_transform = config_.enable_output_transform;
  fc.seed = derive_seed(config_.seed, 0xf17'0000ULL, static_cast<std::uint64_t>(iteration_));
  model_ = fit(history_X_, history_y_, fc);
}

SuggestResult HeboOptimizer::suggest(int q) {
  if (q < 1) throw ValidationError("suggest: q must be >= 1");
  Rng rng(derive_seed(config_.seed, 0x5a99e57ULL, static_cast<std::uint64_t>(iteration_)));

  SuggestResult out;
  if (history_y_.size() < effective_n_init()) {
    out.configs = space_.sample_uniform(q, rng);
    return out;
  }

  try {
    fit_model();
  } catch (const FitError&) {
    model_.reset();
    out.configs = space_.sample_uniform(q, rng);
    out.used_fallback = true;
    return out;
  }

  const FittedGP& gp = *model_;
  const double incumbent = gp.t.maxCoeff();
  const double sigma_n = config_.enable_robust ? config_.sigma_n : 0.0;
  const double beta = config_.beta;
  const int n_obj = config_.enable_moo_ensemble ? 3 : 1;

  ObjectiveFn objective = [&](const Eigen::VectorXd& genome, Rng& eval_rng) {
    const Prediction p = predict(gp, genome.transpose());
    const double mu = p.mu[0];
    const double sd = std::sqrt(std::max(p.var[0], 0.0));
    Eigen::VectorXd obj(n_obj);
    obj[0] = robustify(ei(mu, sd, incumbent), sigma_n, eval_rng);
    if (n_obj == 3) {
      obj[1] = robustify(pi(mu, sd, incumbent), sigma_n, eval_rng);
      obj[2] = robustify(ucb(mu, sd, beta), sigma_n, eval_rng);
    }
    return obj;
  };

  MooConfig mc = config_.moo;
  mc.seed = derive_seed(config_.seed, 0x300'0000ULL, static_cast<std::uint64_t>(iteration_));
  std::vector<Individual> pop = evolve(objective, space_.dim(), n_obj, mc);

  // Candidates ordered by (front, crowding desc, stable index).
  std::vector<int> order(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ia = pop[static_cast<std::size_t>(a)];
    const auto& ib = pop[static_cast<std::size_t>(b)];
    if (ia.rank != ib.rank) return ia.rank < ib.rank;
    return ia.crowding > ib.crowding;
  });

  std::set<std::vector<double>> seen;  // decoded values, space order
  auto key_of = [&](const Configuration& c) {
    std::vector<double> key;
    key.reserve(static_cast<std::size_t>(space_.dim()));
    for (const auto& p : space_.parameters()) key.push_back(c.at(p.name));
    return key;
  };
  for (int idx : order) {
    if (static_cast<int>(out.configs.size()) == q) break;
    Configuration c = space_.decode(pop[static_cast<std::size_t>(idx)].genome);
    if (seen.insert(key_of(c)).second) out.configs.push_back(std::move(c));
  }
  // Tiny populations or heavy duplication: pad with fresh uniform draws.
  int guard = 100 * q;
  while (static_cast<int>(out.configs.size()) < q && guard-- > 0) {
    Configuration c = space_.sample_uniform(1, rng).front();
    if (seen.insert(key_of(c)).second) out.configs.push_back(std::move(c));
  }
  while (static_cast<int>(out.configs.size()) < q) out.configs.push_back(out.configs.front());
  return out;
}

void HeboOptimizer::observe(const std::vector<Configuration>& configs,
                            const std::vector<double>& values) {
  if (configs.size() != values.size()) throw ValidationError("observe: length mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("observe: non-finite objective value");
  for (const auto& c : configs) space_.validate(c);

  const Eigen::Index n0 = history_y_.size();
  const auto add = static_cast<Eigen::Index>(configs.size());
  history_X_.conservativeResize(n0 + add, space_.dim());
  history_y_.conservativeResize(n0 + add);
  for (Eigen::Index i = 0; i < add; ++i) {
    const auto& c = configs[static_cast<std::size_t>(i)];
    history_X_.row(n0 + i) = space_.encode(c).transpose();
    history_y_[n0 + i] = values[static_cast<std::size_t>(i)];
    history_configs_.push_back(c);
  }
  model_.reset();
  ++iteration_;
}

std::pair<Configuration, double> HeboOptimizer::best() const {
  if (history_y_.size() == 0) throw ValidationError("best: empty history");
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < history_y_.size(); ++i)
    if (history_y_[i] > history_y_[arg]) arg = i;
  return {history_configs_[static_cast<std::size_t>(arg)], history_y_[arg]};
}

std::string HeboOptimizer::serialize() const {
  nlohmann::json j;
  j["version"] = kSnapshotVersion;
  j["iteration"] = iteration_;
  j["config"] = config_to_json(config_);
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : space_.parameters()) {
    params.push_back({{"name", p.name},
                      {"kind", p.kind == ParamKind::kInteger ? "integer" : "real"},
                      {"lower", p.lower},
                      {"upper", p.upper},
                      {"scale", p.scale == ParamScale::kLog
                                    ? "log"
                                    : (p.scale == ParamScale::kLogit ? "logit" : "linear")}});
  }
  j["space"] = {{"params", params}};
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t i = 0; i < history_configs_.size(); ++i) {
    hist.push_back({{"config", history_configs_[i]}, {"value", history_y_[static_cast<Eigen::Index>(i)]}});
  }
  j["history"] = hist;
  return j.dump();
}

HeboOptimizer HeboOptimizer::deserialize(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("snapshot: invalid JSON: ") + e.what());
  }
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw ParseError("snapshot: missing version");
  const int version = j["version"].get<int>();
  if (version < 1 || version > kSnapshotVersion)
    throw ParseError("snapshot: unsupported version " + std::to_string(version));

  DesignSpace space = parse_space(j.at("space").dump());
  HeboOptimizer opt(std::move(space), config_from_json(j.at("config")));
  for (const auto& h : j.at("history")) {
    Configuration c = h.at("config").get<Configuration>();
    opt.space_.validate(c);
    const double v = h.at("value").get<double>();
    const Eigen::Index n0 = opt.history_y_.size();
    opt.history_X_.conservativeResize(n0 + 1, opt.space_.dim());
    opt.history_y_.conservativeResize(n0 + 1);
    opt.history_X_.row(n0) = opt.space_.encode(c).transpose();
    opt.history_y_[n0] = v;
    opt.history_configs_.push_back(std::move(c));
  }
  opt.iteration_ = j.at("iteration").get<int>();
  return opt;
}

}  // namespace hebo
