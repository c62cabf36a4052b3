#include "hebo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hebo/errors.hpp"
#include "hebo/special_functions.hpp"

namespace hebo::bench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

double branin_fn(double x1, double x2) {
  const double b = 5.1 / (4.0 * M_PI * M_PI);
  const double c = 5.0 / M_PI;
  const double t = 1.0 / (8.0 * M_PI);
  const double u = x2 - b * x1 * x1 + c * x1 - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double hartmann6_fn(const Eigen::VectorXd& x) {
  static const double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - P[i][j];
      e += A[i][j] * d * d;
    }
    s -= alpha[i] * std::exp(-e);
  }
  return s;
}

double levy_fn(const Eigen::VectorXd& x) {
  const auto d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double s0 = std::sin(M_PI * w(0));
  double s = s0 * s0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double sw = std::sin(M_PI * wi + 1.0);
    s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sw * sw);
  }
  const double wd = w(d - 1);
  const double s2 = std::sin(2.0 * M_PI * wd);
  s += (wd - 1.0) * (wd - 1.0) * (1.0 + s2 * s2);
  return s;
}

double nonstat1d_fn(double x) {
  const double z = x - 0.9;
  return std::sin(30.0 * z * z * z * z) * std::cos(2.0 * z) + 0.5 * z;
}

DesignSpace real_box(const std::vector<std::pair<double, double>>& bounds) {
  std::vector<Parameter> params;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    params.push_back({"x" + std::to_string(i + 1), ParamKind::kReal, bounds[i].first,
                      bounds[i].second, ParamScale::kLinear});
  }
  return DesignSpace(std::move(params));
}

Eigen::VectorXd values_of(const DesignSpace& space, const Configuration& c) {
  Eigen::VectorXd v(space.dim());
  for (int i = 0; i < space.dim(); ++i) v[i] = c.at(space.parameter(i).name);
  return v;
}

// Distance-based noise profile, measured in the encoded unit cube so the
// scale is comparable across functions.
std::function<double(const Configuration&, Rng&)> with_hetero_noise(
    const DesignSpace& space, std::function<double(const Configuration&)> base,
    Eigen::VectorXd u_star) {
  return [space, base = std::move(base), u_star = std::move(u_star)](const Configuration& c,
                                                                     Rng& rng) {
    const double sigma = 0.05 + 0.5 * (space.encode(c) - u_star).norm();
    return base(c) + sigma * rng.normal();
  };
}

std::vector<BlackBox> make_builtins() {
  std::vector<BlackBox> fns;
  const double branin_opt = 0.3978873577297384;

  {
    BlackBox bb{"branin", real_box({{-5, 10}, {0, 15}}), nullptr, branin_opt, "none"};
    bb.eval = [](const Configuration& c, Rng&) { return branin_fn(c.at("x1"), c.at("x2")); };
    fns.push_back(std::move(bb));
  }
  {
    BlackBox bb{"branin-hetero", real_box({{-5, 10}, {0, 15}}), nullptr, branin_opt,
                "heteroscedastic(0.05+0.5*dist)"};
    Configuration star{{"x1", M_PI}, {"x2", 2.275}};
    bb.eval = with_hetero_noise(
        bb.space, [](const Configuration& c) { return branin_fn(c.at("x1"), c.at("x2")); },
        bb.space.encode(star));
    fns.push_back(std::move(bb));
  }
  {
    // Multiplicative noise testbed for the output-transform diagnostics:
    // the noise level scales with the objective value.
    BlackBox bb{"branin-multnoise", real_box({{-5, 10}, {0, 15}}), nullptr, branin_opt,
                "heteroscedastic(multiplicative exp(0.3*eps))"};
    bb.eval = [](const Configuration& c, Rng& rng) {
      return branin_fn(c.at("x1"), c.at("x2")) * std::exp(0.3 * rng.normal());
    };
    fns.push_back(std::move(bb));
  }
  {
    BlackBox bb{"hartmann6",
                real_box({{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}),
                nullptr,
                -3.3223680114155156,
                "none"};
    bb.eval = [space = bb.space](const Configuration& c, Rng&) {
      return hartmann6_fn(values_of(space, c));
    };
    fns.push_back(std::move(bb));
  }
  {
    BlackBox bb{"hartmann6-hetero",
                real_box({{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}),
                nullptr,
                -3.3223680114155156,
                "heteroscedastic(0.05+0.5*dist)"};
    Eigen::VectorXd star(6);
    star << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
    bb.eval = with_hetero_noise(
        bb.space,
        [space = bb.space](const Configuration& c) { return hartmann6_fn(values_of(space, c)); },
        star);
    fns.push_back(std::move(bb));
  }
  {
    std::vector<std::pair<double, double>> bounds(10, {-10.0, 10.0});
    BlackBox bb{"levy10", real_box(bounds), nullptr, 0.0, "none"};
    bb.eval = [space = bb.space](const Configuration& c, Rng&) {
      return levy_fn(values_of(space, c));
    };
    fns.push_back(std::move(bb));
  }
  {
    std::vector<std::pair<double, double>> bounds(10, {-10.0, 10.0});
    BlackBox bb{"levy10-hetero", real_box(bounds), nullptr, 0.0,
                "heteroscedastic(0.05+0.5*dist)"};
    bb.eval = with_hetero_noise(
        bb.space, [space = bb.space](const Configuration& c) { return levy_fn(values_of(space, c)); },
        Eigen::VectorXd::Constant(10, 0.55));  // encoded all-ones optimum
    fns.push_back(std::move(bb));
  }
  {
    // Rapid oscillation near 0, smooth near 0.9; minimum located by grid
    // refinement at x = 0.2755018, f = -0.6249989007.
    BlackBox bb{"nonstat1d", real_box({{0, 1}}), nullptr, -0.6249989007181287, "none"};
    bb.eval = [](const Configuration& c, Rng&) { return nonstat1d_fn(c.at("x1")); };
    fns.push_back(std::move(bb));
  }
  {
    // Branin with x1 snapped to 20 levels across [-5, 10]; level-grid
    // minimum located by per-level quadratic minimization over x2.
    std::vector<Parameter> params{{"x1", ParamKind::kInteger, 0, 19, ParamScale::kLinear},
                                  {"x2", ParamKind::kReal, 0, 15, ParamScale::kLinear}};
    BlackBox bb{"branin-int20", DesignSpace(std::move(params)), nullptr, 0.6174321713389016,
                "none"};
    bb.eval = [](const Configuration& c, Rng&) {
      const double x1 = -5.0 + 15.0 * c.at("x1") / 19.0;
      return branin_fn(x1, c.at("x2"));
    };
    fns.push_back(std::move(bb));
  }
  return fns;
}

}  // namespace

const std::vector<BlackBox>& builtin_functions() {
  static const std::vector<BlackBox> fns = make_builtins();
  return fns;
}

const BlackBox& find_function(const std::string& name) {
  for (const auto& bb : builtin_functions())
    if (bb.name == name) return bb;
  throw ValidationError("unknown black-box function '" + name + "'");
}

double normalized_score(double loss, double loss_star, double loss_rand) {
  if (loss_rand == loss_star)
    throw ValidationError("normalized_score: undefined when L_rand equals L*");
  return 100.0 * (loss - loss_star) / (loss_rand - loss_star);
}

// ---------------------------------------------------------------------------
// Plan parsing
// ---------------------------------------------------------------------------

Plan parse_plan(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan: invalid JSON: ") + e.what());
  }
  Plan plan;
  try {
    plan.functions = j.at("functions").get<std::vector<std::string>>();
    for (const auto& js : j.at("solvers")) {
      SolverSpec sv;
      sv.name = js.at("name").get<std::string>();
      sv.label = js.value("label", sv.name);
      if (sv.name != "hebo" && sv.name != "random")
        throw ParseError("plan: unknown solver '" + sv.name + "'");
      if (js.contains("config")) {
        const auto& c = js["config"];
        sv.config.n_init = c.value("n_init", sv.config.n_init);
        sv.config.sigma_n = c.value("sigma_n", sv.config.sigma_n);
        sv.config.beta = c.value("beta", sv.config.beta);
        sv.config.enable_input_warp = c.value("enable_input_warp", sv.config.enable_input_warp);
        sv.config.enable_output_transform =
            c.value("enable_output_transform", sv.config.enable_output_transform);
        sv.config.enable_robust = c.value("enable_robust", sv.config.enable_robust);
        sv.config.enable_moo_ensemble =
            c.value("enable_moo_ensemble", sv.config.enable_moo_ensemble);
        if (c.contains("moo")) {
          const auto& m = c["moo"];
          sv.config.moo.pop_size = m.value("pop_size", sv.config.moo.pop_size);
          sv.config.moo.generations = m.value("generations", sv.config.moo.generations);
          sv.config.moo.crossover_prob = m.value("crossover_prob", sv.config.moo.crossover_prob);
          sv.config.moo.mutation_prob = m.value("mutation_prob", sv.config.moo.mutation_prob);
          sv.config.moo.sbx_eta = m.value("sbx_eta", sv.config.moo.sbx_eta);
          sv.config.moo.pm_eta = m.value("pm_eta", sv.config.moo.pm_eta);
        }
      }
      plan.solvers.push_back(std::move(sv));
    }
    plan.iterations = j.value("iterations", plan.iterations);
    plan.batch = j.value("batch", plan.batch);
    plan.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    plan.threads = j.value("threads", plan.threads);
    plan.record_timing = j.value("record_timing", plan.record_timing);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  if (plan.functions.empty() || plan.solvers.empty() || plan.seeds.empty())
    throw ParseError("plan: functions, solvers and seeds must be non-empty");
  if (plan.iterations < 0 || plan.batch < 1) throw ParseError("plan: bad budget");
  for (const auto& f : plan.functions) find_function(f);  // fail early
  return plan;
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

namespace {

const char* kCsvHeader = "solver,function,seed,iteration,batch_index,config_json,loss,best_so_far,wall_ms";

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    const std::string cfg = nlohmann::json(r.config).dump();
    out += r.solver + ',' + r.function + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.iteration) + ',' + std::to_string(r.batch_index) + ',' +
           csv_quote(cfg) + ',' + fmt_double(r.loss) + ',' + fmt_double(r.best_so_far) + ',' +
           std::to_string(r.wall_ms) + '\n';
  }
  return out;
}

std::vector<RunRecord> records_from_csv(const std::string& csv_text) {
  // Field splitter honoring double-quoted fields with "" escapes.
  auto split_line = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(std::move(cur));
    return fields;
  };

  std::vector<RunRecord> records;
  std::istringstream in(csv_text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != kCsvHeader) throw ParseError("results csv: unexpected header");
      continue;
    }
    const auto f = split_line(line);
    if (f.size() != 9) throw ParseError("results csv: expected 9 fields, got row '" + line + "'");
    RunRecord r;
    r.solver = f[0];
    r.function = f[1];
    try {
      r.seed = std::stoull(f[2]);
      r.iteration = std::stoi(f[3]);
      r.batch_index = std::stoi(f[4]);
      r.config = nlohmann::json::parse(f[5]).get<Configuration>();
      r.loss = std::strtod(f[6].c_str(), nullptr);
      r.best_so_far = std::strtod(f[7].c_str(), nullptr);
      r.wall_ms = std::stoll(f[8]);
    } catch (const std::exception& e) {
      throw ParseError("results csv: bad row '" + line + "': " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

namespace {

std::vector<RunRecord> run_cell(const SolverSpec& sv, const BlackBox& bb, std::uint64_t seed,
                                const Plan& plan) {
  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(plan.iterations * plan.batch));
  Rng noise_rng(derive_seed(seed, 0xb1ac'b0c5ULL, fnv1a(bb.name)));
  double best = kInf;

  const bool is_random = sv.name == "random";
  std::optional<HeboOptimizer> opt;
  std::optional<Rng> random_rng;
  if (is_random) {
    random_rng.emplace(derive_seed(seed, 0x9a2d'0a11ULL, fnv1a(bb.name)));
  } else {
    HeboConfig cfg = sv.config;
    cfg.seed = seed;
    opt.emplace(bb.space, cfg);
  }

  using clock = std::chrono::steady_clock;
  for (int iter = 0; iter < plan.iterations; ++iter) {
    const auto t0 = clock::now();
    std::vector<Configuration> batch =
        is_random ? bb.space.sample_uniform(plan.batch, *random_rng) : opt->suggest(plan.batch).configs;

    std::vector<Configuration> observed;
    std::vector<double> observed_values;
    std::vector<double> losses(batch.size(), kNan);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      try {
        losses[b] = bb.eval(batch[b], noise_rng);
      } catch (const std::exception&) {
        continue;  // failure row; keep the loss as NaN
      }
      observed.push_back(batch[b]);
      observed_values.push_back(-losses[b]);  // optimizer maximizes
    }
    if (!is_random && !observed.empty()) opt->observe(observed, observed_values);
    const auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();

    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (std::isfinite(losses[b])) best = std::min(best, losses[b]);
      RunRecord r;
      r.solver = sv.label;
      r.function = bb.name;
      r.seed = seed;
      r.iteration = iter;
      r.batch_index = static_cast<int>(b);
      r.config = batch[b];
      r.loss = losses[b];
      r.best_so_far = best;
      r.wall_ms = plan.record_timing ? wall : 0;
      records.push_back(std::move(r));
    }
  }
  return records;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return kNan;
  std::sort(v.begin(), v.end());
  const double rank = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = rank - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

ExperimentResult run_experiment(const Plan& plan) {
  struct Cell {
    const SolverSpec* solver;
    const BlackBox* function;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& sv : plan.solvers)
    for (const auto& fname : plan.functions)
      for (std::uint64_t seed : plan.seeds) cells.push_back({&sv, &find_function(fname), seed});

  std::vector<std::vector<RunRecord>> per_cell(cells.size());
  std::atomic<std::size_t> next{0};
  const int n_threads = std::max(
      1, plan.threads > 0 ? plan.threads : static_cast<int>(std::thread::hardware_concurrency()));
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      per_cell[i] = run_cell(*cells[i].solver, *cells[i].function, cells[i].seed, plan);
    }
  };
  if (n_threads == 1 || cells.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  for (auto& block : per_cell)
    for (auto& r : block) result.records.push_back(std::move(r));
  result.summary_json = summarize_records(result.records, "random");
  return result;
}

std::string summarize_records(const std::vector<RunRecord>& records, const std::string& baseline) {
  // Final best loss per (function, solver, seed): value at the largest
  // (iteration, batch_index).
  struct Final {
    int iteration = -1;
    int batch = -1;
    double best = kNan;
  };
  std::map<std::string, std::map<std::string, std::map<std::uint64_t, Final>>> finals;
  std::map<std::string, double> global_best;
  for (const auto& r : records) {
    auto& f = finals[r.function][r.solver][r.seed];
    if (r.iteration > f.iteration || (r.iteration == f.iteration && r.batch_index > f.batch)) {
      f.iteration = r.iteration;
      f.batch = r.batch_index;
      f.best = r.best_so_far;
    }
    if (std::isfinite(r.loss)) {
      auto it = global_best.find(r.function);
      if (it == global_best.end()) global_best[r.function] = r.loss;
      else it->second = std::min(it->second, r.loss);
    }
  }

  nlohmann::json out;
  out["baseline"] = baseline;
  nlohmann::json jfuncs = nlohmann::json::object();
  std::map<std::string, std::vector<double>> pooled;       // solver -> all scores
  std::map<std::string, std::vector<double>> fn_means;     // solver -> per-function means

  for (const auto& [fname, by_solver] : finals) {
    double loss_star = 0.0;
    bool have_star = false;
    for (const auto& bb : builtin_functions()) {
      if (bb.name == fname && bb.optimum_loss) {
        loss_star = *bb.optimum_loss;
        have_star = true;
        break;
      }
    }
    if (!have_star) {
      auto it = global_best.find(fname);
      if (it == global_best.end()) continue;
      loss_star = it->second;
    }

    const auto base_it = by_solver.find(baseline);
    if (base_it == by_solver.end())
      throw ValidationError("summarize: baseline solver '" + baseline +
                            "' has no runs for function '" + fname + "'");
    double loss_rand = 0.0;
    int nb = 0;
    for (const auto& [seed, fin] : base_it->second) {
      if (std::isfinite(fin.best)) {
        loss_rand += fin.best;
        ++nb;
      }
    }
    if (nb == 0) throw ValidationError("summarize: baseline has no finite results on " + fname);
    loss_rand /= nb;

    nlohmann::json jf;
    jf["loss_star"] = loss_star;
    jf["loss_rand"] = loss_rand;
    nlohmann::json jsolvers = nlohmann::json::object();
    for (const auto& [solver, by_seed] : by_solver) {
      std::vector<double> scores;
      for (const auto& [seed, fin] : by_seed)
        if (std::isfinite(fin.best)) scores.push_back(normalized_score(fin.best, loss_star, loss_rand));
      if (scores.empty()) continue;
      const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                          static_cast<double>(scores.size());
      double var = 0.0;
      for (double s : scores) var += (s - mean) * (s - mean);
      var = scores.size() > 1 ? var / static_cast<double>(scores.size() - 1) : 0.0;
      nlohmann::json js;
      js["n_seeds"] = scores.size();
      js["mean"] = mean;
      js["std"] = std::sqrt(var);
      js["median"] = percentile(scores, 50.0);
      js["p40"] = percentile(scores, 40.0);
      js["p30"] = percentile(scores, 30.0);
      js["p20"] = percentile(scores, 20.0);
      js["p5"] = percentile(scores, 5.0);
      js["improvement_mean"] = 100.0 - mean;
      jsolvers[solver] = std::move(js);
      auto& pool = pooled[solver];
      pool.insert(pool.end(), scores.begin(), scores.end());
      fn_means[solver].push_back(mean);
    }
    jf["solvers"] = std::move(jsolvers);
    jfuncs[fname] = std::move(jf);
  }
  out["functions"] = std::move(jfuncs);

  nlohmann::json jagg = nlohmann::json::object();
  for (const auto& [solver, means] : fn_means) {
    const double mean_of_means =
        std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
    nlohmann::json ja;
    ja["mean"] = mean_of_means;
    ja["n_functions"] = means.size();
    const auto& pool = pooled[solver];
    ja["pooled_mean"] = std::accumulate(pool.begin(), pool.end(), 0.0) /
                        static_cast<double>(pool.size());
    ja["pooled_median"] = percentile(pool, 50.0);
    ja["pooled_p40"] = percentile(pool, 40.0);
    ja["pooled_p30"] = percentile(pool, 30.0);
    ja["pooled_p20"] = percentile(pool, 20.0);
    ja["pooled_p5"] = percentile(pool, 5.0);
    jagg[solver] = std::move(ja);
  }
  out["aggregate"] = std::move(jagg);
  return out.dump(2);
}

// ---------------------------------------------------------------------------
// GP-fit comparison (Table-"stat" analog)
// ---------------------------------------------------------------------------

namespace {

struct Sampled {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Sampled sample_dataset(const BlackBox& bb, int n, Rng& rng) {
  Sampled s;
  s.X.resize(n, bb.space.dim());
  s.y.resize(n);
  const auto configs = bb.space.sample_uniform(n, rng);
  for (int i = 0; i < n; ++i) {
    s.X.row(i) = bb.space.encode(configs[static_cast<std::size_t>(i)]).transpose();
    s.y[i] = bb.eval(configs[static_cast<std::size_t>(i)], rng);
  }
  return s;
}

// Held-out log predictive density of raw labels under the fitted model
// (change of variables through the output transform; observation noise
// included in the predictive variance).
Eigen::VectorXd heldout_log_density(const FittedGP& model, const Sampled& test) {
  const Prediction p = predict(model, test.X);
  const double nv = model.kernel.noise_variance();
  Eigen::VectorXd ld(test.y.size());
  for (Eigen::Index i = 0; i < test.y.size(); ++i) {
    const double var = p.var[i] + nv;
    const double z = model.out_transform(test.y[i]);
    const double resid = z - p.mu[i];
    ld[i] = -0.5 * std::log(2.0 * M_PI * var) - 0.5 * resid * resid / var +
            model.out_transform.log_jacobian(test.y[i]);
  }
  return ld;
}

}  // namespace

GpFitComparison gp_fit_comparison(const BlackBox& bb, int n_seeds, GpFitToggle toggle, int n_train,
                                  int n_test, std::uint64_t seed0) {
  if (n_seeds < 2) throw ValidationError("gp_fit_comparison: need at least 2 seeds");
  GpFitComparison cmp;
  std::vector<double> on_ok, off_ok;
  for (int s = 0; s < n_seeds; ++s) {
    Rng rng(derive_seed(seed0, 0x9f17'd47aULL, static_cast<std::uint64_t>(s), fnv1a(bb.name)));
    const Sampled train = sample_dataset(bb, n_train, rng);
    const Sampled test = sample_dataset(bb, n_test, rng);

    FitConfig base;
    base.enable_input_warp = false;
    base.enable_output_transform = false;
    base.seed = derive_seed(seed0, 0xba5eULL, static_cast<std::uint64_t>(s));
    FitConfig variant = base;
    if (toggle == GpFitToggle::kInputWarp) variant.enable_input_warp = true;
    else variant.enable_output_transform = true;

    Eigen::VectorXd ld_on, ld_off;
    try {
      ld_on = heldout_log_density(fit(train.X, train.y, variant), test);
      ld_off = heldout_log_density(fit(train.X, train.y, base), test);
    } catch (const FitError&) {
      continue;  // excluded pairwise
    }
    const double mean_on = ld_on.mean();
    const double mean_off = ld_off.mean();
    cmp.logdens_on.push_back(mean_on);
    cmp.logdens_off.push_back(mean_off);
    on_ok.push_back(mean_on);
    off_ok.push_back(mean_off);

    double p_better = 0.5;
    try {
      p_better = paired_t_test(ld_on, ld_off, Alternative::kGreater).p_value;
    } catch (const FitError&) {
    }
    cmp.seed_p_better.push_back(p_better);
    if (mean_on > mean_off) {
      ++cmp.better;
      if (p_better < 0.025) ++cmp.sig_better;
    } else if (mean_on < mean_off) {
      ++cmp.worse;
      if (1.0 - p_better < 0.025) ++cmp.sig_worse;
    }
  }
  if (on_ok.size() >= 2) {
    Eigen::VectorXd von = Eigen::Map<Eigen::VectorXd>(on_ok.data(), static_cast<Eigen::Index>(on_ok.size()));
    Eigen::VectorXd voff =
        Eigen::Map<Eigen::VectorXd>(off_ok.data(), static_cast<Eigen::Index>(off_ok.size()));
    try {
      cmp.ttest = paired_t_test(von, voff, Alternative::kTwoSided);
    } catch (const FitError&) {
    }
  }
  return cmp;
}

std::string gp_fit_comparison_to_json(const GpFitComparison& cmp) {
  nlohmann::json j;
  j["n_seeds_used"] = cmp.logdens_on.size();
  j["better"] = cmp.better;
  j["sig_better"] = cmp.sig_better;
  j["worse"] = cmp.worse;
  j["sig_worse"] = cmp.sig_worse;
  j["logdens_on"] = cmp.logdens_on;
  j["logdens_off"] = cmp.logdens_off;
  j["seed_p_better"] = cmp.seed_p_better;
  j["ttest"] = {{"statistic", cmp.ttest.statistic},
                {"p_value", cmp.ttest.p_value},
                {"dof", cmp.ttest.dof}};
  return j.dump(2);
}

}  // namespace hebo::bench
