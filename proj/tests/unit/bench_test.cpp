#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "hebo/bench.hpp"
#include "hebo/detail/scalar_min.hpp"
#include "hebo/errors.hpp"

using namespace hebo;
using namespace hebo::bench;

TEST_SUITE("bench") {

TEST_CASE("normalized score") {
  CHECK(normalized_score(0.1, 0.1, 0.9) == 0.0);
  CHECK(normalized_score(0.9, 0.1, 0.9) == 100.0);
  CHECK(normalized_score(0.5, 0.1, 0.9) == doctest::Approx(50.0));
  CHECK_THROWS_AS(normalized_score(0.5, 0.3, 0.3), ValidationError);
  // affine equivariance: y -> a y + b leaves the score unchanged
  const double s0 = normalized_score(0.4, 0.1, 0.8);
  CHECK(normalized_score(3.0 * 0.4 + 5.0, 3.0 * 0.1 + 5.0, 3.0 * 0.8 + 5.0) ==
        doctest::Approx(s0).epsilon(1e-12));
}

TEST_CASE("builtin optima: branin, levy, hartmann6") {
  Rng rng(1);
  const auto& branin = find_function("branin");
  CHECK(branin.eval(Configuration{{"x1", M_PI}, {"x2", 2.275}}, rng) ==
        doctest::Approx(0.397887).epsilon(1e-4));
  // local refinement around the known optimum cannot do much better
  const double refined = hebo::detail::minimize_scalar_bounded(
      [&](double x2) { return branin.eval(Configuration{{"x1", M_PI}, {"x2", x2}}, rng); }, 2.0,
      2.5, 1e-10);
  CHECK(branin.eval(Configuration{{"x1", M_PI}, {"x2", refined}}, rng) >=
        *branin.optimum_loss - 1e-6);

  const auto& levy = find_function("levy10");
  Configuration ones;
  for (int i = 1; i <= 10; ++i) ones["x" + std::to_string(i)] = 1.0;
  CHECK(levy.eval(ones, rng) == doctest::Approx(0.0).epsilon(1e-12));

  const auto& h6 = find_function("hartmann6");
  Configuration xstar{{"x1", 0.20169}, {"x2", 0.150011}, {"x3", 0.476874},
                      {"x4", 0.275332}, {"x5", 0.311652}, {"x6", 0.6573}};
  CHECK(h6.eval(xstar, rng) == doctest::Approx(-3.32237).epsilon(1e-5));

  CHECK_THROWS_AS(find_function("not-a-function"), ValidationError);
}

TEST_CASE("nonstat1d optimum matches the grid-refinement oracle") {
  const auto& f = find_function("nonstat1d");
  Rng rng(2);
  // dense grid then local refinement
  double best_x = 0.0, best_v = 1e18;
  for (int i = 0; i <= 20000; ++i) {
    const double x = i / 20000.0;
    const double v = f.eval(Configuration{{"x1", x}}, rng);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double xr = hebo::detail::minimize_scalar_bounded(
      [&](double x) { return f.eval(Configuration{{"x1", x}}, rng); },
      std::max(0.0, best_x - 1e-3), std::min(1.0, best_x + 1e-3), 1e-12);
  const double vr = f.eval(Configuration{{"x1", xr}}, rng);
  CHECK(*f.optimum_loss == doctest::Approx(vr).epsilon(1e-9));
}

TEST_CASE("branin-int20 optimum matches the per-level oracle") {
  const auto& f = find_function("branin-int20");
  Rng rng(3);
  double best = 1e18;
  for (int level = 0; level < 20; ++level) {
    const double x2 = hebo::detail::minimize_scalar_bounded(
        [&](double v) {
          return f.eval(Configuration{{"x1", static_cast<double>(level)}, {"x2", v}}, rng);
        },
        0.0, 15.0, 1e-10);
    best = std::min(best,
                    f.eval(Configuration{{"x1", static_cast<double>(level)}, {"x2", x2}}, rng));
  }
  CHECK(*f.optimum_loss == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("heteroscedastic variants: noise level at and away from the optimum") {
  const auto& f = find_function("branin-hetero");
  Rng rng(11);
  Configuration star{{"x1", M_PI}, {"x2", 2.275}};
  const int n = 1000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = f.eval(star, rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(sd == doctest::Approx(0.05).epsilon(0.10));  // sigma(x*) = 0.05
  CHECK(mean == doctest::Approx(*f.optimum_loss).epsilon(0.02));

  // far corner has larger noise
  Configuration corner{{"x1", -5.0}, {"x2", 15.0}};
  s = s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = f.eval(corner, rng);
    s += v;
    s2 += v * v;
  }
  const double sd_corner = std::sqrt(s2 / n - (s / n) * (s / n));
  CHECK(sd_corner > 3.0 * sd);
}

TEST_CASE("csv rows round-trip losslessly") {
  std::vector<RunRecord> records;
  RunRecord r;
  r.solver = "hebo";
  r.function = "branin";
  r.seed = 17;
  r.iteration = 3;
  r.batch_index = 5;
  r.config = Configuration{{"x1", 0.1234567890123456789}, {"x2", -7.25}};
  r.loss = 1.0 / 3.0;
  r.best_so_far = 0.30000000000000004;
  r.wall_ms = 12;
  records.push_back(r);
  r.loss = std::numeric_limits<double>::quiet_NaN();  // failure row
  r.batch_index = 6;
  records.push_back(r);

  const std::string csv = records_to_csv(records);
  const auto back = records_from_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].solver == "hebo");
  CHECK(back[0].seed == 17);
  CHECK(back[0].config == records[0].config);
  CHECK(back[0].loss == records[0].loss);
  CHECK(back[0].best_so_far == records[0].best_so_far);
  CHECK(back[0].wall_ms == 12);
  CHECK(std::isnan(back[1].loss));
  CHECK(records_to_csv(back) == csv);

  CHECK_THROWS_AS(records_from_csv("bad header\n"), ParseError);
}

TEST_CASE("plan parsing and validation") {
  const Plan plan = parse_plan(R"({
    "functions": ["branin"],
    "solvers": [{"name":"hebo","label":"full","config":{"enable_robust":false,
                 "moo":{"pop_size":16,"generations":8}}},
                {"name":"random"}],
    "iterations": 2, "batch": 3, "seeds": [0,1]})");
  CHECK(plan.functions.size() == 1);
  CHECK(plan.solvers[0].label == "full");
  CHECK_FALSE(plan.solvers[0].config.enable_robust);
  CHECK(plan.solvers[0].config.moo.pop_size == 16);
  CHECK(plan.solvers[1].name == "random");

  CHECK_THROWS_AS(parse_plan("{}"), ParseError);
  CHECK_THROWS_AS(parse_plan(R"({"functions":["nope"],"solvers":[{"name":"random"}],"seeds":[0]})"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_plan(R"({"functions":["branin"],"solvers":[{"name":"cmaes"}],"seeds":[0]})"),
      ParseError);
}

TEST_CASE("degenerate budget produces only initial-design rows") {
  Plan plan = parse_plan(R"({
    "functions": ["nonstat1d"],
    "solvers": [{"name":"random"}],
    "iterations": 0, "batch": 4, "seeds": [0]})");
  const auto result = run_experiment(plan);
  CHECK(result.records.empty());

  plan.iterations = 1;
  const auto result1 = run_experiment(plan);
  CHECK(result1.records.size() == 4);
  for (const auto& r : result1.records) CHECK(r.iteration == 0);
}

TEST_CASE("experiment runs are deterministic and self-normalize the baseline") {
  const std::string plan_text = R"({
    "functions": ["nonstat1d", "branin"],
    "solvers": [{"name":"hebo","config":{"moo":{"pop_size":16,"generations":10}}},
                {"name":"random"}],
    "iterations": 3, "batch": 4, "seeds": [0,1,2], "threads": 2})";
  const Plan plan = parse_plan(plan_text);
  const auto r1 = run_experiment(plan);
  const auto r2 = run_experiment(plan);
  CHECK(records_to_csv(r1.records) == records_to_csv(r2.records));

  // single-threaded execution produces the identical csv
  Plan plan1 = plan;
  plan1.threads = 1;
  const auto r3 = run_experiment(plan1);
  CHECK(records_to_csv(r1.records) == records_to_csv(r3.records));

  // best_so_far traces are monotone non-increasing per cell
  double prev = 1e18;
  std::string prev_key;
  for (const auto& rec : r1.records) {
    const std::string key = rec.solver + "|" + rec.function + "|" + std::to_string(rec.seed);
    if (key != prev_key) prev = 1e18;
    CHECK(rec.best_so_far <= prev + 1e-15);
    prev = rec.best_so_far;
    prev_key = key;
  }

  // the random solver scores exactly 100 on average by construction
  const auto summary = nlohmann::json::parse(r1.summary_json);
  for (const auto& fname : {"nonstat1d", "branin"}) {
    const double mean = summary["functions"][fname]["solvers"]["random"]["mean"].get<double>();
    CHECK(mean == doctest::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("gp-fit comparison runs and reports counts consistently") {
  const auto& bb = find_function("branin-multnoise");
  const auto cmp = gp_fit_comparison(bb, 4, GpFitToggle::kOutputTransform, 24, 24, 5);
  CHECK(cmp.logdens_on.size() == 4);
  CHECK(cmp.better + cmp.worse <= 4);
  CHECK(cmp.sig_better <= cmp.better);
  CHECK(cmp.sig_worse <= cmp.worse);
  const std::string js = gp_fit_comparison_to_json(cmp);
  CHECK(nlohmann::json::parse(js).contains("ttest"));
}

}  // TEST_SUITE
