#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hebo/design_space.hpp"
#include "hebo/optimizer.hpp"
#include "hebo/stats.hpp"

namespace hebo::bench {

/// Synthetic black-box test function; eval returns a loss (lower better)
/// and is deterministic given (configuration, generator state).
struct BlackBox {
  std::string name;
  DesignSpace space;
  std::function<double(const Configuration&, Rng&)> eval;
  std::optional<double> optimum_loss;
  std::string noise_kind;  // "none" | "heteroscedastic(...)"
};

/// Registry of builtin functions: branin, hartmann6, levy10, their
/// heteroscedastic variants, a non-stationary 1-d testbed, a mixed-integer
/// branin, and a multiplicative-noise branin used by the GP-fit diagnostics.
const std::vector<BlackBox>& builtin_functions();
const BlackBox& find_function(const std::string& name);

/// 100 * (L - L*) / (L_rand - L*); 0 is optimal, 100 matches random search.
double normalized_score(double loss, double loss_star, double loss_rand);

struct SolverSpec {
  std::string name;   // "hebo" or "random"
  std::string label;  // CSV identifier; defaults to name
  HeboConfig config;  // used by "hebo"
};

struct Plan {
  std::vector<std::string> functions;
  std::vector<SolverSpec> solvers;
  int iterations = 16;
  int batch = 8;
  std::vector<std::uint64_t> seeds;
  int threads = 0;             // 0 = hardware concurrency
  bool record_timing = false;  // wall_ms column is 0 unless enabled
};

Plan parse_plan(const std::string& json_text);

struct RunRecord {
  std::string solver;
  std::string function;
  std::uint64_t seed = 0;
  int iteration = 0;
  int batch_index = 0;
  Configuration config;
  double loss = 0.0;
  double best_so_far = 0.0;
  std::int64_t wall_ms = 0;
};

std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& csv_text);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::string summary_json;
};

/// Runs every (solver, function, seed) cell of the plan, in parallel
/// across cells, and assembles records in deterministic order. Black-box
/// exceptions are recorded as failure rows and the run continues.
ExperimentResult run_experiment(const Plan& plan);

/// Recomputes the summary from persisted records. L_rand per function is
/// the mean final loss of `baseline`; L* is the function's known optimum,
/// else the best loss observed anywhere in the records.
std::string summarize_records(const std::vector<RunRecord>& records, const std::string& baseline);

enum class GpFitToggle { kInputWarp, kOutputTransform };

struct GpFitComparison {
  std::vector<double> logdens_on;   // per seed, held-out mean log density
  std::vector<double> logdens_off;
  std::vector<double> seed_p_better;  // per seed, one-sided p (on > off)
  int better = 0;
  int sig_better = 0;
  int worse = 0;
  int sig_worse = 0;
  TestResult ttest;  // paired across seeds, two-sided
};

/// Fits the GP with one modelling component toggled on/off against a base
/// model and compares held-out log predictive density in raw label space.
/// Per-seed significance uses a paired t-test over test points at the
/// 0.025 one-sided level; failures are excluded pairwise.
GpFitComparison gp_fit_comparison(const BlackBox& bb, int n_seeds, GpFitToggle toggle,
                                  int n_train = 48, int n_test = 64, std::uint64_t seed0 = 0);

std::string gp_fit_comparison_to_json(const GpFitComparison& cmp);

}  // namespace hebo::bench
