#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hebo/design_space.hpp"
#include "hebo/moo.hpp"
#include "hebo/surrogate.hpp"

namespace hebo {

/// Loop configuration. The enable_* toggles ablate individual components;
/// with all four off the loop degenerates to a plain single-objective EI
/// Bayesian optimizer.
struct HeboConfig {
  int n_init = 0;         // 0 = auto: max(4, 2d) uniform points
  double sigma_n = 0.01;  // robustness noise std (labels are standardized)
  double beta = 1.0;      // UCB exploration weight
  MooConfig moo;
  bool enable_input_warp = true;
  bool enable_output_transform = true;
  bool enable_robust = true;
  bool enable_moo_ensemble = true;
  std::uint64_t seed = 0;
};

struct SuggestResult {
  std::vector<Configuration> configs;
  /// True when the GP fit failed and the batch fell back to uniform draws.
  bool used_fallback = false;
};

/// Ask/tell optimizer, maximization convention (negate losses to minimize).
/// Owned by one logical thread between calls; suggestions are a pure
/// function of (seed, iteration, history).
class HeboOptimizer {
 public:
  HeboOptimizer(DesignSpace space, HeboConfig config);

  /// Batch of q suggestions. Uniform while |history| < n_init, otherwise
  /// refits the surrogate, maximizes the (robust) acquisition ensemble
  /// with NSGA-II, and picks q members of the final population by
  /// (front, crowding) with duplicate decoded configurations removed.
  SuggestResult suggest(int q);

  /// Appends observed (configuration, raw value) pairs, invalidates the
  /// cached model, and advances the iteration counter. Non-finite values
  /// are rejected.
  void observe(const std::vector<Configuration>& configs, const std::vector<double>& values);

  /// Best observation so far (maximal value; earliest index on ties).
  std::pair<Configuration, double> best() const;

  int iteration() const { return iteration_; }
  Eigen::Index history_size() const { return history_y_.size(); }
  const DesignSpace& space() const { return space_; }
  const HeboConfig& config() const { return config_; }
  const std::optional<FittedGP>& model() const { return model_; }
  int effective_n_init() const;

  /// Versioned JSON snapshot for resumable runs.
  std::string serialize() const;
  static HeboOptimizer deserialize(const std::string& json_text);

 private:
  void fit_model();

  DesignSpace space_;
  HeboConfig config_;
  std::vector<Configuration> history_configs_;
  Eigen::MatrixXd history_X_;
  Eigen::VectorXd history_y_;
  int iteration_ = 0;
  std::optional<FittedGP> model_;
};

}  // namespace hebo
