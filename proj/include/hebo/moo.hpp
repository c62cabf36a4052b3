#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "hebo/rng.hpp"

namespace hebo {

/// NSGA-II member. Objectives are maximized.
struct Individual {
  Eigen::VectorXd genome;      // in [0,1]^d
  Eigen::VectorXd objectives;  // length M
  int rank = -1;               // front index, 0 = non-dominated
  double crowding = 0.0;       // +inf at front extremes
};

struct MooConfig {
  int pop_size = 100;  // must be even and >= 4
  int generations = 100;
  double crossover_prob = 0.9;
  double mutation_prob = -1.0;  // per gene; < 0 means 1/d
  double sbx_eta = 15.0;
  double pm_eta = 20.0;
  std::uint64_t seed = 0;
};

/// Pareto dominance for maximization: a >= b componentwise, a > b somewhere.
bool dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Fast non-dominated sort; returns fronts as index lists into `objectives`.
std::vector<std::vector<int>> non_dominated_sort(const std::vector<Eigen::VectorXd>& objectives);

/// Crowding distances for one front's objective vectors. Boundary members
/// get +inf; objectives with zero range contribute 0.
std::vector<double> crowding_distance(const std::vector<Eigen::VectorXd>& front);

/// The objective may draw from the per-individual generator (stochastic
/// acquisitions get a fresh perturbation per evaluation); deterministic
/// objectives simply ignore it.
using ObjectiveFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, Rng&)>;

/// NSGA-II over the unit hypercube: binary-tournament selection on
/// (rank, crowding), simulated binary crossover, polynomial mutation,
/// genome clamping to [0,1], and (mu + lambda) elitist truncation.
/// Non-finite objective components are mapped to -inf so invalid genomes
/// are purged by selection. Deterministic given cfg.seed.
std::vector<Individual> evolve(const ObjectiveFn& objective_fn, int d, int n_objectives,
                               const MooConfig& cfg);

}  // namespace hebo
