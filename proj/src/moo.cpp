#include "hebo/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hebo/errors.hpp"

namespace hebo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd sanitize_objectives(Eigen::VectorXd v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) v.setConstant(-kInf);
  return v;
}

// Rank and crowding assignment for a whole population, in place.
void assign_fronts(std::vector<Individual>& pop) {
  std::vector<Eigen::VectorXd> objs;
  objs.reserve(pop.size());
  for (const auto& ind : pop) objs.push_back(ind.objectives);
  const auto fronts = non_dominated_sort(objs);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<Eigen::VectorXd> front_objs;
    front_objs.reserve(fronts[f].size());
    for (int idx : fronts[f]) front_objs.push_back(pop[static_cast<std::size_t>(idx)].objectives);
    const auto crowd = crowding_distance(front_objs);
    for (std::size_t j = 0; j < fronts[f].size(); ++j) {
      auto& ind = pop[static_cast<std::size_t>(fronts[f][j])];
      ind.rank = static_cast<int>(f);
      ind.crowding = crowd[j];
    }
  }
}

// Binary tournament on (rank asc, crowding desc); coin flip on full ties.
const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
  const auto& a = pop[rng.uniform_int(pop.size())];
  const auto& b = pop[rng.uniform_int(pop.size())];
  if (a.rank != b.rank) return a.rank < b.rank ? a : b;
  if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
  return rng.uniform() < 0.5 ? a : b;
}

// Simulated binary crossover (Deb & Agrawal); children clamped by caller.
void sbx(const Eigen::VectorXd& p1, const Eigen::VectorXd& p2, double eta, Rng& rng,
         Eigen::VectorXd& c1, Eigen::VectorXd& c2) {
  const auto d = p1.size();
  c1 = p1;
  c2 = p2;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (rng.uniform() > 0.5) continue;  // per-variable exchange probability
    if (std::abs(p1[k] - p2[k]) < 1e-14) continue;
    const double u = rng.uniform();
    const double beta = (u <= 0.5) ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                   : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    c1[k] = 0.5 * ((1.0 + beta) * p1[k] + (1.0 - beta) * p2[k]);
    c2[k] = 0.5 * ((1.0 - beta) * p1[k] + (1.0 + beta) * p2[k]);
  }
}

// Polynomial mutation with distribution index eta, unit-range variables.
void polynomial_mutation(Eigen::VectorXd& x, double prob, double eta, Rng& rng) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (rng.uniform() >= prob) continue;
    const double u = rng.uniform();
    const double delta = (u < 0.5) ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                                   : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
    x[k] += delta;
  }
}

void clamp_unit(Eigen::VectorXd& x) {
  x = x.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace

bool dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ValidationError("dominates: objective length mismatch");
  bool strictly = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<int>> non_dominated_sort(const std::vector<Eigen::VectorXd>& objectives) {
  const int n = static_cast<int>(objectives.size());
  std::vector<std::vector<int>> dominated_by(static_cast<std::size_t>(n));
  std::vector<int> domination_count(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> fronts;

  std::vector<int> current;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& oi = objectives[static_cast<std::size_t>(i)];
      const auto& oj = objectives[static_cast<std::size_t>(j)];
      if (dominates(oi, oj)) {
        dominated_by[static_cast<std::size_t>(i)].push_back(j);
        ++domination_count[static_cast<std::size_t>(j)];
      } else if (dominates(oj, oi)) {
        dominated_by[static_cast<std::size_t>(j)].push_back(i);
        ++domination_count[static_cast<std::size_t>(i)];
      }
    }
    if (domination_count[static_cast<std::size_t>(i)] == 0) current.push_back(i);
  }
  // Fronts are peeled in order; indices inside a front stay ascending.
  while (!current.empty()) {
    std::sort(current.begin(), current.end());
    std::vector<int> next;
    for (int i : current)
      for (int j : dominated_by[static_cast<std::size_t>(i)])
        if (--domination_count[static_cast<std::size_t>(j)] == 0) next.push_back(j);
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<Eigen::VectorXd>& front) {
  const int n = static_cast<int>(front.size());
  if (n == 0) throw ValidationError("crowding_distance: empty front");
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  const auto m = front.front().size();
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return front[static_cast<std::size_t>(a)][obj] < front[static_cast<std::size_t>(b)][obj];
    });
    const double lo = front[static_cast<std::size_t>(order.front())][obj];
    const double hi = front[static_cast<std::size_t>(order.back())][obj];
    const double range = hi - lo;
    if (!(range > 0.0) || !std::isfinite(range)) continue;  // degenerate objective
    dist[static_cast<std::size_t>(order.front())] = kInf;
    dist[static_cast<std::size_t>(order.back())] = kInf;
    for (int j = 1; j + 1 < n; ++j) {
      const double gap = front[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])][obj] -
                         front[static_cast<std::size_t>(order[static_cast<std::size_t>(j - 1)])][obj];
      dist[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] += gap / range;
    }
  }
  return dist;
}

std::vector<Individual> evolve(const ObjectiveFn& objective_fn, int d, int n_objectives,
                               const MooConfig& cfg) {
  if (cfg.pop_size < 4 || cfg.pop_size % 2 != 0)
    throw ValidationError("evolve: pop_size must be even and >= 4");
  if (cfg.generations < 0) throw ValidationError("evolve: generations must be >= 0");
  if (d < 1 || n_objectives < 1) throw ValidationError("evolve: bad dimensions");
  const double pm = cfg.mutation_prob < 0.0 ? 1.0 / static_cast<double>(d) : cfg.mutation_prob;

  auto evaluate = [&](Eigen::VectorXd genome, std::uint64_t generation, std::uint64_t index) {
    Rng eval_rng(derive_seed(cfg.seed, 0xe7a1'0000ULL + generation, index));
    Individual ind;
    ind.objectives = sanitize_objectives(objective_fn(genome, eval_rng));
    if (ind.objectives.size() != n_objectives)
      throw ValidationError("evolve: objective_fn returned wrong arity");
    ind.genome = std::move(genome);
    return ind;
  };

  Rng rng(derive_seed(cfg.seed, 0x6e73'6761ULL));
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(2 * cfg.pop_size));
  for (int i = 0; i < cfg.pop_size; ++i) {
    Eigen::VectorXd g(d);
    for (int k = 0; k < d; ++k) g[k] = rng.uniform();
    pop.push_back(evaluate(std::move(g), 0, static_cast<std::uint64_t>(i)));
  }
  assign_fronts(pop);

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(static_cast<std::size_t>(cfg.pop_size));
    while (static_cast<int>(offspring.size()) < cfg.pop_size) {
      const Individual& p1 = tournament(pop, rng);
      const Individual& p2 = tournament(pop, rng);
      Eigen::VectorXd c1, c2;
      if (rng.uniform() < cfg.crossover_prob) {
        sbx(p1.genome, p2.genome, cfg.sbx_eta, rng, c1, c2);
      } else {
        c1 = p1.genome;
        c2 = p2.genome;
      }
      polynomial_mutation(c1, pm, cfg.pm_eta, rng);
      polynomial_mutation(c2, pm, cfg.pm_eta, rng);
      clamp_unit(c1);
      clamp_unit(c2);
      const auto base = static_cast<std::uint64_t>(offspring.size());
      offspring.push_back(evaluate(std::move(c1), static_cast<std::uint64_t>(gen), base));
      if (static_cast<int>(offspring.size()) < cfg.pop_size)
        offspring.push_back(evaluate(std::move(c2), static_cast<std::uint64_t>(gen), base + 1));
    }

    // (mu + lambda) environmental selection.
    for (auto& child : offspring) pop.push_back(std::move(child));
    assign_fronts(pop);
    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& ia = pop[static_cast<std::size_t>(a)];
      const auto& ib = pop[static_cast<std::size_t>(b)];
      if (ia.rank != ib.rank) return ia.rank < ib.rank;
      return ia.crowding > ib.crowding;
    });
    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(cfg.pop_size));
    for (int i = 0; i < cfg.pop_size; ++i)
      next.push_back(std::move(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]));
    pop = std::move(next);
  }
  // Tournaments above use combined-population ranks; the returned
  // population carries ranks/crowding consistent within itself.
  assign_fronts(pop);
  return pop;
}

}  // namespace hebo
