#pragma once

#include <cstdint>

#include "hebo/rng.hpp"

namespace hebo {

/// Shared inputs of the robust acquisition ensemble. All quantities live
/// in the surrogate's transformed label space; `incumbent` is the best
/// transformed training label.
struct AcquisitionContext {
  double incumbent = 0.0;
  double beta = 1.0;     // UCB exploration weight, >= 0
  double sigma_n = 0.0;  // robustness noise std, >= 0
  double rho = 0.1;      // approximation accuracy (diagnostics only)
  double delta = 0.1;    // confidence parameter (diagnostics only)
};

/// Expected improvement (maximization): sigma * (z Phi(z) + phi(z)) with
/// z = (mu - incumbent)/sigma; the sigma=0 limit is max(0, mu - incumbent).
double ei(double mu, double sigma, double incumbent);

/// Probability of improvement: Phi((mu - incumbent)/sigma); the sigma=0
/// limit is the step 1{mu > incumbent}.
double pi(double mu, double sigma, double incumbent);

/// Upper confidence bound: mu + sqrt(beta) * sigma.
double ucb(double mu, double sigma, double beta);

/// Stochastic robustification: value + eta * sigma_n, eta ~ N(0,1) drawn
/// fresh on every call from the supplied generator.
double robustify(double alpha_value, double sigma_n, Rng& rng);

struct Theorem1Params {
  std::uint64_t n_eps = 0;
  double sigma_n = 0.0;
  double sigma_eps = 0.0;
};

/// Noise scale for a given perturbation-sample count:
///   sigma_n = rho / (4 Phi^-1(1 - delta/(8 N_eps))).
double sigma_n_for(double rho, double delta, std::uint64_t n_eps);

/// Parameter bookkeeping for the robust-acquisition approximation bound:
///   N_eps     = ceil( 16 [A2 + (beta pi / 2) A3] / (delta rho^2) )
///   sigma_n   = rho / (4 Phi^-1(1 - delta/(8 N_eps)))
///   sigma_eps = min{1, rho / (8 [2 sqrt(p) + sqrt(log(4 N_eps/delta))] A1)}
/// Computed for diagnostics; the runtime path uses the additive-noise form.
Theorem1Params theorem1_params(double rho, double delta, double grad_bound_a1,
                               double mean_bound_a2, double var_bound_a3, double beta,
                               std::uint64_t p);

}  // namespace hebo
