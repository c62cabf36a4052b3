#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "hebo/transforms.hpp"

namespace hebo {

/// ARD Matern-5/2 hyperparameters, kept in log space. The noise variance
/// is clamped to a floor of 1e-6 after exponentiation.
struct KernelParams {
  Eigen::VectorXd log_lengthscales;
  double log_signal_variance = 0.0;
  double log_noise_variance = -4.6051701859880914;  // log(0.01)

  Eigen::VectorXd lengthscales() const { return log_lengthscales.array().exp(); }
  double signal_variance() const { return std::exp(log_signal_variance); }
  double noise_variance() const { return std::max(std::exp(log_noise_variance), 1e-6); }
};

struct FitConfig {
  bool enable_input_warp = true;
  bool enable_output_transform = true;
  int restarts = 3;
  int max_iters = 200;
  double grad_tol = 1e-5;
  std::uint64_t seed = 0;
};

/// Immutable fitted GP state; safe for concurrent predict calls.
struct FittedGP {
  KernelParams kernel;
  InputWarp warp;
  OutputTransform out_transform;
  Eigen::MatrixXd X;      // n x d encoded training inputs
  Eigen::MatrixXd Xw;     // warped training inputs (cached for prediction)
  Eigen::VectorXd t;      // transformed, standardized labels
  Eigen::MatrixXd chol;   // lower Cholesky factor of K + (noise + jitter) I
  Eigen::VectorXd alpha;  // (K + noise I)^-1 t
  double jitter = 0.0;
  double nlml = 0.0;      // value at the fitted optimum
};

/// Matern-5/2 ARD kernel on Kumaraswamy-warped coordinates, evaluated for
/// all pairs of rows of X and Z (columns of both must lie in [0,1]).
Eigen::MatrixXd kernel_eval(const KernelParams& params, const InputWarp& warp,
                            const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z);

struct NlmlResult {
  double value = 0.0;
  /// Layout: [log_lengthscales (d) | log_signal_var | log_noise_var |
  ///          log_a (d) | log_b (d)].
  Eigen::VectorXd grad;
};

/// Exact negative log marginal likelihood
///   1/2 t' (K + s^2 I)^-1 t + 1/2 log|K + s^2 I| + (n/2) log 2pi
/// with analytic gradient over all kernel and warp parameters. Escalates
/// diagonal jitter through {0, 1e-8, 1e-6, 1e-4} on Cholesky failure and
/// throws FitError if the Gram matrix stays indefinite.
NlmlResult neg_log_marginal_likelihood(const KernelParams& params, const InputWarp& warp,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& t,
                                       bool want_grad = true);

/// Fits the output transform on raw labels, freezes it, then maximizes the
/// marginal likelihood over kernel and warp parameters by projected
/// gradient ascent with backtracking line search and restarts. Box bounds
/// (natural space): lengthscales [1e-3, 10], signal variance [1e-3, 1e2],
/// noise [1e-6, 1], warp a,b [0.1, 10]. Deterministic given config.seed.
FittedGP fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw, const FitConfig& config);

struct Prediction {
  Eigen::VectorXd mu;   // posterior mean, transformed space
  Eigen::VectorXd var;  // latent posterior variance, clamped at 0
};

/// Exact GP posterior marginals at the query rows of Q (encoded space).
Prediction predict(const FittedGP& model, const Eigen::MatrixXd& Q);

}  // namespace hebo
