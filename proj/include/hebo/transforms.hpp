#pragma once

#include <Eigen/Dense>

namespace hebo {

// ---------------------------------------------------------------------------
// Output power transforms
// ---------------------------------------------------------------------------

/// Box-Cox map: (y^zeta - 1)/zeta, or log y for zeta ~ 0. Requires y > 0.
Eigen::VectorXd boxcox_apply(const Eigen::VectorXd& y, double zeta);

/// Negative profile log-likelihood of the Box-Cox parameter:
///   (n/2) log( mean of squared deviations of T_zeta(y) ) - (zeta-1) sum log y.
/// Returns +inf when the transformed sample is degenerate.
double boxcox_neg_loglik(const Eigen::VectorXd& y, double zeta);

/// Maximum-likelihood zeta over [-5, 5].
double boxcox_fit(const Eigen::VectorXd& y);

/// Yeo-Johnson map, defined on all reals (four-branch power transform).
Eigen::VectorXd yeojohnson_apply(const Eigen::VectorXd& y, double zeta);

/// Log-likelihood of the Yeo-Johnson parameter (to be maximized):
///   -(n/2) log( sum (YJ(y)-mean)^2 / (n-1) ) + (zeta-1) sum sign(y) log(|y|+1)
double yeojohnson_loglik(const Eigen::VectorXd& y, double zeta);

/// Maximum-likelihood zeta over [-5, 5].
double yeojohnson_fit(const Eigen::VectorXd& y);

enum class TransformFamily { kIdentity, kBoxCox, kYeoJohnson };

/// Fitted label transform: a power transform followed by standardization.
/// Strictly increasing for every zeta, so the incumbent's identity is
/// preserved between raw and transformed space.
struct OutputTransform {
  TransformFamily family = TransformFamily::kIdentity;
  double zeta = 1.0;
  double post_mean = 0.0;
  double post_std = 1.0;

  /// Power-transform a single label (no standardization).
  double apply_power(double y) const;
  /// Full map: standardized power transform.
  double operator()(double y) const { return (apply_power(y) - post_mean) / post_std; }
  Eigen::VectorXd transform(const Eigen::VectorXd& y) const;
  /// log d(transform)/dy at y; used for predictive densities in raw space.
  double log_jacobian(double y) const;

  /// Family rule: all labels > 0 -> Box-Cox, otherwise Yeo-Johnson.
  /// With fit_power=false the power step is the identity and only the
  /// standardization is fitted. Throws FitError on degenerate labels.
  static OutputTransform fit(const Eigen::VectorXd& y_raw, bool fit_power);
};

// ---------------------------------------------------------------------------
// Kumaraswamy input warp
// ---------------------------------------------------------------------------

/// Per-dimension warp parameters; w_k(u) = 1 - (1 - u^a_k)^b_k.
struct InputWarp {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  static InputWarp identity(int d) {
    return {Eigen::VectorXd::Ones(d), Eigen::VectorXd::Ones(d)};
  }
  bool is_identity() const {
    return (a.array() == 1.0).all() && (b.array() == 1.0).all();
  }
};

/// Elementwise warp of a point in [0,1]^d. Fixes the endpoints 0 and 1.
Eigen::VectorXd kumaraswamy_warp(const Eigen::VectorXd& u, const InputWarp& warp);

/// Analytic partials dw_k/da_k and dw_k/db_k. Inputs are clamped to
/// [1e-6, 1-1e-6] so the logarithms stay finite.
void kumaraswamy_grad(const Eigen::VectorXd& u, const InputWarp& warp, Eigen::VectorXd& dw_da,
                      Eigen::VectorXd& dw_db);

}  // namespace hebo
