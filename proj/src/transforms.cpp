#include "hebo/transforms.hpp"

#include <cmath>
#include <limits>

#include "hebo/detail/scalar_min.hpp"
#include "hebo/errors.hpp"

namespace hebo {

namespace {

constexpr double kZetaBranchEps = 1e-8;
constexpr double kZetaLo = -5.0;
constexpr double kZetaHi = 5.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double boxcox_scalar(double y, double zeta) {
  if (!(y > 0.0)) throw std::domain_error("boxcox: labels must be strictly positive");
  if (std::abs(zeta) < kZetaBranchEps) return std::log(y);
  return (std::pow(y, zeta) - 1.0) / zeta;
}

double yeojohnson_scalar(double y, double zeta) {
  if (y >= 0.0) {
    if (std::abs(zeta) < kZetaBranchEps) return std::log1p(y);
    return (std::pow(y + 1.0, zeta) - 1.0) / zeta;
  }
  if (std::abs(zeta - 2.0) < kZetaBranchEps) return -std::log1p(-y);
  return (std::pow(1.0 - y, 2.0 - zeta) - 1.0) / (zeta - 2.0);
}

}  // namespace

Eigen::VectorXd boxcox_apply(const Eigen::VectorXd& y, double zeta) {
  Eigen::VectorXd t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) t[i] = boxcox_scalar(y[i], zeta);
  return t;
}

double boxcox_neg_loglik(const Eigen::VectorXd& y, double zeta) {
  const auto n = y.size();
  if (n < 2) throw ValidationError("boxcox_neg_loglik: need at least 2 labels");
  const Eigen::VectorXd t = boxcox_apply(y, zeta);
  const double mean = t.mean();
  const double msd = (t.array() - mean).square().sum() / static_cast<double>(n);
  if (!(msd > 0.0) || !std::isfinite(msd)) return kInf;
  const double sum_log_y = y.array().log().sum();
  return 0.5 * static_cast<double>(n) * std::log(msd) - (zeta - 1.0) * sum_log_y;
}

double boxcox_fit(const Eigen::VectorXd& y) {
  if (y.size() < 2) throw ValidationError("boxcox_fit: need at least 2 labels");
  if ((y.array() <= 0.0).any()) throw std::domain_error("boxcox_fit: labels must be > 0");
  if (y.maxCoeff() == y.minCoeff()) throw FitError("boxcox_fit: constant labels");
  return detail::minimize_scalar_bounded([&](double z) { return boxcox_neg_loglik(y, z); },
                                         kZetaLo, kZetaHi, 1e-6);
}

Eigen::VectorXd yeojohnson_apply(const Eigen::VectorXd& y, double zeta) {
  Eigen::VectorXd t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) t[i] = yeojohnson_scalar(y[i], zeta);
  return t;
}

double yeojohnson_loglik(const Eigen::VectorXd& y, double zeta) {
  const auto n = y.size();
  if (n < 2) throw ValidationError("yeojohnson_loglik: need at least 2 labels");
  const Eigen::VectorXd t = yeojohnson_apply(y, zeta);
  const double mean = t.mean();
  const double var = (t.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(var > 0.0) || !std::isfinite(var)) return -kInf;
  double jac = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = (y[i] > 0.0) ? 1.0 : ((y[i] < 0.0) ? -1.0 : 0.0);
    jac += s * std::log1p(std::abs(y[i]));
  }
  return -0.5 * static_cast<double>(n) * std::log(var) + (zeta - 1.0) * jac;
}

double yeojohnson_fit(const Eigen::VectorXd& y) {
  if (y.size() < 2) throw ValidationError("yeojohnson_fit: need at least 2 labels");
  if (y.maxCoeff() == y.minCoeff()) throw FitError("yeojohnson_fit: constant labels");
  return detail::minimize_scalar_bounded([&](double z) { return -yeojohnson_loglik(y, z); },
                                         kZetaLo, kZetaHi, 1e-6);
}

double OutputTransform::apply_power(double y) const {
  switch (family) {
    case TransformFamily::kIdentity: return y;
    case TransformFamily::kBoxCox: return boxcox_scalar(y, zeta);
    case TransformFamily::kYeoJohnson: return yeojohnson_scalar(y, zeta);
  }
  return y;
}

Eigen::VectorXd OutputTransform::transform(const Eigen::VectorXd& y) const {
  Eigen::VectorXd t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) t[i] = (*this)(y[i]);
  return t;
}

double OutputTransform::log_jacobian(double y) const {
  double log_deriv = 0.0;
  switch (family) {
    case TransformFamily::kIdentity:
      break;
    case TransformFamily::kBoxCox:
      if (!(y > 0.0)) throw std::domain_error("boxcox jacobian: y must be > 0");
      log_deriv = (zeta - 1.0) * std::log(y);
      break;
    case TransformFamily::kYeoJohnson:
      log_deriv = (y >= 0.0) ? (zeta - 1.0) * std::log1p(y) : (1.0 - zeta) * std::log1p(-y);
      break;
  }
  return log_deriv - std::log(post_std);
}

OutputTransform OutputTransform::fit(const Eigen::VectorXd& y_raw, bool fit_power) {
  if (y_raw.size() < 2) throw FitError("output transform: need at least 2 labels");
  if (y_raw.maxCoeff() == y_raw.minCoeff()) throw FitError("output transform: constant labels");
  OutputTransform t;
  if (fit_power) {
    if ((y_raw.array() > 0.0).all()) {
      t.family = TransformFamily::kBoxCox;
      t.zeta = boxcox_fit(y_raw);
    } else {
      t.family = TransformFamily::kYeoJohnson;
      t.zeta = yeojohnson_fit(y_raw);
    }
  }
  Eigen::VectorXd powered(y_raw.size());
  for (Eigen::Index i = 0; i < y_raw.size(); ++i) powered[i] = t.apply_power(y_raw[i]);
  t.post_mean = powered.mean();
  const double n1 = static_cast<double>(y_raw.size() - 1);
  t.post_std = std::sqrt((powered.array() - t.post_mean).square().sum() / n1);
  if (!(t.post_std > 1e-12) || !std::isfinite(t.post_std))
    throw FitError("output transform: transformed labels are degenerate");
  return t;
}

Eigen::VectorXd kumaraswamy_warp(const Eigen::VectorXd& u, const InputWarp& warp) {
  if (u.size() != warp.a.size() || u.size() != warp.b.size())
    throw ValidationError("kumaraswamy_warp: dimension mismatch");
  Eigen::VectorXd w(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double uk = std::clamp(u[k], 0.0, 1.0);
    w[k] = 1.0 - std::pow(1.0 - std::pow(uk, warp.a[k]), warp.b[k]);
  }
  return w;
}

void kumaraswamy_grad(const Eigen::VectorXd& u, const InputWarp& warp, Eigen::VectorXd& dw_da,
                      Eigen::VectorXd& dw_db) {
  if (u.size() != warp.a.size() || u.size() != warp.b.size())
    throw ValidationError("kumaraswamy_grad: dimension mismatch");
  dw_da.resize(u.size());
  dw_db.resize(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double uk = std::clamp(u[k], 1e-6, 1.0 - 1e-6);
    const double ak = warp.a[k];
    const double bk = warp.b[k];
    const double t = std::pow(uk, ak);    // u^a in (0,1)
    const double s = 1.0 - t;
    dw_da[k] = bk * std::pow(s, bk - 1.0) * t * std::log(uk);
    dw_db[k] = -std::pow(s, bk) * std::log1p(-t);
  }
}

}  // namespace hebo
