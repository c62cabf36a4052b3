#include "hebo/surrogate.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "hebo/errors.hpp"
#include "hebo/rng.hpp"

namespace hebo {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;
constexpr double kLog2Pi = 1.8378770664093455;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Box bounds in log space, order: lengthscale, signal var, noise var, a, b.
constexpr double kLogLsLo = -6.907755278982137;   // log 1e-3
constexpr double kLogLsHi = 2.302585092994046;    // log 10
constexpr double kLogSvLo = -6.907755278982137;   // log 1e-3
constexpr double kLogSvHi = 4.605170185988092;    // log 1e2
constexpr double kLogNvLo = -13.815510557964274;  // log 1e-6
constexpr double kLogNvHi = 0.0;                  // log 1
constexpr double kLogWarpLo = -2.302585092994046; // log 0.1
constexpr double kLogWarpHi = 2.302585092994046;  // log 10

Eigen::MatrixXd warp_rows(const Eigen::MatrixXd& X, const InputWarp& warp) {
  if (warp.is_identity()) return X;
  Eigen::MatrixXd W(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    W.row(i) = kumaraswamy_warp(X.row(i).transpose(), warp).transpose();
  return W;
}

// Scaled squared distances between warped rows: R2_ij = sum_k D_kij^2 / ls_k^2.
Eigen::MatrixXd scaled_sqdist(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                              const Eigen::VectorXd& ls) {
  Eigen::MatrixXd As = A * ls.cwiseInverse().asDiagonal();
  Eigen::MatrixXd Bs = B * ls.cwiseInverse().asDiagonal();
  Eigen::VectorXd an = As.rowwise().squaredNorm();
  Eigen::VectorXd bn = Bs.rowwise().squaredNorm();
  Eigen::MatrixXd R2 = an.replicate(1, Bs.rows()) + bn.transpose().replicate(As.rows(), 1) -
                       2.0 * As * Bs.transpose();
  return R2.cwiseMax(0.0);
}

Eigen::MatrixXd matern52(const Eigen::MatrixXd& R2, double sv) {
  Eigen::ArrayXXd r = R2.array().sqrt();
  return (sv * (1.0 + kSqrt5 * r + (5.0 / 3.0) * R2.array()) * (-kSqrt5 * r).exp()).matrix();
}

struct PackLayout {
  int d = 0;
  bool with_warp = false;
  int size() const { return d + 2 + (with_warp ? 2 * d : 0); }
};

Eigen::VectorXd pack(const KernelParams& kp, const InputWarp& warp, const PackLayout& lay) {
  Eigen::VectorXd x(lay.size());
  x.head(lay.d) = kp.log_lengthscales;
  x[lay.d] = kp.log_signal_variance;
  x[lay.d + 1] = kp.log_noise_variance;
  if (lay.with_warp) {
    x.segment(lay.d + 2, lay.d) = warp.a.array().log().matrix();
    x.segment(2 * lay.d + 2, lay.d) = warp.b.array().log().matrix();
  }
  return x;
}

void unpack(const Eigen::VectorXd& x, const PackLayout& lay, KernelParams& kp, InputWarp& warp) {
  kp.log_lengthscales = x.head(lay.d);
  kp.log_signal_variance = x[lay.d];
  kp.log_noise_variance = x[lay.d + 1];
  if (lay.with_warp) {
    warp.a = x.segment(lay.d + 2, lay.d).array().exp().matrix();
    warp.b = x.segment(2 * lay.d + 2, lay.d).array().exp().matrix();
  } else {
    warp = InputWarp::identity(lay.d);
  }
}

void bounds(const PackLayout& lay, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  lo.resize(lay.size());
  hi.resize(lay.size());
  lo.head(lay.d).setConstant(kLogLsLo);
  hi.head(lay.d).setConstant(kLogLsHi);
  lo[lay.d] = kLogSvLo;
  hi[lay.d] = kLogSvHi;
  lo[lay.d + 1] = kLogNvLo;
  hi[lay.d + 1] = kLogNvHi;
  if (lay.with_warp) {
    lo.tail(2 * lay.d).setConstant(kLogWarpLo);
    hi.tail(2 * lay.d).setConstant(kLogWarpHi);
  }
}

struct CholResult {
  Eigen::MatrixXd L;
  double jitter = 0.0;
};

// Jitter escalation on indefinite Gram matrices.
std::optional<CholResult> robust_cholesky(const Eigen::MatrixXd& Kn) {
  static const double jitters[] = {0.0, 1e-8, 1e-6, 1e-4};
  for (double j : jitters) {
    Eigen::MatrixXd Kj = Kn;
    if (j > 0.0) Kj.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt(Kj);
    if (llt.info() == Eigen::Success) return CholResult{llt.matrixL(), j};
  }
  return std::nullopt;
}

}  // namespace

Eigen::MatrixXd kernel_eval(const KernelParams& params, const InputWarp& warp,
                            const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
  if (X.cols() != Z.cols()) throw ValidationError("kernel_eval: dimension mismatch");
  if (params.log_lengthscales.size() != X.cols())
    throw ValidationError("kernel_eval: lengthscale dimension mismatch");
  const Eigen::MatrixXd Wx = warp_rows(X, warp);
  const Eigen::MatrixXd Wz = (&X == &Z) ? Wx : warp_rows(Z, warp);
  return matern52(scaled_sqdist(Wx, Wz, params.lengthscales()), params.signal_variance());
}

NlmlResult neg_log_marginal_likelihood(const KernelParams& params, const InputWarp& warp,
                                       const Eigen::MatrixXd& X, const Eigen::VectorXd& t,
                                       bool want_grad) {
  const auto n = X.rows();
  const int d = static_cast<int>(X.cols());
  if (t.size() != n) throw ValidationError("nlml: label count mismatch");
  if (n < 1) throw ValidationError("nlml: empty training set");

  const Eigen::VectorXd ls = params.lengthscales();
  const double sv = params.signal_variance();
  const double nv = params.noise_variance();

  const Eigen::MatrixXd W = warp_rows(X, warp);
  const Eigen::MatrixXd R2 = scaled_sqdist(W, W, ls);
  const Eigen::MatrixXd K = matern52(R2, sv);
  Eigen::MatrixXd Kn = K;
  Kn.diagonal().array() += nv;

  const auto chol = robust_cholesky(Kn);
  if (!chol) throw FitError("nlml: Gram matrix ill-conditioned after jitter escalation");
  const Eigen::MatrixXd& L = chol->L;

  const Eigen::VectorXd alpha =
      L.transpose().triangularView<Eigen::Upper>().solve(
          L.triangularView<Eigen::Lower>().solve(t));

  NlmlResult res;
  res.value = 0.5 * t.dot(alpha) + L.diagonal().array().log().sum() +
              0.5 * static_cast<double>(n) * kLog2Pi;
  if (!want_grad) return res;

  // Wm = (K + nv I)^-1 - alpha alpha'; grad_p = 1/2 tr(Wm dK/dp).
  Eigen::MatrixXd Kinv = L.transpose().triangularView<Eigen::Upper>().solve(
      L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)));
  Eigen::MatrixXd Wm = Kinv - alpha * alpha.transpose();

  const PackLayout lay{d, true};
  res.grad.setZero(lay.size());
  res.grad[d] = 0.5 * Wm.cwiseProduct(K).sum();        // d/dlog sv: dK = K
  res.grad[d + 1] = 0.5 * nv * Wm.trace();             // d/dlog nv: dKn = nv I

  // C_ij = (5/3) sv (1 + sqrt5 r) exp(-sqrt5 r); shared factor of the
  // distance derivatives of the Matern-5/2 kernel.
  Eigen::ArrayXXd r = R2.array().sqrt();
  Eigen::MatrixXd M = (Wm.array() * ((5.0 / 3.0) * sv * (1.0 + kSqrt5 * r) * (-kSqrt5 * r).exp()))
                          .matrix();

  Eigen::MatrixXd dWa(n, d), dWb(n, d);
  {
    Eigen::VectorXd ga(d), gb(d);
    for (Eigen::Index i = 0; i < n; ++i) {
      kumaraswamy_grad(X.row(i).transpose(), warp, ga, gb);
      dWa.row(i) = ga.transpose();
      dWb.row(i) = gb.transpose();
    }
  }

  for (int k = 0; k < d; ++k) {
    const double inv_ls2 = 1.0 / (ls[k] * ls[k]);
    const Eigen::VectorXd wk = W.col(k);
    Eigen::MatrixXd Dk = wk.replicate(1, n) - wk.transpose().replicate(n, 1);
    // d/dlog ls_k: dK_ij = C_ij D_ij^2 / ls_k^2
    res.grad[k] = 0.5 * inv_ls2 * M.cwiseProduct(Dk.cwiseProduct(Dk)).sum();
    // d/da_k: dK_ij = -C_ij D_ij (dWa_ik - dWa_jk) / ls_k^2, chain to log a_k
    const Eigen::VectorXd ak = dWa.col(k);
    const Eigen::VectorXd bk = dWb.col(k);
    Eigen::MatrixXd Ak = ak.replicate(1, n) - ak.transpose().replicate(n, 1);
    Eigen::MatrixXd Bk = bk.replicate(1, n) - bk.transpose().replicate(n, 1);
    res.grad[d + 2 + k] =
        -0.5 * warp.a[k] * inv_ls2 * M.cwiseProduct(Dk.cwiseProduct(Ak)).sum();
    res.grad[2 * d + 2 + k] =
        -0.5 * warp.b[k] * inv_ls2 * M.cwiseProduct(Dk.cwiseProduct(Bk)).sum();
  }
  return res;
}

namespace {

// Value-only NLML that reports +inf instead of throwing; used inside the
// line search where an indefinite step is simply rejected.
double nlml_value_or_inf(const Eigen::VectorXd& x, const PackLayout& lay,
                         const Eigen::MatrixXd& X, const Eigen::VectorXd& t) {
  KernelParams kp;
  InputWarp warp;
  unpack(x, lay, kp, warp);
  try {
    return neg_log_marginal_likelihood(kp, warp, X, t, false).value;
  } catch (const FitError&) {
    return kInf;
  }
}

struct OptResult {
  Eigen::VectorXd x;
  double value = kInf;
};

OptResult minimize_nlml(Eigen::VectorXd x0, const PackLayout& lay, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& t, const FitConfig& cfg,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  auto clamp_box = [&](Eigen::VectorXd v) {
    return v.cwiseMax(lo).cwiseMin(hi);
  };
  Eigen::VectorXd x = clamp_box(std::move(x0));

  KernelParams kp;
  InputWarp warp;
  unpack(x, lay, kp, warp);
  NlmlResult cur;
  try {
    cur = neg_log_marginal_likelihood(kp, warp, X, t, true);
  } catch (const FitError&) {
    return {x, kInf};
  }

  double step = 0.1;
  int plateau = 0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd g = cur.grad.head(lay.size());
    // Projected gradient: zero out components pushing past an active bound.
    for (int i = 0; i < lay.size(); ++i) {
      if ((x[i] <= lo[i] + 1e-12 && g[i] > 0.0) || (x[i] >= hi[i] - 1e-12 && g[i] < 0.0))
        g[i] = 0.0;
    }
    if (g.norm() < cfg.grad_tol) break;

    // Backtracking line search with an Armijo condition on the projected step.
    bool accepted = false;
    for (int ls_it = 0; ls_it < 40; ++ls_it) {
      Eigen::VectorXd xc = clamp_box(x - step * g);
      const double fc = nlml_value_or_inf(xc, lay, X, t);
      if (fc < cur.value - 1e-4 * g.dot(x - xc)) {
        const double drop = cur.value - fc;
        x = std::move(xc);
        KernelParams kc;
        InputWarp wc;
        unpack(x, lay, kc, wc);
        cur = neg_log_marginal_likelihood(kc, wc, X, t, true);
        step = std::min(step * 2.0, 10.0);
        accepted = true;
        plateau = (drop < 1e-8 * std::max(1.0, std::abs(cur.value))) ? plateau + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || plateau >= 3) break;  // stationary to working precision
  }
  return {x, cur.value};
}

}  // namespace

FittedGP fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_raw, const FitConfig& config) {
  const auto n = X.rows();
  const int d = static_cast<int>(X.cols());
  if (n < 2) throw ValidationError("fit: need at least 2 observations");
  if (y_raw.size() != n) throw ValidationError("fit: label count mismatch");

  FittedGP model;
  model.out_transform = OutputTransform::fit(y_raw, config.enable_output_transform);
  model.t = model.out_transform.transform(y_raw);
  model.X = X;

  const PackLayout lay{d, config.enable_input_warp};
  Eigen::VectorXd lo, hi;
  bounds(lay, lo, hi);

  KernelParams kp0;
  kp0.log_lengthscales = Eigen::VectorXd::Constant(d, std::log(0.5));
  kp0.log_signal_variance = 0.0;
  kp0.log_noise_variance = std::log(0.01);
  const Eigen::VectorXd x_default = pack(kp0, InputWarp::identity(d), lay);

  OptResult best;
  int best_restart = -1;
  for (int r = 0; r < std::max(1, config.restarts); ++r) {
    Eigen::VectorXd x0 = x_default;
    if (r > 0) {
      Rng rng(derive_seed(config.seed, 0x6f70'7469'6d69'7a65ULL, static_cast<std::uint64_t>(r)));
      for (int i = 0; i < lay.size(); ++i) x0[i] += 0.3 * rng.normal();
    }
    OptResult res = minimize_nlml(std::move(x0), lay, X, model.t, config, lo, hi);
    if (res.value < best.value || (res.value == best.value && best_restart < 0)) {
      best = std::move(res);
      best_restart = r;
    }
  }
  if (!std::isfinite(best.value)) throw FitError("fit: all restarts ill-conditioned");

  unpack(best.x, lay, model.kernel, model.warp);
  model.nlml = best.value;
  model.Xw = warp_rows(X, model.warp);

  Eigen::MatrixXd Kn = kernel_eval(model.kernel, model.warp, X, X);
  Kn.diagonal().array() += model.kernel.noise_variance();
  const auto chol = robust_cholesky(Kn);
  if (!chol) throw FitError("fit: final Gram matrix ill-conditioned");
  model.chol = chol->L;
  model.jitter = chol->jitter;
  model.alpha = model.chol.transpose().triangularView<Eigen::Upper>().solve(
      model.chol.triangularView<Eigen::Lower>().solve(model.t));
  return model;
}

Prediction predict(const FittedGP& model, const Eigen::MatrixXd& Q) {
  if (Q.cols() != model.X.cols()) throw ValidationError("predict: dimension mismatch");
  const Eigen::MatrixXd Wq = warp_rows(Q, model.warp);
  const Eigen::MatrixXd Kstar =
      matern52(scaled_sqdist(model.Xw, Wq, model.kernel.lengthscales()),
               model.kernel.signal_variance());
  Prediction p;
  p.mu = Kstar.transpose() * model.alpha;
  const Eigen::MatrixXd V = model.chol.triangularView<Eigen::Lower>().solve(Kstar);
  const double sv = model.kernel.signal_variance();
  p.var = (sv - V.colwise().squaredNorm().array()).cwiseMax(0.0).transpose();
  return p;
}

}  // namespace hebo
