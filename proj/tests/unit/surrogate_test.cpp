#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hebo/errors.hpp"
#include "hebo/rng.hpp"
#include "hebo/surrogate.hpp"

using namespace hebo;

namespace {

// Directly assembled model (identity warp) for predict contract tests.
FittedGP make_gp(const KernelParams& kp, const Eigen::MatrixXd& X, const Eigen::VectorXd& t) {
  FittedGP m;
  m.kernel = kp;
  m.warp = InputWarp::identity(static_cast<int>(X.cols()));
  m.X = X;
  m.Xw = X;
  m.t = t;
  Eigen::MatrixXd Kn = kernel_eval(kp, m.warp, X, X);
  Kn.diagonal().array() += kp.noise_variance();
  Eigen::LLT<Eigen::MatrixXd> llt(Kn);
  REQUIRE(llt.info() == Eigen::Success);
  m.chol = llt.matrixL();
  m.alpha = llt.solve(t);
  return m;
}

struct Problem {
  KernelParams kp;
  InputWarp warp;
  Eigen::MatrixXd X;
  Eigen::VectorXd t;
};

Problem random_problem(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.X.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p.X(i, j) = 0.05 + 0.9 * rng.uniform();
  p.t.resize(n);
  for (int i = 0; i < n; ++i) p.t[i] = rng.normal();
  p.kp.log_lengthscales = Eigen::VectorXd(d);
  for (int j = 0; j < d; ++j) p.kp.log_lengthscales[j] = std::log(0.2 + rng.uniform());
  p.kp.log_signal_variance = std::log(0.5 + rng.uniform());
  p.kp.log_noise_variance = std::log(0.005 + 0.05 * rng.uniform());
  p.warp.a.resize(d);
  p.warp.b.resize(d);
  for (int j = 0; j < d; ++j) {
    p.warp.a[j] = 0.5 + rng.uniform();
    p.warp.b[j] = 0.5 + rng.uniform();
  }
  return p;
}

// Packed-parameter NLML used by the finite-difference oracle.
double nlml_at(const Problem& p, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(p.X.cols());
  KernelParams kp = p.kp;
  InputWarp warp = p.warp;
  kp.log_lengthscales = x.head(d);
  kp.log_signal_variance = x[d];
  kp.log_noise_variance = x[d + 1];
  warp.a = x.segment(d + 2, d).array().exp().matrix();
  warp.b = x.segment(2 * d + 2, d).array().exp().matrix();
  return neg_log_marginal_likelihood(kp, warp, p.X, p.t, false).value;
}

Eigen::VectorXd pack_problem(const Problem& p) {
  const int d = static_cast<int>(p.X.cols());
  Eigen::VectorXd x(3 * d + 2);
  x.head(d) = p.kp.log_lengthscales;
  x[d] = p.kp.log_signal_variance;
  x[d + 1] = p.kp.log_noise_variance;
  x.segment(d + 2, d) = p.warp.a.array().log().matrix();
  x.segment(2 * d + 2, d) = p.warp.b.array().log().matrix();
  return x;
}

}  // namespace

TEST_SUITE("surrogate") {

TEST_CASE("kernel: diagonal, stationarity, positive semidefiniteness") {
  KernelParams kp;
  kp.log_lengthscales = Eigen::VectorXd::Zero(2);
  kp.log_signal_variance = std::log(2.5);
  kp.log_noise_variance = std::log(0.01);
  const InputWarp id = InputWarp::identity(2);

  Eigen::MatrixXd X(3, 2);
  X << 0.1, 0.2, 0.5, 0.5, 0.9, 0.3;
  const Eigen::MatrixXd K = kernel_eval(kp, id, X, X);
  for (int i = 0; i < 3; ++i) CHECK(K(i, i) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(K(0, 1) == doctest::Approx(K(1, 0)).epsilon(1e-14));

  // decreasing in distance under unit lengthscales and identity warp
  Eigen::MatrixXd Q(4, 2);
  Q << 0.1, 0.2, 0.2, 0.2, 0.4, 0.2, 0.8, 0.2;
  const Eigen::MatrixXd Kq = kernel_eval(kp, id, Q.topRows(1), Q);
  CHECK(Kq(0, 0) > Kq(0, 1));
  CHECK(Kq(0, 1) > Kq(0, 2));
  CHECK(Kq(0, 2) > Kq(0, 3));

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  Eigen::MatrixXd bad(2, 3);
  CHECK_THROWS_AS(kernel_eval(kp, id, X, bad), ValidationError);
}

TEST_CASE("nlml: scalar case closed forms") {
  KernelParams kp;
  kp.log_lengthscales = Eigen::VectorXd::Zero(1);
  kp.log_signal_variance = std::log(1.7);
  kp.log_noise_variance = std::log(0.04);
  Eigen::MatrixXd X(1, 1);
  X << 0.4;

  // t = 0: value reduces to (1/2) log(2 pi (k(x,x) + s^2))
  Eigen::VectorXd t0(1);
  t0 << 0.0;
  const double expected0 = 0.5 * std::log(2.0 * M_PI * (1.7 + 0.04));
  CHECK(neg_log_marginal_likelihood(kp, InputWarp::identity(1), X, t0).value ==
        doctest::Approx(expected0).epsilon(1e-12));

  // general scalar, and the effect of doubling the signal variance
  Eigen::VectorXd t1(1);
  t1 << 0.8;
  auto scalar_nlml = [&](double sv) {
    return 0.5 * 0.64 / (sv + 0.04) + 0.5 * std::log(2.0 * M_PI * (sv + 0.04));
  };
  CHECK(neg_log_marginal_likelihood(kp, InputWarp::identity(1), X, t1).value ==
        doctest::Approx(scalar_nlml(1.7)).epsilon(1e-12));
  kp.log_signal_variance = std::log(3.4);
  CHECK(neg_log_marginal_likelihood(kp, InputWarp::identity(1), X, t1).value ==
        doctest::Approx(scalar_nlml(3.4)).epsilon(1e-12));
}

TEST_CASE("nlml gradient matches central finite differences") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
    const Problem p = random_problem(12, 3, seed);
    const NlmlResult res = neg_log_marginal_likelihood(p.kp, p.warp, p.X, p.t);
    const Eigen::VectorXd x0 = pack_problem(p);
    const double h = 1e-5;
    for (int i = 0; i < x0.size(); ++i) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (nlml_at(p, xp) - nlml_at(p, xm)) / (2.0 * h);
      const double rel = std::abs(res.grad[i] - fd) / std::max(1e-6, std::abs(fd));
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("fit recovers the lengthscale of stationary GP data within 2x") {
  const int n = 100;
  const double true_ls = 0.15;
  Rng rng(2024);
  Eigen::MatrixXd X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = rng.uniform();
  KernelParams kp_true;
  kp_true.log_lengthscales = Eigen::VectorXd::Constant(1, std::log(true_ls));
  kp_true.log_signal_variance = 0.0;
  kp_true.log_noise_variance = std::log(1e-4);
  Eigen::MatrixXd K = kernel_eval(kp_true, InputWarp::identity(1), X, X);
  K.diagonal().array() += 1e-6;
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  REQUIRE(llt.info() == Eigen::Success);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  const Eigen::VectorXd y = Eigen::MatrixXd(llt.matrixL()) * z;

  FitConfig fc;
  fc.enable_input_warp = false;
  fc.enable_output_transform = false;
  fc.seed = 5;
  const FittedGP model = fit(X, y, fc);
  const double ls = model.kernel.lengthscales()[0];
  CHECK(ls > 0.5 * true_ls);
  CHECK(ls < 2.0 * true_ls);
}

TEST_CASE("fit selects the transform family and is deterministic") {
  Rng rng(7);
  Eigen::MatrixXd X(12, 2);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    X(i, 0) = rng.uniform();
    X(i, 1) = rng.uniform();
    y[i] = std::exp(rng.normal());
  }
  FitConfig fc;
  fc.seed = 3;
  const FittedGP m1 = fit(X, y, fc);
  CHECK(m1.out_transform.family == TransformFamily::kBoxCox);

  Eigen::VectorXd y2 = y;
  y2[0] = -1.0;
  CHECK(fit(X, y2, fc).out_transform.family == TransformFamily::kYeoJohnson);

  const FittedGP m2 = fit(X, y, fc);
  CHECK(m1.kernel.log_lengthscales == m2.kernel.log_lengthscales);
  CHECK(m1.kernel.log_signal_variance == m2.kernel.log_signal_variance);
  CHECK(m1.kernel.log_noise_variance == m2.kernel.log_noise_variance);
  CHECK(m1.warp.a == m2.warp.a);
  CHECK(m1.nlml == m2.nlml);
}

TEST_CASE("fit never worsens the default initialization") {
  const Problem p = random_problem(30, 2, 77);
  Eigen::VectorXd y = p.t;
  FitConfig fc;
  fc.enable_output_transform = false;
  fc.seed = 1;
  const FittedGP model = fit(p.X, y, fc);

  KernelParams kp0;
  kp0.log_lengthscales = Eigen::VectorXd::Constant(2, std::log(0.5));
  kp0.log_signal_variance = 0.0;
  kp0.log_noise_variance = std::log(0.01);
  const double init_value =
      neg_log_marginal_likelihood(kp0, InputWarp::identity(2), p.X, model.t, false).value;
  CHECK(model.nlml <= init_value + 1e-9);
}

TEST_CASE("predict: interpolation, prior reversion, training variance bound") {
  KernelParams kp;
  kp.log_lengthscales = Eigen::VectorXd::Constant(1, std::log(0.1));
  kp.log_signal_variance = 0.0;
  kp.log_noise_variance = std::log(1e-6);  // noise floor
  Eigen::MatrixXd X(3, 1);
  X << 0.1, 0.15, 0.2;
  Eigen::VectorXd t(3);
  t << 0.3, -0.2, 0.5;
  const FittedGP m = make_gp(kp, X, t);

  const Prediction at_train = predict(m, X);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(at_train.mu[i] - t[i]) < 1e-3);
    CHECK(at_train.var[i] >= 0.0);
    CHECK(at_train.var[i] <= m.kernel.noise_variance() + 1e-6);
  }

  // > 10 lengthscales from all data: back to the prior
  Eigen::MatrixXd far(1, 1);
  far << 3.5;
  const Prediction pf = predict(m, far);
  CHECK(std::abs(pf.mu[0]) < 0.01);
  CHECK(pf.var[0] == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("predict agrees with the dense-inverse oracle") {
  const Problem p = random_problem(20, 2, 5150);
  FittedGP m;
  m.kernel = p.kp;
  m.warp = p.warp;
  m.X = p.X;
  m.Xw.resize(p.X.rows(), p.X.cols());
  for (int i = 0; i < p.X.rows(); ++i)
    m.Xw.row(i) = kumaraswamy_warp(p.X.row(i).transpose(), p.warp).transpose();
  m.t = p.t;
  Eigen::MatrixXd Kn = kernel_eval(p.kp, p.warp, p.X, p.X);
  Kn.diagonal().array() += p.kp.noise_variance();
  Eigen::LLT<Eigen::MatrixXd> llt(Kn);
  REQUIRE(llt.info() == Eigen::Success);
  m.chol = llt.matrixL();
  m.alpha = llt.solve(p.t);

  Eigen::MatrixXd Q(1, 2);
  Q << 0.33, 0.71;
  const Prediction pr = predict(m, Q);

  const Eigen::MatrixXd Kinv = Kn.inverse();
  const Eigen::MatrixXd kstar = kernel_eval(p.kp, p.warp, p.X, Q);
  const double mu_ref = (kstar.transpose() * Kinv * p.t)(0);
  const double var_ref =
      p.kp.signal_variance() - (kstar.transpose() * Kinv * kstar)(0, 0);
  CHECK(std::abs(pr.mu[0] - mu_ref) / std::max(1.0, std::abs(mu_ref)) < 1e-8);
  CHECK(std::abs(pr.var[0] - var_ref) / std::max(1.0, std::abs(var_ref)) < 1e-8);
}

TEST_CASE("predictions are invariant under permutation of training rows") {
  const Problem p = random_problem(15, 2, 99);
  FitConfig fc;
  fc.enable_output_transform = false;
  fc.enable_input_warp = false;
  fc.seed = 2;
  const FittedGP m1 = fit(p.X, p.t, fc);

  // reversed row order
  Eigen::MatrixXd Xr = p.X.colwise().reverse();
  Eigen::VectorXd tr = p.t.reverse();
  const FittedGP m2 = fit(Xr, tr, fc);

  Eigen::MatrixXd Q(2, 2);
  Q << 0.25, 0.5, 0.9, 0.1;
  const Prediction p1 = predict(m1, Q);
  const Prediction p2 = predict(m2, Q);
  CHECK(std::abs(p1.mu[0] - p2.mu[0]) < 1e-6);
  CHECK(std::abs(p1.mu[1] - p2.mu[1]) < 1e-6);
  CHECK(std::abs(p1.var[0] - p2.var[0]) < 1e-6);
}

TEST_CASE("monotone label transform preserves the incumbent index") {
  Rng rng(31);
  Eigen::MatrixXd X(25, 1);
  Eigen::VectorXd y(25);
  for (int i = 0; i < 25; ++i) {
    X(i, 0) = rng.uniform();
    y[i] = std::exp(2.0 * rng.normal());
  }
  FitConfig fc;
  fc.seed = 4;
  const FittedGP m = fit(X, y, fc);
  Eigen::Index iy, it;
  y.maxCoeff(&iy);
  m.t.maxCoeff(&it);
  CHECK(iy == it);
}

TEST_CASE("fit preconditions") {
  Eigen::MatrixXd X(1, 1);
  X << 0.5;
  Eigen::VectorXd y(1);
  y << 1.0;
  CHECK_THROWS_AS(fit(X, y, FitConfig{}), ValidationError);
}

}  // TEST_SUITE
