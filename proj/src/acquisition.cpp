#include "hebo/acquisition.hpp"

#include <cmath>
#include <stdexcept>

#include "hebo/special_functions.hpp"

namespace hebo {

double ei(double mu, double sigma, double incumbent) {
  if (sigma < 0.0) throw std::domain_error("ei: sigma must be >= 0");
  const double delta = mu - incumbent;
  if (sigma == 0.0) return std::max(0.0, delta);
  const double z = delta / sigma;
  return sigma * (z * sf::normal_cdf(z) + sf::normal_pdf(z));
}

double pi(double mu, double sigma, double incumbent) {
  if (sigma < 0.0) throw std::domain_error("pi: sigma must be >= 0");
  const double delta = mu - incumbent;
  if (sigma == 0.0) return delta > 0.0 ? 1.0 : 0.0;
  return sf::normal_cdf(delta / sigma);
}

double ucb(double mu, double sigma, double beta) {
  if (sigma < 0.0 || beta < 0.0) throw std::domain_error("ucb: sigma and beta must be >= 0");
  return mu + std::sqrt(beta) * sigma;
}

double robustify(double alpha_value, double sigma_n, Rng& rng) {
  if (sigma_n < 0.0) throw std::domain_error("robustify: sigma_n must be >= 0");
  if (sigma_n == 0.0) return alpha_value;
  return alpha_value + sigma_n * rng.normal();
}

double sigma_n_for(double rho, double delta, std::uint64_t n_eps) {
  if (!(rho > 0.0 && rho < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sigma_n_for: rho and delta must be in (0,1)");
  if (n_eps < 1) throw std::invalid_argument("sigma_n_for: N_eps must be >= 1");
  const double q = sf::normal_quantile(1.0 - delta / (8.0 * static_cast<double>(n_eps)));
  return rho / (4.0 * q);
}

Theorem1Params theorem1_params(double rho, double delta, double grad_bound_a1,
                               double mean_bound_a2, double var_bound_a3, double beta,
                               std::uint64_t p) {
  if (!(rho > 0.0 && rho < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("theorem1_params: rho and delta must be in (0,1)");
  if (!(grad_bound_a1 > 0.0) || !(mean_bound_a2 > 0.0) || !(var_bound_a3 > 0.0))
    throw std::invalid_argument("theorem1_params: bounds must be > 0");
  if (beta < 0.0) throw std::invalid_argument("theorem1_params: beta must be >= 0");
  if (p < 1) throw std::invalid_argument("theorem1_params: p must be >= 1");

  Theorem1Params out;
  const double pi_half_beta = 0.5 * M_PI * beta;
  out.n_eps = static_cast<std::uint64_t>(
      std::ceil(16.0 * (mean_bound_a2 + pi_half_beta * var_bound_a3) / (delta * rho * rho)));
  out.sigma_n = sigma_n_for(rho, delta, out.n_eps);
  const double n_eps_d = static_cast<double>(out.n_eps);
  const double denom = 8.0 * (2.0 * std::sqrt(static_cast<double>(p)) +
                              std::sqrt(std::log(4.0 * n_eps_d / delta))) *
                       grad_bound_a1;
  out.sigma_eps = std::min(1.0, rho / denom);
  return out;
}

}  // namespace hebo
