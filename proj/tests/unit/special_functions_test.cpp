#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "hebo/special_functions.hpp"

namespace sf = hebo::sf;

TEST_SUITE("special_functions") {

TEST_CASE("normal cdf matches reference values") {
  // Reference values from scipy.stats.norm.cdf.
  CHECK(sf::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(sf::normal_cdf(-6.0) - 9.865876450376946e-10) < 1e-10);
  CHECK(std::abs(sf::normal_cdf(-3.0) - 1.349898031630093e-03) < 1e-10);
  CHECK(std::abs(sf::normal_cdf(-1.5) - 6.680720126885807e-02) < 1e-10);
  CHECK(std::abs(sf::normal_cdf(0.5) - 6.914624612740131e-01) < 1e-10);
  CHECK(std::abs(sf::normal_cdf(3.0) - 9.986501019683699e-01) < 1e-10);
  CHECK(std::abs(sf::normal_cdf(6.0) - 9.999999990134123e-01) < 1e-10);
}

TEST_CASE("normal quantile matches reference values and inverts the cdf") {
  CHECK(std::abs(sf::normal_quantile(0.001) - -3.090232306167813) < 1e-9);
  CHECK(std::abs(sf::normal_quantile(0.025) - -1.959963984540054) < 1e-9);
  CHECK(std::abs(sf::normal_quantile(0.3) - -0.5244005127080409) < 1e-12);
  CHECK(sf::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(sf::normal_quantile(0.999) - 3.090232306167813) < 1e-9);
  CHECK(std::abs(sf::normal_quantile(1e-9) - -5.997807015007687) < 1e-7);

  for (double x = -6.0; x <= 6.0; x += 0.25) {
    CHECK(std::abs(sf::normal_quantile(sf::normal_cdf(x)) - x) < 1e-8);
  }
  CHECK_THROWS(sf::normal_quantile(0.0));
  CHECK_THROWS(sf::normal_quantile(1.0));
}

TEST_CASE("regularized incomplete beta matches reference values") {
  // scipy.special.betainc.
  CHECK(std::abs(sf::reg_incomplete_beta(0.5, 0.5, 0.3) - 3.690101195655454e-01) < 1e-8);
  CHECK(std::abs(sf::reg_incomplete_beta(2, 3, 0.5) - 0.6875) < 1e-10);
  CHECK(std::abs(sf::reg_incomplete_beta(5, 1, 0.9) - 5.904900000000001e-01) < 1e-10);
  CHECK(std::abs(sf::reg_incomplete_beta(10, 10, 0.5) - 0.5) < 1e-10);
  CHECK(std::abs(sf::reg_incomplete_beta(0.1, 5, 0.01) - 7.690889207843462e-01) < 1e-8);
  CHECK(sf::reg_incomplete_beta(2, 2, 0.0) == 0.0);
  CHECK(sf::reg_incomplete_beta(2, 2, 1.0) == 1.0);
}

TEST_CASE("regularized incomplete gamma matches reference values") {
  // scipy.special.gammainc.
  CHECK(std::abs(sf::reg_incomplete_gamma(0.5, 0.25) - 5.204998778130466e-01) < 1e-8);
  CHECK(std::abs(sf::reg_incomplete_gamma(1, 1) - 6.321205588285577e-01) < 1e-10);
  CHECK(std::abs(sf::reg_incomplete_gamma(2.5, 2.0) - 4.505840486472198e-01) < 1e-8);
  CHECK(std::abs(sf::reg_incomplete_gamma(10, 9.5) - 4.781739777627924e-01) < 1e-8);
  CHECK(std::abs(sf::reg_incomplete_gamma(25, 30) - 8.427579727616085e-01) < 1e-8);
}

TEST_CASE("student-t, F, chi-square cdfs") {
  CHECK(std::abs(sf::student_t_cdf(-2.5, 4) - 3.338327240599406e-02) < 1e-10);
  CHECK(sf::student_t_cdf(0, 7) == doctest::Approx(0.5));
  CHECK(std::abs(sf::student_t_cdf(1.0, 1) - 0.75) < 1e-10);
  CHECK(std::abs(sf::student_t_cdf(3.5, 9) - 9.966382421184705e-01) < 1e-10);

  CHECK(std::abs(sf::f_cdf(1.0, 49, 450) - 5.227517161178158e-01) < 1e-8);
  CHECK(std::abs(sf::f_cdf(2.5, 3, 10) - 8.809604373417218e-01) < 1e-8);
  CHECK(std::abs(sf::f_cdf(0.5, 10, 5) - 1.641949508997387e-01) < 1e-8);

  // chi-square with 2 dof is exactly 1 - exp(-x/2).
  for (double x : {0.5, 1.0, 5.0}) {
    CHECK(std::abs(sf::chisq_cdf(x, 2) - (1.0 - std::exp(-0.5 * x))) < 1e-12);
  }
  CHECK(std::abs(sf::chisq_cdf(60.0, 49) - 8.651356534746792e-01) < 1e-8);
  CHECK(std::abs(sf::chisq_cdf(10, 3) - 9.814338645369568e-01) < 1e-8);
}

TEST_CASE("domain errors") {
  CHECK_THROWS(sf::reg_incomplete_beta(-1, 2, 0.5));
  CHECK_THROWS(sf::reg_incomplete_beta(1, 2, 1.5));
  CHECK_THROWS(sf::reg_incomplete_gamma(0.0, 1.0));
  CHECK_THROWS(sf::reg_incomplete_gamma(1.0, -0.5));
  CHECK_THROWS(sf::chisq_cdf(1.0, 0.0));
}

}  // TEST_SUITE
