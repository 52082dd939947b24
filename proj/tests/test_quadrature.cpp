#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "fracfast/quadrature.hpp"
#include "fracfast/specfun.hpp"

using namespace fracfast;

TEST_CASE("one-point and two-point rules") {
  const Rule r0 = gauss_laguerre_rule(0.7, 0);
  REQUIRE(r0.size() == 1);
  CHECK(r0.nodes[0] == doctest::Approx(1.7).epsilon(1e-14));
  CHECK(r0.weights[0] == doctest::Approx(boost::math::tgamma(1.7)).epsilon(1e-14));

  const Rule r1 = gauss_laguerre_rule(0.0, 1);
  REQUIRE(r1.size() == 2);
  CHECK(r1.nodes[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r1.nodes[1] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r1.weights[0] == doctest::Approx((2 + std::sqrt(2.0)) / 4).epsilon(1e-14));
  CHECK(r1.weights[1] == doctest::Approx((2 - std::sqrt(2.0)) / 4).epsilon(1e-14));

  const Rule rh = gauss_laguerre_rule(-0.5, 1);
  CHECK(rh.weights.sum() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(rh.weights.dot(rh.nodes) == doctest::Approx(boost::math::tgamma(1.5)).epsilon(1e-14));
}

TEST_CASE("rules are exact for polynomials up to degree 2N+1") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pa(-0.99, 0.99);
  std::uniform_int_distribution<int> pn(0, 64);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = pa(rng);
    const int N = pn(rng);
    const Rule r = gauss_laguerre_rule(a, N);
    REQUIRE(r.size() == N + 1);
    for (int j = 0; j < r.size(); ++j) {
      CHECK(r.weights[j] > 0.0);
      CHECK(r.nodes[j] > 0.0);
      if (j) CHECK(r.nodes[j] > r.nodes[j - 1]);
    }
    for (int k = 0; k <= 2 * N + 1; ++k) {
      // compare in log form: high moments exceed double range otherwise
      double s = 0.0;
      for (int j = 0; j < r.size(); ++j) s += r.weights[j] * std::pow(r.nodes[j], k);
      const double ref = boost::math::tgamma(a + k + 1);
      CAPTURE(a);
      CAPTURE(N);
      CAPTURE(k);
      CHECK(std::abs(s - ref) <= 1e-10 * ref);
    }
  }
}

TEST_CASE("nodes are roots of the Laguerre polynomial") {
  const Rule r = gauss_laguerre_rule(0.4, 20);
  for (int j = 0; j < r.size(); ++j) {
    const double x = r.nodes[j];
    const double slope = (laguerre_eval(0.4, 21, x * (1 + 1e-7)) - laguerre_eval(0.4, 21, x)) /
                         (x * 1e-7);
    CHECK(std::abs(laguerre_eval(0.4, 21, x)) <= 1e-9 * std::abs(slope) * x);
  }
}

TEST_CASE("scaling") {
  const Rule unit = gauss_laguerre_rule(0.3, 6);
  const Rule same = scale_rule(unit, 1.0);
  CHECK((same.nodes - unit.nodes).norm() == 0.0);
  const Rule r = scale_rule(gauss_laguerre_rule(0.0, 0), 2.0);
  CHECK(r.nodes[0] == doctest::Approx(0.5));
  CHECK(r.weights[0] == doctest::Approx(0.5));
  const Rule s = scale_rule(unit, 3.7);
  CHECK(s.apply([](double) { return 1.0; }) ==
        doctest::Approx(boost::math::tgamma(1.3) * std::pow(3.7, -1.3)).epsilon(1e-13));
  CHECK_THROWS(scale_rule(s, 2.0));
}

TEST_CASE("truncation counts match the published sequences") {
  const double a[] = {1.8, 1.2, 0.8, 0.2, -0.2, -0.8};
  const int q128[] = {48, 47, 46, 44, 43, 41};
  const int q256[] = {69, 67, 65, 62, 61, 58};
  for (int i = 0; i < 6; ++i) {
    CHECK(truncation_count(a[i], 128, 1e-16) == q128[i] + 1);
    CHECK(truncation_count(a[i], 256, 1e-16) == q256[i] + 1);
  }
  CHECK(truncation_count(-0.9, 0, 1e-16) == 1);
}

TEST_CASE("weights decay past the truncation index") {
  for (int N : {128, 256}) {
    for (double a : {-0.8, 0.5, 1.8}) {
      const Rule r = gauss_laguerre_rule(a, N);
      const int q = truncation_count(a, N, 1e-16);
      for (int j = q; j <= N; ++j) {
        const double bound =
            10.0 * std::pow(N + 1.0, a) * std::exp(-0.25 * M_PI * M_PI * (j + 1.0) * (j + 1.0) / (N + 1.0));
        CAPTURE(N);
        CAPTURE(a);
        CAPTURE(j);
        CHECK(r.weights[j] <= bound);
      }
    }
  }
}

TEST_CASE("error factor values") {
  CHECK(laguerre_error_factor(0.3, 5, 0.0, 2.0) == 0.0);
  CHECK(laguerre_error_factor(0.3, 10, 2.0, 2.0) ==
        doctest::Approx(std::pow(2.0, -1.3) * std::pow(0.5, 20)));
  CHECK(laguerre_error_factor(0.5, 110, 18.0, 2.0) ==
        doctest::Approx(std::pow(2.0, -1.5) * std::pow(0.9, 220)));
}

TEST_CASE("quadrature error of exponentials follows the error factor") {
  const double a = -0.5, T = 2.0;
  for (double ratio : {1.0, 3.0, 9.0}) {
    const double t = ratio * T;
    const double exact = boost::math::tgamma(a + 1) * std::pow(t + T, -a - 1);
    double constant = -1.0;
    for (int N = 2; N <= 120; N += 6) {
      const Rule r = scale_rule(gauss_laguerre_rule(a, N), T);
      const double err = std::abs(r.apply([&](double l) { return std::exp(-t * l); }) - exact);
      const double factor = laguerre_error_factor(a, N, t, T);
      if (err < 1e-14 * exact) break;  // roundoff floor
      if (constant < 0) constant = err / factor;
      CAPTURE(ratio);
      CAPTURE(N);
      CHECK(err <= 100.0 * constant * factor);
    }
  }
}

TEST_CASE("dropping the tail changes an exponential sum by at most the tail mass") {
  for (double a : {-0.8, 0.5}) {
    const int N = 128;
    const double eps0 = 1e-16;
    const Rule full = scale_rule(gauss_laguerre_rule(a, N), 1.5);
    const Rule cut = truncate_rule(full, truncation_count(a, N, eps0));
    for (double t : {0.0, 0.01, 1.0, 10.0}) {
      auto f = [&](double l) { return std::exp(-t * l); };
      CHECK(std::abs(full.apply(f) - cut.apply(f)) <=
            (N + 1) * eps0 * std::max(1.0, full.apply([](double) { return 1.0; })));
    }
  }
}

TEST_CASE("rule csv dump") {
  std::ostringstream os;
  write_rule_csv(os, gauss_laguerre_rule(0.0, 1));
  const std::string s = os.str();
  CHECK(s.rfind("j,node,weight\n", 0) == 0);
  CHECK(s.find("0,0.58578643762690") != std::string::npos);
}
