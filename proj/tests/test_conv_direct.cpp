#include <cmath>
#include <deque>
#include <memory>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "fracfast/conv_direct.hpp"
#include "fracfast/errors.hpp"

using namespace fracfast;
using boost::math::tgamma;

namespace {

template <typename F>
std::unique_ptr<DirectConvolution> fed(double alpha, double tau, int n0, InterpKind kind, int n,
                                       F&& u) {
  auto op = std::make_unique<DirectConvolution>(alpha, tau, n0, kind);
  for (int j = 0; j <= n; ++j) op->push_sample(u(j * tau));
  return op;
}

}  // namespace

TEST_CASE("direct values on simple inputs") {
  auto one = fed(0.5, 0.1, 1, InterpKind::Quadratic, 10, [](double) { return 1.0; });
  CHECK(one->eval_scalar(10) == doctest::Approx(1.1283791670955126).epsilon(1e-13));
  // half derivative and half integral of t at t = 1
  auto lin = fed(-0.5, 0.05, 3, InterpKind::Linear, 20, [](double t) { return t; });
  CHECK(lin->eval_scalar(20) == doctest::Approx(tgamma(2.0) / tgamma(1.5)).epsilon(1e-12));
  CHECK(lin->eval_scalar(20) == doctest::Approx(1.1283791670955126).epsilon(1e-12));
  auto half = fed(0.5, 0.05, 3, InterpKind::Linear, 20, [](double t) { return t; });
  CHECK(half->eval_scalar(20) == doctest::Approx(0.7522527780636751).epsilon(1e-12));
  auto sq = fed(0.5, 0.1, 4, InterpKind::Quadratic, 20, [](double t) { return t * t; });
  CHECK(sq->eval_scalar(20) ==
        doctest::Approx(tgamma(3.0) / tgamma(3.5) * std::pow(2.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("insufficient samples are rejected") {
  DirectConvolution op(0.5, 0.1, 1, InterpKind::Quadratic);
  op.push_sample(1.0);
  op.push_sample(1.0);
  CHECK_THROWS_AS(op.eval(1), StateError);
  CHECK_THROWS_AS(op.eval(5), StateError);
}

TEST_CASE("local and history split") {
  const double tau = 0.1;
  auto op = fed(0.5, tau, 10, InterpKind::Quadratic, 20, [](double) { return 1.0; });
  for (int n = 2; n <= 10; ++n) CHECK(op->split_eval(n).second.norm() == 0.0);
  // window [1, 2] against the kernel, and the remainder [0, 1]
  const auto [local, history] = op->split_eval(20);
  CHECK(local[0] == doctest::Approx(1.1283791670955126).epsilon(1e-13));
  const double expect_history = (std::pow(2.0, 0.5) - 1.0) / tgamma(1.5);
  CHECK(history[0] == doctest::Approx(expect_history).epsilon(1e-13));
}

TEST_CASE("total does not depend on the memory length") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  std::vector<double> u(121);
  for (auto& v : u) v = pick(rng);
  for (auto kind : {InterpKind::Linear, InterpKind::Quadratic}) {
    for (double alpha : {0.5, -0.3}) {
      std::deque<DirectConvolution> ops;
      for (int n0 : {1, 5, 25}) {
        ops.emplace_back(alpha, 0.1, n0, kind);
        for (double v : u) ops.back().push_sample(v);
      }
      for (int n = 2; n <= 120; ++n) {
        const double ref = ops[0].eval_scalar(n);
        for (auto& op : ops) CHECK(std::abs(op.eval_scalar(n) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("polynomials are reproduced exactly") {
  for (double alpha : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
    for (int n0 : {1, 4, 13}) {
      for (auto kind : {InterpKind::Linear, InterpKind::Quadratic}) {
        const int degree = kind == InterpKind::Linear ? 1 : 2;
        for (int d = 0; d <= degree; ++d) {
          const double tau = 0.07;
          auto op = fed(alpha, tau, n0, kind, 60, [d](double t) { return std::pow(t, d); });
          for (int n = 2; n <= 60; n += 7) {
            const double t = n * tau;
            const double ref = tgamma(d + 1.0) / tgamma(d + 1.0 + alpha) * std::pow(t, d + alpha);
            CAPTURE(alpha);
            CAPTURE(n0);
            CAPTURE(d);
            CHECK(std::abs(op->eval_scalar(n) - ref) <= 1e-11 * std::abs(ref));
          }
        }
      }
    }
  }
}

TEST_CASE("linear in the samples") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  DirectConvolution a(0.4, 0.2, 3), b(0.4, 0.2, 3), c(0.4, 0.2, 3);
  const double s = 1.7, r = -0.6;
  for (int j = 0; j <= 80; ++j) {
    const double x = pick(rng), y = pick(rng);
    a.push_sample(x);
    b.push_sample(y);
    c.push_sample(s * x + r * y);
  }
  for (int n = 2; n <= 80; ++n)
    CHECK(std::abs(c.eval_scalar(n) - (s * a.eval_scalar(n) + r * b.eval_scalar(n))) <= 1e-13);
}

TEST_CASE("affine form and vector samples") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  for (auto kind : {InterpKind::Linear, InterpKind::Quadratic}) {
    DirectConvolution vec(-0.6, 0.1, 2, kind, 2, {0.4, 0.8});
    DirectConvolution x(-0.6, 0.1, 2, kind, 1, {0.4, 0.8});
    for (int j = 0; j <= 40; ++j) {
      Eigen::Vector2d u(pick(rng), pick(rng));
      const bool implicit = j > 2 && vec.samples_needed(j) == j + 1;  // past the corrected start
      AffineValue av;
      if (implicit) av = vec.affine(j);
      vec.push_sample(u);
      x.push_sample(u[0]);
      if (implicit) {
        const Eigen::VectorXd full = vec.eval(j);
        CHECK((av.base + av.diag * u - full).norm() <= 1e-13 * std::max(1.0, full.norm()));
        CHECK(std::abs(full[0] - x.eval_scalar(j)) <= 1e-14 * std::max(1.0, std::abs(full[0])));
      }
    }
  }
}
