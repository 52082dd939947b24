#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "fracfast/conv_direct.hpp"
#include "fracfast/conv_fast.hpp"
#include "fracfast/errors.hpp"

using namespace fracfast;
using boost::math::tgamma;

namespace {

FastParams params(double alpha, double tau, int n0, int B, double eps, int steps,
                  InterpKind kind = InterpKind::Quadratic) {
  FastParams p;
  p.alpha = alpha;
  p.tau = tau;
  p.n0 = n0;
  p.B = B;
  p.eps = eps;
  p.kind = kind;
  p.horizon = steps * tau;
  return p;
}

}  // namespace

TEST_CASE("level orders") {
  CHECK(level_ratio(5, 1.0, 1) == doctest::Approx(8.0));
  CHECK(select_level_order(5, 1.0, 1, 1e-10) == 98);
  CHECK(level_ratio(5, 10.0, 1) == doctest::Approx(0.8));
  CHECK(select_level_order(5, 10.0, 1, 1e-10) == 15);
  CHECK(level_ratio(2, 1.0, 1) == doctest::Approx(2.0));
  CHECK(select_level_order(2, 1.0, 1, 1e-10) == 29);
  for (int l = 3; l <= 8; ++l)
    for (double ratio : {1.0, 10.0, 50.0})
      CHECK(select_level_order(10, ratio, l, 1e-10) >= select_level_order(2, ratio, l, 1e-10));
}

TEST_CASE("partition examples") {
  const auto p = partition_for(10, 1, 2, 1.0);
  CHECK(p.L == 3);
  CHECK(p.anchors == std::vector<long>{9, 8, 4, 0});
  CHECK(p.q[1] == 4);
  CHECK(p.q[2] == 1);
  const auto p5 = partition_for(37, 1, 5, 1.0);
  CHECK(p5.L == 2);
  CHECK(p5.anchors == std::vector<long>{36, 30, 0});
  CHECK(p5.q[1] == 6);
  CHECK(partition_for(7, 7, 5, 0.1).empty());
  CHECK(partition_for(3, 7, 5, 0.1).empty());
}

TEST_CASE("partition invariants") {
  for (int B : {2, 3, 5, 10}) {
    for (int n0 : {1, 4}) {
      for (int n = n0 + 1; n < 5000; n += (n < 300 ? 1 : 37)) {
        const auto part = partition_for(n, n0, B, 1.0);
        const long p = n - n0 + 1;
        REQUIRE(part.anchors.size() == static_cast<size_t>(part.L + 1));
        CHECK(part.anchors.front() == p - 1);
        CHECK(part.anchors.back() == 0);
        long BL = 1;
        for (int l = 1; l <= part.L; ++l) BL *= B;
        CHECK(p < 2 * BL);
        CHECK(p >= 2 * BL / B);
        long Bl = 1;
        for (int l = 1; l <= part.L; ++l) {
          Bl *= B;
          CHECK(part.anchors[l] < part.anchors[l - 1]);
          // the exponential shift stays non-negative
          CHECK(p - part.anchors[l - 1] - Bl / B >= 0);
          if (l < part.L) {
            CHECK(p - part.anchors[l] >= Bl);
            CHECK(p - part.anchors[l] <= 2 * Bl - 1);
            CHECK(part.anchors[l] == part.q[l] * Bl);
          }
        }
      }
    }
  }
}

TEST_CASE("incremental history equals the from-scratch evaluation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  for (int B : {2, 5}) {
    for (auto kind : {InterpKind::Linear, InterpKind::Quadratic}) {
      for (int n0 : {1, 3}) {
        auto p = params(-0.4, 0.05, n0, B, 1e-10, 1000, kind);
        p.retain_log = true;
        FastConvolution op(p);
        op.push_sample(pick(rng));
        for (int k = 1; k <= 1000; ++k) {
          op.push_sample(pick(rng));
          if (op.samples_needed(k) != op.size()) continue;
          const double h = op.history_fast(k)[0];
          const double ref = op.reference_history(k)[0];
          if (k <= n0) CHECK(ref == 0.0);
          CAPTURE(B);
          CAPTURE(k);
          CHECK(std::abs(h - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
        }
      }
    }
  }
}

TEST_CASE("inside the memory window the fast value is the direct value") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  auto p = params(0.6, 0.1, 20, 5, 1e-10, 200);
  FastConvolution fast(p);
  DirectConvolution direct(0.6, 0.1, 20);
  for (int j = 0; j <= 20; ++j) {
    const double u = pick(rng);
    fast.push_sample(u);
    direct.push_sample(u);
    for (int n = std::max(1, j - 1); n <= j; ++n) {
      if (fast.samples_needed(n) != fast.size()) continue;
      CHECK(std::abs(fast.eval_scalar(n) - direct.eval_scalar(n)) <=
            1e-15 * std::max(1.0, std::abs(direct.eval_scalar(n))));
    }
  }
}

TEST_CASE("fast history stays within the designed precision of the direct history") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  const double tau = 1.0 / 32;
  const int steps = 40 * 32;
  for (double alpha : {0.5, -0.5}) {
    auto p = params(alpha, tau, 16, 5, 1e-10, steps);
    FastConvolution fast(p);
    DirectConvolution direct(alpha, tau, 16);
    double worst = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double u = pick(rng);
      fast.push_sample(u);
      direct.push_sample(u);
      if (k >= 2) worst = std::max(worst, std::abs(fast.history_fast(k)[0] - direct.split_eval(k).second[0]));
    }
    CAPTURE(alpha);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("kernel accuracy on a linear input") {
  for (int B : {2, 5}) {
    auto p = params(0.5, 0.1, 1, B, 1e-10, 3000);
    FastConvolution op(p);
    double worst = 0.0;
    for (int k = 0; k <= 3000; ++k) {
      op.push_sample(1.0 + k * 0.1);
      for (int n = std::max(1, k - 1); n <= k; ++n) {
        if (op.samples_needed(n) != op.size()) continue;
        const double t = n * 0.1;
        const double exact = std::pow(t, 0.5) / tgamma(1.5) + std::pow(t, 1.5) / tgamma(2.5);
        worst = std::max(worst, std::abs(op.eval_scalar(n) - exact) / exact);
      }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("memory stays bounded and modes stay small") {
  auto p = params(-0.5, 0.01, 50, 5, 1e-10, 100000);
  FastConvolution op(p);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pick(-2.0, 2.0);
  long at[3] = {0, 0, 0};
  for (int k = 0; k <= 100000; ++k) {
    op.push_sample(pick(rng));
    if (k == 1000) at[0] = op.active_memory();
    if (k == 10000) at[1] = op.active_memory();
    if (k == 100000) at[2] = op.active_memory();
  }
  long budget = 50;
  for (const auto& d : op.diagnostics()) budget += (2 * 5 + 1) * d.retained;
  for (long m : at) CHECK(m <= 4 * budget);
  CHECK(at[2] <= 2 * at[1]);
  const double longest = std::pow(5.0, op.level_count() - 1) * 0.01;
  CHECK(op.max_state_abs() <= 1.5 * 2.0 * longest);
}

TEST_CASE("vector samples, affine form and diagnostics") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  auto p = params(-0.7, 0.1, 3, 3, 1e-10, 300);
  p.sigmas = {0.7, 1.4};
  FastConvolution vec(p, 3);
  FastConvolution one(p, 1);
  for (int k = 0; k <= 300; ++k) {
    Eigen::Vector3d u(pick(rng), pick(rng), pick(rng));
    if (k >= 1 && vec.samples_needed(k) == k + 1) {
      const AffineValue av = vec.affine(k);
      vec.push_sample(u);
      one.push_sample(u[0]);
      if (vec.samples_needed(k) == vec.size()) {
        const Eigen::VectorXd full = vec.eval(k);
        CHECK((av.base + av.diag * u - full).norm() <= 1e-12 * std::max(1.0, full.norm()));
        CHECK(std::abs(full[0] - one.eval_scalar(k)) <= 1e-14 * std::max(1.0, std::abs(full[0])));
      }
    } else {
      vec.push_sample(u);
      one.push_sample(u[0]);
    }
  }
  std::ostringstream os;
  vec.write_diagnostics_csv(os);
  CHECK(os.str().rfind("level,N_ell,q_retained,T_hat,blocks_held\n", 0) == 0);
  for (const auto& d : vec.diagnostics()) CHECK(d.blocks_held <= 2 * 3 + 1);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(FastConvolution(params(0.0, 0.1, 1, 5, 1e-10, 10)), DomainError);
  CHECK_THROWS_AS(FastConvolution(params(0.5, 0.1, 1, 1, 1e-10, 10)), DomainError);
  CHECK_THROWS_AS(FastConvolution(params(0.5, 0.1, 0, 5, 1e-10, 10)), DomainError);
  CHECK_THROWS_AS(FastConvolution(params(0.5, 0.1, 1, 5, 1.5, 10)), DomainError);
}
