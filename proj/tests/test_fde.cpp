#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "fracfast/errors.hpp"
#include "fracfast/fde.hpp"

using namespace fracfast;

TEST_CASE("exact relaxation values") {
  CHECK(exact_relaxation(0.7, 1.0, 0.0) == 1.0);
  CHECK(exact_relaxation(1.0, 2.0, 0.8) == doctest::Approx(std::exp(-1.6)).epsilon(1e-15));
  CHECK(exact_relaxation(0.5, 1.0, 1.0) == doctest::Approx(0.42758357615580700).epsilon(1e-13));
}

TEST_CASE("order one tracks the exponential at second order") {
  auto err = [](double tau) {
    SolverConfig c;
    c.tau = tau;
    c.m = 0;
    const Trajectory tr = solve_scalar_fde(relaxation_problem(1.0), c, 1.0);
    return std::abs(tr.U(0, tr.steps()) - std::exp(-1.0));
  };
  const double e1 = err(1.0 / 50), e2 = err(1.0 / 100);
  CHECK(e2 <= 1e-4);
  CHECK(e1 / e2 >= 3.0);
  CHECK(e1 / e2 <= 5.0);
}

TEST_CASE("decoupled system equals separate scalar solves") {
  for (auto mode : {OperatorMode::Direct, OperatorMode::Fast}) {
    FdeProblem sys;
    sys.orders = {0.5, 0.8};
    sys.u0 = Eigen::Vector2d(1.0, -0.5);
    sys.rhs = [](const Eigen::VectorXd& u, double) {
      return Eigen::VectorXd(Eigen::Vector2d(-u[0], -2.0 * u[1]));
    };
    SolverConfig c;
    c.mode = mode;
    c.tau = 1.0 / 64;
    c.n0 = 8;
    c.m = 2;
    const Trajectory both = solve_fde_system(sys, c, 4.0);
    for (int k = 0; k < 2; ++k) {
      FdeProblem one = relaxation_problem(sys.orders[k], k == 0 ? 1.0 : 2.0);
      one.u0 = Eigen::VectorXd::Constant(1, sys.u0[k]);
      const Trajectory tr = solve_scalar_fde(one, c, 4.0);
      CHECK((both.U.row(k) - tr.U.row(0)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("graded L1 is exact for a linear solution") {
  for (double alpha : {0.3, 0.5, 0.9}) {
    for (double r : {1.0, 2.0, 3.5}) {
      FdeProblem p;
      p.orders = {alpha};
      p.u0 = Eigen::VectorXd::Zero(1);
      const double g = 1.0 / boost::math::tgamma(2.0 - alpha);
      p.rhs = [=](const Eigen::VectorXd&, double t) {
        return Eigen::VectorXd::Constant(1, g * std::pow(t, 1.0 - alpha));
      };
      const Trajectory tr = graded_l1_solve(p, r, 40, 2.0);
      for (int n = 0; n <= tr.steps(); ++n) CHECK(std::abs(tr.U(0, n) - tr.t[n]) <= 1e-12);
      CHECK(tr.t.back() == doctest::Approx(2.0));
    }
  }
}

TEST_CASE("fast and direct solutions agree to the level precision") {
  for (double eps : {1e-6, 1e-8, 1e-10, 1e-12}) {
    SolverConfig c;
    c.tau = 1.0 / 32;
    c.n0 = 16;
    c.m = 2;
    c.eps = eps;
    c.mode = OperatorMode::Direct;
    const Trajectory d = solve_scalar_fde(cubic_problem(0.5), c, 20.0);
    c.mode = OperatorMode::Fast;
    const Trajectory f = solve_scalar_fde(cubic_problem(0.5), c, 20.0);
    CHECK((d.U - f.U).cwiseAbs().maxCoeff() <= 10 * eps);
    CHECK(f.max_residual <= c.newton_tol);
    CHECK(d.max_residual <= c.newton_tol);
  }
}

TEST_CASE("quadratic corrected scheme converges at nearly 3 - alpha on a short run") {
  auto err = [](double tau) {
    SolverConfig c;
    c.tau = tau;
    c.n0 = static_cast<int>(std::lround(0.5 / tau));
    c.m = 3;
    const Trajectory tr = solve_scalar_fde(relaxation_problem(0.8), c, 4.0);
    double e = 0.0;
    for (int n = 0; n <= tr.steps(); ++n)
      e = std::max(e, std::abs(tr.U(0, n) - exact_relaxation(0.8, 1.0, tr.t[n])));
    return e;
  };
  const double order = std::log(err(1.0 / 32) / err(1.0 / 128)) / std::log(4.0);
  CHECK(order >= 1.9);
  CHECK(order <= 2.5);
}

TEST_CASE("input validation and output format") {
  SolverConfig c;
  c.tau = 0.1;
  CHECK_THROWS_AS(solve_scalar_fde(relaxation_problem(1.2), c, 1.0), DomainError);
  CHECK_THROWS_AS(solve_scalar_fde(relaxation_problem(0.5), c, 1.05), DomainError);
  const Trajectory tr = solve_scalar_fde(relaxation_problem(0.5), c, 0.3);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  CHECK(os.str().rfind("n,t,U\n0,0,1\n", 0) == 0);
  const Trajectory lz = solve_fde_system(lorenz_problem({0.9, 0.9, 0.9}), c, 0.2);
  std::ostringstream ls;
  write_trajectory_csv(ls, lz);
  CHECK(ls.str().rfind("n,t,U,V,W\n", 0) == 0);
}
