#include "fracfast/fde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>

#include "fracfast/conv_direct.hpp"
#include "fracfast/conv_fast.hpp"
#include "fracfast/errors.hpp"
#include "fracfast/specfun.hpp"

namespace fracfast {

void FdeProblem::validate() const {
  if (u0.size() < 1) throw DomainError("problem: empty initial state");
  if (static_cast<int>(orders.size()) != u0.size())
    throw DomainError("problem: one order per component is required");
  for (double a : orders)
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("problem: orders must lie in (0, 1]");
  if (!rhs) throw DomainError("problem: missing right-hand side");
}

void SolverConfig::validate() const {
  if (!(tau > 0.0)) throw DomainError("solver: tau must be positive");
  if (n0 < 1) throw DomainError("solver: memory length must be at least one step");
  if (!(newton_tol > 0.0)) throw DomainError("solver: Newton tolerance must be positive");
  if (newton_max < 1) throw DomainError("solver: Newton iteration cap must be positive");
  if (m < 0) throw DomainError("solver: negative correction count");
  if (!sigmas.empty() && static_cast<int>(sigmas.size()) != m)
    throw DomainError("solver: exponent list must have m entries");
}

FdeProblem relaxation_problem(double alpha, double A) {
  FdeProblem p;
  p.orders = {alpha};
  p.u0 = Eigen::VectorXd::Ones(1);
  p.rhs = [A](const Eigen::VectorXd& u, double) -> Eigen::VectorXd { return -A * u; };
  p.jacobian = [A](const Eigen::VectorXd&, double) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -A);
  };
  return p;
}

FdeProblem cubic_problem(double alpha, double A) {
  FdeProblem p;
  p.orders = {alpha};
  p.u0 = Eigen::VectorXd::Ones(1);
  p.rhs = [A](const Eigen::VectorXd& u, double) -> Eigen::VectorXd {
    return (-A * u.array() + u.array() * (1.0 - u.array().square())).matrix();
  };
  p.jacobian = [A](const Eigen::VectorXd& u, double) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -A + 1.0 - 3.0 * u[0] * u[0]);
  };
  return p;
}

FdeProblem lorenz_problem(const std::array<double, 3>& orders) {
  constexpr double c1 = 0.25, c2 = 1.0, c3 = 0.25;
  FdeProblem p;
  p.orders = {orders[0], orders[1], orders[2]};
  p.u0 = Eigen::Vector3d(2.0, 0.9, 0.2);
  p.rhs = [](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    return Eigen::Vector3d(x[2] + (x[1] - c1) * x[0], 1.0 - c2 * x[1] - x[0] * x[0],
                           -x[0] - c3 * x[2]);
  };
  p.jacobian = [](const Eigen::VectorXd& x, double) -> Eigen::MatrixXd {
    Eigen::Matrix3d J;
    J << x[1] - c1, x[0], 1.0,
         -2.0 * x[0], -c2, 0.0,
         -1.0, 0.0, -c3;
    return J;
  };
  return p;
}

double exact_relaxation(double alpha, double A, double t) {
  if (t == 0.0) return 1.0;
  return mittag_leffler(alpha, -A * std::pow(t, alpha));
}

namespace {

struct NewtonOutcome {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

Eigen::MatrixXd rhs_jacobian(const FdeProblem& problem, const Eigen::VectorXd& x, double t) {
  if (problem.jacobian) return problem.jacobian(x, t);
  const int d = problem.dim();
  Eigen::MatrixXd J(d, d);
  const Eigen::VectorXd f0 = problem.rhs(x, t);
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd xp = x;
    const double h = 1e-7 * (1.0 + std::abs(x[k]));
    xp[k] += h;
    J.col(k) = (problem.rhs(xp, t) - f0) / h;
  }
  return J;
}

// Solves diag .* x + base - f(x, t) = 0.
NewtonOutcome newton(const FdeProblem& problem, const Eigen::VectorXd& diag,
                     const Eigen::VectorXd& base, double t, Eigen::VectorXd x, double tol,
                     int max_it, int step) {
  NewtonOutcome out;
  double res = 0.0;
  for (int it = 0; it <= max_it; ++it) {
    const Eigen::VectorXd f = problem.rhs(x, t);
    const Eigen::VectorXd lin = diag.cwiseProduct(x);
    const Eigen::VectorXd g = lin + base - f;
    const double scale = std::max({1.0, lin.lpNorm<Eigen::Infinity>(),
                                   base.lpNorm<Eigen::Infinity>(), f.lpNorm<Eigen::Infinity>()});
    res = g.lpNorm<Eigen::Infinity>() / scale;
    if (!std::isfinite(res)) break;
    if (res <= tol) {
      out.x = x;
      out.residual = res;
      out.iterations = it;
      return out;
    }
    if (it == max_it) break;
    Eigen::MatrixXd J = -rhs_jacobian(problem, x, t);
    J.diagonal() += diag;
    const Eigen::VectorXd dx = J.partialPivLu().solve(g);
    x -= dx;
    if (dx.lpNorm<Eigen::Infinity>() <= 4e-16 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      // stagnated at rounding level; keep the honest residual
      const Eigen::VectorXd g2 = diag.cwiseProduct(x) + base - problem.rhs(x, t);
      out.x = x;
      out.residual = g2.lpNorm<Eigen::Infinity>() / scale;
      out.iterations = it + 1;
      if (out.residual <= 1e3 * tol) return out;
      res = out.residual;
      break;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "Newton failed at step %d (t = %.6g), scaled residual %.3e",
                step, t, res);
  throw NumericalFailure(buf);
}

std::vector<double> sigmas_for(const SolverConfig& config, double alpha) {
  if (!config.sigmas.empty()) return config.sigmas;
  std::vector<double> s;
  for (int k = 1; k <= config.m; ++k) s.push_back(k * alpha);
  return s;
}

struct StepDriver {
  const FdeProblem& problem;
  std::vector<std::unique_ptr<ConvolutionOperator>> ops;
  double tol;
  int max_it;
  Trajectory* traj;

  void push(const Eigen::VectorXd& u) {
    for (int k = 0; k < problem.dim(); ++k) ops[k]->push_sample(u[k]);
  }

  Eigen::VectorXd step(int n, double t, const Eigen::VectorXd& guess) {
    const int d = problem.dim();
    Eigen::VectorXd base(d), diag(d);
    for (int k = 0; k < d; ++k) {
      const AffineValue a = ops[k]->affine(n);
      const double alpha = problem.orders[k];
      base[k] = a.base[0] - problem.u0[k] * std::pow(t, -alpha) * rgamma(1.0 - alpha);
      diag[k] = a.diag;
    }
    const auto out = newton(problem, diag, base, t, guess, tol, max_it, n);
    traj->max_residual = std::max(traj->max_residual, out.residual);
    traj->newton_iterations += out.iterations;
    return out.x;
  }

  long memory() const {
    long s = 0;
    for (const auto& op : ops) s += op->active_memory();
    return s;
  }
};

// Values at tau, ..., count * tau from the L1 scheme with one correction term
// on the finer step tau / r, r ~ 1 / tau.
Eigen::MatrixXd starting_values(const FdeProblem& problem, const SolverConfig& config,
                                int count, Trajectory& traj) {
  const long cap_r = std::max<long>(1, config.startup_cap / count);
  const long r = std::clamp<long>(std::lround(1.0 / config.tau), 1, cap_r);
  const double h = config.tau / r;
  StepDriver fine{problem, {}, config.newton_tol, config.newton_max, &traj};
  for (int k = 0; k < problem.dim(); ++k) {
    const double alpha = problem.orders[k];
    fine.ops.push_back(std::make_unique<DirectConvolution>(
        -alpha, h, 1, InterpKind::Linear, 1, std::vector<double>{alpha}));
  }
  fine.push(problem.u0);
  Eigen::MatrixXd out(problem.dim(), count);
  Eigen::VectorXd u = problem.u0;
  for (long j = 1; j <= count * r; ++j) {
    u = fine.step(static_cast<int>(j), j * h, u);
    fine.push(u);
    if (j % r == 0) out.col(j / r - 1) = u;
  }
  return out;
}

}  // namespace

Trajectory solve_fde_system(const FdeProblem& problem, const SolverConfig& config, double T) {
  problem.validate();
  config.validate();
  if (!(T > 0.0)) throw DomainError("solver: final time must be positive");
  const double steps_real = T / config.tau;
  const int nT = static_cast<int>(std::lround(steps_real));
  if (nT < 1 || std::abs(steps_real - nT) > 1e-9 * std::max(1.0, steps_real))
    throw DomainError("solver: T must be a whole number of steps");

  const int d = problem.dim();
  Trajectory traj;
  traj.t.resize(nT + 1);
  for (int n = 0; n <= nT; ++n) traj.t[n] = n * config.tau;
  traj.U.resize(d, nT + 1);
  traj.U.col(0) = problem.u0;

  StepDriver main{problem, {}, config.newton_tol, config.newton_max, &traj};
  for (int k = 0; k < d; ++k) {
    const double alpha = problem.orders[k];
    if (config.mode == OperatorMode::Direct) {
      main.ops.push_back(std::make_unique<DirectConvolution>(-alpha, config.tau, config.n0,
                                                             config.kind, 1,
                                                             sigmas_for(config, alpha)));
    } else {
      FastParams fp;
      fp.alpha = -alpha;
      fp.tau = config.tau;
      fp.n0 = config.n0;
      fp.B = config.B;
      fp.eps = config.eps;
      fp.eps0 = config.eps0;
      fp.kind = config.kind;
      fp.horizon = nT * config.tau;
      fp.sigmas = sigmas_for(config, alpha);
      main.ops.push_back(std::make_unique<FastConvolution>(fp, 1));
    }
  }
  main.push(problem.u0);

  const int ns = std::min(std::max(config.m, 2), nT);
  const Eigen::MatrixXd start = starting_values(problem, config, ns, traj);
  for (int n = 1; n <= ns; ++n) {
    traj.U.col(n) = start.col(n - 1);
    main.push(traj.U.col(n));
  }
  traj.peak_memory = main.memory();
  for (int n = ns + 1; n <= nT; ++n) {
    const Eigen::VectorXd u = main.step(n, traj.t[n], traj.U.col(n - 1));
    traj.U.col(n) = u;
    main.push(u);
    if ((n & 1023) == 0) traj.peak_memory = std::max(traj.peak_memory, main.memory());
  }
  traj.peak_memory = std::max(traj.peak_memory, main.memory());
  return traj;
}

Trajectory solve_scalar_fde(const FdeProblem& problem, const SolverConfig& config, double T) {
  if (problem.dim() != 1) throw DomainError("solver: scalar solve needs a one-component problem");
  return solve_fde_system(problem, config, T);
}

Trajectory graded_l1_solve(const FdeProblem& problem, double r, int M, double T,
                           double newton_tol, int newton_max) {
  problem.validate();
  if (!(r >= 1.0)) throw DomainError("graded: grading exponent must be at least 1");
  if (M < 1) throw DomainError("graded: step count must be positive");
  if (!(T > 0.0)) throw DomainError("graded: final time must be positive");
  const int d = problem.dim();
  Trajectory traj;
  traj.t.resize(M + 1);
  for (int j = 0; j <= M; ++j) traj.t[j] = T * std::pow(double(j) / M, r);
  traj.U.resize(d, M + 1);
  traj.U.col(0) = problem.u0;
  const auto& t = traj.t;

  std::vector<double> c(d);
  for (int k = 0; k < d; ++k) c[k] = rgamma(2.0 - problem.orders[k]);

  for (int n = 1; n <= M; ++n) {
    Eigen::VectorXd base = Eigen::VectorXd::Zero(d), diag(d);
    for (int k = 0; k < d; ++k) {
      const double beta = 1.0 - problem.orders[k];
      double s = 0.0;
      for (int j = 0; j + 1 < n; ++j) {
        const double far = t[n] - t[j];
        const double near = t[n] - t[j + 1];
        const double kernel = std::pow(near, beta) * std::expm1(beta * std::log(far / near));
        s += (traj.U(k, j + 1) - traj.U(k, j)) / (t[j + 1] - t[j]) * kernel;
      }
      const double dt = t[n] - t[n - 1];
      diag[k] = c[k] * std::pow(dt, -problem.orders[k]);
      base[k] = c[k] * s - diag[k] * traj.U(k, n - 1);
    }
    const auto out = newton(problem, diag, base, t[n], traj.U.col(n - 1), newton_tol,
                            newton_max, n);
    traj.max_residual = std::max(traj.max_residual, out.residual);
    traj.newton_iterations += out.iterations;
    traj.U.col(n) = out.x;
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int d = static_cast<int>(traj.U.rows());
  os << "n,t";
  if (d == 1) {
    os << ",U";
  } else if (d == 3) {
    os << ",U,V,W";
  } else {
    for (int k = 1; k <= d; ++k) os << ",U" << k;
  }
  os << '\n';
  char buf[40];
  for (int n = 0; n <= traj.steps(); ++n) {
    os << n;
    std::snprintf(buf, sizeof buf, ",%.17g", traj.t[n]);
    os << buf;
    for (int k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", traj.U(k, n));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace fracfast
