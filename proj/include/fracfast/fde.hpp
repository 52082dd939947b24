#ifndef FRACFAST_FDE_HPP
#define FRACFAST_FDE_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracfast/interp.hpp"

namespace fracfast {

/// Caputo system D^{alpha_k} u_k = f_k(u, t), u(0) = u0.
struct FdeProblem {
  using Rhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;
  using Jacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)>;

  std::vector<double> orders;
  Eigen::VectorXd u0;
  Rhs rhs;
  Jacobian jacobian;  // optional; finite differences otherwise

  int dim() const { return static_cast<int>(u0.size()); }
  void validate() const;
};

/// D^alpha u = -A u, u0 = 1; exact solution E_alpha(-A t^alpha).
FdeProblem relaxation_problem(double alpha, double A = 1.0);
/// D^alpha u = -A u + u (1 - u^2), u0 = 1.
FdeProblem cubic_problem(double alpha, double A = 1.0);
/// Fractional Lorenz-type system with c1 = 1/4, c2 = 1, c3 = 1/4 started at (2, 0.9, 0.2).
FdeProblem lorenz_problem(const std::array<double, 3>& orders);

double exact_relaxation(double alpha, double A, double t);

enum class OperatorMode { Direct, Fast };

struct SolverConfig {
  OperatorMode mode = OperatorMode::Fast;
  double tau = 0.01;
  int n0 = 1;
  int B = 5;
  double eps = 1e-10;
  double eps0 = 1e-16;
  InterpKind kind = InterpKind::Quadratic;
  int m = 0;
  std::vector<double> sigmas;  // empty: sigma_k = k alpha per component
  double newton_tol = 1e-12;
  int newton_max = 50;
  long startup_cap = 1000000;  // total fine steps of the starting solve

  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  Eigen::MatrixXd U;  // dim x (steps + 1)
  double max_residual = 0.0;
  long newton_iterations = 0;
  long peak_memory = 0;  // reals held by the operators

  int steps() const { return static_cast<int>(t.size()) - 1; }
};

Trajectory solve_fde_system(const FdeProblem& problem, const SolverConfig& config, double T);
Trajectory solve_scalar_fde(const FdeProblem& problem, const SolverConfig& config, double T);

/// L1 scheme on the graded mesh t_j = T (j/M)^r.
Trajectory graded_l1_solve(const FdeProblem& problem, double r, int M, double T,
                           double newton_tol = 1e-12, int newton_max = 50);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fracfast

#endif  // FRACFAST_FDE_HPP
