#ifndef FRACFAST_EXPERIMENTS_HPP
#define FRACFAST_EXPERIMENTS_HPP

#include <array>
#include <string>
#include <vector>

#include "fracfast/conv_fast.hpp"
#include "fracfast/fde.hpp"

namespace fracfast {

struct KernelErrorResult {
  double max_rel_error = 0.0;
  int steps = 0;
  int sum_order = 0;
  int sum_retained = 0;
  long memory = 0;
  double seconds = 0.0;
};

/// Fast operator applied to u = 1 + t against the closed-form convolution.
KernelErrorResult kernel_error(const FastParams& params);

struct ErrorSummary {
  double err_inf = 0.0;
  double err_end = 0.0;
  double seconds = 0.0;
};

/// Relaxation problem (A = 1) against its Mittag-Leffler solution.
ErrorSummary relaxation_errors(double alpha, const SolverConfig& config, double T);
ErrorSummary graded_errors(double alpha, double r, int M, double T);

/// max_n |U_direct - U_fast| on the relaxation problem.
double fast_direct_gap(double alpha, SolverConfig config, double T);

struct LorenzSummary {
  double initial_r2 = 0.0;
  double max_r2_steps = 0.0;  // over n >= 1
  int first_inside = -1;      // first n after which U^2+V^2+W^2 < 2 for good
  double max_r2_after_entry = 0.0;
  double max_abs = 0.0;
  bool finite = true;
  double seconds = 0.0;
};

LorenzSummary lorenz_summary(const std::array<double, 3>& orders, const SolverConfig& config,
                             double T, Trajectory* keep = nullptr);

struct BenchmarkPoint {
  double seconds = 0.0;
  long memory = 0;
  double u_end = 0.0;
};

/// Cubic problem timed end to end.
BenchmarkPoint benchmark_point(double alpha, const SolverConfig& config, double T);

/// Least-squares slope of log(err) against log(tau).
double fitted_order(const std::vector<double>& tau, const std::vector<double>& err);

// Report assembly for the command-line runner.

struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentConfig {
  std::string name;
  std::vector<double> alpha, tau, deltaT, B, eps, T, m, r;
  double eps0 = 1e-16;
  std::vector<double> sigma;  // explicit correction exponents
  bool kind_set = false;
  InterpKind kind = InterpKind::Quadratic;
  bool mode_set = false;
  OperatorMode mode = OperatorMode::Fast;
  int N = 64;
  int threads = 1;
  bool keep_trajectory = true;
};

/// Result tables plus timing tables (kept apart so result files stay
/// byte-identical across runs).
struct Report {
  std::vector<Table> results;
  std::vector<Table> timings;
};

const std::vector<std::string>& experiment_names();
Report run_experiment(ExperimentConfig config);
void write_table(const std::string& dir, const Table& table);
std::string format_real(double x);

}  // namespace fracfast

#endif  // FRACFAST_EXPERIMENTS_HPP
