#include "fracfast/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "fracfast/errors.hpp"
#include "fracfast/specfun.hpp"

namespace fracfast {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int steps_for(double span, double tau, const char* what) {
  const double s = span / tau;
  const double r = std::round(s);
  if (!(r >= 1.0) || std::abs(s - r) > 1e-9 * std::max(1.0, r))
    throw DomainError(std::string(what) + " must be a positive whole number of steps");
  return static_cast<int>(r);
}

// Runs job(i) for i < count on up to `threads` workers; the first exception
// is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& given, std::vector<T> fallback) {
  return given.empty() ? fallback : given;
}

std::vector<double> powers_of_two(int from, int to) {
  std::vector<double> out;
  for (int e = from; e >= to; --e) out.push_back(std::ldexp(1.0, e));
  return out;
}

std::string fmt_int(long v) { return std::to_string(v); }

SolverConfig solver_from(const ExperimentConfig& c, double tau, double deltaT, int B, double eps,
                         int m) {
  SolverConfig s;
  s.mode = c.mode;
  s.tau = tau;
  s.n0 = steps_for(deltaT, tau, "deltaT");
  s.B = B;
  s.eps = eps;
  s.eps0 = c.eps0;
  s.kind = c.kind;
  s.m = m;
  if (!c.sigma.empty()) {
    if (static_cast<int>(c.sigma.size()) != m)
      throw DomainError("--sigma must list exactly m exponents");
    s.sigmas = c.sigma;
  }
  return s;
}

int as_int(double v, const char* what) {
  if (v != std::round(v)) throw DomainError(std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

Report run_kernel_error(const ExperimentConfig& c) {
  struct Point {
    double alpha, tau, deltaT, T, B, eps;
  };
  std::vector<Point> pts;
  for (double a : or_default(c.alpha, {-0.5}))
    for (double tau : or_default(c.tau, {0.1}))
      for (double dT : or_default(c.deltaT, {1.0}))
        for (double T : or_default(c.T, {1e4}))
          for (double B : or_default(c.B, {5.0}))
            for (double eps : or_default(c.eps, {1e-10})) pts.push_back({a, tau, dT, T, B, eps});
  std::vector<KernelErrorResult> res(pts.size());
  parallel_for(static_cast<int>(pts.size()), c.threads, [&](int i) {
    const Point& p = pts[i];
    FastParams fp;
    fp.alpha = p.alpha;
    fp.tau = p.tau;
    fp.n0 = steps_for(p.deltaT, p.tau, "deltaT");
    fp.B = as_int(p.B, "B");
    fp.eps = p.eps;
    fp.eps0 = c.eps0;
    fp.kind = c.kind;
    fp.horizon = p.T;
    res[i] = kernel_error(fp);
  });
  Report rep;
  Table t{"kernel_error.csv",
          {"alpha", "tau", "deltaT", "T", "B", "eps", "eps0", "steps", "sum_N", "sum_q",
           "active_memory", "max_rel_error"},
          {}};
  Table tm{"kernel_error_timing.csv", {"alpha", "tau", "B", "eps", "seconds"}, {}};
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& r = res[i];
    t.rows.push_back({format_real(p.alpha), format_real(p.tau), format_real(p.deltaT),
                      format_real(p.T), fmt_int(as_int(p.B, "B")), format_real(p.eps),
                      format_real(c.eps0), fmt_int(r.steps), fmt_int(r.sum_order),
                      fmt_int(r.sum_retained), fmt_int(r.memory), format_real(r.max_rel_error)});
    tm.rows.push_back({format_real(p.alpha), format_real(p.tau), fmt_int(as_int(p.B, "B")),
                       format_real(p.eps), format_real(r.seconds)});
  }
  rep.results.push_back(std::move(t));
  rep.timings.push_back(std::move(tm));
  return rep;
}

Report run_convergence(const ExperimentConfig& c) {
  const auto alphas = or_default(c.alpha, {0.8});
  const auto ms = or_default(c.m, {3.0});
  const auto taus = or_default(c.tau, powers_of_two(-5, -9));
  const double dT = or_default(c.deltaT, {0.5})[0];
  const int B = as_int(or_default(c.B, {5.0})[0], "B");
  const double eps = or_default(c.eps, {1e-10})[0];
  const double T = or_default(c.T, {40.0})[0];
  struct Point {
    double alpha;
    int m;
    double tau;
  };
  std::vector<Point> pts;
  for (double a : alphas)
    for (double m : ms)
      for (double tau : taus) pts.push_back({a, as_int(m, "m"), tau});
  std::vector<ErrorSummary> res(pts.size());
  parallel_for(static_cast<int>(pts.size()), c.threads, [&](int i) {
    res[i] = relaxation_errors(pts[i].alpha, solver_from(c, pts[i].tau, dT, B, eps, pts[i].m), T);
  });

  Report rep;
  Table t{"convergence.csv",
          {"alpha", "m", "tau", "err_inf", "order_inf", "err_end", "order_end"},
          {}};
  Table fit{"convergence_fit.csv", {"alpha", "m", "fit_order_inf", "fit_order_end"}, {}};
  Table tm{"convergence_timing.csv", {"alpha", "m", "tau", "seconds"}, {}};
  const size_t per = taus.size();
  for (size_t g = 0; g < pts.size(); g += per) {
    std::vector<double> ti, ei, ee;
    for (size_t i = g; i < g + per; ++i) {
      const auto& p = pts[i];
      const auto& r = res[i];
      std::string oi, oe;
      if (i > g) {
        const double lt = std::log(pts[i - 1].tau / p.tau);
        oi = format_real(std::log(res[i - 1].err_inf / r.err_inf) / lt);
        oe = format_real(std::log(res[i - 1].err_end / r.err_end) / lt);
      }
      t.rows.push_back({format_real(p.alpha), fmt_int(p.m), format_real(p.tau),
                        format_real(r.err_inf), oi, format_real(r.err_end), oe});
      tm.rows.push_back({format_real(p.alpha), fmt_int(p.m), format_real(p.tau),
                         format_real(r.seconds)});
      ti.push_back(p.tau);
      ei.push_back(r.err_inf);
      ee.push_back(r.err_end);
    }
    fit.rows.push_back({format_real(pts[g].alpha), fmt_int(pts[g].m),
                        per > 1 ? format_real(fitted_order(ti, ei)) : "",
                        per > 1 ? format_real(fitted_order(ti, ee)) : ""});
  }
  rep.results.push_back(std::move(t));
  rep.results.push_back(std::move(fit));
  rep.timings.push_back(std::move(tm));
  return rep;
}

Report run_gap(const ExperimentConfig& c) {
  const double alpha = or_default(c.alpha, {0.1})[0];
  const auto taus = or_default(c.tau, {std::ldexp(1.0, -5), std::ldexp(1.0, -7),
                                        std::ldexp(1.0, -9)});
  const auto epss = or_default(c.eps, {1e-10, 1e-8, 1e-6});
  const double dT = or_default(c.deltaT, {0.5})[0];
  const int B = as_int(or_default(c.B, {5.0})[0], "B");
  const int m = as_int(or_default(c.m, {0.0})[0], "m");
  const double T = or_default(c.T, {40.0})[0];
  struct Point {
    double eps, tau;
  };
  std::vector<Point> pts;
  for (double e : epss)
    for (double tau : taus) pts.push_back({e, tau});
  std::vector<double> eta(pts.size()), secs(pts.size());
  parallel_for(static_cast<int>(pts.size()), c.threads, [&](int i) {
    const auto t0 = Clock::now();
    eta[i] = fast_direct_gap(alpha, solver_from(c, pts[i].tau, dT, B, pts[i].eps, m), T);
    secs[i] = seconds_since(t0);
  });
  Report rep;
  Table t{"gap.csv", {"alpha", "m", "eps", "tau", "eta"}, {}};
  Table tm{"gap_timing.csv", {"eps", "tau", "seconds"}, {}};
  for (size_t i = 0; i < pts.size(); ++i) {
    t.rows.push_back({format_real(alpha), fmt_int(m), format_real(pts[i].eps),
                      format_real(pts[i].tau), format_real(eta[i])});
    tm.rows.push_back({format_real(pts[i].eps), format_real(pts[i].tau), format_real(secs[i])});
  }
  rep.results.push_back(std::move(t));
  rep.timings.push_back(std::move(tm));
  return rep;
}

Report run_graded(ExperimentConfig c) {
  const double alpha = or_default(c.alpha, {0.5})[0];
  const auto taus = or_default(c.tau, powers_of_two(-5, -9));
  const auto rs = or_default(c.r, {1.0, 1.5, 3.0, 6.0});
  const auto ms = or_default(c.m, {1.0, 2.0, 3.0, 4.0});
  const double dT = or_default(c.deltaT, {0.5})[0];
  const int B = as_int(or_default(c.B, {5.0})[0], "B");
  const double eps = or_default(c.eps, {1e-10})[0];
  const double T = or_default(c.T, {1.0})[0];
  if (!c.kind_set) c.kind = InterpKind::Linear;
  struct Point {
    bool graded;
    double param;
    double tau;
  };
  std::vector<Point> pts;
  for (double r : rs)
    for (double tau : taus) pts.push_back({true, r, tau});
  for (double m : ms)
    for (double tau : taus) pts.push_back({false, m, tau});
  std::vector<ErrorSummary> res(pts.size());
  parallel_for(static_cast<int>(pts.size()), c.threads, [&](int i) {
    const auto& p = pts[i];
    if (p.graded) {
      res[i] = graded_errors(alpha, p.param, steps_for(T, p.tau, "T"), T);
    } else {
      res[i] = relaxation_errors(alpha, solver_from(c, p.tau, dT, B, eps, as_int(p.param, "m")),
                                 T);
    }
  });
  Report rep;
  Table t{"graded.csv", {"method", "r", "m", "tau", "err_inf", "order"}, {}};
  Table tm{"graded_timing.csv", {"method", "r", "m", "tau", "seconds"}, {}};
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    std::string order;
    if (i > 0 && pts[i - 1].graded == p.graded && pts[i - 1].param == p.param)
      order = format_real(std::log(res[i - 1].err_inf / res[i].err_inf) /
                          std::log(pts[i - 1].tau / p.tau));
    const std::string method = p.graded ? "graded-l1" : "fast-corrected";
    const std::string r = p.graded ? format_real(p.param) : "";
    const std::string m = p.graded ? "" : fmt_int(as_int(p.param, "m"));
    t.rows.push_back({method, r, m, format_real(p.tau), format_real(res[i].err_inf), order});
    tm.rows.push_back({method, r, m, format_real(p.tau), format_real(res[i].seconds)});
  }
  rep.results.push_back(std::move(t));
  rep.timings.push_back(std::move(tm));
  return rep;
}

Report run_lorenz(const ExperimentConfig& c) {
  const auto al = or_default(c.alpha, {0.9});
  std::array<double, 3> orders{};
  if (al.size() == 1) {
    orders = {al[0], al[0], al[0]};
  } else if (al.size() == 3) {
    orders = {al[0], al[1], al[2]};
  } else {
    throw DomainError("lorenz takes one order or three per-component orders");
  }
  const double tau = or_default(c.tau, {0.01})[0];
  const double dT = or_default(c.deltaT, {tau})[0];
  const int B = as_int(or_default(c.B, {5.0})[0], "B");
  const double eps = or_default(c.eps, {1e-10})[0];
  const int m = as_int(or_default(c.m, {2.0})[0], "m");
  const double T = or_default(c.T, {1000.0})[0];
  Trajectory traj;
  const auto s =
      lorenz_summary(orders, solver_from(c, tau, dT, B, eps, m), T, &traj);
  Report rep;
  rep.results.push_back(
      {"lorenz.csv",
       {"alpha1", "alpha2", "alpha3", "tau", "T", "m", "initial_r2", "max_r2", "first_inside",
        "max_r2_after_entry", "max_abs"},
       {{format_real(orders[0]), format_real(orders[1]), format_real(orders[2]),
         format_real(tau), format_real(T), fmt_int(m), format_real(s.initial_r2),
         format_real(s.max_r2_steps), fmt_int(s.first_inside),
         format_real(s.max_r2_after_entry), format_real(s.max_abs)}}});
  if (c.keep_trajectory) {
    Table tr{"lorenz_trajectory.csv", {"n", "t", "U", "V", "W"}, {}};
    tr.rows.reserve(traj.steps() + 1);
    for (int n = 0; n <= traj.steps(); ++n)
      tr.rows.push_back({fmt_int(n), format_real(traj.t[n]), format_real(traj.U(0, n)),
                         format_real(traj.U(1, n)), format_real(traj.U(2, n))});
    rep.results.push_back(std::move(tr));
  }
  rep.timings.push_back({"lorenz_timing.csv", {"seconds"}, {{format_real(s.seconds)}}});
  return rep;
}

Report run_benchmark(const ExperimentConfig& c) {
  const auto alphas = or_default(c.alpha, {0.5});
  const double tau = or_default(c.tau, {0.01})[0];
  const auto Ts = or_default(c.T, {100.0, 200.0, 500.0, 1000.0});
  const double dT = or_default(c.deltaT, {0.5})[0];
  const int B = as_int(or_default(c.B, {5.0})[0], "B");
  const double eps = or_default(c.eps, {1e-10})[0];
  const int m = as_int(or_default(c.m, {2.0})[0], "m");
  std::vector<OperatorMode> modes;
  if (c.mode_set) {
    modes = {c.mode};
  } else {
    modes = {OperatorMode::Fast, OperatorMode::Direct};
  }
  struct Point {
    OperatorMode mode;
    double alpha, T;
  };
  std::vector<Point> pts;
  for (auto md : modes)
    for (double a : alphas)
      for (double T : Ts) pts.push_back({md, a, T});
  // timings are taken one at a time so they do not compete for cores
  std::vector<BenchmarkPoint> res(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    ExperimentConfig ci = c;
    ci.mode = pts[i].mode;
    res[i] = benchmark_point(pts[i].alpha, solver_from(ci, tau, dT, B, eps, m), pts[i].T);
  }
  Report rep;
  Table t{"benchmark.csv", {"mode", "alpha", "tau", "T", "steps", "u_end", "active_memory"}, {}};
  Table tm{"benchmark_timing.csv", {"mode", "alpha", "T", "steps", "seconds"}, {}};
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const std::string mode = p.mode == OperatorMode::Fast ? "fast" : "direct";
    const std::string steps = fmt_int(steps_for(p.T, tau, "T"));
    t.rows.push_back({mode, format_real(p.alpha), format_real(tau), format_real(p.T), steps,
                      format_real(res[i].u_end), fmt_int(res[i].memory)});
    tm.rows.push_back({mode, format_real(p.alpha), format_real(p.T), steps,
                       format_real(res[i].seconds)});
  }
  rep.results.push_back(std::move(t));
  rep.timings.push_back(std::move(tm));
  return rep;
}

Report run_rule_dump(const ExperimentConfig& c) {
  const double alpha = or_default(c.alpha, {0.5})[0];
  const double T = or_default(c.T, {1.0})[0];
  const double a = -alpha;
  Rule rule = gauss_laguerre_rule(a, c.N);
  if (T != 1.0) rule = scale_rule(rule, T);
  const int q = truncation_count(a, c.N, c.eps0);
  rule = truncate_rule(rule, q);
  Report rep;
  Table t{"rule.csv", {"j", "node", "weight"}, {}};
  for (int j = 0; j < rule.size(); ++j)
    t.rows.push_back({fmt_int(j), format_real(rule.nodes[j]), format_real(rule.weights[j])});
  rep.results.push_back(std::move(t));
  rep.results.push_back({"rule_info.csv",
                         {"weight_param", "N", "T", "eps0", "retained"},
                         {{format_real(a), fmt_int(c.N), format_real(T), format_real(c.eps0),
                           fmt_int(q)}}});
  return rep;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

KernelErrorResult kernel_error(const FastParams& params) {
  const auto t0 = Clock::now();
  FastConvolution op(params, 1);
  const double a = params.alpha;
  const double tau = params.tau;
  const int nT = params.horizon_steps();
  const double g1 = rgamma(a + 1.0);
  const double g2 = rgamma(a + 2.0);
  KernelErrorResult out;
  out.steps = nT;
  for (int k = 0; k <= nT; ++k) {
    op.push_sample(1.0 + k * tau);
    for (int n = std::max(1, k - 1); n <= k; ++n) {
      if (op.samples_needed(n) != op.size()) continue;
      const double t = n * tau;
      const double exact = std::pow(t, a) * g1 + std::pow(t, a + 1.0) * g2;
      const double rel = std::abs(op.eval_scalar(n) - exact) / std::abs(exact);
      out.max_rel_error = std::max(out.max_rel_error, rel);
    }
  }
  out.sum_order = op.total_order();
  out.sum_retained = op.total_retained();
  out.memory = op.active_memory();
  out.seconds = seconds_since(t0);
  return out;
}

ErrorSummary relaxation_errors(double alpha, const SolverConfig& config, double T) {
  const auto t0 = Clock::now();
  const Trajectory tr = solve_scalar_fde(relaxation_problem(alpha), config, T);
  ErrorSummary s;
  s.seconds = seconds_since(t0);
  for (int n = 0; n <= tr.steps(); ++n) {
    const double e = std::abs(tr.U(0, n) - exact_relaxation(alpha, 1.0, tr.t[n]));
    s.err_inf = std::max(s.err_inf, e);
    if (n == tr.steps()) s.err_end = e;
  }
  return s;
}

ErrorSummary graded_errors(double alpha, double r, int M, double T) {
  const auto t0 = Clock::now();
  const Trajectory tr = graded_l1_solve(relaxation_problem(alpha), r, M, T);
  ErrorSummary s;
  s.seconds = seconds_since(t0);
  for (int n = 0; n <= tr.steps(); ++n) {
    const double e = std::abs(tr.U(0, n) - exact_relaxation(alpha, 1.0, tr.t[n]));
    s.err_inf = std::max(s.err_inf, e);
    if (n == tr.steps()) s.err_end = e;
  }
  return s;
}

double fast_direct_gap(double alpha, SolverConfig config, double T) {
  const auto problem = relaxation_problem(alpha);
  config.mode = OperatorMode::Direct;
  const Trajectory direct = solve_scalar_fde(problem, config, T);
  config.mode = OperatorMode::Fast;
  const Trajectory fast = solve_scalar_fde(problem, config, T);
  return (direct.U - fast.U).cwiseAbs().maxCoeff();
}

LorenzSummary lorenz_summary(const std::array<double, 3>& orders, const SolverConfig& config,
                             double T, Trajectory* keep) {
  const auto t0 = Clock::now();
  Trajectory tr = solve_fde_system(lorenz_problem(orders), config, T);
  LorenzSummary s;
  s.seconds = seconds_since(t0);
  const Eigen::VectorXd r2 = tr.U.colwise().squaredNorm().transpose();
  s.initial_r2 = r2[0];
  s.finite = tr.U.allFinite();
  s.max_abs = tr.U.cwiseAbs().maxCoeff();
  int last_outside = -1;
  for (int n = 0; n < r2.size(); ++n) {
    if (n >= 1) s.max_r2_steps = std::max(s.max_r2_steps, r2[n]);
    if (!(r2[n] < 2.0)) last_outside = n;
  }
  s.first_inside = last_outside + 1 < r2.size() ? last_outside + 1 : -1;
  if (s.first_inside >= 0) s.max_r2_after_entry = r2.tail(r2.size() - s.first_inside).maxCoeff();
  if (keep) *keep = std::move(tr);
  return s;
}

BenchmarkPoint benchmark_point(double alpha, const SolverConfig& config, double T) {
  const auto t0 = Clock::now();
  const Trajectory tr = solve_scalar_fde(cubic_problem(alpha), config, T);
  BenchmarkPoint p;
  p.seconds = seconds_since(t0);
  p.memory = tr.peak_memory;
  p.u_end = tr.U(0, tr.steps());
  return p;
}

double fitted_order(const std::vector<double>& tau, const std::vector<double>& err) {
  if (tau.size() != err.size() || tau.size() < 2)
    throw DomainError("fitted_order: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(tau.size());
  for (size_t i = 0; i < tau.size(); ++i) {
    const double x = std::log(tau[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"kernel-error", "convergence", "gap", "graded",
                                                 "lorenz", "benchmark", "rule-dump"};
  return names;
}

Report run_experiment(ExperimentConfig config) {
  if (config.threads < 1) throw DomainError("--threads must be positive");
  const auto n = config.name;
  if (n == "kernel-error") return run_kernel_error(config);
  if (n == "convergence") return run_convergence(config);
  if (n == "gap") return run_gap(config);
  if (n == "graded") return run_graded(config);
  if (n == "lorenz") return run_lorenz(config);
  if (n == "benchmark") return run_benchmark(config);
  if (n == "rule-dump") return run_rule_dump(config);
  throw DomainError("unknown experiment '" + n + "'");
}

void write_table(const std::string& dir, const Table& table) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / table.file;
  std::ofstream os(path);
  if (!os) throw DomainError("cannot write " + path.string());
  for (size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

}  // namespace fracfast
