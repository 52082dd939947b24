#ifndef FRACFAST_CONV_FAST_HPP
#define FRACFAST_CONV_FAST_HPP

#include <deque>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fracfast/corrections.hpp"
#include "fracfast/interp.hpp"
#include "fracfast/operator.hpp"
#include "fracfast/quadrature.hpp"

namespace fracfast {

struct FastParams {
  double alpha = 0.5;  // kernel order; negative for derivatives
  double tau = 0.01;
  int n0 = 1;  // memory length delta_T = n0 * tau
  int B = 5;
  double eps = 1e-10;
  double eps0 = 1e-16;
  InterpKind kind = InterpKind::Quadratic;
  double horizon = 1.0;  // final time; sizes the level bank
  std::vector<double> sigmas;
  bool retain_log = false;  // keep every sample for reference_history

  double delta_T() const { return n0 * tau; }
  int horizon_steps() const;
  void validate() const;
};

/// Anchor layout of the history window at one step, in units of tau:
/// anchors[0] = p - 1 > anchors[1] > ... > anchors[L] = 0, with p the index
/// of t_hat = t_{n - n0 + 1}.
struct HistoryPartition {
  int n = 0;
  long p = 0;
  int L = 0;
  double tau = 0.0;
  std::vector<long> anchors;
  std::vector<long> q;  // q[l] for 1 <= l <= L-1; q[0] and q[L] unused

  bool empty() const { return L == 0; }
  double anchor_time(int l) const { return anchors[l] * tau; }
};

HistoryPartition partition_for(int n, int n0, int B, double tau);

/// Normalized window ratio of level ell for memory ratio delta_T/tau.
double level_ratio(int B, double ratio, int ell);

/// Smallest Gauss-Laguerre order reaching relative precision eps on level ell.
int select_level_order(int B, double ratio, int ell, double eps);

struct LevelDiagnostics {
  int level = 0;
  int order = 0;
  int retained = 0;
  double T_hat = 0.0;
  int blocks_held = 0;
};

/// Short-memory convolution whose history is a truncated sum of exponentials
/// per level. Time is tiled into aligned blocks of B^{l-1} steps on level l;
/// sealed blocks hold the exact exponential moments of the interpolant and are
/// composed on demand into each level's window.
class FastConvolution final : public ConvolutionOperator {
 public:
  explicit FastConvolution(FastParams params, int dim = 1);

  using ConvolutionOperator::push_sample;
  void push_sample(const Eigen::Ref<const Eigen::VectorXd>& u) override;

  int size() const override { return count_; }
  int dim() const override { return dim_; }
  double alpha() const override { return params_.alpha; }
  double tau() const override { return params_.tau; }
  InterpKind kind() const override { return params_.kind; }
  bool random_access() const override { return false; }
  const FastParams& params() const { return params_; }
  const CorrectionSet* corrections() const { return corrections_.get(); }

  /// Valid for the most recent step only (size() == samples_needed(n)).
  Eigen::VectorXd eval(int n) const override;
  AffineValue affine(int n) const override;

  Eigen::VectorXd local_eval(int n) const;
  Eigen::VectorXd history_fast(int n) const;
  /// Same formula re-integrated from the full sample log (needs retain_log).
  Eigen::VectorXd reference_history(int n) const;

  HistoryPartition partition(int n) const {
    return partition_for(n, params_.n0, params_.B, params_.tau);
  }

  long active_memory() const override;
  std::vector<LevelDiagnostics> diagnostics() const;
  void write_diagnostics_csv(std::ostream& os) const;
  int level_count() const { return static_cast<int>(levels_.size()); }
  int total_order() const;
  int total_retained() const;
  /// Largest magnitude over all stored mode values.
  double max_state_abs() const;

 private:
  struct Block {
    long begin = 0;  // in steps
    long end = 0;
    Eigen::MatrixXd z;  // retained modes x dim
  };

  struct Level {
    int index = 1;
    long block_len = 1;
    double T_hat = 0.0;
    Rule rule;
    Eigen::VectorXd decay_step;   // exp(-lambda tau)
    Eigen::VectorXd decay_block;  // exp(-lambda block_len tau)
    Eigen::MatrixXd psi;          // tau * psi_k(lambda tau), modes x 3
    std::deque<Block> blocks;
    Eigen::MatrixXd partial;
    long partial_begin = 0;
    long partial_len = 0;
    // window cache
    mutable long cached_lo = -1;
    mutable long cached_hi = -1;
    mutable Eigen::MatrixXd cached_y;
  };

  void commit_interval(long i);
  void evict(long p);
  Eigen::VectorXd sample(long j) const;
  const Eigen::MatrixXd& window(const Level& lv, long lo, long hi) const;
  // Level-weighted sum; pending_diag gets the coefficient of u_n when the
  // last history interval still depends on it.
  Eigen::VectorXd history_impl(int n, bool affine, double* pending_diag) const;
  int local_begin(int n) const;
  Eigen::VectorXd local_weights_at(int n) const;
  void require_eval(int n) const;

  FastParams params_;
  int dim_;
  int horizon_steps_;
  double prefactor_;  // sin(alpha pi) / pi
  std::array<double, 3> local_{};
  std::vector<std::array<double, 3>> near_;  // history weights for J < n0
  std::vector<Level> levels_;

  int count_ = 0;
  long committed_ = 0;  // intervals [0, committed_) are in the level banks
  int ring_size_;
  Eigen::MatrixXd ring_;
  Eigen::MatrixXd initial_;  // first few samples, kept for corrections
  Eigen::MatrixXd log_;
  std::unique_ptr<CorrectionSet> corrections_;
};

}  // namespace fracfast

#endif  // FRACFAST_CONV_FAST_HPP
