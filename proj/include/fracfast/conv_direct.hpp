#ifndef FRACFAST_CONV_DIRECT_HPP
#define FRACFAST_CONV_DIRECT_HPP

#include <array>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracfast/corrections.hpp"
#include "fracfast/interp.hpp"
#include "fracfast/operator.hpp"

namespace fracfast {

/// O(n^2) discrete convolution with kernel t^{alpha-1}/Gamma(alpha) and a
/// short-memory split at delta_T = n0 * tau. Negative alpha gives the
/// Riemann-Liouville derivative of order -alpha.
class DirectConvolution final : public ConvolutionOperator {
 public:
  DirectConvolution(double alpha, double tau, int n0 = 1,
                    InterpKind kind = InterpKind::Quadratic, int dim = 1,
                    std::vector<double> sigmas = {});

  using ConvolutionOperator::push_sample;
  void push_sample(const Eigen::Ref<const Eigen::VectorXd>& u) override;

  int size() const override { return count_; }
  int dim() const override { return dim_; }
  double alpha() const override { return alpha_; }
  double tau() const override { return tau_; }
  InterpKind kind() const override { return kind_; }
  bool random_access() const override { return true; }
  int n0() const { return n0_; }
  double delta_T() const { return n0_ * tau_; }
  const CorrectionSet* corrections() const { return corrections_.get(); }

  Eigen::VectorXd eval(int n) const override;
  AffineValue affine(int n) const override;
  long active_memory() const override;

  /// Local and history addends of the uncorrected operator at step n.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> split_eval(int n) const;

  /// Assembled uncorrected weights w_{n,0..} over the samples touched at step n.
  Eigen::VectorXd weights(int n) const;

  Eigen::VectorXd sample(int j) const { return samples_.col(j); }

 private:
  void grow_cache(int J) const;
  // Adds the weights of intervals [first, last) (last interval excluded
  // unless include_tail) to w.
  void add_weights(int n, int first, int last, bool include_tail, Eigen::VectorXd& w) const;
  void require(int n) const;
  // sum over intervals [first, last) of b_{n-1-i} . (u_i, u_{i+1}, ...)
  Eigen::VectorXd apply_intervals(int n, int first, int last) const;

  double alpha_;
  double tau_;
  int n0_;
  InterpKind kind_;
  int dim_;
  std::array<double, 3> local_;
  Eigen::MatrixXd samples_;
  int count_ = 0;
  std::unique_ptr<CorrectionSet> corrections_;

  mutable std::mutex cache_mutex_;
  mutable std::vector<std::array<double, 3>> cache_;
  mutable Eigen::VectorXd combined_;  // b_{D-1}[0] + b_D[1] + b_{D+1}[2]
};

}  // namespace fracfast

#endif  // FRACFAST_CONV_DIRECT_HPP
