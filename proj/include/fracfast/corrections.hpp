#ifndef FRACFAST_CORRECTIONS_HPP
#define FRACFAST_CORRECTIONS_HPP

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "fracfast/operator.hpp"

namespace fracfast {

/// Starting weights W_{n,1..m} that make a base operator exact on t^{sigma_k}.
///
/// The weights are tau-independent, so they are computed once on a unit grid:
/// each exponent gets its own base operator ("tracker") fed with j^{sigma_k},
/// and the defect against Gamma(sigma+1)/Gamma(sigma+1+alpha) n^{sigma+alpha}
/// is solved for with a column-scaled LU. Trackers advance monotonically in n;
/// only the most recent weights are memoized.
class CorrectionSet {
 public:
  using BaseFactory = std::function<std::unique_ptr<ConvolutionOperator>()>;

  static constexpr int kMaxTerms = 8;

  CorrectionSet(double alpha, std::vector<double> sigmas, BaseFactory unit_base);

  int count() const { return static_cast<int>(sigmas_.size()); }
  const std::vector<double>& sigmas() const { return sigmas_; }
  double alpha() const { return alpha_; }

  /// W_{n,1..m}; n >= 1.
  Eigen::VectorXd weights(int n) const;

  /// Relative residual ||A W - rhs|| / ||rhs|| of the most recent solve.
  double last_residual() const;

  /// Reals held by the trackers (for memory accounting).
  long active_memory() const;

 private:
  void reset_trackers() const;

  double alpha_;
  std::vector<double> sigmas_;
  BaseFactory unit_base_;
  Eigen::MatrixXd powers_;  // powers_(k, j-1) = j^{sigma_k}

  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<ConvolutionOperator>> trackers_;
  mutable int memo_n_ = -1;
  mutable Eigen::VectorXd memo_;
  mutable double residual_ = 0.0;
};

/// Closed-form value of k_alpha * t^sigma at t.
double power_convolution(double alpha, double sigma, double t);

/// Adds tau^alpha sum_j W_{n,j} (u_j - u_0) to `value`. `initial(j)` returns
/// sample j for j <= min(m, available). When `affine` is true the sample u_n
/// is unknown and its coefficient goes to `diag`.
void add_correction(const CorrectionSet& set, double tau, int n,
                    const std::function<Eigen::VectorXd(int)>& sample, int available,
                    Eigen::VectorXd& value, double* diag);

}  // namespace fracfast

#endif  // FRACFAST_CORRECTIONS_HPP
