#ifndef FRACFAST_OPERATOR_HPP
#define FRACFAST_OPERATOR_HPP

#include <Eigen/Dense>

#include "fracfast/interp.hpp"

namespace fracfast {

/// Discrete operator value at step n written as base + diag * u_n, for use
/// inside implicit solves where u_n is still unknown.
struct AffineValue {
  Eigen::VectorXd base;
  double diag = 0.0;
};

/// Common surface of the direct and the fast discrete convolution. Samples
/// u_0, u_1, ... arrive in step order; every sample has dim() components that
/// share the same weights.
class ConvolutionOperator {
 public:
  virtual ~ConvolutionOperator() = default;

  virtual void push_sample(const Eigen::Ref<const Eigen::VectorXd>& u) = 0;
  void push_sample(double u) { push_sample(Eigen::VectorXd::Constant(1, u)); }

  virtual int size() const = 0;
  virtual int dim() const = 0;
  virtual double alpha() const = 0;
  virtual double tau() const = 0;
  virtual InterpKind kind() const = 0;

  /// Samples that must be present before step n can be evaluated.
  int samples_needed(int n) const {
    return (kind() == InterpKind::Quadratic && n == 1) ? 3 : n + 1;
  }

  /// Whether eval(n) accepts any n with size() >= samples_needed(n), or only
  /// the most recent step.
  virtual bool random_access() const = 0;

  /// Full operator value at step n, correction terms included.
  virtual Eigen::VectorXd eval(int n) const = 0;
  double eval_scalar(int n) const { return eval(n)[0]; }

  /// Value at step n = size() as an affine function of the missing u_n.
  virtual AffineValue affine(int n) const = 0;

  /// Number of reals currently held (samples, weights, mode states).
  virtual long active_memory() const = 0;
};

}  // namespace fracfast

#endif  // FRACFAST_OPERATOR_HPP
