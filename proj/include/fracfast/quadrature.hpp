#ifndef FRACFAST_QUADRATURE_HPP
#define FRACFAST_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "fracfast/errors.hpp"

namespace fracfast {

/// Generalized Gauss-Laguerre rule for the weight lambda^a exp(-T lambda) on
/// (0, inf). Only the first `truncated_to` points take part in `apply`.
template <typename Scalar = double>
struct QuadratureRule {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar weight_param = Scalar(0);
  Scalar scale = Scalar(1);
  int order = 0;
  Vector nodes;
  Vector weights;
  int truncated_to = 0;

  int size() const { return static_cast<int>(nodes.size()); }

  template <typename F>
  Scalar apply(F&& f) const {
    Scalar sum = Scalar(0);
    for (int j = 0; j < truncated_to; ++j) sum += weights[j] * f(nodes[j]);
    return sum;
  }
};

using Rule = QuadratureRule<double>;

namespace detail {

// Orthonormal Laguerre sum sum_k p_k(x)^2 for k <= N, returned as
// (mantissa, log-scale) so large nodes do not overflow.
template <typename Scalar>
std::pair<Scalar, Scalar> christoffel_sum(Scalar a, int N, Scalar x) {
  using std::sqrt;
  using std::log;
  using std::abs;
  using std::lgamma;
  Scalar log_scale = Scalar(0);
  Scalar prev = Scalar(0);
  Scalar cur = Scalar(1) / sqrt(std::exp(lgamma(a + Scalar(1))));
  Scalar sum = cur * cur;
  Scalar off_prev = Scalar(0);
  const Scalar big = Scalar(1e150);
  for (int k = 0; k < N; ++k) {
    const Scalar diag = Scalar(2 * k + 1) + a;
    const Scalar off = sqrt(Scalar(k + 1) * (Scalar(k + 1) + a));
    const Scalar next = ((x - diag) * cur - off_prev * prev) / off;
    prev = cur;
    cur = next;
    off_prev = off;
    sum += cur * cur;
    if (abs(cur) > big) {
      prev /= big;
      cur /= big;
      sum /= big * big;
      log_scale += log(big);
    }
  }
  return {sum, log_scale};
}

// (L_{N+1}, L_N) at x up to a common positive factor.
template <typename Scalar>
std::pair<Scalar, Scalar> laguerre_pair_scaled(Scalar a, int N, Scalar x) {
  using std::abs;
  Scalar prev = Scalar(1);
  Scalar cur = a + Scalar(1) - x;
  for (int k = 1; k <= N; ++k) {
    Scalar next =
        ((Scalar(2 * k + 1) + a - x) * cur - (Scalar(k) + a) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
    const Scalar m = abs(cur) + abs(prev);
    if (m > Scalar(1e200)) {
      cur /= m;
      prev /= m;
    }
  }
  return {cur, prev};
}

}  // namespace detail

/// Gauss-Laguerre rule with N+1 points for lambda^a e^{-lambda} (Golub-Welsch,
/// Newton-polished nodes, Christoffel-function weights).
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_laguerre_rule(Scalar a, int N) {
  using Vector = typename QuadratureRule<Scalar>::Vector;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (!(a > Scalar(-1))) throw DomainError("gauss_laguerre_rule: a must exceed -1");
  if (N < 0 || N > 2048) throw DomainError("gauss_laguerre_rule: N must lie in [0, 2048]");

  const int n = N + 1;
  Vector diag(n);
  Vector sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = Scalar(2 * k + 1) + a;
  for (int k = 0; k + 1 < n; ++k) sub[k] = std::sqrt(Scalar(k + 1) * (Scalar(k + 1) + a));

  Vector nodes;
  if (n == 1) {
    nodes = diag;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NumericalFailure("gauss_laguerre_rule: tridiagonal eigensolver failed");
    nodes = solver.eigenvalues();
  }

  // Newton polish on L_{N+1}; steps larger than a tenth of the local gap are
  // rejected so a node can never hop to its neighbour.
  for (int j = 0; j < n; ++j) {
    const Scalar lo_gap = j > 0 ? nodes[j] - nodes[j - 1] : nodes[j];
    const Scalar hi_gap = j + 1 < n ? nodes[j + 1] - nodes[j] : nodes[j];
    const Scalar gap = std::min(lo_gap, hi_gap);
    Scalar x = nodes[j];
    for (int it = 0; it < 4; ++it) {
      const auto [l1, l0] = detail::laguerre_pair_scaled(a, N, x);
      const Scalar denom = Scalar(N + 1) * l1 - (Scalar(N + 1) + a) * l0;
      if (denom == Scalar(0)) break;
      const Scalar step = x * l1 / denom;
      if (!(std::abs(step) < Scalar(0.1) * gap)) break;
      x -= step;
      if (std::abs(step) <= std::numeric_limits<Scalar>::epsilon() * x) break;
    }
    nodes[j] = x;
  }

  Vector weights(n);
  for (int j = 0; j < n; ++j) {
    const auto [sum, log_scale] = detail::christoffel_sum(a, N, nodes[j]);
    weights[j] = std::exp(-Scalar(2) * log_scale) / sum;
  }

  QuadratureRule<Scalar> rule;
  rule.weight_param = a;
  rule.scale = Scalar(1);
  rule.order = N;
  rule.nodes = std::move(nodes);
  rule.weights = std::move(weights);
  rule.truncated_to = n;
  return rule;
}

/// Rescale a unit-scale rule to the weight lambda^a e^{-T lambda}.
template <typename Scalar>
QuadratureRule<Scalar> scale_rule(const QuadratureRule<Scalar>& rule, Scalar T) {
  if (rule.scale != Scalar(1)) throw DomainError("scale_rule: rule is already scaled");
  if (!(T > Scalar(0))) throw DomainError("scale_rule: T must be positive");
  QuadratureRule<Scalar> out = rule;
  out.scale = T;
  out.nodes /= T;
  out.weights *= std::pow(T, -rule.weight_param - Scalar(1));
  return out;
}

/// Number of leading points retained by the truncated rule (index form + 1).
/// `a` is the weight parameter of the rule; kernel order alpha maps to a = -alpha.
int truncation_count(double a, int N, double eps0);

/// Keep only the leading `count` points.
template <typename Scalar>
QuadratureRule<Scalar> truncate_rule(const QuadratureRule<Scalar>& rule, int count) {
  QuadratureRule<Scalar> out = rule;
  const int q = std::clamp(count, 0, rule.size());
  out.nodes.conservativeResize(q);
  out.weights.conservativeResize(q);
  out.truncated_to = q;
  return out;
}

/// N-dependent factor of the exponential-convergence bound,
/// T^{-a-1} ((t/T)/(1+t/T))^{2N}; the constant C_{a,N} is left out.
double laguerre_error_factor(double a, int N, double t, double T);

/// CSV dump `j,node,weight` with 17 significant digits.
void write_rule_csv(std::ostream& os, const Rule& rule);

}  // namespace fracfast

#endif  // FRACFAST_QUADRATURE_HPP
