#ifndef FRACFAST_INTERP_HPP
#define FRACFAST_INTERP_HPP

#include <array>
#include <cmath>
#include <string>

#include "fracfast/errors.hpp"

namespace fracfast {

/// Piecewise interpolation used for both the local and the history parts.
enum class InterpKind { Linear, Quadratic };

InterpKind parse_interp_kind(const std::string& name);
const char* to_string(InterpKind kind);

/// Number of samples spanned by one interval stencil (2 or 3).
inline int stencil_width(InterpKind kind) { return kind == InterpKind::Linear ? 2 : 3; }

/// ((j+1)^alpha - j^alpha) / alpha, with 0^alpha read as 0 (finite part for
/// alpha < 0).
template <typename Scalar>
Scalar ell_coeff(Scalar alpha, int j) {
  if (alpha == Scalar(0)) throw DomainError("ell_coeff: alpha must be non-zero");
  if (j < 0) throw DomainError("ell_coeff: negative index");
  if (j == 0) return Scalar(1) / alpha;
  const Scalar jj = Scalar(j);
  return std::pow(jj, alpha) * std::expm1(alpha * std::log1p(Scalar(1) / jj)) / alpha;
}

/// Weights of one history interval at distance index j: the integral of the
/// kernel k_alpha(t_n - s) against each Lagrange basis function of the
/// interval stencil, where the interval is [t_{n-1-j}, t_{n-j}].
/// Linear: coefficients on (u_i, u_{i+1}); Quadratic: on (u_i, u_{i+1}, u_{i+2}).
struct HistoryWeights {
  InterpKind kind = InterpKind::Quadratic;
  double alpha = 0.0;
  double tau = 0.0;
  int j = 0;
  std::array<double, 3> b{};  // b[2] == 0 for Linear
};

HistoryWeights history_weights(double alpha, double tau, int j, InterpKind kind);

/// Quadratic history weights (b1, b2, b3).
std::array<double, 3> quad_history_weights(double alpha, double tau, int j);

/// The printed closed forms; exact but cancellation-prone as j grows.
std::array<double, 3> quad_history_weights_closed(double alpha, double tau, int j);
std::array<double, 3> linear_history_weights_closed(double alpha, double tau, int j);

/// Weights (d0, d1, d2) of the last interval [t_{n-1}, t_n] on
/// (u_{n-2}, u_{n-1}, u_n).
std::array<double, 3> local_weights(double alpha, double tau, InterpKind kind);

/// Increment form tau^alpha/Gamma(2+alpha) (u_n - u_{n-1}) for the linear local
/// part. Not constant-reproducing; kept only for comparison studies.
std::array<double, 3> literal_linear_local_weights(double alpha, double tau);

/// psi_k(h) = int_0^1 exp(-(1-x) h) phi_k(x) dx for the basis functions phi_k
/// of one interval stencil on x in [0, 1]. The one-step exponential update of
/// an interval [t_i, t_i + tau] with decay lambda is tau * sum_k u_k psi_k(lambda tau).
std::array<double, 3> interval_exp_weights(double h, InterpKind kind);

}  // namespace fracfast

#endif  // FRACFAST_INTERP_HPP
