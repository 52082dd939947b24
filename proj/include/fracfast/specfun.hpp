#ifndef FRACFAST_SPECFUN_HPP
#define FRACFAST_SPECFUN_HPP

#include <cmath>
#include <functional>

#include "fracfast/errors.hpp"

namespace fracfast {

/// Gamma function. Throws DomainError at the poles 0, -1, -2, ...
double gamma(double x);

/// 1/Gamma(x), continuous everywhere and exactly zero at the poles.
double rgamma(double x);

/// sin(pi*x) with exact zeros at the integers.
double sin_pi(double x);

/// Generalized Laguerre polynomial L_n^{(a)}(x) by the three-term recurrence.
template <typename Scalar>
Scalar laguerre_eval(Scalar a, int n, Scalar x) {
  if (!(a > Scalar(-1))) throw DomainError("laguerre_eval: a must exceed -1");
  if (n < 0) throw DomainError("laguerre_eval: negative degree");
  Scalar prev = Scalar(1);
  if (n == 0) return prev;
  Scalar cur = a + Scalar(1) - x;
  for (int k = 1; k < n; ++k) {
    const Scalar next =
        ((Scalar(2 * k + 1) + a - x) * cur - (Scalar(k) + a) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// One-parameter Mittag-Leffler function E_alpha(z) for alpha in (0, 1] and
/// real z. Relative accuracy is about 1e-13; throws AccuracyFailure when the
/// integral evaluation cannot reach it.
double mittag_leffler(double alpha, double z);

namespace detail {

struct IntegralResult {
  double value;
  double error;
  bool converged;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on [a, b].
IntegralResult integrate_gk15(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol,
                              int max_intervals = 4000);

}  // namespace detail

}  // namespace fracfast

#endif  // FRACFAST_SPECFUN_HPP
