#include "fracfast/interp.hpp"

#include "fracfast/specfun.hpp"

namespace fracfast {

InterpKind parse_interp_kind(const std::string& name) {
  if (name == "linear") return InterpKind::Linear;
  if (name == "quadratic") return InterpKind::Quadratic;
  throw DomainError("unknown interpolation kind '" + name + "'");
}

const char* to_string(InterpKind kind) {
  return kind == InterpKind::Linear ? "linear" : "quadratic";
}

namespace {

// Below this distance the closed forms are accurate to a few ulps.
constexpr int kSeriesFrom = 4;

// int_0^1 phi_k(x) (J+1-x)^{alpha-1} dx through the binomial series of
// (1 - x/(J+1))^{alpha-1}; every partial sum has terms of one sign.
std::array<double, 3> stencil_moments_series(double alpha, int J, InterpKind kind) {
  const double r = 1.0 / (J + 1.0);
  double coeff = 1.0;  // (1-alpha)_m / m! * r^m
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (int m = 0; m < 400; ++m) {
    const double dm = m;
    if (kind == InterpKind::Quadratic) {
      s[0] += coeff * (dm + 5.0) / (2.0 * (dm + 1.0) * (dm + 2.0) * (dm + 3.0));
      s[1] += coeff * (dm + 4.0) / ((dm + 2.0) * (dm + 3.0));
      s[2] -= coeff / (2.0 * (dm + 2.0) * (dm + 3.0));
    } else {
      s[0] += coeff / ((dm + 1.0) * (dm + 2.0));
      s[1] += coeff / (dm + 2.0);
    }
    coeff *= (dm + 1.0 - alpha) / (dm + 1.0) * r;
    if (std::abs(coeff) < 1e-18 * std::abs(s[1])) break;
  }
  const double lead = std::pow(J + 1.0, alpha - 1.0);
  for (double& v : s) v *= lead;
  return s;
}

double tau_pow_rgamma(double alpha, double tau) { return std::pow(tau, alpha) * rgamma(alpha); }

}  // namespace

std::array<double, 3> quad_history_weights_closed(double alpha, double tau, int j) {
  const double c = tau_pow_rgamma(alpha, tau);
  if (c == 0.0) return {0.0, 0.0, 0.0};
  const double l0 = ell_coeff(alpha, j);
  const double l1 = ell_coeff(alpha + 1.0, j);
  const double l2 = ell_coeff(alpha + 2.0, j);
  const double jj = j;
  return {0.5 * c * (l2 - (2.0 * jj - 1.0) * l1 + jj * (jj - 1.0) * l0),
          -c * (l2 - 2.0 * jj * l1 + (jj + 1.0) * (jj - 1.0) * l0),
          0.5 * c * (l2 - (2.0 * jj + 1.0) * l1 + jj * (jj + 1.0) * l0)};
}

std::array<double, 3> linear_history_weights_closed(double alpha, double tau, int j) {
  const double c = tau_pow_rgamma(alpha, tau);
  if (c == 0.0) return {0.0, 0.0, 0.0};
  const double l0 = ell_coeff(alpha, j);
  const double l1 = ell_coeff(alpha + 1.0, j);
  return {c * (l1 - j * l0), c * ((j + 1.0) * l0 - l1), 0.0};
}

HistoryWeights history_weights(double alpha, double tau, int j, InterpKind kind) {
  if (!(alpha < 1.0)) throw DomainError("history_weights: alpha must be below 1");
  if (!(tau > 0.0)) throw DomainError("history_weights: tau must be positive");
  if (j < 0) throw DomainError("history_weights: negative distance index");
  HistoryWeights w;
  w.kind = kind;
  w.alpha = alpha;
  w.tau = tau;
  w.j = j;
  const double c = tau_pow_rgamma(alpha, tau);
  if (c == 0.0) return w;
  if (j < kSeriesFrom) {
    w.b = kind == InterpKind::Quadratic ? quad_history_weights_closed(alpha, tau, j)
                                        : linear_history_weights_closed(alpha, tau, j);
  } else {
    w.b = stencil_moments_series(alpha, j, kind);
    for (double& v : w.b) v *= c;
  }
  return w;
}

std::array<double, 3> quad_history_weights(double alpha, double tau, int j) {
  return history_weights(alpha, tau, j, InterpKind::Quadratic).b;
}

std::array<double, 3> local_weights(double alpha, double tau, InterpKind kind) {
  if (!(alpha < 1.0)) throw DomainError("local_weights: alpha must be below 1");
  if (!(tau > 0.0)) throw DomainError("local_weights: tau must be positive");
  const double ta = std::pow(tau, alpha);
  if (kind == InterpKind::Quadratic) {
    const double g = rgamma(alpha + 3.0);
    return {-alpha * ta * g / 2.0, alpha * (3.0 + alpha) * ta * g, (4.0 + alpha) * ta * g / 2.0};
  }
  return {0.0, ta * (rgamma(alpha + 1.0) - rgamma(alpha + 2.0)), ta * rgamma(alpha + 2.0)};
}

std::array<double, 3> literal_linear_local_weights(double alpha, double tau) {
  const double c = std::pow(tau, alpha) * rgamma(alpha + 2.0);
  return {0.0, -c, c};
}

namespace {

// G_p(h) = int_0^1 exp(-h y) y^p dy for p = 0, 1, 2.
std::array<double, 3> decay_moments(double h) {
  if (std::abs(h) < 1.0) {
    std::array<double, 3> g{0.0, 0.0, 0.0};
    double term = 1.0;  // (-h)^k / k!
    for (int k = 0; k < 40; ++k) {
      g[0] += term / (k + 1.0);
      g[1] += term / (k + 2.0);
      g[2] += term / (k + 3.0);
      term *= -h / (k + 1.0);
      if (std::abs(term) < 1e-18) break;
    }
    return g;
  }
  const double e = std::exp(-h);
  const double g0 = -std::expm1(-h) / h;
  const double g1 = (1.0 - e * (1.0 + h)) / (h * h);
  const double g2 = (2.0 - e * (2.0 + 2.0 * h + h * h)) / (h * h * h);
  return {g0, g1, g2};
}

}  // namespace

std::array<double, 3> interval_exp_weights(double h, InterpKind kind) {
  const auto g = decay_moments(h);
  if (kind == InterpKind::Linear) return {g[1], g[0] - g[1], 0.0};
  // basis functions in y = 1 - x: y(y+1)/2, 1 - y^2, y(y-1)/2
  return {0.5 * (g[2] + g[1]), g[0] - g[2], 0.5 * (g[2] - g[1])};
}

}  // namespace fracfast
