#include "fracfast/quadrature.hpp"

#include <cstdio>
#include <ostream>

namespace fracfast {

int truncation_count(double a, int N, double eps0) {
  if (!(a > -1.0)) throw DomainError("truncation_count: a must exceed -1");
  if (N < 0) throw DomainError("truncation_count: negative order");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("truncation_count: eps0 must lie in (0, 1)");
  const double np1 = N + 1.0;
  const double log_arg = a * std::log(np1) - std::log(eps0);
  if (!(log_arg > 0.0)) return N + 1;
  const double bound = std::ceil(2.0 / M_PI * std::sqrt(np1 * log_arg)) - 1.0;
  const int q = static_cast<int>(std::min<double>(N, bound));
  return std::max(q, 0) + 1;
}

double laguerre_error_factor(double a, int N, double t, double T) {
  if (!(T > 0.0)) throw DomainError("laguerre_error_factor: T must be positive");
  if (t < 0.0) throw DomainError("laguerre_error_factor: t must be non-negative");
  const double r = t / T;
  return std::pow(T, -a - 1.0) * std::pow(r / (1.0 + r), 2.0 * N);
}

void write_rule_csv(std::ostream& os, const Rule& rule) {
  os << "j,node,weight\n";
  char buf[96];
  for (int j = 0; j < rule.truncated_to; ++j) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", j, rule.nodes[j], rule.weights[j]);
    os << buf;
  }
}

}  // namespace fracfast
