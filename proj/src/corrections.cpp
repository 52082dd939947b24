#include "fracfast/corrections.hpp"

#include <cmath>
#include <string>

#include "fracfast/errors.hpp"
#include "fracfast/specfun.hpp"

namespace fracfast {

double power_convolution(double alpha, double sigma, double t) {
  if (t == 0.0) return 0.0;
  return gamma(sigma + 1.0) * rgamma(sigma + 1.0 + alpha) * std::pow(t, sigma + alpha);
}

CorrectionSet::CorrectionSet(double alpha, std::vector<double> sigmas, BaseFactory unit_base)
    : alpha_(alpha), sigmas_(std::move(sigmas)), unit_base_(std::move(unit_base)) {
  const int m = count();
  if (m > kMaxTerms)
    throw DomainError("corrections: at most " + std::to_string(kMaxTerms) +
                      " terms are supported (conditioning)");
  for (int k = 0; k < m; ++k) {
    if (!(sigmas_[k] > 0.0) || !std::isfinite(sigmas_[k]))
      throw DomainError("corrections: exponents must be positive");
    if (k > 0 && !(sigmas_[k] > sigmas_[k - 1]))
      throw DomainError("corrections: exponents must be strictly increasing");
  }
  if (m > 0 && !unit_base_) throw DomainError("corrections: missing base operator factory");
  powers_.resize(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = 1; j <= m; ++j) powers_(k, j - 1) = std::pow(double(j), sigmas_[k]);
  if (m > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> check(powers_);
    if (check.rank() < m) throw DomainError("corrections: singular starting-weight system");
  }
}

void CorrectionSet::reset_trackers() const {
  trackers_.clear();
  for (int k = 0; k < count(); ++k) trackers_.push_back(unit_base_());
}

Eigen::VectorXd CorrectionSet::weights(int n) const {
  const int m = count();
  if (m == 0) return Eigen::VectorXd();
  if (n < 1) throw DomainError("corrections: step index must be at least 1");

  std::lock_guard<std::mutex> lock(mutex_);
  if (n == memo_n_) return memo_;

  if (trackers_.empty()) reset_trackers();
  const int needed = trackers_[0]->samples_needed(n);
  if (!trackers_[0]->random_access() && trackers_[0]->size() > needed) reset_trackers();

  Eigen::VectorXd rhs(m);
  for (int k = 0; k < m; ++k) {
    auto& op = *trackers_[k];
    while (op.size() < needed) {
      const int j = op.size();
      op.push_sample(j == 0 ? 0.0 : std::pow(double(j), sigmas_[k]));
    }
    rhs[k] = power_convolution(alpha_, sigmas_[k], double(n)) - op.eval_scalar(n);
  }

  // column scaling keeps j^{sigma} columns of different size comparable
  Eigen::VectorXd scale = powers_.cwiseAbs().colwise().maxCoeff().transpose();
  Eigen::MatrixXd scaled = powers_ * scale.cwiseInverse().asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  Eigen::VectorXd w = lu.solve(rhs).cwiseQuotient(scale);

  const double rn = rhs.norm();
  residual_ = rn > 0.0 ? (powers_ * w - rhs).norm() / rn : (powers_ * w - rhs).norm();
  if (!w.allFinite()) throw NumericalFailure("corrections: starting-weight solve failed");

  memo_n_ = n;
  memo_ = w;
  return w;
}

double CorrectionSet::last_residual() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return residual_;
}

long CorrectionSet::active_memory() const {
  std::lock_guard<std::mutex> lock(mutex_);
  long total = powers_.size() + memo_.size();
  for (const auto& t : trackers_) total += t->active_memory();
  return total;
}

void add_correction(const CorrectionSet& set, double tau, int n,
                    const std::function<Eigen::VectorXd(int)>& sample, int available,
                    Eigen::VectorXd& value, double* diag) {
  const int m = set.count();
  if (m == 0) return;
  const Eigen::VectorXd w = set.weights(n) * std::pow(tau, set.alpha());
  const Eigen::VectorXd u0 = sample(0);
  for (int j = 1; j <= m; ++j) {
    const double c = w[j - 1];
    if (diag != nullptr && j == n) {
      *diag += c;
      value -= c * u0;
    } else if (j < available) {
      value += c * (sample(j) - u0);
    } else {
      throw StateError("corrections: sample " + std::to_string(j) + " is not available");
    }
  }
}

}  // namespace fracfast
