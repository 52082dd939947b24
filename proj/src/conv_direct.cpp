#include "fracfast/conv_direct.hpp"

#include <string>

#include "fracfast/errors.hpp"

namespace fracfast {

namespace {

// sum_t a[t] * w[len - 1 - t] with four independent partial sums
double reversed_dot(const double* a, const double* w, long len) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const double* r = w + len - 1;
  long t = 0;
  for (; t + 4 <= len; t += 4) {
    s0 += a[t] * r[-t];
    s1 += a[t + 1] * r[-t - 1];
    s2 += a[t + 2] * r[-t - 2];
    s3 += a[t + 3] * r[-t - 3];
  }
  for (; t < len; ++t) s0 += a[t] * r[-t];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

DirectConvolution::DirectConvolution(double alpha, double tau, int n0, InterpKind kind, int dim,
                                     std::vector<double> sigmas)
    : alpha_(alpha), tau_(tau), n0_(n0), kind_(kind), dim_(dim) {
  if (!(alpha < 1.0)) throw DomainError("direct: alpha must be below 1");
  if (!(tau > 0.0)) throw DomainError("direct: tau must be positive");
  if (n0 < 1) throw DomainError("direct: memory length must be at least one step");
  if (dim < 1) throw DomainError("direct: dimension must be positive");
  local_ = local_weights(alpha, tau, kind);
  samples_.resize(dim, 64);
  if (!sigmas.empty()) {
    corrections_ = std::make_unique<CorrectionSet>(alpha, std::move(sigmas), [alpha, kind] {
      return std::make_unique<DirectConvolution>(alpha, 1.0, 1, kind, 1);
    });
  }
}

void DirectConvolution::push_sample(const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != dim_) throw DomainError("direct: sample has the wrong dimension");
  if (count_ == samples_.cols()) samples_.conservativeResize(Eigen::NoChange, 2 * count_);
  samples_.col(count_++) = u;
}

void DirectConvolution::grow_cache(int J) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  const int old = static_cast<int>(cache_.size());
  if (old > J + 1) return;
  while (static_cast<int>(cache_.size()) <= J + 1)
    cache_.push_back(history_weights(alpha_, tau_, static_cast<int>(cache_.size()), kind_).b);
  // weight of one sample at distance D from all stencils covering it (b[2] is
  // zero for the linear kind)
  const int top = static_cast<int>(cache_.size()) - 1;
  if (combined_.size() < top) combined_.conservativeResize(std::max(2 * top, 64));
  for (int D = std::max(old - 1, 1); D < top; ++D)
    combined_[D] = cache_[D - 1][0] + cache_[D][1] + cache_[D + 1][2];
}

Eigen::VectorXd DirectConvolution::apply_intervals(int n, int first, int last) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  if (last <= first) return out;
  grow_cache(n);
  const int width = stencil_width(kind_);
  // samples in [lo, hi] are touched by all `width` stencils of the range
  const int lo = first + width - 1;
  const int hi = last - 1;
  if (hi >= lo) {
    const int len = hi - lo + 1;
    if (dim_ == 1) {
      out[0] += reversed_dot(samples_.data() + lo, combined_.data() + (n - hi), len);
    } else {
      out.noalias() += samples_.middleCols(lo, len) * combined_.segment(n - hi, len).reverse();
    }
  }
  const auto edge = [&](int j) {
    for (int k = 0; k < width; ++k) {
      const int i = j - k;
      if (i >= first && i < last) out += cache_[n - 1 - i][k] * samples_.col(j);
    }
  };
  for (int j = first; j < std::min(lo, last + width - 1); ++j) edge(j);
  for (int j = std::max(hi + 1, lo); j < last + width - 1; ++j) edge(j);
  return out;
}

void DirectConvolution::add_weights(int n, int first, int last, bool include_tail,
                                    Eigen::VectorXd& w) const {
  const int width = stencil_width(kind_);
  grow_cache(n);
  for (int i = first; i < last; ++i) {
    const auto& b = cache_[n - 1 - i];
    for (int k = 0; k < width; ++k) w[i + k] += b[k];
  }
  if (!include_tail) return;
  if (kind_ == InterpKind::Quadratic) {
    if (n == 1) {
      const auto& b = cache_[0];
      for (int k = 0; k < 3; ++k) w[k] += b[k];
    } else {
      for (int k = 0; k < 3; ++k) w[n - 2 + k] += local_[k];
    }
  } else {
    w[n - 1] += local_[1];
    w[n] += local_[2];
  }
}

void DirectConvolution::require(int n) const {
  if (n < 1) throw StateError("direct: step index must be at least 1");
  if (count_ < samples_needed(n))
    throw StateError("direct: step " + std::to_string(n) + " needs " +
                     std::to_string(samples_needed(n)) + " samples, have " +
                     std::to_string(count_));
}

Eigen::VectorXd DirectConvolution::weights(int n) const {
  if (n < 1) throw StateError("direct: step index must be at least 1");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(samples_needed(n));
  add_weights(n, 0, n - 1, true, w);
  return w;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> DirectConvolution::split_eval(int n) const {
  require(n);
  const int len = samples_needed(n);
  const int jn = std::min(std::max(n - n0_, 0), n - 1);
  Eigen::VectorXd wl = Eigen::VectorXd::Zero(len);
  Eigen::VectorXd wh = Eigen::VectorXd::Zero(len);
  add_weights(n, 0, jn, false, wh);
  add_weights(n, jn, n - 1, true, wl);
  return {samples_.leftCols(len) * wl, samples_.leftCols(len) * wh};
}

Eigen::VectorXd DirectConvolution::eval(int n) const {
  require(n);
  Eigen::VectorXd value;
  if (kind_ == InterpKind::Quadratic && n == 1) {
    const Eigen::VectorXd w = weights(n);
    value = samples_.leftCols(w.size()) * w;
  } else {
    value = apply_intervals(n, 0, n - 1);
    if (kind_ == InterpKind::Quadratic) {
      value += local_[0] * samples_.col(n - 2) + local_[1] * samples_.col(n - 1) +
               local_[2] * samples_.col(n);
    } else {
      value += local_[1] * samples_.col(n - 1) + local_[2] * samples_.col(n);
    }
  }
  if (corrections_)
    add_correction(*corrections_, tau_, n, [this](int j) { return sample(j); }, count_, value,
                   nullptr);
  return value;
}

AffineValue DirectConvolution::affine(int n) const {
  if (n != count_) throw StateError("direct: affine evaluation needs exactly n samples");
  if (n < 1 || samples_needed(n) != n + 1)
    throw StateError("direct: step " + std::to_string(n) + " cannot be solved for implicitly");
  AffineValue out;
  if (kind_ == InterpKind::Quadratic) {
    // interval n-2 is the only history stencil that touches u_n
    grow_cache(n);
    out.base = apply_intervals(n, 0, n - 2);
    const auto& b = cache_[1];
    out.base += b[0] * samples_.col(n - 2) + b[1] * samples_.col(n - 1) +
                local_[0] * samples_.col(n - 2) + local_[1] * samples_.col(n - 1);
    out.diag = b[2] + local_[2];
  } else {
    out.base = apply_intervals(n, 0, n - 1) + local_[1] * samples_.col(n - 1);
    out.diag = local_[2];
  }
  if (corrections_)
    add_correction(*corrections_, tau_, n, [this](int j) { return sample(j); }, count_, out.base,
                   &out.diag);
  return out;
}

long DirectConvolution::active_memory() const {
  long total = static_cast<long>(count_) * dim_ + 3;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    total += 6 * static_cast<long>(cache_.size());
  }
  if (corrections_) total += corrections_->active_memory();
  return total;
}

}  // namespace fracfast
