#include "fracfast/conv_fast.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>

#include "fracfast/errors.hpp"
#include "fracfast/specfun.hpp"

namespace fracfast {

int FastParams::horizon_steps() const {
  const double steps = horizon / tau;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) <= 1e-9 * std::max(1.0, rounded)) return static_cast<int>(rounded);
  return static_cast<int>(std::ceil(steps));
}

void FastParams::validate() const {
  if (!(alpha < 1.0) || alpha == 0.0 || !std::isfinite(alpha))
    throw DomainError("fast: alpha must be below 1 and non-zero");
  if (!(tau > 0.0)) throw DomainError("fast: tau must be positive");
  if (n0 < 1) throw DomainError("fast: memory length must be at least one step");
  if (B < 2) throw DomainError("fast: basis B must be at least 2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("fast: eps must lie in (0, 1)");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw DomainError("fast: eps0 must lie in (0, 1)");
  if (!(horizon > 0.0)) throw DomainError("fast: horizon must be positive");
  if (horizon / tau > 2e9) throw DomainError("fast: too many steps");
}

HistoryPartition partition_for(int n, int n0, int B, double tau) {
  HistoryPartition part;
  part.n = n;
  part.tau = tau;
  part.p = static_cast<long>(n) - n0 + 1;
  if (part.p < 2) {
    part.L = 0;
    return part;
  }
  const long p = part.p;
  int L = 1;
  long BL = B;
  while (!(p < 2 * BL)) {
    ++L;
    BL *= B;
  }
  part.L = L;
  part.anchors.assign(L + 1, 0);
  part.q.assign(L + 1, 0);
  part.anchors[0] = p - 1;
  long Bl = 1;
  for (int l = 1; l < L; ++l) {
    Bl *= B;
    part.q[l] = p / Bl - 1;
    part.anchors[l] = part.q[l] * Bl;
  }
  part.anchors[L] = 0;
  return part;
}

double level_ratio(int B, double ratio, int ell) {
  const double inv = std::pow(double(B), 1.0 - ell);
  return (2.0 * B - 1.0 - inv) / (1.0 + inv * (ratio - 1.0));
}

int select_level_order(int B, double ratio, int ell, double eps) {
  if (B < 2 || ell < 1 || !(ratio >= 1.0) || !(eps > 0.0 && eps < 1.0))
    throw DomainError("select_level_order: invalid arguments");
  const double r = level_ratio(B, ratio, ell);
  const double N = std::ceil(std::log(eps) / (2.0 * std::log(r / (r + 1.0))));
  return std::max(1, static_cast<int>(N));
}

FastConvolution::FastConvolution(FastParams params, int dim)
    : params_(std::move(params)), dim_(dim) {
  params_.validate();
  if (dim < 1) throw DomainError("fast: dimension must be positive");
  const double alpha = params_.alpha;
  const double tau = params_.tau;
  const int n0 = params_.n0;
  const int B = params_.B;
  horizon_steps_ = params_.horizon_steps();
  prefactor_ = sin_pi(alpha) / M_PI;
  local_ = local_weights(alpha, tau, params_.kind);
  for (int J = 0; J < n0; ++J) near_.push_back(history_weights(alpha, tau, J, params_.kind).b);

  // every level reads its window from t = 0 once it becomes the top level,
  // so the whole bank up to the horizon is created now
  const long p_max = std::max<long>(static_cast<long>(horizon_steps_) - n0 + 1, 2);
  int L_max = 1;
  for (long BL = B; !(p_max < 2 * BL); BL *= B) ++L_max;

  std::map<int, Rule> unit_rules;
  long beta = 1;
  for (int l = 1; l <= L_max; ++l, beta *= B) {
    Level lv;
    lv.index = l;
    lv.block_len = beta;
    lv.T_hat = (double(beta) + n0 - 1.0) * tau;
    const int N = select_level_order(B, n0, l, params_.eps);
    auto it = unit_rules.find(N);
    if (it == unit_rules.end()) it = unit_rules.emplace(N, gauss_laguerre_rule(-alpha, N)).first;
    const int q = truncation_count(-alpha, N, params_.eps0);
    lv.rule = truncate_rule(scale_rule(it->second, lv.T_hat), q);
    const Eigen::VectorXd& lam = lv.rule.nodes;
    lv.decay_step = (-lam * tau).array().exp();
    lv.decay_block = (-lam * (tau * double(beta))).array().exp();
    lv.psi.resize(q, 3);
    for (int j = 0; j < q; ++j) {
      const auto w = interval_exp_weights(lam[j] * tau, params_.kind);
      for (int k = 0; k < 3; ++k) lv.psi(j, k) = tau * w[k];
    }
    lv.partial = Eigen::MatrixXd::Zero(q, dim_);
    levels_.push_back(std::move(lv));
  }

  ring_size_ = n0 + 3;
  ring_.resize(dim_, ring_size_);
  const int m = static_cast<int>(params_.sigmas.size());
  initial_.resize(dim_, std::max(m + 1, 1));
  if (m > 0) {
    FastParams unit = params_;
    unit.tau = 1.0;
    unit.horizon = horizon_steps_;
    unit.sigmas.clear();
    unit.retain_log = false;
    corrections_ = std::make_unique<CorrectionSet>(
        alpha, params_.sigmas, [unit] { return std::make_unique<FastConvolution>(unit, 1); });
  }
}

Eigen::VectorXd FastConvolution::sample(long j) const {
  if (j < 0 || j >= count_ || j < count_ - ring_size_)
    throw StateError("fast: sample " + std::to_string(j) + " is no longer held");
  return ring_.col(j % ring_size_);
}

void FastConvolution::push_sample(const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != dim_) throw DomainError("fast: sample has the wrong dimension");
  if (count_ > horizon_steps_ + 1) throw StateError("fast: sample beyond the configured horizon");
  const long k = count_;
  ring_.col(k % ring_size_) = u;
  if (k < initial_.cols()) initial_.col(k) = u;
  if (params_.retain_log) {
    if (k == log_.cols()) log_.conservativeResize(dim_, std::max<long>(16, 2 * k));
    log_.col(k) = u;
  }
  ++count_;
  const long width = stencil_width(params_.kind);
  if (k >= width - 1) commit_interval(k - width + 1);
  evict(k - params_.n0 + 1);
}

void FastConvolution::commit_interval(long i) {
  const int width = stencil_width(params_.kind);
  Eigen::MatrixXd V(width, dim_);
  for (int c = 0; c < width; ++c) V.row(c) = sample(i + c).transpose();
  for (auto& lv : levels_) {
    lv.partial = lv.decay_step.asDiagonal() * lv.partial;
    lv.partial.noalias() += lv.psi.leftCols(width) * V;
    if (++lv.partial_len == lv.block_len) {
      lv.blocks.push_back(Block{lv.partial_begin, lv.partial_begin + lv.block_len, lv.partial});
      lv.partial.setZero();
      lv.partial_begin += lv.block_len;
      lv.partial_len = 0;
    }
  }
  committed_ = i + 1;
}

void FastConvolution::evict(long p) {
  if (p < 2) return;
  const auto part = partition_for(static_cast<int>(p + params_.n0 - 1), params_.n0, params_.B,
                                  params_.tau);
  const int upto = std::min(part.L - 1, level_count());
  for (int l = 1; l <= upto; ++l) {
    auto& blocks = levels_[l - 1].blocks;
    while (!blocks.empty() && blocks.front().end <= part.anchors[l]) blocks.pop_front();
  }
}

const Eigen::MatrixXd& FastConvolution::window(const Level& lv, long lo, long hi) const {
  if (lo == lv.cached_lo && hi == lv.cached_hi) return lv.cached_y;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(lv.rule.size(), dim_);
  long at = lo;
  for (const auto& b : lv.blocks) {
    if (b.begin < lo) continue;
    if (b.end > hi) break;
    if (b.begin != at) break;
    y = lv.decay_block.asDiagonal() * y;
    y += b.z;
    at = b.end;
  }
  if (at != hi)
    throw StateError("fast: level " + std::to_string(lv.index) + " cannot tile window [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  lv.cached_lo = lo;
  lv.cached_hi = hi;
  lv.cached_y = std::move(y);
  return lv.cached_y;
}

Eigen::VectorXd FastConvolution::history_impl(int n, bool affine, double* pending_diag) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  const auto part = partition(n);
  if (part.empty()) return out;
  if (part.L > level_count()) throw StateError("fast: step lies beyond the configured horizon");
  const double tau = params_.tau;
  const int width = stencil_width(params_.kind);
  for (int l = 1; l <= part.L; ++l) {
    const Level& lv = levels_[l - 1];
    const long lo = part.anchors[l];
    const long hi = part.anchors[l - 1];
    const Eigen::VectorXd& lam = lv.rule.nodes;
    const Eigen::VectorXd c =
        lv.rule.weights.cwiseProduct((-lam * (double(part.p - hi - lv.block_len) * tau)).array().exp().matrix());
    if (hi <= committed_) {
      out.noalias() += window(lv, lo, hi).transpose() * c;
      continue;
    }
    // last history interval still waits for u_n
    const long i = committed_;
    if (l != 1 || !affine || hi != i + 1 || i + width - 1 != n)
      throw StateError("fast: history window at step " + std::to_string(n) + " is not available");
    Eigen::MatrixXd y = lv.decay_step.asDiagonal() * window(lv, lo, i);
    for (int k = 0; k + 1 < width; ++k) y += lv.psi.col(k) * sample(i + k).transpose();
    out.noalias() += y.transpose() * c;
    *pending_diag += prefactor_ * c.dot(lv.psi.col(width - 1));
  }
  return prefactor_ * out;
}

int FastConvolution::local_begin(int n) const {
  const int jn = std::min(std::max(n - params_.n0, 0), n - 1);
  // the quadratic tail stencil reaches back to u_{n-2}
  return params_.kind == InterpKind::Quadratic && n >= 2 ? std::min(jn, n - 2) : jn;
}

Eigen::VectorXd FastConvolution::local_weights_at(int n) const {
  const int jn = std::min(std::max(n - params_.n0, 0), n - 1);
  const int first = local_begin(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(samples_needed(n) - first);
  const int width = stencil_width(params_.kind);
  for (int i = jn; i < n - 1; ++i) {
    const auto& b = near_[n - 1 - i];
    for (int k = 0; k < width; ++k) w[i - first + k] += b[k];
  }
  if (params_.kind == InterpKind::Quadratic) {
    if (n == 1) {
      for (int k = 0; k < 3; ++k) w[k] += near_[0][k];
    } else {
      for (int k = 0; k < 3; ++k) w[n - 2 - first + k] += local_[k];
    }
  } else {
    w[n - 1 - first] += local_[1];
    w[n - first] += local_[2];
  }
  return w;
}

void FastConvolution::require_eval(int n) const {
  if (n < 1) throw StateError("fast: step index must be at least 1");
  if (count_ != samples_needed(n))
    throw StateError("fast: step " + std::to_string(n) + " is not the current step (" +
                     std::to_string(count_) + " samples held)");
}

Eigen::VectorXd FastConvolution::local_eval(int n) const {
  require_eval(n);
  const int first = local_begin(n);
  const Eigen::VectorXd w = local_weights_at(n);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int k = 0; k < w.size(); ++k) out += w[k] * sample(first + k);
  return out;
}

Eigen::VectorXd FastConvolution::history_fast(int n) const {
  require_eval(n);
  return history_impl(n, false, nullptr);
}

Eigen::VectorXd FastConvolution::eval(int n) const {
  Eigen::VectorXd value = local_eval(n) + history_impl(n, false, nullptr);
  if (corrections_) {
    add_correction(
        *corrections_, params_.tau, n,
        [this](int j) { return j < initial_.cols() ? Eigen::VectorXd(initial_.col(j)) : sample(j); },
        count_, value, nullptr);
  }
  return value;
}

AffineValue FastConvolution::affine(int n) const {
  if (n < 1 || n != count_ || samples_needed(n) != n + 1)
    throw StateError("fast: step " + std::to_string(n) + " cannot be solved for implicitly");
  const int first = local_begin(n);
  const Eigen::VectorXd w = local_weights_at(n);
  AffineValue out;
  out.base = Eigen::VectorXd::Zero(dim_);
  for (int k = 0; k + 1 < w.size(); ++k) out.base += w[k] * sample(first + k);
  out.diag = w[w.size() - 1];
  out.base += history_impl(n, true, &out.diag);
  if (corrections_) {
    add_correction(
        *corrections_, params_.tau, n,
        [this](int j) { return j < initial_.cols() ? Eigen::VectorXd(initial_.col(j)) : sample(j); },
        count_, out.base, &out.diag);
  }
  return out;
}

Eigen::VectorXd FastConvolution::reference_history(int n) const {
  if (!params_.retain_log) throw StateError("fast: reference evaluation needs the sample log");
  if (n < 1 || count_ < samples_needed(n))
    throw StateError("fast: reference evaluation is missing samples");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  const auto part = partition(n);
  if (part.empty()) return out;
  if (part.L > level_count()) throw StateError("fast: step lies beyond the configured horizon");
  const double tau = params_.tau;
  const int width = stencil_width(params_.kind);
  for (int l = 1; l <= part.L; ++l) {
    const Level& lv = levels_[l - 1];
    const long lo = part.anchors[l];
    const long hi = part.anchors[l - 1];
    for (int j = 0; j < lv.rule.size(); ++j) {
      const double lam = lv.rule.nodes[j];
      const auto psi = interval_exp_weights(lam * tau, params_.kind);
      Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
      for (long i = lo; i < hi; ++i) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim_);
        for (int k = 0; k < width; ++k) phi += psi[k] * log_.col(i + k);
        y += std::exp(-double(hi - i - 1) * tau * lam) * tau * phi;
      }
      out += lv.rule.weights[j] * std::exp(-double(part.p - hi - lv.block_len) * tau * lam) * y;
    }
  }
  return prefactor_ * out;
}

long FastConvolution::active_memory() const {
  long total = ring_.size() + initial_.size() + 3 + 3 * static_cast<long>(near_.size());
  for (const auto& lv : levels_) {
    const long q = lv.rule.size();
    total += 2 * q + 2 * q + 3 * q;  // rule, decays, psi
    total += static_cast<long>(lv.blocks.size() + 2) * q * dim_;  // blocks, partial, cache
  }
  if (corrections_) total += corrections_->active_memory();
  return total;
}

std::vector<LevelDiagnostics> FastConvolution::diagnostics() const {
  std::vector<LevelDiagnostics> out;
  for (const auto& lv : levels_)
    out.push_back({lv.index, lv.rule.order, lv.rule.size(), lv.T_hat,
                   static_cast<int>(lv.blocks.size())});
  return out;
}

void FastConvolution::write_diagnostics_csv(std::ostream& os) const {
  os << "level,N_ell,q_retained,T_hat,blocks_held\n";
  char buf[64];
  for (const auto& d : diagnostics()) {
    std::snprintf(buf, sizeof buf, "%.17g", d.T_hat);
    os << d.level << ',' << d.order << ',' << d.retained << ',' << buf << ',' << d.blocks_held
       << '\n';
  }
}

int FastConvolution::total_order() const {
  int s = 0;
  for (const auto& lv : levels_) s += lv.rule.order;
  return s;
}

int FastConvolution::total_retained() const {
  int s = 0;
  for (const auto& lv : levels_) s += lv.rule.size();
  return s;
}

double FastConvolution::max_state_abs() const {
  double m = 0.0;
  for (const auto& lv : levels_) {
    if (lv.partial.size() > 0) m = std::max(m, lv.partial.cwiseAbs().maxCoeff());
    for (const auto& b : lv.blocks) m = std::max(m, b.z.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace fracfast
