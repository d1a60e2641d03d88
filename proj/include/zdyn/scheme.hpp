#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"
#include "zdyn/linalg.hpp"
#include "zdyn/tolerances.hpp"

namespace zdyn {

/// One member of the historical gradient descent/ascent family:
///
///   x_{t+k} = sum_i p_i x_{t+k-i} - eta sum_i q_i A   y_{t+k-i}
///   y_{t+k} = sum_i p_i y_{t+k-i} + eta sum_i q_i A^T x_{t+k-i}
///
/// with smoothness weights p_1..p_k and gradient weights q_1..q_k.
class HgdaScheme {
 public:
  HgdaScheme(std::vector<double> p, std::vector<double> q, double eta) : p_(std::move(p)), q_(std::move(q)), eta_(eta) {
    if (p_.empty()) throw InvalidInput("scheme horizon must be at least 1");
    if (p_.size() != q_.size()) throw InvalidInput("scheme p and q must have the same length");
    for (double v : p_)
      if (!std::isfinite(v)) throw InvalidInput("scheme p has a non-finite entry");
    for (double v : q_)
      if (!std::isfinite(v)) throw InvalidInput("scheme q has a non-finite entry");
    if (!std::isfinite(eta_)) throw InvalidInput("learning rate is not finite");
    const double sp = std::accumulate(p_.begin(), p_.end(), 0.0);
    const double sq = std::accumulate(q_.begin(), q_.end(), 0.0);
    smoothness_ok_ = std::abs(sp - 1.0) <= kDefaultTolerances.nash;
    gradient_ok_ = std::abs(sq) > kDefaultTolerances.nash;
  }

  std::size_t horizon() const { return p_.size(); }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  double eta() const { return eta_; }

  /// sum(p) = 1, i.e. S(1) = 0.
  bool smoothness_condition() const { return smoothness_ok_; }
  /// sum(q) != 0, i.e. G(1) != 0.
  bool gradient_condition() const { return gradient_ok_; }
  /// Both limit-point conditions hold, so any limit is a Nash equilibrium.
  bool nash_compatible() const { return smoothness_ok_ && gradient_ok_; }

  HgdaScheme with_eta(double eta) const { return HgdaScheme(p_, q_, eta); }

  friend bool operator==(const HgdaScheme&, const HgdaScheme&) = default;

 private:
  std::vector<double> p_;
  std::vector<double> q_;
  double eta_ = 0.0;
  bool smoothness_ok_ = false;
  bool gradient_ok_ = false;
};

/// Simultaneous gradient descent/ascent: k = 1, p = (1), q = (1).
inline HgdaScheme gda_scheme(double eta) { return HgdaScheme({1.0}, {1.0}, eta); }

/// Optimistic GDA: k = 2, p = (1, 0), q = (2, -1).
inline HgdaScheme ogda_scheme(double eta) { return HgdaScheme({1.0, 0.0}, {2.0, -1.0}, eta); }

inline constexpr std::size_t kMaxCompanionSize = 4096;

/// First-order companion matrix of the joint recursion over the stacked
/// history (w_{t+k-1}, ..., w_t), w = (x, y). Its top block row holds
/// M_i = p_i I + eta q_i J with J = [[0, -A], [A^T, 0]]; below it sit shifted
/// identities. For OGDA, M_1 and M_2 are the B and C blocks of
/// w_{t+2} = B w_{t+1} + C w_t.
inline Matrix block_companion(const HgdaScheme& scheme, const GameMatrix& game) {
  const std::size_t k = scheme.horizon();
  const std::size_t n = game.dim();
  const std::size_t block = 2 * n;
  if (k * block > kMaxCompanionSize) throw InvalidInput("block_companion: dimension exceeds 4096");
  const Matrix& a = game.matrix();
  Matrix c(k * block, k * block);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = scheme.p()[i];
    const double g = scheme.eta() * scheme.q()[i];
    const std::size_t col0 = i * block;
    for (std::size_t r = 0; r < block; ++r) c(r, col0 + r) = p;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s = 0; s < n; ++s) {
        c(r, col0 + n + s) = -g * a(r, s);  // x row, y column: -eta q_i A
        c(n + r, col0 + s) = g * a(s, r);   // y row, x column: +eta q_i A^T
      }
  }
  for (std::size_t r = block; r < k * block; ++r) c(r, r - block) = 1.0;
  return c;
}

}  // namespace zdyn
