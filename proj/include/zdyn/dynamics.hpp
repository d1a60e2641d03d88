#pragma once

// Time-domain simulation of HGDA schemes on bilinear games.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"
#include "zdyn/linalg.hpp"
#include "zdyn/scheme.hpp"

namespace zdyn {

/// Joint strategy w = (x, y), stored contiguously: x occupies [0, n), y [n, 2n).
using JointState = std::vector<double>;

inline JointState joint_state(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("x and y must have the same dimension");
  JointState w(x.begin(), x.end());
  w.insert(w.end(), y.begin(), y.end());
  return w;
}

/// Repeats one seed state across all k history slots.
inline std::vector<JointState> replicate_initial(const JointState& seed, std::size_t k) {
  return std::vector<JointState>(k, seed);
}

class Trajectory {
 public:
  Trajectory(std::size_t dim, std::vector<JointState> states, std::vector<double> residuals,
             std::optional<std::size_t> diverged_at)
      : dim_(dim), states_(std::move(states)), residuals_(std::move(residuals)), diverged_at_(diverged_at) {}

  std::size_t dim() const { return dim_; }
  /// Number of stored states (w_0 .. w_{size-1}).
  std::size_t size() const { return states_.size(); }
  const std::vector<JointState>& states() const { return states_; }
  const JointState& state(std::size_t t) const { return states_.at(t); }
  std::span<const double> x(std::size_t t) const { return std::span<const double>(states_.at(t)).first(dim_); }
  std::span<const double> y(std::size_t t) const { return std::span<const double>(states_.at(t)).subspan(dim_); }
  const JointState& final_state() const { return states_.back(); }
  /// ||w_t|| per stored state.
  const std::vector<double>& residuals() const { return residuals_; }
  std::optional<std::size_t> diverged_at() const { return diverged_at_; }
  bool diverged() const { return diverged_at_.has_value(); }

 private:
  std::size_t dim_;
  std::vector<JointState> states_;
  std::vector<double> residuals_;
  std::optional<std::size_t> diverged_at_;
};

inline constexpr double kDefaultGuard = 1e12;

/// Iterates the scheme from the k supplied initial states up to w_T
/// (T + 1 states in total). Stops early, recording diverged_at, as soon as
/// ||w_t|| exceeds `guard`.
inline Trajectory simulate(const HgdaScheme& scheme, const GameMatrix& game, const std::vector<JointState>& init,
                           std::size_t steps, double guard = kDefaultGuard) {
  const std::size_t k = scheme.horizon();
  const std::size_t n = game.dim();
  if (init.size() != k) throw InvalidInput("simulate: expected one initial state per history slot");
  for (const auto& w : init)
    if (w.size() != 2 * n) throw InvalidInput("simulate: initial state dimension does not match the game");
  if (steps < k) throw InvalidInput("simulate: steps must be at least the scheme horizon");
  if (!(guard > 0.0)) throw InvalidInput("simulate: guard must be positive");

  const Matrix& a = game.matrix();
  const double eta = scheme.eta();
  std::vector<JointState> states;
  states.reserve(steps + 1);
  std::vector<double> residuals;
  residuals.reserve(steps + 1);
  std::optional<std::size_t> diverged_at;

  // gx_t = A y_t and gy_t = A^T x_t cached per state.
  std::vector<std::vector<double>> ax, aty;
  auto push = [&](JointState w) {
    const std::span<const double> view(w);
    ax.push_back(multiply(a, view.subspan(n)));
    aty.push_back(multiply_transposed(a, view.first(n)));
    residuals.push_back(norm2(view));
    states.push_back(std::move(w));
  };
  for (const auto& w : init) {
    push(w);
    if (!diverged_at && residuals.back() > guard) diverged_at = states.size() - 1;
  }

  for (std::size_t t = k; t <= steps && !diverged_at; ++t) {
    JointState next(2 * n, 0.0);
    for (std::size_t i = 1; i <= k; ++i) {
      const JointState& past = states[t - i];
      const double p = scheme.p()[i - 1];
      const double g = eta * scheme.q()[i - 1];
      const auto& grad_x = ax[t - i];
      const auto& grad_y = aty[t - i];
      for (std::size_t j = 0; j < n; ++j) {
        next[j] += p * past[j] - g * grad_x[j];
        next[n + j] += p * past[n + j] + g * grad_y[j];
      }
    }
    push(std::move(next));
    if (residuals.back() > guard || !std::isfinite(residuals.back())) diverged_at = t;
  }
  return Trajectory(n, std::move(states), std::move(residuals), diverged_at);
}

/// Least-squares slope of log r_t against t over the final `tail_fraction`
/// of the positive prefix of `residuals` (the sequence is cut before the
/// first exact zero).
inline double log_residual_slope(std::span<const double> residuals, double tail_fraction = 0.5) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidInput("tail fraction must lie in (0, 1]");
  std::size_t end = 0;
  while (end < residuals.size() && residuals[end] > 0.0 && std::isfinite(residuals[end])) ++end;
  const auto count = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(end)));
  if (count < 10) throw InsufficientData("fewer than 10 usable residuals for rate estimation");
  const std::size_t start = end - count;
  double st = 0.0, sl = 0.0;
  for (std::size_t t = start; t < end; ++t) {
    st += static_cast<double>(t);
    sl += std::log(residuals[t]);
  }
  const double mt = st / static_cast<double>(count);
  const double ml = sl / static_cast<double>(count);
  double num = 0.0, den = 0.0;
  for (std::size_t t = start; t < end; ++t) {
    const double dt = static_cast<double>(t) - mt;
    num += dt * (std::log(residuals[t]) - ml);
    den += dt * dt;
  }
  return num / den;
}

/// Per-step contraction factor exp(slope) of a decaying residual sequence.
/// Sequences that do not contract have no rate and raise InsufficientData.
inline double empirical_rate(std::span<const double> residuals, double tail_fraction = 0.5) {
  const double rate = std::exp(log_residual_slope(residuals, tail_fraction));
  if (!(rate < 1.0)) throw InsufficientData("residuals do not contract; no convergence rate");
  return rate;
}

inline double empirical_rate(const Trajectory& traj, double tail_fraction = 0.5) {
  if (traj.diverged()) throw ContractViolation("empirical_rate: trajectory diverged");
  return empirical_rate(traj.residuals(), tail_fraction);
}

struct NashResidual {
  double grad_x = 0.0;  ///< ||A y_T||
  double grad_y = 0.0;  ///< ||A^T x_T||
};

/// Equilibrium residuals at the final state; both vanish exactly at a Nash
/// equilibrium of the bilinear game.
inline NashResidual nash_residual(const Trajectory& traj, const GameMatrix& game) {
  if (traj.diverged()) throw ContractViolation("nash_residual: trajectory diverged");
  if (traj.dim() != game.dim()) throw InvalidInput("nash_residual: dimension mismatch");
  const Matrix& a = game.matrix();
  const std::size_t t = traj.size() - 1;
  return {norm2(multiply(a, traj.y(t))), norm2(multiply_transposed(a, traj.x(t)))};
}

/// Behaviour observed in a finite simulation.
enum class Behavior { Converging, Diverging };

/// Classifies a finite run by the sign of the tail log-residual slope; a run
/// that hits the guard diverges and one that reaches exact zero converges.
inline Behavior observed_behavior(const Trajectory& traj, double tail_fraction = 0.5) {
  if (traj.diverged()) return Behavior::Diverging;
  const auto& r = traj.residuals();
  if (std::find(r.begin(), r.end(), 0.0) != r.end()) return Behavior::Converging;
  return log_residual_slope(r, tail_fraction) < 0.0 ? Behavior::Converging : Behavior::Diverging;
}

}  // namespace zdyn
