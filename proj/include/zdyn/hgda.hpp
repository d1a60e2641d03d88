#pragma once

// Stability analysis of general historical GDA schemes on square,
// non-singular bilinear games.
//
// With smoothness transfer function S(z) = z^k - p_1 z^(k-1) - ... - p_k and
// gradient transfer function G(z) = q_1 z^(k-1) + ... + q_k, the joint
// characteristic equation is det(S^2 I + G^2 eta^2 A A^T) = 0. Shared roots
// of S and G form a factor P that multiplies the determinant; the remaining
// roots are those of
//   (-S'^2)^n + a_1 (-S'^2)^(n-1) G'^2 + ... + a_n (G'^2)^n
// where S = P S', G = P G' and a_i are the characteristic coefficients of
// eta^2 A A^T. The scheme converges to a Nash equilibrium iff both P and that
// polynomial are Schur stable.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zdyn/dynamics.hpp"
#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"
#include "zdyn/linalg.hpp"
#include "zdyn/ogda.hpp"
#include "zdyn/polynomial.hpp"
#include "zdyn/scheme.hpp"
#include "zdyn/stability.hpp"
#include "zdyn/tolerances.hpp"

namespace zdyn {

struct TransferFunctions {
  Polynomial s;  ///< smoothness term, monic of degree k
  Polynomial g;  ///< gradient term, degree <= k - 1
};

inline TransferFunctions transfer_functions(const HgdaScheme& scheme) {
  const std::size_t k = scheme.horizon();
  std::vector<double> s(k + 1, 0.0), g(k, 0.0);
  s[k] = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    s[k - i] = -scheme.p()[i - 1];
    g[k - i] = scheme.q()[i - 1];
  }
  return {Polynomial(std::move(s)), Polynomial(std::move(g))};
}

/// S(1) = 0 and G(1) != 0: any limit of a convergent run is a Nash equilibrium.
inline bool check_nash_conditions(const HgdaScheme& scheme) { return scheme.nash_compatible(); }

struct AnalyzeOptions {
  Tolerances tol = kDefaultTolerances;
  /// Analyze schemes that fail the Nash conditions anyway. The report is then
  /// a pure stability statement and `certified_nash` is false.
  bool allow_non_nash = false;
  /// Compare the joint root set with the eigenvalues of the block companion.
  bool cross_check = true;
};

struct HgdaAnalysis {
  Polynomial s;
  Polynomial g;
  Polynomial common;     ///< P(z), monic; 1 when S and G share no root
  Polynomial s_reduced;  ///< S / P
  Polynomial g_reduced;  ///< G / P
  /// Reduction polynomial built from S and G themselves (contains P^(2n)).
  Polynomial reduction;
  /// Reduction polynomial built from S / P and G / P; its roots plus the roots
  /// of P form the joint root set. Stored rounded to double; the roots in
  /// `report` come from the extended-precision expansion.
  Polynomial reduced_reduction;
  /// Verdict over the joint root set.
  StabilityReport report;
  bool nash_ok = false;
  /// False when the analysis ran with allow_non_nash on a scheme that fails the conditions.
  bool certified_nash = false;
  /// Hausdorff distance between the joint root set and the companion spectrum.
  std::optional<double> oracle_distance;
  /// Spectral radius of the block companion.
  std::optional<double> oracle_radius;
};

inline AnalyzeOptions default_analyze_options() { return AnalyzeOptions{}; }

inline HgdaAnalysis analyze(const HgdaScheme& scheme, const GameMatrix& game, const AnalyzeOptions& opt = default_analyze_options()) {
  HgdaAnalysis out;
  out.nash_ok = check_nash_conditions(scheme);
  if (!out.nash_ok && !opt.allow_non_nash) {
    if (!scheme.smoothness_condition()) throw ContractViolation("nash conditions violated: sum(p) != 1 (S(1) != 0)");
    throw ContractViolation("nash conditions violated: sum(q) == 0 (G(1) == 0)");
  }
  out.certified_nash = out.nash_ok;
  require_nonsingular(game, opt.tol);

  auto [s, g] = transfer_functions(scheme);
  out.s = s;
  out.g = g;
  if (g.is_zero()) throw InvalidInput("analyze: gradient weights are all zero");

  // The reductions are expanded in wide_real: their roots cluster near z = 1
  // whenever eta^2 A A^T has small eigenvalues, and double coefficients
  // would not determine them.
  const auto alpha = gram_coefficients<wide_real>(game, scheme.eta());
  const WidePolynomial ws = s.cast<wide_real>();
  const WidePolynomial wg = g.cast<wide_real>();
  const auto cf = common_roots(ws, wg, opt.tol.common_root);
  out.common = cf.common.cast<double>();
  out.s_reduced = cf.s_reduced.cast<double>();
  out.g_reduced = cf.g_reduced.cast<double>();
  out.reduction = reduction_polynomial(ws, wg, alpha, opt.tol.leading_trim).cast<double>();
  const WidePolynomial reduced = reduction_polynomial(cf.s_reduced, cf.g_reduced, alpha, opt.tol.leading_trim);
  out.reduced_reduction = reduced.cast<double>();

  RootSet joint;
  if (reduced.degree() >= 1) joint = roots(reduced);
  joint.insert(joint.end(), cf.shared_roots.begin(), cf.shared_roots.end());
  out.report = classify_roots(std::move(joint), opt.tol.marginal_band);

  if (opt.cross_check) {
    const auto eig = eigenvalues(block_companion(scheme, game));
    out.oracle_distance = hausdorff_distance(out.report.roots, eig);
    out.oracle_radius = max_modulus(eig);
  }
  return out;
}

/// Bisects [lo, hi] on a predicate that holds at exactly one end until the
/// bracket is narrower than `width`; returns the midpoint.
inline double bisect_transition(const std::function<bool(double)>& stable, double lo, double hi, double width) {
  if (!(lo < hi)) throw InvalidInput("invalid bracket: lo must be below hi");
  const bool at_lo = stable(lo);
  const bool at_hi = stable(hi);
  if (at_lo == at_hi) throw InvalidInput("invalid bracket: same verdict at both ends");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (stable(mid) == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Learning rate where the analytic verdict of `scheme` (with eta replaced)
/// changes between Stable and not Stable inside [eta_lo, eta_hi].
inline double eta_stability_boundary(const HgdaScheme& scheme, const GameMatrix& game, double eta_lo, double eta_hi,
                                     const AnalyzeOptions& opt = default_analyze_options()) {
  AnalyzeOptions o = opt;
  o.cross_check = false;
  auto stable = [&](double eta) { return analyze(scheme.with_eta(eta), game, o).report.verdict == Verdict::Stable; };
  return bisect_transition(stable, eta_lo, eta_hi, opt.tol.bisection_width);
}

/// Same boundary located from simulated behaviour: at each probe the scheme
/// runs `steps` iterations from `init` and is called stable when the tail
/// log-residual slope is negative.
inline double eta_stability_boundary_simulated(const HgdaScheme& scheme, const GameMatrix& game,
                                               const std::vector<JointState>& init, std::size_t steps, double eta_lo,
                                               double eta_hi, double width = kDefaultTolerances.bisection_width,
                                               double guard = kDefaultGuard) {
  auto stable = [&](double eta) {
    return observed_behavior(simulate(scheme.with_eta(eta), game, init, steps, guard)) == Behavior::Converging;
  };
  return bisect_transition(stable, eta_lo, eta_hi, width);
}

}  // namespace zdyn
