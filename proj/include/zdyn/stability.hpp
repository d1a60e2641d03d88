#pragma once

// Schur stability of real polynomials, decided two independent ways: the
// Jury tabulation (no roots) and explicit root geometry.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/polynomial.hpp"
#include "zdyn/tolerances.hpp"

namespace zdyn {

enum class Verdict { Stable, Marginal, Unstable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::Marginal:
      return "marginal";
    case Verdict::Unstable:
      return "unstable";
  }
  return "unknown";
}

struct StabilityReport {
  Verdict verdict = Verdict::Unstable;
  double spectral_radius = 0.0;
  RootSet roots;
  /// Roots whose modulus lies inside [1 - band, 1 + band].
  RootSet boundary_roots;
  /// Per-step contraction factor; present iff verdict is Stable.
  std::optional<double> rate;
};

/// Classifies a root set: Stable if every |z| < 1 - band, Unstable if some
/// |z| > 1 + band, Marginal otherwise. A root at z = 1 is listed among the
/// boundary roots but never upgrades the verdict.
inline StabilityReport classify_roots(RootSet roots, double band = kDefaultTolerances.marginal_band) {
  if (!(band > 0.0 && band <= 0.1)) throw InvalidInput("marginal band must lie in (0, 0.1]");
  StabilityReport rep;
  bool any_outside = false;
  bool any_boundary = false;
  for (const auto& z : roots) {
    const double m = std::abs(z);
    rep.spectral_radius = std::max(rep.spectral_radius, m);
    if (m > 1.0 + band) {
      any_outside = true;
    } else if (m >= 1.0 - band) {
      any_boundary = true;
      rep.boundary_roots.push_back(z);
    }
  }
  if (any_outside) {
    rep.verdict = Verdict::Unstable;
  } else if (any_boundary) {
    rep.verdict = Verdict::Marginal;
  } else {
    rep.verdict = Verdict::Stable;
    rep.rate = rep.spectral_radius;
  }
  rep.roots = std::move(roots);
  return rep;
}

template <typename Real>
StabilityReport root_verdict(const BasicPolynomial<Real>& p, double band = kDefaultTolerances.marginal_band) {
  return classify_roots(roots(p), band);
}

enum class JuryResult { Stable, NotStable };

/// Jury stability test. With rows r (length m + 1) the next row is
/// r'_k = r_0 r_k - r_m r_{m-k}; the polynomial is Schur stable iff
/// p(1) > 0, (-1)^d p(-1) > 0, |a_0| < a_d and every derived row down to
/// three entries has |first| > |last|. Throws Inconclusive when a table
/// entry needed for a decision is numerically zero.
template <typename Real>
JuryResult jury_test(const BasicPolynomial<Real>& p, double degenerate_tol = kDefaultTolerances.jury_degenerate) {
  using detail::abs_real;
  if (p.degree() < 1) throw InvalidInput("jury_test: degree must be at least 1");
  std::vector<Real> a(p.coeffs().begin(), p.coeffs().end());
  const Real norm = (p.leading() > Real(0) ? Real(1) : Real(-1)) / p.max_abs_coeff();
  for (Real& v : a) v *= norm;
  const std::size_t d = a.size() - 1;

  const BasicPolynomial<Real> q(a);
  const double at_one = static_cast<double>(q(Real(1)));
  const double at_minus_one = (d % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(q(Real(-1)));
  if (std::abs(at_one) <= degenerate_tol || std::abs(at_minus_one) <= degenerate_tol)
    throw Inconclusive("jury_test: root numerically on the unit circle at z = +-1; use root_verdict");
  if (at_one < 0.0 || at_minus_one < 0.0) return JuryResult::NotStable;

  auto decide = [&](const std::vector<Real>& row) {
    // Requires |row.front()| > |row.back()| (row stored as constant term first,
    // matching a_0 .. a_m, so the inequality reads |a_m| > |a_0|).
    const double gap = static_cast<double>(abs_real(row.back()) - abs_real(row.front()));
    if (std::abs(gap) <= degenerate_tol)
      throw Inconclusive("jury_test: degenerate table entry; use root_verdict");
    return gap > 0.0;
  };

  if (!decide(a)) return JuryResult::NotStable;
  std::vector<Real> row = a;
  while (row.size() > 3) {
    const std::size_t m = row.size() - 1;
    std::vector<Real> next(m);
    // Written in ascending order: next[i] = a_m a_{i+1} - a_0 a_{m-1-i},
    // which is (up to sign and ordering) the classical b_k = a_0 a_k - a_n a_{n-k}.
    for (std::size_t i = 0; i < m; ++i) next[i] = row[m] * row[i + 1] - row[0] * row[m - 1 - i];
    Real scale(0);
    for (Real v : next) scale = std::max(scale, abs_real(v));
    if (static_cast<double>(scale) <= degenerate_tol)
      throw Inconclusive("jury_test: degenerate table row; use root_verdict");
    for (Real& v : next) v /= scale;
    if (!decide(next)) return JuryResult::NotStable;
    row = std::move(next);
  }
  return JuryResult::Stable;
}

}  // namespace zdyn
