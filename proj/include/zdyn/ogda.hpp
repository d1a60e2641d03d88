#pragma once

// Closed-form analysis of optimistic GDA on square bilinear games. Each
// eigenvalue lambda of eta^2 A A^T contributes the roots of
//   z^2 - z (1 + 2 sqrt(lambda) j) + sqrt(lambda) j = 0
// and their conjugates; the dynamics contract iff every root lies inside
// the unit circle, which happens iff eta^2 ||A||^2 < 1/3.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"
#include "zdyn/polynomial.hpp"
#include "zdyn/stability.hpp"
#include "zdyn/tolerances.hpp"

namespace zdyn {

struct RootPair {
  double lambda = 0.0;
  Complex z1;  ///< larger-modulus root
  Complex z2;
  double norm1 = 0.0;
  double norm2 = 0.0;
};

/// Modulus of the dominant root for one eigenvalue lambda > 0.
inline double dominant_root_norm(double lambda) {
  if (lambda <= 0.25) return std::sqrt(2.0 + 2.0 * std::sqrt(1.0 - 4.0 * lambda)) / 2.0;
  return std::sqrt(2.0 * lambda + std::sqrt(lambda * (4.0 * lambda - 1.0)));
}

inline RootPair root_pair(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("root_pair: lambda must be positive");
  RootPair rp;
  rp.lambda = lambda;
  const double s = std::sqrt(lambda);
  if (lambda <= 0.25) {
    const double d = std::sqrt(1.0 - 4.0 * lambda);
    rp.z1 = Complex((1.0 + d) / 2.0, s);
    rp.z2 = Complex((1.0 - d) / 2.0, s);
    rp.norm1 = std::sqrt(2.0 + 2.0 * d) / 2.0;
    rp.norm2 = std::sqrt(2.0 - 2.0 * d) / 2.0;
  } else {
    const double d = std::sqrt(4.0 * lambda - 1.0);
    rp.z1 = Complex(0.5, (2.0 * s + d) / 2.0);
    rp.z2 = Complex(0.5, (2.0 * s - d) / 2.0);
    const double cross = std::sqrt(lambda * (4.0 * lambda - 1.0));
    rp.norm1 = std::sqrt(2.0 * lambda + cross);
    rp.norm2 = std::sqrt(std::max(0.0, 2.0 * lambda - cross));
  }
  return rp;
}

/// (z^2 - z)^2 + lambda (2z - 1)^2
template <typename Real = double>
BasicPolynomial<Real> ogda_factor(double lambda) {
  const Real l(lambda);
  return BasicPolynomial<Real>{l, Real(-4) * l, Real(1) + Real(4) * l, Real(-2), Real(1)};
}

/// Characteristic polynomial of OGDA on A: the product over the eigenvalues
/// lambda of eta^2 A A^T of (z^2 - z)^2 + lambda (2z - 1)^2 (degree 4n).
///
/// With the default double coefficients the roots near z = 1 are only
/// determined to about sqrt(eps / lambda_min); expand in wide_real when the
/// roots themselves are needed.
template <typename Real = double>
BasicPolynomial<Real> characteristic_poly_ogda(const GameMatrix& a, double eta) {
  const Spectrum spec = game_spectrum(a, eta);
  auto acc = BasicPolynomial<Real>::constant(Real(1));
  for (double lambda : spec.eigenvalues) acc = acc * ogda_factor<Real>(lambda);
  return acc;
}

/// The same polynomial through the generic reduction with S = z^2 - z,
/// G = 2z - 1 and the Faddeev-LeVerrier coefficients of eta^2 A A^T.
template <typename Real = double>
BasicPolynomial<Real> characteristic_poly_ogda_by_reduction(const GameMatrix& a, double eta) {
  using P = BasicPolynomial<Real>;
  const auto alpha = gram_coefficients<Real>(a, eta);
  const P r = reduction_polynomial(P{Real(0), Real(-1), Real(1)}, P{Real(-1), Real(2)}, alpha);
  return a.dim() % 2 == 0 ? r : -r;
}

inline void require_nonsingular(const GameMatrix& a, const Tolerances& tol) {
  if (a.singular(tol.singular_det)) throw Unsupported("unsupported: singular matrix");
}

/// Stability of OGDA decided by the closed form eta^2 gamma^2 < 1/3; the
/// reported radius and roots come from the per-eigenvalue root pairs.
inline StabilityReport ogda_verdict(const GameMatrix& a, double eta, const Tolerances& tol = kDefaultTolerances) {
  require_nonsingular(a, tol);
  if (!std::isfinite(eta)) throw InvalidInput("learning rate is not finite");
  const Spectrum spec = game_spectrum(a, eta);
  StabilityReport rep;
  if (eta == 0.0) {
    // Decoupled system: every state is a fixed point, roots {0, 1}.
    rep.verdict = Verdict::Marginal;
    rep.spectral_radius = 1.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      for (int r = 0; r < 2; ++r) rep.roots.insert(rep.roots.end(), {Complex(0.0, 0.0), Complex(1.0, 0.0)});
      rep.boundary_roots.insert(rep.boundary_roots.end(), 2, Complex(1.0, 0.0));
    }
    return rep;
  }
  for (double lambda : spec.eigenvalues) {
    const RootPair rp = root_pair(lambda);
    rep.roots.insert(rep.roots.end(), {rp.z1, std::conj(rp.z1), rp.z2, std::conj(rp.z2)});
    rep.spectral_radius = std::max(rep.spectral_radius, rp.norm1);
    if (std::abs(rp.norm1 - 1.0) <= tol.marginal_band) rep.boundary_roots.insert(rep.boundary_roots.end(), {rp.z1, std::conj(rp.z1)});
  }
  const double x = eta * eta * spec.spectral_norm * spec.spectral_norm;
  constexpr double third = 1.0 / 3.0;
  if (std::abs(x - third) <= 4.0 * std::numeric_limits<double>::epsilon() * third) {
    rep.verdict = Verdict::Marginal;
  } else if (x < third) {
    rep.verdict = Verdict::Stable;
    rep.rate = rep.spectral_radius;
  } else {
    rep.verdict = Verdict::Unstable;
  }
  return rep;
}

/// |eta| below which OGDA converges on A: 1 / (sqrt(3) ||A||).
inline double ogda_threshold(const GameMatrix& a) { return 1.0 / (std::numbers::sqrt3 * a.spectral_norm()); }

struct OptimalRate {
  double eta = 0.0;
  double radius = 0.0;
};

/// Learning rate minimizing the OGDA spectral radius on A. With equal
/// eigenvalues of A A^T this is 1 / (2 gamma); otherwise it is the unique
/// eta where the dominant roots for lambda_min and lambda_max have equal
/// modulus, found by bisection on (0, 1 / (sqrt(3) gamma)).
inline OptimalRate optimal_learning_rate(const GameMatrix& a, const Tolerances& tol = kDefaultTolerances,
                                         double bisection_tol = 1e-10) {
  require_nonsingular(a, tol);
  const Spectrum spec = game_spectrum(a, 1.0);
  const double lmin = spec.min();
  const double lmax = spec.max();
  auto radius_at = [&](double eta) {
    double r = 0.0;
    for (double l : spec.eigenvalues) r = std::max(r, dominant_root_norm(eta * eta * l));
    return r;
  };
  if (lmax - lmin <= tol.equal_eigenvalues * lmax) {
    const double eta = 1.0 / (2.0 * spec.spectral_norm);
    return {eta, dominant_root_norm(0.25)};
  }
  double lo = 0.0;
  double hi = ogda_threshold(a);
  while (hi - lo > bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    const double gap = dominant_root_norm(mid * mid * lmin) - dominant_root_norm(mid * mid * lmax);
    if (gap >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double eta = 0.5 * (lo + hi);
  return {eta, radius_at(eta)};
}

}  // namespace zdyn
