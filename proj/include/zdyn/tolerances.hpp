#pragma once

namespace zdyn {

/// Every numerical threshold used by the analyzers lives here so that
/// boundary classification is consistent across modules.
struct Tolerances {
  /// Allowed asymmetry before a matrix is rejected by the symmetric solver.
  double symmetry = 1e-12;
  /// Half-width of the band around |z| = 1 reported as Marginal.
  double marginal_band = 1e-7;
  /// Distance below which a root of S and a root of G are considered shared.
  double common_root = 1e-8;
  /// Relative threshold for trimming leading coefficients of expanded products.
  double leading_trim = 1e-12;
  /// Jury table entries this close to zero make the test inconclusive.
  double jury_degenerate = 1e-12;
  /// |det A| at or below this is treated as singular.
  double singular_det = 1e-12;
  /// Tolerance on sum(p) = 1 and sum(q) != 0.
  double nash = 1e-12;
  /// Relative spread under which all eigenvalues of A A^T count as equal.
  double equal_eigenvalues = 1e-9;
  /// Bracket width at which learning-rate bisections stop.
  double bisection_width = 1e-6;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace zdyn
