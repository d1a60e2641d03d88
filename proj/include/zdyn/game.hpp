#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/linalg.hpp"
#include "zdyn/polynomial.hpp"
#include "zdyn/tolerances.hpp"

namespace zdyn {

/// Payoff matrix A of the bilinear game f(x, y) = x^T A y. Always square with
/// finite entries; the spectral norm is computed once at construction.
class GameMatrix {
 public:
  explicit GameMatrix(Matrix a) : a_(std::move(a)) {
    if (!a_.square() || a_.rows() == 0) throw InvalidInput("game matrix must be square and non-empty");
    if (!a_.all_finite()) throw InvalidInput("game matrix has a non-finite entry");
    const Matrix ata = a_.transposed() * a_;
    const auto eig = symmetric_eigenvalues(ata, 1e-9);
    norm_ = std::sqrt(std::max(0.0, eig.back()));
  }

  GameMatrix(std::initializer_list<std::initializer_list<double>> rows) : GameMatrix(Matrix(rows)) {}

  const Matrix& matrix() const { return a_; }
  std::size_t dim() const { return a_.rows(); }
  double spectral_norm() const { return norm_; }
  double determinant() const { return zdyn::determinant(a_); }

  bool singular(double tol = kDefaultTolerances.singular_det) const { return std::abs(determinant()) <= tol; }

 private:
  Matrix a_;
  double norm_ = 0.0;
};

/// Largest singular value of A.
inline double spectral_norm(const GameMatrix& a) { return a.spectral_norm(); }

inline double spectral_norm(const Matrix& a) { return GameMatrix(a).spectral_norm(); }

/// Eigenvalues of eta^2 A A^T (ascending) together with gamma = ||A||.
struct Spectrum {
  std::vector<double> eigenvalues;
  double spectral_norm = 0.0;

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

inline Spectrum game_spectrum(const GameMatrix& a, double eta) {
  const Matrix& m = a.matrix();
  const Matrix gram = (eta * eta) * (m * m.transposed());
  Spectrum s{symmetric_eigenvalues(gram, 1e-9), a.spectral_norm()};
  // A A^T is positive semidefinite; clamp rounding noise below zero.
  for (double& v : s.eigenvalues) v = std::max(v, 0.0);
  return s;
}

namespace detail {

// Faddeev-LeVerrier on a row-major n x n matrix: ascending coefficients of
// det(xI - M), computed in the arithmetic of Real.
template <typename Real>
std::vector<Real> faddeev_leverrier(const std::vector<Real>& m, std::size_t n) {
  auto product = [n](const std::vector<Real>& x, const std::vector<Real>& y) {
    std::vector<Real> r(n * n, Real(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Real xik = x[i * n + k];
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] += xik * y[k * n + j];
      }
    return r;
  };
  std::vector<Real> c(n + 1, Real(0));
  c[n] = Real(1);
  std::vector<Real> mk(n * n, Real(0));  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    mk = product(m, mk);
    for (std::size_t i = 0; i < n; ++i) mk[i * n + i] += c[n - k + 1];
    const std::vector<Real> t = product(m, mk);
    Real trace(0);
    for (std::size_t i = 0; i < n; ++i) trace += t[i * n + i];
    c[n - k] = -trace / Real(static_cast<double>(k));
  }
  return c;
}

template <typename Real>
std::vector<Real> tail_coefficients(const std::vector<Real>& ascending) {
  const std::size_t n = ascending.size() - 1;
  std::vector<Real> a(n);
  for (std::size_t k = 1; k <= n; ++k) a[k - 1] = ascending[n - k];
  return a;
}

}  // namespace detail

/// Monic characteristic polynomial det(xI - M) by the Faddeev-LeVerrier recurrence.
template <typename Real = double>
BasicPolynomial<Real> characteristic_polynomial(const Matrix& m) {
  if (!m.square()) throw InvalidInput("characteristic_polynomial: matrix is not square");
  if (!m.all_finite()) throw InvalidInput("characteristic_polynomial: non-finite entry");
  const std::vector<Real> entries(m.data().begin(), m.data().end());
  return BasicPolynomial<Real>(detail::faddeev_leverrier(entries, m.rows()));
}

/// Non-leading coefficients a1..an of the monic characteristic polynomial
/// x^n + a1 x^(n-1) + ... + an.
template <typename Real = double>
std::vector<Real> characteristic_coefficients(const Matrix& m) {
  if (!m.square()) throw InvalidInput("characteristic_coefficients: matrix is not square");
  if (!m.all_finite()) throw InvalidInput("characteristic_coefficients: non-finite entry");
  const std::vector<Real> entries(m.data().begin(), m.data().end());
  return detail::tail_coefficients(detail::faddeev_leverrier(entries, m.rows()));
}

/// Characteristic coefficients a1..an of eta^2 A A^T with the product itself
/// formed in the arithmetic of Real.
template <typename Real = double>
std::vector<Real> gram_coefficients(const GameMatrix& a, double eta) {
  const Matrix& m = a.matrix();
  const std::size_t n = a.dim();
  const Real e2 = Real(eta) * Real(eta);
  std::vector<Real> gram(n * n, Real(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Real acc(0);
      for (std::size_t k = 0; k < n; ++k) acc += Real(m(i, k)) * Real(m(j, k));
      gram[i * n + j] = e2 * acc;
    }
  return detail::tail_coefficients(detail::faddeev_leverrier(gram, n));
}

}  // namespace zdyn
