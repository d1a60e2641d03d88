#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "zdyn/errors.hpp"
#include "zdyn/linalg.hpp"
#include "zdyn/tolerances.hpp"
#include "zdyn/wide.hpp"

namespace zdyn {

namespace detail {

template <typename Real>
Real abs_real(Real x) {
  return x < Real(0) ? -x : x;
}

}  // namespace detail

/// Real-coefficient univariate polynomial c0 + c1 z + ... + cd z^d over the
/// scalar type `Real` (double or wide_real). Trailing (leading-degree) exact
/// zeros are trimmed; the zero polynomial has no coefficients and degree -1.
template <typename Real>
class BasicPolynomial {
 public:
  using value_type = Real;

  BasicPolynomial() = default;

  explicit BasicPolynomial(std::vector<Real> ascending) : c_(std::move(ascending)) {
    for (Real v : c_)
      if (!std::isfinite(static_cast<double>(v))) throw InvalidInput("polynomial coefficient is not finite");
    trim_exact();
  }

  BasicPolynomial(std::initializer_list<Real> ascending) : BasicPolynomial(std::vector<Real>(ascending)) {}

  static BasicPolynomial constant(Real c) { return BasicPolynomial(std::vector<Real>{c}); }

  static BasicPolynomial monomial(Real c, int degree) {
    std::vector<Real> v(static_cast<std::size_t>(degree) + 1, Real(0));
    v.back() = c;
    return BasicPolynomial(std::move(v));
  }

  /// Monic polynomial with the given roots. Non-real roots are expected to
  /// come in conjugate pairs; the imaginary residue of the product is dropped.
  static BasicPolynomial from_roots(std::span<const Complex> roots) {
    using C = BasicComplex<Real>;
    std::vector<C> c{C(Real(1))};
    for (const auto& r : roots) {
      const C rr(r);
      std::vector<C> next(c.size() + 1);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] = next[i + 1] + c[i];
        next[i] = next[i] - rr * c[i];
      }
      c = std::move(next);
    }
    std::vector<Real> re(c.size());
    std::transform(c.begin(), c.end(), re.begin(), [](const C& v) { return v.re; });
    return BasicPolynomial(std::move(re));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::span<const Real> coeffs() const { return c_; }

  /// Coefficient of z^i (zero beyond the degree).
  Real operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Real(0); }
  Real leading() const { return c_.empty() ? Real(0) : c_.back(); }

  Real max_abs_coeff() const {
    Real m(0);
    for (Real v : c_) m = std::max(m, detail::abs_real(v));
    return m;
  }

  Real operator()(Real x) const {
    Real acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  /// Evaluation at a complex point, in double arithmetic.
  Complex operator()(Complex z) const {
    Complex acc(0.0, 0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + static_cast<double>(*it);
    return acc;
  }

  /// Evaluation at a complex point in the coefficient precision.
  BasicComplex<Real> evaluate(const BasicComplex<Real>& z) const {
    BasicComplex<Real> acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + BasicComplex<Real>(*it);
    return acc;
  }

  BasicPolynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Real> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = Real(static_cast<double>(i)) * c_[i];
    return BasicPolynomial(std::move(d));
  }

  /// z^d p(1/z): coefficients in reverse order.
  BasicPolynomial reversed() const { return BasicPolynomial(std::vector<Real>(c_.rbegin(), c_.rend())); }

  /// Drops leading coefficients below rel_tol * max|coeff|.
  BasicPolynomial trimmed(double rel_tol) const {
    std::vector<Real> v = c_;
    const Real cutoff = Real(rel_tol) * max_abs_coeff();
    while (!v.empty() && detail::abs_real(v.back()) <= cutoff) v.pop_back();
    return BasicPolynomial(std::move(v));
  }

  BasicPolynomial monic() const {
    if (is_zero()) throw InvalidInput("monic: zero polynomial");
    return scale(*this, Real(1) / leading());
  }

  /// Same polynomial with coefficients converted to another scalar type.
  template <typename To>
  BasicPolynomial<To> cast() const {
    std::vector<To> v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] = static_cast<To>(c_[i]);
    return BasicPolynomial<To>(std::move(v));
  }

  friend BasicPolynomial add(const BasicPolynomial& p, const BasicPolynomial& q) {
    std::vector<Real> v(std::max(p.c_.size(), q.c_.size()), Real(0));
    for (std::size_t i = 0; i < p.c_.size(); ++i) v[i] += p.c_[i];
    for (std::size_t i = 0; i < q.c_.size(); ++i) v[i] += q.c_[i];
    return BasicPolynomial(std::move(v));
  }

  friend BasicPolynomial multiply(const BasicPolynomial& p, const BasicPolynomial& q) {
    if (p.is_zero() || q.is_zero()) return {};
    std::vector<Real> v(p.c_.size() + q.c_.size() - 1, Real(0));
    for (std::size_t i = 0; i < p.c_.size(); ++i)
      for (std::size_t j = 0; j < q.c_.size(); ++j) v[i + j] += p.c_[i] * q.c_[j];
    return BasicPolynomial(std::move(v));
  }

  friend BasicPolynomial scale(const BasicPolynomial& p, Real s) {
    std::vector<Real> v = p.c_;
    for (Real& x : v) x *= s;
    return BasicPolynomial(std::move(v));
  }

  /// p(z)^2
  friend BasicPolynomial compose_square(const BasicPolynomial& p) { return multiply(p, p); }

  friend BasicPolynomial operator+(const BasicPolynomial& p, const BasicPolynomial& q) { return add(p, q); }
  friend BasicPolynomial operator-(const BasicPolynomial& p, const BasicPolynomial& q) {
    return add(p, scale(q, Real(-1)));
  }
  friend BasicPolynomial operator-(const BasicPolynomial& p) { return scale(p, Real(-1)); }
  friend BasicPolynomial operator*(const BasicPolynomial& p, const BasicPolynomial& q) { return multiply(p, q); }
  friend BasicPolynomial operator*(Real s, const BasicPolynomial& p) { return scale(p, s); }
  friend bool operator==(const BasicPolynomial& p, const BasicPolynomial& q) { return p.c_ == q.c_; }

 private:
  void trim_exact() {
    while (!c_.empty() && c_.back() == Real(0)) c_.pop_back();
  }

  std::vector<Real> c_;
};

using Polynomial = BasicPolynomial<double>;
using WidePolynomial = BasicPolynomial<wide_real>;

/// Polynomial long division: p = quotient * d + remainder.
template <typename Real>
std::pair<BasicPolynomial<Real>, BasicPolynomial<Real>> divide(const BasicPolynomial<Real>& p,
                                                               const BasicPolynomial<Real>& d) {
  if (d.is_zero()) throw InvalidInput("divide: zero divisor");
  if (p.degree() < d.degree()) return {BasicPolynomial<Real>{}, p};
  std::vector<Real> rem(p.coeffs().begin(), p.coeffs().end());
  const std::size_t dd = static_cast<std::size_t>(d.degree());
  std::vector<Real> quo(rem.size() - dd, Real(0));
  for (std::size_t i = quo.size(); i-- > 0;) {
    const Real f = rem[i + dd] / d.leading();
    quo[i] = f;
    for (std::size_t j = 0; j <= dd; ++j) rem[i + j] -= f * d[j];
  }
  rem.resize(dd);
  return {BasicPolynomial<Real>(std::move(quo)), BasicPolynomial<Real>(std::move(rem))};
}

/// Roots repeated per multiplicity.
using RootSet = std::vector<Complex>;

namespace detail {

// Aberth-Ehrlich simultaneous iteration in the arithmetic of `W`, started
// from `z`. A root is frozen once its correction is below the working
// precision or its residual is within the rounding bound of the Horner sum.
template <typename W>
void aberth_refine(const std::vector<W>& c, RootSet& z, int max_iter = 300) {
  using C = BasicComplex<W>;
  const std::size_t d = c.size() - 1;
  std::vector<W> dc(d);
  for (std::size_t i = 1; i <= d; ++i) dc[i - 1] = W(static_cast<double>(i)) * c[i];
  std::vector<double> abs_c(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) abs_c[i] = std::abs(static_cast<double>(c[i]));
  constexpr double u = unit_roundoff<W>();

  // Coincident starting points stall the iteration; spread them apart.
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const bool clash = std::any_of(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(i), [&](const Complex& other) {
        return std::abs(z[i] - other) <= 1e-12 * (1.0 + std::abs(z[i]));
      });
      if (!clash) break;
      z[i] += std::polar(1e-9 * (1.0 + std::abs(z[i])), 0.7 + static_cast<double>(i + attempt));
    }
  }

  std::vector<C> w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) w[i] = C(z[i]);
  std::vector<bool> done(z.size(), false);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool moved = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (done[i]) continue;
      C f, df;
      for (std::size_t k = d + 1; k-- > 0;) {
        f = f * w[i] + C(c[k]);
        if (k > 0) df = df * w[i] + C(dc[k - 1]);
      }
      const double r = w[i].abs();
      double bound = 0.0;
      for (std::size_t k = d + 1; k-- > 0;) bound = bound * r + abs_c[k];
      if (f.abs() <= 4.0 * static_cast<double>(d + 1) * u * bound) {
        done[i] = true;
        continue;
      }
      moved = true;
      if (df.is_zero()) {
        w[i] = w[i] + C(W(1e-8 * (1.0 + r)), W(1e-8 * (1.0 + r)));
        continue;
      }
      const C ratio = f / df;
      C sum;
      for (std::size_t j = 0; j < w.size(); ++j)
        if (j != i) sum = sum + C(W(1)) / (w[i] - w[j]);
      const C step = ratio / (C(W(1)) - ratio * sum);
      w[i] = w[i] - step;
      if (step.abs() <= 2.0 * u * w[i].abs()) done[i] = true;
    }
    if (!moved) break;
  }
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = w[i].to_complex();
}

}  // namespace detail

/// All complex roots. Starting values are the eigenvalues of the balanced
/// Frobenius companion matrix (double precision); they are then refined by
/// Aberth-Ehrlich iteration carried out in wide_real arithmetic on the exact
/// coefficients. The result is accurate to the conditioning of the roots with
/// respect to the stored coefficients; a root of multiplicity m is resolved
/// to roughly u^(1/m) with u the wide_real unit roundoff.
template <typename Real>
RootSet roots(const BasicPolynomial<Real>& p) {
  if (p.is_zero()) throw InvalidInput("roots: zero polynomial");
  const int d = p.degree();
  if (d == 0) throw InvalidInput("roots: constant polynomial has no roots");
  RootSet out;
  // Exact zero roots are split off first.
  std::size_t low = 0;
  while (p[low] == Real(0)) ++low;
  out.assign(low, Complex(0.0, 0.0));
  const std::vector<Real> c(p.coeffs().begin() + static_cast<std::ptrdiff_t>(low), p.coeffs().end());
  const std::size_t n = c.size() - 1;
  if (n == 0) return out;
  if (n == 1) {
    out.emplace_back(static_cast<double>(-c[0] / c[1]), 0.0);
    return out;
  }
  Matrix comp(n, n);
  for (std::size_t j = 0; j < n; ++j) comp(0, j) = static_cast<double>(-c[n - 1 - j] / c[n]);
  for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  detail::balance(comp);
  RootSet r = detail::hessenberg_qr(comp);
  std::vector<wide_real> wc(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) wc[i] = static_cast<wide_real>(c[i]);
  detail::aberth_refine(wc, r);
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

/// Result of splitting the shared roots off two polynomials.
template <typename Real>
struct BasicCommonFactor {
  BasicPolynomial<Real> common;     ///< monic product over the shared roots (1 when none)
  BasicPolynomial<Real> s_reduced;  ///< s / common
  BasicPolynomial<Real> g_reduced;  ///< g / common
  RootSet shared_roots;
};

using CommonFactor = BasicCommonFactor<double>;

/// Pairs roots of s and g closer than `tol` (greedy, nearest pairs first),
/// builds the monic common factor from the pair midpoints and deflates both
/// polynomials by it.
template <typename Real>
BasicCommonFactor<Real> common_roots(const BasicPolynomial<Real>& s, const BasicPolynomial<Real>& g,
                                     double tol = kDefaultTolerances.common_root) {
  using P = BasicPolynomial<Real>;
  if (s.is_zero() || g.is_zero()) throw InvalidInput("common_roots: zero polynomial");
  if (!(tol > 0.0)) throw InvalidInput("common_roots: tolerance must be positive");
  BasicCommonFactor<Real> out{P::constant(Real(1)), s, g, {}};
  if (s.degree() < 1 || g.degree() < 1) return out;

  const RootSet rs = roots(s);
  const RootSet rg = roots(g);
  struct Candidate {
    double dist;
    std::size_t i, j;
  };
  std::vector<Candidate> cand;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < rg.size(); ++j) {
      const double dist = std::abs(rs[i] - rg[j]);
      if (dist <= tol) cand.push_back({dist, i, j});
    }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  std::vector<bool> used_s(rs.size(), false), used_g(rg.size(), false);
  for (const auto& c : cand) {
    if (used_s[c.i] || used_g[c.j]) continue;
    used_s[c.i] = used_g[c.j] = true;
    out.shared_roots.push_back(0.5 * (rs[c.i] + rg[c.j]));
  }
  if (out.shared_roots.empty()) return out;

  // Snap near-real midpoints so conjugate bookkeeping stays exact.
  for (auto& r : out.shared_roots)
    if (std::abs(r.imag()) <= tol) r = Complex(r.real(), 0.0);
  out.common = P::from_roots(out.shared_roots);
  out.s_reduced = divide(s, out.common).first;
  out.g_reduced = divide(g, out.common).first;
  return out;
}

/// (-S^2)^n + a1 (-S^2)^(n-1) G^2 + ... + an (G^2)^n, expanded exactly by
/// repeated multiplication. `alpha` holds a1..an.
template <typename Real>
BasicPolynomial<Real> reduction_polynomial(const BasicPolynomial<Real>& s, const BasicPolynomial<Real>& g,
                                           std::type_identity_t<std::span<const Real>> alpha,
                                           double trim = kDefaultTolerances.leading_trim) {
  using P = BasicPolynomial<Real>;
  if (s.is_zero() && g.is_zero()) throw InvalidInput("reduction_polynomial: S and G are both zero");
  const std::size_t n = alpha.size();
  const P neg_s2 = -compose_square(s);
  const P g2 = compose_square(g);

  // Powers (-S^2)^j and (G^2)^j for j = 0..n.
  std::vector<P> ps{P::constant(Real(1))}, pg{P::constant(Real(1))};
  for (std::size_t j = 1; j <= n; ++j) {
    ps.push_back(ps.back() * neg_s2);
    pg.push_back(pg.back() * g2);
  }
  P acc = ps[n];
  for (std::size_t j = 1; j <= n; ++j) acc = acc + alpha[j - 1] * (ps[n - j] * pg[j]);
  return acc.trimmed(trim);
}

}  // namespace zdyn
