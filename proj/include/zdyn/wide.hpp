#pragma once

// Extended-precision scalar used where expanded polynomials lose their
// clustered roots to double rounding (roots of the joint characteristic
// polynomial bunch up near z = 1 when A A^T has small eigenvalues).

#include <cmath>
#include <complex>
#include <type_traits>

namespace zdyn {

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
#else
using wide_real = long double;
#endif

/// Unit roundoff of the supported scalar types.
template <typename Real>
constexpr double unit_roundoff() {
  if constexpr (std::is_same_v<Real, float>) {
    return 0x1p-24;
  } else if constexpr (std::is_same_v<Real, double>) {
    return 0x1p-53;
  } else if constexpr (std::is_same_v<Real, long double>) {
    return 0x1p-64;
  } else {
    return 0x1p-113;
  }
}

/// Minimal complex arithmetic over any real field; std::complex is only
/// specified for the standard floating-point types.
template <typename Real>
struct BasicComplex {
  Real re{};
  Real im{};

  BasicComplex() = default;
  BasicComplex(Real r, Real i = Real(0)) : re(r), im(i) {}
  explicit BasicComplex(const std::complex<double>& z) : re(Real(z.real())), im(Real(z.imag())) {}

  std::complex<double> to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
  /// Modulus, evaluated in double.
  double abs() const { return std::abs(to_complex()); }

  friend BasicComplex operator+(BasicComplex a, BasicComplex b) { return {a.re + b.re, a.im + b.im}; }
  friend BasicComplex operator-(BasicComplex a, BasicComplex b) { return {a.re - b.re, a.im - b.im}; }
  friend BasicComplex operator*(BasicComplex a, BasicComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend BasicComplex operator/(BasicComplex a, BasicComplex b) {
    // Smith's algorithm.
    if (std::abs(static_cast<double>(b.re)) >= std::abs(static_cast<double>(b.im))) {
      const Real r = b.im / b.re;
      const Real d = b.re + b.im * r;
      return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    const Real r = b.re / b.im;
    const Real d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
  }
  bool is_zero() const { return re == Real(0) && im == Real(0); }
};

}  // namespace zdyn
