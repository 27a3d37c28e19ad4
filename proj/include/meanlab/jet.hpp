#pragma once

// Truncated Taylor expansions ("jets") of univariate functions.
//
// A jet of order n at a base point x0 stores c[k] = h^(k)(x0) / k! for
// k = 0..n. Arithmetic and elementary functions act on the truncated series,
// so derivatives of composed expressions come out exact up to roundoff.

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "meanlab/error.hpp"

namespace meanlab {

inline constexpr int kMaxJetOrder = 8;

inline double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

class Jet {
 public:
  Jet() = default;

  /// Jet of the constant function `value` at `base`.
  static Jet constant(double value, double base, int order) {
    Jet j(base, order);
    j.c_[0] = value;
    return j;
  }

  /// Jet of the identity function at `x`: coefficients [x, 1, 0, ...].
  static Jet variable(double x, int order) {
    Jet j(x, order);
    j.c_[0] = x;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  /// Builds a jet from Taylor coefficients (c[k] = h^(k)/k!).
  static Jet from_coeffs(double base, std::span<const double> coeffs) {
    Jet j(base, static_cast<int>(coeffs.size()) - 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) j.c_[k] = coeffs[k];
    return j;
  }

  double base_point() const noexcept { return base_; }
  int order() const noexcept { return order_; }
  std::span<const double> coeffs() const noexcept {
    return {c_.data(), static_cast<std::size_t>(order_ + 1)};
  }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

  double value() const noexcept { return c_[0]; }

  /// k-th derivative of the represented function at the base point.
  double derivative_value(int k) const {
    check_index(k);
    return c_[static_cast<std::size_t>(k)] * factorial(k);
  }

  /// Jet of h' (one order lower).
  Jet derivative() const {
    if (order_ == 0) fail(ErrorKind::OrderOutOfRange, "cannot differentiate an order-0 jet");
    Jet d(base_, order_ - 1);
    for (int k = 0; k < order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
  }

  Jet truncate(int order) const {
    if (order < 0 || order > order_)
      fail(ErrorKind::OrderOutOfRange, "truncation order " + std::to_string(order) +
                                           " outside 0.." + std::to_string(order_));
    Jet t(base_, order);
    for (int k = 0; k <= order; ++k) t.c_[k] = c_[k];
    return t;
  }

  bool all_finite() const {
    for (int k = 0; k <= order_; ++k)
      if (!std::isfinite(c_[k])) return false;
    return true;
  }

  Jet operator-() const {
    Jet r = *this;
    for (int k = 0; k <= order_; ++k) r.c_[k] = -r.c_[k];
    return r;
  }

  Jet& operator+=(const Jet& b) {
    check_compatible(b);
    for (int k = 0; k <= order_; ++k) c_[k] += b.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    check_compatible(b);
    for (int k = 0; k <= order_; ++k) c_[k] -= b.c_[k];
    return *this;
  }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }
  Jet& operator/=(const Jet& b) { return *this = *this / b; }

  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s) {
    for (int k = 0; k <= order_; ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator/=(double s) {
    for (int k = 0; k <= order_; ++k) c_[k] /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet r(a.base_, a.order_);
    for (int k = 0; k <= a.order_; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    if (b.c_[0] == 0.0)
      fail(ErrorKind::DivisionByZeroConstantTerm, "jet division by a series with zero constant term",
           b.base_);
    Jet q(a.base_, a.order_);
    for (int k = 0; k <= a.order_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * q.c_[k - j];
      q.c_[k] = s / b.c_[0];
    }
    return q;
  }

  friend Jet operator/(double s, const Jet& b) { return constant(s, b.base_, b.order_) / b; }

 private:
  Jet(double base, int order) : base_(base), order_(order) {
    if (order < 0 || order > kMaxJetOrder)
      fail(ErrorKind::OrderOutOfRange,
           "jet order " + std::to_string(order) + " outside 0.." + std::to_string(kMaxJetOrder));
  }

  void check_index(int k) const {
    if (k < 0 || k > order_)
      fail(ErrorKind::OrderOutOfRange, "coefficient index " + std::to_string(k) + " beyond order " +
                                           std::to_string(order_));
  }

  void check_compatible(const Jet& b) const {
    if (order_ != b.order_)
      fail(ErrorKind::OrderMismatch,
           "orders " + std::to_string(order_) + " and " + std::to_string(b.order_));
    if (base_ != b.base_) fail(ErrorKind::BasePointMismatch, "jets expanded at different points");
  }

  double base_ = 0.0;
  int order_ = 0;
  std::array<double, kMaxJetOrder + 1> c_{};
};

// Elementary functions. Each follows the usual recurrence obtained from the
// first-order ODE the function satisfies (b' = a' b for exp, a b' = a' for
// log, ...), so the cost is O(order^2).

inline Jet exp(const Jet& a) {
  Jet b = Jet::constant(std::exp(a[0]), a.base_point(), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * b[k - j];
    b[k] = s / k;
  }
  return b;
}

inline Jet log(const Jet& a) {
  if (!(a[0] > 0.0)) fail(ErrorKind::DomainViolation, "log of non-positive value", a[0]);
  Jet b = Jet::constant(std::log(a[0]), a.base_point(), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    double s = k * a[k];
    for (int j = 1; j < k; ++j) s -= j * b[j] * a[k - j];
    b[k] = s / (k * a[0]);
  }
  return b;
}

namespace detail {

// Simultaneous sine/cosine (sign = -1) or sinh/cosh (sign = +1) series.
inline void sin_cos_series(const Jet& a, double sign, Jet& s, Jet& c) {
  const double x0 = a[0];
  s = Jet::constant(sign < 0 ? std::sin(x0) : std::sinh(x0), a.base_point(), a.order());
  c = Jet::constant(sign < 0 ? std::cos(x0) : std::cosh(x0), a.base_point(), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    double ss = 0.0, cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a[j] * c[k - j];
      cc += j * a[j] * s[k - j];
    }
    s[k] = ss / k;
    c[k] = sign * cc / k;
  }
}

inline Jet integer_pow(const Jet& a, long n) {
  if (n < 0) {
    if (a[0] == 0.0) fail(ErrorKind::DomainViolation, "negative power of zero", a[0]);
    return 1.0 / integer_pow(a, -n);
  }
  Jet result = Jet::constant(1.0, a.base_point(), a.order());
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

// Requires a[0] > 0.
inline Jet positive_pow(const Jet& a, double e) {
  Jet b = Jet::constant(e == 0.5 ? std::sqrt(a[0]) : std::pow(a[0], e), a.base_point(), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (e * j - (k - j)) * a[j] * b[k - j];
    b[k] = s / (k * a[0]);
  }
  return b;
}

}  // namespace detail

inline Jet sin(const Jet& a) {
  Jet s, c;
  detail::sin_cos_series(a, -1.0, s, c);
  return s;
}
inline Jet cos(const Jet& a) {
  Jet s, c;
  detail::sin_cos_series(a, -1.0, s, c);
  return c;
}
inline Jet sinh(const Jet& a) {
  Jet s, c;
  detail::sin_cos_series(a, 1.0, s, c);
  return s;
}
inline Jet cosh(const Jet& a) {
  Jet s, c;
  detail::sin_cos_series(a, 1.0, s, c);
  return c;
}

/// a^e. Integer exponents accept any base (non-zero when e < 0); other
/// exponents require a positive constant term.
inline Jet pow(const Jet& a, double e) {
  if (!std::isfinite(e)) fail(ErrorKind::DomainViolation, "non-finite exponent", e);
  if (e == std::nearbyint(e) && std::fabs(e) < 1e9) return detail::integer_pow(a, static_cast<long>(e));
  if (a[0] == 0.0 && e > 0.0 && a.order() == 0) return a;
  if (!(a[0] > 0.0))
    fail(ErrorKind::DomainViolation, "non-integer power of non-positive value", a[0]);
  return detail::positive_pow(a, e);
}

inline Jet sqrt(const Jet& a) {
  if (a[0] == 0.0 && a.order() == 0) return a;
  if (!(a[0] > 0.0)) fail(ErrorKind::DomainViolation, "sqrt needs a positive argument", a[0]);
  return detail::positive_pow(a, 0.5);
}

/// |a|^e, branching on the sign of the constant term only. The represented
/// function must not cross zero near the base point; callers guarantee this.
inline Jet abspow(const Jet& a, double e) {
  if (a[0] == 0.0 || !std::isfinite(a[0]))
    fail(ErrorKind::DomainViolation, "abspow needs a non-zero constant term", a[0]);
  return detail::positive_pow(a[0] > 0.0 ? a : -a, e);
}

enum class JetOp { Add, Sub, Mul, Div };
enum class JetFunc { Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt, Pow, AbsPow };

inline Jet jet_var(double x, int order) { return Jet::variable(x, order); }

inline Jet jet_combine(JetOp op, const Jet& a, const Jet& b) {
  switch (op) {
    case JetOp::Add: return a + b;
    case JetOp::Sub: return a - b;
    case JetOp::Mul: return a * b;
    case JetOp::Div: return a / b;
  }
  return a;
}

/// `exponent` is only read by Pow and AbsPow.
inline Jet jet_elem(JetFunc func, const Jet& a, double exponent = 1.0) {
  switch (func) {
    case JetFunc::Exp: return exp(a);
    case JetFunc::Log: return log(a);
    case JetFunc::Sin: return sin(a);
    case JetFunc::Cos: return cos(a);
    case JetFunc::Sinh: return sinh(a);
    case JetFunc::Cosh: return cosh(a);
    case JetFunc::Sqrt: return sqrt(a);
    case JetFunc::Pow: return pow(a, exponent);
    case JetFunc::AbsPow: return abspow(a, exponent);
  }
  return a;
}

}  // namespace meanlab
