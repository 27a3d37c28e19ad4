#pragma once

// Generator functions and admissible pairs (f, g) on an open interval.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "meanlab/error.hpp"
#include "meanlab/expr.hpp"
#include "meanlab/jet.hpp"

namespace meanlab {

/// A smooth scalar function known through its jets. Functions parsed from
/// text keep their Expr so that structure (S/C nodes, prefactors) stays
/// inspectable; numerically built ones (antiderivatives, compositions) only
/// carry a jet callback.
class Func {
 public:
  using JetFn = std::function<Jet(double x, int order)>;

  Func() = default;
  Func(Expr e)  // NOLINT: implicit on purpose, an Expr is a Func
      : expr_(std::move(e)), label_(to_string(*expr_)) {}
  Func(JetFn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

  static Func parse(std::string_view text) { return Func(meanlab::parse(text)); }

  double operator()(double x) const {
    if (expr_) return eval(*expr_, x);
    return fn_(x, 0)[0];
  }

  Jet jet(double x, int order) const {
    if (expr_) return eval_jet(*expr_, x, order);
    Jet j = fn_(x, order);
    if (j.order() != order) fail(ErrorKind::OrderMismatch, "jet callback returned wrong order");
    return j;
  }

  const std::optional<Expr>& expr() const { return expr_; }
  const std::string& label() const { return label_; }
  bool empty() const { return !expr_ && !fn_; }

  /// h' as a Func (loses one order of available derivatives).
  Func derivative() const {
    Func self = *this;
    return Func([self](double x, int order) { return self.jet(x, order + 1).derivative(); },
                "d/dx(" + label_ + ")");
  }

  /// a*this + b*other.
  Func combine(double a, const Func& other, double b) const {
    if (expr_ && other.expr_)
      return Func(ex::constant(a) * *expr_ + ex::constant(b) * *other.expr_);
    Func u = *this, v = other;
    return Func([u, v, a, b](double x, int order) { return a * u.jet(x, order) + b * v.jet(x, order); },
                "lin(" + label_ + ", " + other.label_ + ")");
  }

  Func times(const Func& other) const {
    if (expr_ && other.expr_) return Func(*expr_ * *other.expr_);
    Func u = *this, v = other;
    return Func([u, v](double x, int order) { return u.jet(x, order) * v.jet(x, order); },
                "(" + label_ + ")*(" + other.label_ + ")");
  }

  /// e∘this, where e is an expression in x.
  Func compose_into(const Expr& e) const {
    Func u = *this;
    return Func([u, e](double x, int order) { return compose(e, u.jet(x, order)); },
                to_string(e) + " o (" + label_ + ")");
  }

 private:
  std::optional<Expr> expr_;
  JetFn fn_;
  std::string label_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return x > lo && x < hi; }
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double dist_to_boundary(double x) const { return std::min(x - lo, hi - x); }
};

/// Marks pairs built as (S_a∘φ, C_a∘φ), optionally with the φ' prefactor.
struct SinCosForm {
  double alpha = 0.0;
  Func phi;
  bool cauchy = false;
};

struct FunctionPair {
  Func f;
  Func g;
  Interval interval;
  int validated_order = 0;
  int grid_size = 0;
  std::optional<SinCosForm> sincos;
};

struct ValidationOptions {
  int grid_size = 257;
  double tol_w = 1e-9;
};

/// Interior grid x_k = lo + (k+1)(hi-lo)/(n+1), k = 0..n-1.
inline std::vector<double> interior_grid(const Interval& I, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double h = I.width() / (n + 1);
  for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = I.lo + (k + 1) * h;
  return xs;
}

/// Grid check of class membership: jets of f, g finite to order n, g > 0,
/// and W^{1,0} = f'g - fg' of one sign with |W^{1,0}| >= tol_w. For n = 0
/// strict monotonicity of f/g on the grid replaces the Wronskian test.
inline FunctionPair validate_pair(const Func& f, const Func& g, Interval I, int n,
                                  ValidationOptions opt = {}) {
  if (!(I.lo < I.hi) || !std::isfinite(I.lo) || !std::isfinite(I.hi))
    fail(ErrorKind::UsageError, "interval needs finite lo < hi");
  if (n < 0 || n > 6) fail(ErrorKind::OrderOutOfRange, "validated order must be in 0..6");
  if (opt.grid_size < 32) fail(ErrorKind::UsageError, "validation grid needs at least 32 points");

  const int order = std::max(n, 1);
  int sign = 0;
  double prev_ratio = 0.0;
  bool first = true;
  for (double x : interior_grid(I, opt.grid_size)) {
    Jet jf, jg;
    try {
      jf = f.jet(x, order);
      jg = g.jet(x, order);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainViolation || e.kind() == ErrorKind::DivisionByZeroConstantTerm)
        fail(ErrorKind::NonSmooth, "generator not defined at x = " + detail::format_number(x) + " (" +
                                       e.what() + ")", x);
      throw;
    }
    if (!jf.all_finite() || !jg.all_finite())
      fail(ErrorKind::NonSmooth, "non-finite derivative at x = " + detail::format_number(x), x);
    if (!(jg[0] > 0.0))
      fail(ErrorKind::NotPositive, "g = " + detail::format_number(jg[0]) + " at x = " + detail::format_number(x), x);
    if (n == 0) {
      const double ratio = jf[0] / jg[0];
      if (!first) {
        if (sign == 0) sign = ratio > prev_ratio ? 1 : -1;
        if ((ratio - prev_ratio) * sign <= 0.0)
          fail(ErrorKind::WronskianVanishes, "f/g not strictly monotone at x = " + detail::format_number(x), x);
      }
      first = false;
      prev_ratio = ratio;
      continue;
    }
    const double w = jf[1] * jg[0] - jf[0] * jg[1];
    const int s = w > 0 ? 1 : -1;
    if (!(std::fabs(w) >= opt.tol_w) || (sign != 0 && s != sign))
      fail(ErrorKind::WronskianVanishes,
           "W^{1,0} = " + detail::format_number(w) + " at x = " + detail::format_number(x), x);
    sign = s;
  }
  return FunctionPair{f, g, I, n, opt.grid_size, std::nullopt};
}

inline FunctionPair validate_pair(std::string_view f, std::string_view g, Interval I, int n,
                                  ValidationOptions opt = {}) {
  return validate_pair(Func::parse(f), Func::parse(g), I, n, opt);
}

}  // namespace meanlab
