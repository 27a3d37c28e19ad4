#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "meanlab/error.hpp"
#include "meanlab/expr.hpp"

namespace meanlab {

struct RootOptions {
  int max_iter = 100;
  double xtol = 1e-14;  // relative to 1 + |z|
};

/// Root of a monotone h on [a, b]. `h(z)` returns (h(z), h'(z)). Newton
/// steps are taken when they stay inside the current bracket and shrink it
/// fast enough; otherwise the bracket is bisected. `scale` sets the size
/// below which an endpoint value counts as a root (1e-12 * (1 + scale)).
template <class H>
double solve_bracketed(H&& h, double a, double b, double scale, RootOptions opt = {}) {
  if (a > b) std::swap(a, b);
  const auto [fa, da] = h(a);
  const auto [fb, db] = h(b);
  (void)da;
  (void)db;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!std::isfinite(fa) || !std::isfinite(fb))
    fail(ErrorKind::BracketFailure, "non-finite value at bracket end", std::isfinite(fa) ? b : a);
  if ((fa > 0) == (fb > 0)) {
    // A root sitting on an endpoint can land on either side by roundoff.
    const double eps = 1e-12 * (1.0 + std::fabs(scale));
    if (std::fabs(fa) <= eps || std::fabs(fb) <= eps) return std::fabs(fa) <= std::fabs(fb) ? a : b;
    fail(ErrorKind::BracketFailure, "no sign change on [" + detail::format_number(a) + ", " +
                                        detail::format_number(b) + "]", a);
  }

  double lo = a, hi = b;  // s*h(lo) < 0 < s*h(hi), s the orientation sign
  const bool increasing = fa < 0;
  double z = a - fa * (b - a) / (fb - fa);  // regula falsi start
  if (!(z > a && z < b)) z = 0.5 * (a + b);
  double dx_old = b - a;
  for (int it = 0; it < opt.max_iter; ++it) {
    auto [v, d] = h(z);
    if (v == 0.0) return z;
    if (!increasing) v = -v, d = -d;
    if (v < 0)
      lo = z;
    else
      hi = z;
    const double width = hi - lo;
    const double tol = opt.xtol * (1.0 + std::fabs(z));

    double next = z - v / d;
    const double step = std::fabs(next - z);
    // converged: the correction is below resolution (next may round onto z itself)
    if (d > 0 && step <= 0.25 * tol) return next >= lo && next <= hi ? next : z;
    const bool newton = d > 0 && next > lo && next < hi && step <= 0.5 * std::fabs(dx_old);
    if (newton) {
      dx_old = step;
      // The Newton iterate is far more accurate than the bracket midpoint
      // once the bracket has collapsed.
      if (width <= tol) return next;
    } else {
      next = 0.5 * (lo + hi);
      dx_old = 0.5 * width;
      if (width <= tol) return next;
    }
    z = next;
  }
  return z;
}

}  // namespace meanlab
