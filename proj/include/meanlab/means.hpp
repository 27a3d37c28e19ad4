#pragma once

// Generalized quasiarithmetic means M_{f,g;μ} and their named special cases.

#include <algorithm>
#include <cmath>
#include <utility>

#include "meanlab/error.hpp"
#include "meanlab/function_pair.hpp"
#include "meanlab/measure.hpp"
#include "meanlab/roots.hpp"

namespace meanlab {

struct MeanSpec {
  FunctionPair pair;
  Measure measure;
};

namespace detail {

// (f/g)(z) - r and its derivative W^{1,0}/g^2.
inline auto ratio_residual(const Func& f, const Func& g, double r) {
  return [&f, &g, r](double z) {
    const Jet jf = f.jet(z, 1);
    const Jet jg = g.jet(z, 1);
    const double gz = jg[0];
    return std::pair{jf[0] / gz - r, (jf[1] * gz - jf[0] * jg[1]) / (gz * gz)};
  };
}

// Inverts a monotone function given by jets: finds z in [a, b] with h(z) = target.
inline double invert(const Func& h, double target, double a, double b) {
  auto res = [&h, target](double z) {
    const Jet j = h.jet(z, 1);
    return std::pair{j[0] - target, j[1]};
  };
  return solve_bracketed(res, a, b, target);
}

inline void check_in(const Interval& I, double x) {
  if (!I.contains(x))
    fail(ErrorKind::OutOfInterval, detail::format_number(x) + " outside (" + detail::format_number(I.lo) + ", " +
                                       detail::format_number(I.hi) + ")", x);
}

}  // namespace detail

/// M_{f,g;μ}(x, y): the z between x and y with
/// (f/g)(z) = ∫f(tx+(1-t)y)dμ(t) / ∫g(tx+(1-t)y)dμ(t).
inline double mean_eval(const Func& f, const Func& g, const Measure& mu, double x, double y) {
  if (x == y) return x;
  const double num = integrate(mu, [&](double t) { return f(t * x + (1 - t) * y); });
  const double den = integrate(mu, [&](double t) { return g(t * x + (1 - t) * y); });
  if (!(den > 0.0)) fail(ErrorKind::NotPositive, "integral of g is not positive", den);
  const double r = num / den;
  return solve_bracketed(detail::ratio_residual(f, g, r), std::min(x, y), std::max(x, y), r);
}

inline double mean_eval(const MeanSpec& spec, double x, double y) {
  detail::check_in(spec.pair.interval, x);
  detail::check_in(spec.pair.interval, y);
  return mean_eval(spec.pair.f, spec.pair.g, spec.measure, x, y);
}

/// A_φ(x, y) = φ^{-1}((φ(x) + φ(y))/2).
inline double quasiarithmetic(const Func& phi, double x, double y) {
  if (x == y) return x;
  return detail::invert(phi, 0.5 * (phi(x) + phi(y)), std::min(x, y), std::max(x, y));
}

/// B_{φ,p}(x, y) = φ^{-1}((p(x)φ(x) + p(y)φ(y)) / (p(x) + p(y))).
inline double bajraktarevic(const Func& phi, const Func& p, double x, double y) {
  const double px = p(x), py = p(y);
  if (!(px > 0.0)) fail(ErrorKind::NotPositive, "weight p not positive", x);
  if (!(py > 0.0)) fail(ErrorKind::NotPositive, "weight p not positive", y);
  if (x == y) return x;
  const double target = (px * phi(x) + py * phi(y)) / (px + py);
  return detail::invert(phi, target, std::min(x, y), std::max(x, y));
}

/// C_{φ,ψ}(x, y) = (φ'/ψ')^{-1}((φ(y) - φ(x)) / (ψ(y) - ψ(x))), and x on the diagonal.
inline double cauchy(const Func& phi, const Func& psi, double x, double y) {
  if (x == y) return x;
  const double dpsi = psi(y) - psi(x);
  if (std::fabs(dpsi) <= 1e-14) fail(ErrorKind::DegenerateDenominator, "psi(y) - psi(x) vanishes", dpsi);
  const double target = (phi(y) - phi(x)) / dpsi;
  auto res = [&](double z) {
    const Jet jp = phi.jet(z, 2).derivative();
    const Jet jq = psi.jet(z, 2).derivative();
    const Jet ratio = jp / jq;
    return std::pair{ratio[0] - target, ratio[1]};
  };
  return solve_bracketed(res, std::min(x, y), std::max(x, y), target);
}

/// m_x(u) = M(x + (1 - μ̂1) u, x - μ̂1 u).
inline double m_curve(const MeanSpec& spec, double x, double u, double mu_hat1) {
  const double a = x + (1 - mu_hat1) * u;
  const double b = x - mu_hat1 * u;
  detail::check_in(spec.pair.interval, a);
  detail::check_in(spec.pair.interval, b);
  return mean_eval(spec.pair.f, spec.pair.g, spec.measure, a, b);
}

inline double m_curve(const MeanSpec& spec, double x, double u) {
  return m_curve(spec, x, u, integrate(spec.measure, [](double t) { return t; }));
}

}  // namespace meanlab
