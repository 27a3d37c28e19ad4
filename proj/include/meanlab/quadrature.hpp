#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "meanlab/error.hpp"

namespace meanlab {

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

namespace detail {

// Newton iteration on P_n started from the Chebyshev-like guess
// cos(pi (i - 1/4) / (n + 1/2)).
inline QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 1.0 / ((1.0 - z * z) * dp * dp);  // half of the [-1,1] weight
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - z);
    rule.nodes[hi] = 0.5 * (1.0 + z);
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  return rule;
}

}  // namespace detail

/// n-point Gauss–Legendre rule mapped to [0, 1]; cached per n.
inline const QuadratureRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) fail(ErrorKind::UsageError, "Gauss-Legendre order must be in 1..512");
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// ∫_{x0}^{x} func, by 16-point Gauss–Legendre on panels of width <= 0.1.
template <class F>
double antiderivative(F&& func, double x0, double x) {
  if (x == x0) return 0.0;
  const QuadratureRule& rule = gauss_legendre(16);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::fabs(x - x0) / 0.1)));
  const double h = (x - x0) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = x0 + p * h;
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = a + rule.nodes[k] * h;
      const double v = func(t);
      if (!std::isfinite(v))
        fail(ErrorKind::QuadratureNonFinite, "integrand non-finite at " + std::to_string(t), t);
      s += rule.weights[k] * v;
    }
    total += s * h;
  }
  return total;
}

}  // namespace meanlab
