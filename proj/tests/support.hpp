#pragma once

// Shared helpers for the test binaries: seeded random generator pairs and
// tolerance-aware comparisons.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "meanlab/meanlab.hpp"

namespace meanlab::testing {

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

inline std::string num(double v) { return detail::format_number(v); }

/// Random smooth expression in x, defined and finite on (0.3, 3).
inline std::string random_component(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-1.2, 1.2), pos(0.5, 2.0);
  std::uniform_int_distribution<int> which(0, 7);
  switch (which(rng)) {
    case 0: return "exp(" + num(a(rng)) + "*x)";
    case 1: return "x^(" + std::to_string(std::uniform_int_distribution<int>(-5, 7)(rng)) + "/3)";
    case 2: return "log(x + " + num(pos(rng)) + ")";
    case 3: return "sin(" + num(0.8 * a(rng)) + "*x + " + num(a(rng)) + ")";
    case 4: return "cosh(" + num(a(rng)) + "*x)";
    case 5: return "1/(" + num(pos(rng)) + " + x)";
    case 6: return "sqrt(" + num(pos(rng)) + " + x)";
    default: return "x*exp(" + num(0.5 * a(rng)) + "*x)";
  }
}

/// Random positive expression on (0.3, 3).
inline std::string random_positive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-0.8, 0.8), pos(0.5, 2.0);
  std::uniform_int_distribution<int> which(0, 4);
  switch (which(rng)) {
    case 0: return "exp(" + num(a(rng)) + "*x)";
    case 1: return num(pos(rng)) + " + x^2";
    case 2: return "cosh(" + num(a(rng)) + "*x)";
    case 3: return "x^(" + std::to_string(std::uniform_int_distribution<int>(-4, 4)(rng)) + "/3)";
    default: return "1";
  }
}

struct RandomPair {
  std::string f, g;
  FunctionPair pair;
};

/// Draws (f, g) = (c1 u + c2 v, v) style pairs and keeps the first ones that
/// validate to order 6 on I with |W^{1,0}| comfortably away from zero.
inline std::vector<RandomPair> random_pairs(std::uint64_t seed, int count, Interval I = {0.6, 1.8}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  std::vector<RandomPair> out;
  while (static_cast<int>(out.size()) < count) {
    const std::string u = random_component(rng), v = random_positive(rng);
    const std::string f = num(1.0 + 0.5 * c(rng)) + "*" + u + " + " + num(c(rng)) + "*" + v;
    const std::string g = v;
    try {
      FunctionPair p = validate_pair(f, g, I, 6, {257, 1e-3});
      p = validate_pair(f, g, I, 6);  // default tolerances for the stored metadata
      out.push_back({f, g, std::move(p)});
    } catch (const Error&) {
    }
  }
  return out;
}

/// Random points strictly inside I, away from the ends by `margin`.
inline std::vector<double> random_points(std::mt19937_64& rng, Interval I, int n, double margin = 0.1) {
  std::uniform_real_distribution<double> u(I.lo + margin, I.hi - margin);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (double& x : xs) x = u(rng);
  return xs;
}

}  // namespace meanlab::testing
