#pragma once

// Borel probability measures on [0, 1], their moments, and the regime
// (which of the necessary conditions applies) derived from the moments.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "meanlab/error.hpp"
#include "meanlab/expr.hpp"
#include "meanlab/quadrature.hpp"

namespace meanlab {

class Measure {
 public:
  enum class Kind { Atoms, Lebesgue, Density };

  /// Discrete measure Σ w_k δ_{t_k}.
  static Measure atoms(std::vector<std::pair<double, double>> tw) {
    if (tw.empty()) fail(ErrorKind::InvalidMeasure, "atomic measure without atoms");
    double sum = 0.0;
    for (auto [t, w] : tw) {
      if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::InvalidMeasure, "atom outside [0,1]", t);
      if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidMeasure, "atom weight must be positive", w);
      sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-14)
      fail(ErrorKind::InvalidMeasure, "atom weights sum to " + detail::format_number(sum), sum);
    Measure m(Kind::Atoms);
    for (auto [t, w] : tw) {
      m.nodes_.push_back(t);
      m.weights_.push_back(w);
    }
    m.name_ = "atoms";
    return m;
  }

  static Measure dirac(double tau) { return atoms({{tau, 1.0}}); }

  /// (δ_0 + δ_1)/2, the measure behind Bajraktarević means.
  static Measure ebm() {
    Measure m = atoms({{0.0, 0.5}, {1.0, 0.5}});
    m.name_ = "ebm";
    return m;
  }

  static Measure lebesgue(int order = 32) {
    Measure m(Kind::Lebesgue);
    const QuadratureRule& r = gauss_legendre(order);
    m.nodes_ = r.nodes;
    m.weights_ = r.weights;
    m.order_ = order;
    m.name_ = "lebesgue";
    return m;
  }

  /// ρ(t) dt with ρ >= 0 at the nodes and ∫ρ = 1 within 1e-10.
  static Measure density(const Expr& rho, int order = 32) {
    Measure m(Kind::Density);
    const QuadratureRule& r = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      double v = 0.0;
      try {
        v = eval(rho, r.nodes[k]);
      } catch (const Error& e) {
        fail(ErrorKind::InvalidMeasure, std::string("density not defined on [0,1]: ") + e.what(), r.nodes[k]);
      }
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::InvalidMeasure, "density negative or non-finite", r.nodes[k]);
      m.nodes_.push_back(r.nodes[k]);
      m.weights_.push_back(r.weights[k] * v);
      total += r.weights[k] * v;
    }
    if (std::fabs(total - 1.0) > 1e-10)
      fail(ErrorKind::InvalidMeasure, "density integrates to " + detail::format_number(total), total);
    m.rho_ = rho;
    m.order_ = order;
    m.name_ = "density";
    return m;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int quadrature_order() const { return order_; }
  const std::optional<Expr>& rho() const { return rho_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Exact description for reports: atoms as given, otherwise the kind.
  std::vector<std::pair<double, double>> atom_list() const {
    std::vector<std::pair<double, double>> out;
    if (kind_ == Kind::Atoms)
      for (std::size_t k = 0; k < nodes_.size(); ++k) out.emplace_back(nodes_[k], weights_[k]);
    return out;
  }

 private:
  explicit Measure(Kind k) : kind_(k) {}

  Kind kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::optional<Expr> rho_;
  int order_ = 0;
  std::string name_;
};

template <class F>
double integrate(const Measure& m, F&& integrand) {
  double s = 0.0;
  const auto& t = m.nodes();
  const auto& w = m.weights();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double v = integrand(t[k]);
    if (!std::isfinite(v))
      fail(ErrorKind::QuadratureNonFinite, "integrand non-finite at t = " + detail::format_number(t[k]), t[k]);
    s += w[k] * v;
  }
  return s;
}

struct MomentData {
  double muHat1 = 0.0;
  std::vector<double> mu;  // centralized moments, mu[0] = 1, mu[1] = 0

  double operator[](int n) const { return mu.at(static_cast<std::size_t>(n)); }
  int nmax() const { return static_cast<int>(mu.size()) - 1; }
};

inline MomentData moments(const Measure& m, int nmax = 6) {
  if (nmax < 0 || nmax > 8) fail(ErrorKind::OrderOutOfRange, "moment order must be in 0..8");
  MomentData d;
  d.muHat1 = integrate(m, [](double t) { return t; });
  d.mu.assign(static_cast<std::size_t>(nmax) + 1, 0.0);
  d.mu[0] = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    const double c = d.muHat1;
    d.mu[static_cast<std::size_t>(n)] = integrate(m, [c, n](double t) {
      double v = 1.0;
      for (int k = 0; k < n; ++k) v *= (t - c);
      return v;
    });
  }
  // μ_1 vanishes by construction; store the exact zero.
  if (nmax >= 1) d.mu[1] = 0.0;
  return d;
}

enum class Regime { Mu3Nonzero, Mu3ZeroMu5Nonzero, EvenSymmetric, Degenerate };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Mu3Nonzero: return "Mu3Nonzero";
    case Regime::Mu3ZeroMu5Nonzero: return "Mu3ZeroMu5Nonzero";
    case Regime::EvenSymmetric: return "EvenSymmetric";
    case Regime::Degenerate: return "Degenerate";
  }
  return "?";
}

struct RegimeInfo {
  Regime regime = Regime::Degenerate;
  MomentData moments;
  std::optional<double> p, q, r;
  double moment_condition_6 = 0.0;
  bool mu4_eq_3mu2sq = false;  // μ4 = 3μ2²
  bool mu6_eq_5mu2mu4 = false; // μ6 = 5μ2μ4
};

inline constexpr double kRegimeTol = 1e-12;

namespace detail {
// A degree-n moment expression counts as zero when it is below
// kRegimeTol times its natural scale μ2^{n/2}.
inline bool is_zero_moment(double v, int degree, double mu2) {
  return std::fabs(v) <= kRegimeTol * std::pow(mu2, 0.5 * degree);
}
}  // namespace detail

/// Regime classification from precomputed moments (nmax >= 6). Never
/// throws; a Dirac-like measure gives Regime::Degenerate.
inline RegimeInfo classify_moments(const MomentData& md) {
  if (md.nmax() < 6) fail(ErrorKind::OrderOutOfRange, "classification needs moments up to 6");
  RegimeInfo info;
  info.moments = md;
  const double m2 = md[2], m3 = md[3], m4 = md[4], m5 = md[5], m6 = md[6];
  info.moment_condition_6 = 6 * m6 * m2 * m2 - m6 * m4 - 5 * m4 * m4 * m2;
  if (m2 <= 1e-14) return info;

  if (m4 > 0) info.p = 3 * m2 * m2 / m4 - 1;
  info.mu4_eq_3mu2sq = detail::is_zero_moment(m4 - 3 * m2 * m2, 4, m2);
  info.mu6_eq_5mu2mu4 = detail::is_zero_moment(m6 - 5 * m2 * m4, 6, m2);
  if (!info.mu6_eq_5mu2mu4 && m4 > 0)
    info.q = (m2 / m4) * (10 * m4 * m4 - 3 * m6 * m2 - 15 * m4 * m2 * m2) / (m6 - 5 * m4 * m2);
  if (info.mu4_eq_3mu2sq && !detail::is_zero_moment(m6 - 15 * m2 * m2 * m2, 6, m2))
    info.r = (7 * m6 - 45 * m2 * m2 * m2) / (3 * m6 - 45 * m2 * m2 * m2);

  if (!detail::is_zero_moment(m3, 3, m2))
    info.regime = Regime::Mu3Nonzero;
  else if (!detail::is_zero_moment(m5, 5, m2))
    info.regime = Regime::Mu3ZeroMu5Nonzero;
  else
    info.regime = Regime::EvenSymmetric;
  return info;
}

inline RegimeInfo classify(const Measure& m) {
  RegimeInfo info = classify_moments(moments(m, 6));
  if (info.regime == Regime::Degenerate)
    fail(ErrorKind::DegenerateMeasure, "mu2 = " + detail::format_number(info.moments[2]) +
                                           "; the measure is (numerically) a point mass");
  return info;
}

}  // namespace meanlab
