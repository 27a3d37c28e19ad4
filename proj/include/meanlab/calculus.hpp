#pragma once

// Wronskians, the coefficient functions Φ = W^{2,0}/W^{1,0} and
// Ψ = -W^{2,1}/W^{1,0} of the ODE h'' = Φh' + Ψh solved by f and g, the
// sequences (φ_i, ψ_i) with h^{(i)} = φ_i h' + ψ_i h, and the derivatives
// of the diagonal curve m_x at u = 0.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "meanlab/error.hpp"
#include "meanlab/function_pair.hpp"
#include "meanlab/jet.hpp"
#include "meanlab/means.hpp"
#include "meanlab/measure.hpp"

namespace meanlab {

inline constexpr double kTolW = 1e-9;

/// W^{i,j} = f^{(i)} g^{(j)} - f^{(j)} g^{(i)} at x.
inline double wronskian(const FunctionPair& pair, double x, int i, int j) {
  const int n = std::max(i, j);
  if (i < 0 || j < 0 || n > pair.validated_order)
    fail(ErrorKind::OrderOutOfRange, "Wronskian order " + std::to_string(n) + " exceeds validated order " +
                                         std::to_string(pair.validated_order));
  const Jet jf = pair.f.jet(x, n);
  const Jet jg = pair.g.jet(x, n);
  return jf.derivative_value(i) * jg.derivative_value(j) - jf.derivative_value(j) * jg.derivative_value(i);
}

/// Jet of W^{i,j} at x up to `order`; needs f, g to order max(i,j) + order.
inline Jet wronskian_jet(const Func& f, const Func& g, double x, int i, int j, int order) {
  const int n = std::max(i, j) + order;
  Jet jf = f.jet(x, n), jg = g.jet(x, n);
  auto shifted = [order](Jet h, int k) {
    for (int s = 0; s < k; ++s) h = h.derivative();
    return h.truncate(order);
  };
  return shifted(jf, i) * shifted(jg, j) - shifted(jf, j) * shifted(jg, i);
}

struct PhiPsi {
  double x = 0.0;
  Jet phi;  // Φ
  Jet psi;  // Ψ
  double w10 = 0.0;

  /// k-th derivative values.
  double Phi(int k = 0) const { return phi.derivative_value(k); }
  double Psi(int k = 0) const { return psi.derivative_value(k); }
};

/// Jets of Φ and Ψ at x up to `order` (f, g are expanded to order + 2).
inline PhiPsi phi_psi(const Func& f, const Func& g, double x, int order, double tol_w = kTolW) {
  if (order < 0 || order + 2 > kMaxJetOrder) fail(ErrorKind::OrderOutOfRange, "Phi/Psi order too high");
  const Jet jf = f.jet(x, order + 2), jg = g.jet(x, order + 2);
  const Jet f1 = jf.derivative(), g1 = jg.derivative();
  const Jet f2 = f1.derivative().truncate(order), g2 = g1.derivative().truncate(order);
  const Jet f0 = jf.truncate(order), g0 = jg.truncate(order);
  const Jet f1t = f1.truncate(order), g1t = g1.truncate(order);
  const Jet w10 = f1t * g0 - f0 * g1t;
  if (!(std::fabs(w10[0]) > tol_w))
    fail(ErrorKind::WronskianVanishes, "|W^{1,0}| = " + detail::format_number(std::fabs(w10[0])) + " at x = " +
                                           detail::format_number(x), x);
  const Jet w20 = f2 * g0 - f0 * g2;
  const Jet w21 = f2 * g1t - f1t * g2;
  return PhiPsi{x, w20 / w10, -(w21 / w10), w10[0]};
}

inline PhiPsi phi_psi(const FunctionPair& pair, double x, int order) {
  if (pair.validated_order < order + 2)
    fail(ErrorKind::OrderOutOfRange, "Phi/Psi jets of order " + std::to_string(order) + " need a pair validated to " +
                                         std::to_string(order + 2));
  return phi_psi(pair.f, pair.g, x, order);
}

struct SeqPair {
  double x = 0.0;
  std::vector<double> phi;  // φ_0..φ_n
  std::vector<double> psi;  // ψ_0..ψ_n
};

/// φ_{i+1} = φ_i' + φ_iΦ + ψ_i, ψ_{i+1} = φ_iΨ + ψ_i', seeded with
/// (φ_0, ψ_0) = (0, 1), (φ_1, ψ_1) = (1, 0). Run on jets so the
/// derivatives are available at every step.
inline SeqPair recursion_seq(const FunctionPair& pair, double x, int n) {
  if (n < 1 || n > 6) fail(ErrorKind::OrderOutOfRange, "sequence length must be in 1..6");
  SeqPair out{x, {0.0, 1.0}, {1.0, 0.0}};
  if (n == 1) return out;
  if (pair.validated_order < n) fail(ErrorKind::OrderOutOfRange, "pair not validated to order " + std::to_string(n));
  const PhiPsi pp = phi_psi(pair.f, pair.g, x, n - 2);
  Jet ph = Jet::constant(1.0, x, n - 1);
  Jet ps = Jet::constant(0.0, x, n - 1);
  for (int i = 1; i < n; ++i) {
    const int ord = n - 1 - i;
    const Jet Phi = pp.phi.truncate(ord), Psi = pp.psi.truncate(ord);
    const Jet phi_t = ph.truncate(ord), psi_t = ps.truncate(ord);
    const Jet next_phi = ph.derivative() + phi_t * Phi + psi_t;
    const Jet next_psi = phi_t * Psi + ps.derivative();
    ph = next_phi;
    ps = next_psi;
    out.phi.push_back(ph[0]);
    out.psi.push_back(ps[0]);
  }
  return out;
}

/// φ_3..φ_6 and ψ_3..ψ_6 written out as polynomials in Φ, Ψ and their
/// derivatives, evaluated from order-4 jets.
inline SeqPair closed_form_seq_from(const PhiPsi& pp) {
  const double F = pp.Phi(0), F1 = pp.Phi(1), F2 = pp.Phi(2), F3 = pp.Phi(3), F4 = pp.Phi(4);
  const double S = pp.Psi(0), S1 = pp.Psi(1), S2 = pp.Psi(2), S3 = pp.Psi(3), S4 = pp.Psi(4);
  const double F_2 = F * F, F_3 = F_2 * F, F_4 = F_3 * F, F_5 = F_4 * F;
  SeqPair out{pp.x, {0.0, 1.0, F}, {1.0, 0.0, S}};
  out.phi.push_back(F1 + F_2 + S);
  out.psi.push_back(F * S + S1);
  out.phi.push_back(F2 + 3 * F1 * F + F_3 + 2 * F * S + 2 * S1);
  out.psi.push_back((2 * F1 + F_2) * S + F * S1 + S * S + S2);
  out.phi.push_back(F3 + 4 * F2 * F + 3 * F1 * F1 + 6 * F1 * F_2 + F_4 + (4 * F1 + 3 * F_2) * S + 5 * F * S1 +
                    S * S + 3 * S2);
  out.psi.push_back(2 * F * S * S + (3 * F2 + 5 * F1 * F + F_3) * S + (3 * F1 + F_2) * S1 + F * S2 + 4 * S1 * S +
                    S3);
  out.phi.push_back(F4 + 5 * F3 * F + 10 * F2 * F1 + 10 * F2 * F_2 + 10 * F1 * F_3 + 15 * F1 * F1 * F + F_5 +
                    3 * F * S * S + (7 * F2 + 15 * F1 * F + 4 * F_3) * S + (12 * F1 + 9 * F_2) * S1 + 9 * F * S2 +
                    6 * S1 * S + 4 * S3);
  out.psi.push_back((6 * F1 + 3 * F_2) * S * S + (4 * F3 + 9 * F2 * F + 8 * F1 * F1 + 9 * F1 * F_2 + F_4) * S +
                    (4 * F1 + F_2) * S2 + (6 * F2 + 7 * F1 * F + F_3) * S1 + F * (S3 + 9 * S1 * S) + S * S * S +
                    4 * S1 * S1 + 7 * S2 * S + S4);
  return out;
}

inline SeqPair closed_form_seq(const FunctionPair& pair, double x) {
  return closed_form_seq_from(phi_psi(pair, x, 4));
}

/// m_x^{(k)}(0) for k = 1..6 (index k-1) from Φ, Ψ jets and the moments.
inline std::array<double, 6> diagonal_derivatives_from(const PhiPsi& pp, const MomentData& md) {
  const double m2 = md[2], m4 = md[4], m6 = md[6];
  double m3 = md[3], m5 = md[5];
  if (m2 <= 1e-14) fail(ErrorKind::DegenerateMeasure, "mu2 vanishes");
  if (detail::is_zero_moment(m3, 3, m2) && detail::is_zero_moment(m5, 5, m2)) m3 = m5 = 0.0;
  const SeqPair s = closed_form_seq_from(pp);
  const double F = pp.Phi(0), F1 = pp.Phi(1), F2 = pp.Phi(2);
  const double S = pp.Psi(0), S1 = pp.Psi(1), S2 = pp.Psi(2);
  const double F_2 = F * F, F_3 = F_2 * F, F_4 = F_3 * F, F_5 = F_4 * F;
  std::array<double, 6> d{};
  d[0] = 0.0;
  d[1] = m2 * F;
  d[2] = m3 * s.phi[3];
  d[3] = -3 * m2 * m2 * (F_3 + 2 * F * S) + m4 * s.phi[4];
  d[4] = -10 * m3 * m2 * (F_2 * F1 + F_4 + (F1 + 3 * F_2) * S + F * S1 + S * S) + m5 * s.phi[5];
  d[5] = 15 * m2 * m2 * m2 * (-F1 * F_3 + 2 * F_5 + 8 * F_3 * S + 6 * F * S * S) -
         10 * m3 * m3 *
             (F1 * F1 * F + 2 * F1 * F_3 + F_5 + 3 * F * S * S + 4 * (F1 * F + F_3) * S + 2 * (F1 + F_2) * S1 +
              2 * S1 * S) -
         15 * m2 * m4 *
             (F2 * F_2 + 3 * F1 * F_3 + F_5 + 3 * F * S * S + (F2 + 5 * F1 * F + 4 * F_3) * S + 3 * F_2 * S1 +
              F * S2 + 2 * S1 * S) +
         m6 * s.phi[6];
  return d;
}

inline std::array<double, 6> diagonal_derivatives(const FunctionPair& pair, const Measure& mu, double x) {
  return diagonal_derivatives_from(phi_psi(pair, x, 4), moments(mu, 6));
}

struct NumericDerivatives {
  std::vector<double> d;  // m^{(k)}(0), k = 1..k_max at index k-1
  std::vector<double> h;  // radius the k-th estimate was taken from
  double condition = 0.0;
  double fit_residual = 0.0;  // max |fit - sample| over all fits
};

namespace detail {

struct ChebFit {
  std::vector<double> d;
  std::vector<double> noise;  // roundoff bound on each d_k from sample noise
  double condition = 0.0;
  double residual = 0.0;
};

// Samples m_x at 17 Chebyshev nodes in [-h, h], least-squares fits a
// degree-8 polynomial in s = u/h and reads off k! a_k / h^k.
inline ChebFit cheb_fit(const MeanSpec& spec, double x, double mh, int k_max, double h) {
  constexpr int kNodes = 17, kDeg = 8;
  Eigen::MatrixXd V(kNodes, kDeg + 1);
  Eigen::VectorXd m(kNodes);
  for (int j = 0; j < kNodes; ++j) {
    const double s = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * kNodes));
    m(j) = m_curve(spec, x, h * s, mh) - x;
    double p = 1.0;
    for (int k = 0; k <= kDeg; ++k, p *= s) V(j, k) = p;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  ChebFit out;
  out.condition = sv(0) / sv(sv.size() - 1);
  if (!(out.condition <= 1e10))
    fail(ErrorKind::IllConditionedFit, "fit condition " + detail::format_number(out.condition));
  const Eigen::VectorXd a = svd.solve(m);
  out.residual = (V * a - m).cwiseAbs().maxCoeff();
  // sample noise is at least one rounding of the mean itself
  const double sigma = std::max(out.residual, 2.3e-16 * (std::fabs(x) + h));
  const Eigen::MatrixXd pinv = svd.solve(Eigen::MatrixXd::Identity(kNodes, kNodes));
  double hk = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    hk *= h;
    out.d.push_back(factorial(k) * a(k) / hk);
    out.noise.push_back(factorial(k) * pinv.row(k).cwiseAbs().sum() * sigma / hk);
  }
  return out;
}

}  // namespace detail

/// Independent estimate of m_x^{(k)}(0) by polynomial fitting of sampled
/// m_x. A positive h fixes the sampling radius. Otherwise radii
/// h_max 2^{-j}, j = 0..4, with h_max = min(0.4, 0.4 dist(x, ∂I)), are
/// tried. Large radii suffer truncation (estimated by the change to the next
/// smaller radius), small ones roundoff amplified by 1/h^k (bounded from the
/// fit's pseudo-inverse); each k takes the radius minimizing the sum.
inline NumericDerivatives diagonal_derivatives_numeric(const MeanSpec& spec, double x, int k_max, double h = 0.0) {
  if (k_max < 1 || k_max > 6) fail(ErrorKind::OrderOutOfRange, "k_max must be in 1..6");
  const Interval& I = spec.pair.interval;
  detail::check_in(I, x);
  const double mh = integrate(spec.measure, [](double t) { return t; });
  std::vector<double> radii;
  if (h > 0.0) {
    radii.push_back(h);
  } else {
    const double h_max = std::min(0.4, 0.4 * I.dist_to_boundary(x));
    for (int j = 0; j < 5; ++j) radii.push_back(std::ldexp(h_max, -j));
  }
  std::vector<detail::ChebFit> fits;
  NumericDerivatives out;
  for (double r : radii) {
    fits.push_back(detail::cheb_fit(spec, x, mh, k_max, r));
    out.condition = std::max(out.condition, fits.back().condition);
    out.fit_residual = std::max(out.fit_residual, fits.back().residual);
  }
  for (int k = 0; k < k_max; ++k) {
    std::size_t best = 0;
    double err = INFINITY;
    for (std::size_t j = 0; j + 1 < fits.size(); ++j) {
      const double e = std::fabs(fits[j].d[k] - fits[j + 1].d[k]) + fits[j].noise[k];
      if (e < err) err = e, best = j;
    }
    out.d.push_back(fits[best].d[k]);
    out.h.push_back(radii[best]);
  }
  return out;
}

}  // namespace meanlab
