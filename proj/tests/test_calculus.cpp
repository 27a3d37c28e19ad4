#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace meanlab;
using meanlab::testing::random_pairs;
using meanlab::testing::random_points;
using meanlab::testing::rel_err;

namespace {

template <class F>
ErrorKind kind_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::UsageError;
}

// Taylor series of m_x(u) obtained directly: along the segment the argument
// is x + (t - μ̂1)u, so ∫f dμ has coefficients f_k μ_k. Then (f/g)(x + δ(u))
// equals the ratio of those series, solved for δ by fixed-point iteration
// on truncated series (one order gained per sweep).
std::array<double, 6> series_oracle(const FunctionPair& p, const Measure& mu, double x) {
  constexpr int n = 6;
  const MomentData md = moments(mu, n);
  const Jet jf = p.f.jet(x, n), jg = p.g.jet(x, n);
  std::array<double, n + 1> a{}, b{};
  for (int k = 0; k <= n; ++k) {
    a[k] = jf[k] * md[k];
    b[k] = jg[k] * md[k];
  }
  const Jet R = Jet::from_coeffs(0.0, a) / Jet::from_coeffs(0.0, b);
  const Jet h = jf / jg;  // Taylor coefficients of f/g at x
  Jet delta = Jet::constant(0.0, 0.0, n);
  for (int sweep = 0; sweep <= n; ++sweep) {
    Jet higher = Jet::constant(0.0, 0.0, n), pw = delta * delta;
    for (int k = 2; k <= n; ++k, pw = pw * delta) higher += h[k] * pw;
    delta = (R - Jet::constant(h[0], 0.0, n) - higher) / h[1];
  }
  std::array<double, 6> out{};
  for (int k = 1; k <= n; ++k) out[k - 1] = delta.derivative_value(k);
  return out;
}

}  // namespace

TEST(Wronskian, Examples) {
  const FunctionPair lin = validate_pair("x", "1", {-2, 2}, 6);
  const FunctionPair sc = validate_pair("sin(x)", "cos(x)", {-1, 1}, 6);
  for (double x : {-0.8, 0.0, 0.45}) {
    EXPECT_EQ(wronskian(lin, x, 1, 0), 1.0);
    EXPECT_NEAR(wronskian(sc, x, 1, 0), 1.0, 1e-15);
    EXPECT_NEAR(wronskian(sc, x, 2, 0), 0.0, 1e-15);
    EXPECT_NEAR(wronskian(sc, x, 2, 1), 1.0, 1e-15);
  }
  EXPECT_EQ(kind_of([&] { wronskian(validate_pair("x", "1", {0, 1}, 2), 0.5, 3, 0); }), ErrorKind::OrderOutOfRange);
}

TEST(Wronskian, Antisymmetry) {
  std::mt19937_64 rng(1);
  for (const auto& rp : random_pairs(41, 5))
    for (double x : random_points(rng, rp.pair.interval, 4))
      for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j) {
          EXPECT_EQ(wronskian(rp.pair, x, i, j), -wronskian(rp.pair, x, j, i));
        }
}

TEST(PhiPsi, Examples) {
  const PhiPsi a = phi_psi(validate_pair("x", "1", {-1, 1}, 6), 0.3, 4);
  for (int k = 0; k <= 4; ++k) {
    EXPECT_EQ(a.Phi(k), 0.0);
    EXPECT_EQ(a.Psi(k), 0.0);
  }
  const FunctionPair lg = validate_pair("log(x)", "1", {0.5, 4}, 6);
  for (double x : {0.7, 1.0, 2.5}) {
    const PhiPsi b = phi_psi(lg, x, 4);
    EXPECT_NEAR(b.Phi(), -1 / x, 1e-15);
    EXPECT_NEAR(b.Phi(1), 1 / (x * x), 1e-14);  // derivative of -1/x
    EXPECT_EQ(b.Psi(), 0.0);
  }
  const PhiPsi c = phi_psi(validate_pair("sin(x)", "cos(x)", {-1, 1}, 6), -0.4, 4);
  EXPECT_NEAR(c.Phi(), 0.0, 1e-15);
  EXPECT_NEAR(c.Psi(), -1.0, 1e-15);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(c.Phi(k), 0.0, 1e-13);
    EXPECT_NEAR(c.Psi(k), 0.0, 1e-13);
  }
  EXPECT_EQ(kind_of([&] { phi_psi(validate_pair("x", "1", {0, 1}, 4), 0.5, 4); }), ErrorKind::OrderOutOfRange);
  EXPECT_EQ(kind_of([] { phi_psi(Func::parse("x^2"), Func::parse("1"), 0.0, 2); }), ErrorKind::WronskianVanishes);
}

TEST(PhiPsi, SatisfyTheSecondOrderEquation) {
  std::mt19937_64 rng(2);
  for (const auto& rp : random_pairs(42, 10))
    for (double x : random_points(rng, rp.pair.interval, 5)) {
      const PhiPsi pp = phi_psi(rp.pair, x, 0);
      for (const Func* h : {&rp.pair.f, &rp.pair.g}) {
        const Jet j = h->jet(x, 2);
        const double lhs = j.derivative_value(2);
        EXPECT_LE(std::fabs(lhs - (pp.Phi() * j.derivative_value(1) + pp.Psi() * j[0])), 1e-11 * (1 + std::fabs(lhs)))
            << rp.f << " / " << rp.g << " at " << x;
      }
    }
}

TEST(Recursion, Examples) {
  const FunctionPair ex = validate_pair("exp(x)", "1", {-1, 1}, 6);
  const SeqPair s = recursion_seq(ex, 0.2, 6);
  EXPECT_EQ(s.phi[0], 0.0);
  EXPECT_EQ(s.psi[0], 1.0);
  EXPECT_EQ(s.phi[1], 1.0);
  EXPECT_EQ(s.psi[1], 0.0);
  for (int i = 2; i <= 6; ++i) {
    EXPECT_NEAR(s.phi[i], 1.0, 1e-14) << i;  // Φ = 1, Ψ = 0
    EXPECT_NEAR(s.psi[i], 0.0, 1e-14) << i;
  }
  const SeqPair t = recursion_seq(validate_pair("x", "1", {-1, 1}, 6), 0.5, 6);
  for (int i = 2; i <= 6; ++i) {
    EXPECT_EQ(t.phi[i], 0.0);
    EXPECT_EQ(t.psi[i], 0.0);
  }
  const FunctionPair sc = validate_pair("sin(x)", "cos(x)", {-1, 1}, 6);
  const PhiPsi pp = phi_psi(sc, 0.1, 0);
  const SeqPair u = recursion_seq(sc, 0.1, 6);
  EXPECT_EQ(u.phi[2], pp.Phi());
  EXPECT_EQ(u.psi[2], pp.Psi());
  EXPECT_EQ(kind_of([&] { recursion_seq(sc, 0.1, 7); }), ErrorKind::OrderOutOfRange);
}

TEST(Recursion, DerivativeIdentity) {
  // h^{(i)} = φ_i h' + ψ_i h for h in {f, g}
  std::mt19937_64 rng(3);
  for (const auto& rp : random_pairs(43, 20))
    for (double x : random_points(rng, rp.pair.interval, 10)) {
      const SeqPair s = recursion_seq(rp.pair, x, 6);
      for (const Func* h : {&rp.pair.f, &rp.pair.g}) {
        const Jet j = h->jet(x, 6);
        for (int i = 0; i <= 6; ++i) {
          const double hi = j.derivative_value(i);
          const double rhs = s.phi[i] * j.derivative_value(1) + s.psi[i] * j[0];
          EXPECT_LE(std::fabs(hi - rhs), 1e-9 * (1 + std::fabs(hi))) << rp.f << " / " << rp.g << " i=" << i;
        }
      }
    }
}

TEST(Recursion, WronskianIdentity) {
  // W^{i,j} = (φ_i ψ_j - φ_j ψ_i) W^{1,0}
  std::mt19937_64 rng(4);
  for (const auto& rp : random_pairs(44, 10))
    for (double x : random_points(rng, rp.pair.interval, 5)) {
      const SeqPair s = recursion_seq(rp.pair, x, 6);
      const double w10 = wronskian(rp.pair, x, 1, 0);
      for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 6; ++j) {
          const double w = wronskian(rp.pair, x, i, j);
          const double rhs = (s.phi[i] * s.psi[j] - s.phi[j] * s.psi[i]) * w10;
          EXPECT_LE(std::fabs(w - rhs), 1e-9 * std::max(1.0, std::fabs(w))) << i << "," << j;
        }
    }
}

TEST(ClosedForm, Examples) {
  const SeqPair a = closed_form_seq(validate_pair("x", "1", {-1, 1}, 6), 0.2);
  for (int i = 2; i <= 6; ++i) {
    EXPECT_EQ(a.phi[i], 0.0);
    EXPECT_EQ(a.psi[i], 0.0);
  }
  const SeqPair b = closed_form_seq(validate_pair("sin(x)", "cos(x)", {-1, 1}, 6), 0.0);
  EXPECT_NEAR(b.phi[3], -1, 1e-12);
  EXPECT_NEAR(b.psi[3], 0, 1e-12);
  EXPECT_NEAR(b.phi[4], 0, 1e-12);
  EXPECT_NEAR(b.psi[4], 1, 1e-12);
  EXPECT_NEAR(b.phi[5], 1, 1e-12);
  EXPECT_NEAR(b.psi[6], -1, 1e-12);
}

TEST(ClosedForm, MatchesRecursion) {
  std::mt19937_64 rng(5);
  for (const auto& rp : random_pairs(45, 20))
    for (double x : random_points(rng, rp.pair.interval, 10)) {
      const SeqPair c = closed_form_seq(rp.pair, x), r = recursion_seq(rp.pair, x, 6);
      for (int i = 0; i <= 6; ++i) {
        EXPECT_LE(rel_err(c.phi[i], r.phi[i]), 1e-10) << rp.f << " / " << rp.g << " phi_" << i;
        EXPECT_LE(rel_err(c.psi[i], r.psi[i]), 1e-10) << rp.f << " / " << rp.g << " psi_" << i;
      }
    }
}

TEST(DiagonalDerivatives, Examples) {
  const FunctionPair lg = validate_pair("log(x)", "1", {0.5, 4}, 6);
  const auto d = diagonal_derivatives(lg, Measure::ebm(), 1.0);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1], -0.25, 1e-15);
  for (const Measure& mu : {Measure::ebm(), Measure::lebesgue(), Measure::atoms({{0.1, 0.6}, {0.9, 0.4}})}) {
    const auto z = diagonal_derivatives(validate_pair("x", "1", {-1, 1}, 6), mu, 0.3);
    for (double v : z) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(kind_of([&] { diagonal_derivatives(lg, Measure::dirac(0.3), 1.0); }), ErrorKind::DegenerateMeasure);
}

TEST(DiagonalDerivatives, SymmetricMeasuresHaveNoOddTerms) {
  for (const auto& rp : random_pairs(46, 5))
    for (const Measure& mu : {Measure::ebm(), Measure::lebesgue()}) {
      const auto d = diagonal_derivatives(rp.pair, mu, rp.pair.interval.mid());
      EXPECT_EQ(d[2], 0.0);
      EXPECT_EQ(d[4], 0.0);
    }
}

TEST(DiagonalDerivatives, MatchSeriesOracle) {
  std::mt19937_64 rng(6);
  const Measure skew = Measure::atoms({{0.0, 0.3}, {0.2, 0.3}, {1.0, 0.4}});
  for (const auto& rp : random_pairs(47, 10))
    for (const Measure& mu : {Measure::ebm(), Measure::lebesgue(), skew})
      for (double x : random_points(rng, rp.pair.interval, 3)) {
        const auto d = diagonal_derivatives(rp.pair, mu, x);
        const auto o = series_oracle(rp.pair, mu, x);
        for (int k = 0; k < 6; ++k)
          EXPECT_LE(rel_err(d[k], o[k]), 1e-9) << rp.f << " / " << rp.g << " " << mu.name() << " k=" << k + 1;
      }
}

TEST(NumericOracle, Examples) {
  const MeanSpec lg{validate_pair("log(x)", "1", {0.5, 4}, 6), Measure::ebm()};
  EXPECT_NEAR(diagonal_derivatives_numeric(lg, 1.0, 6).d[1], -0.25, 1e-7);
  const MeanSpec lin{validate_pair("x", "1", {-1, 1}, 6), Measure::lebesgue()};
  for (double v : diagonal_derivatives_numeric(lin, 0.0, 6).d) EXPECT_NEAR(v, 0.0, 1e-9);
  // off centre the largest radius shrinks and the 6th derivative sits at the roundoff floor
  for (double x : {0.2, -0.3})
    for (double v : diagonal_derivatives_numeric(lin, x, 5).d) EXPECT_NEAR(v, 0.0, 1e-9);

  const MeanSpec sc{validate_pair("sin(x)", "cos(x)", {-1, 1}, 6), Measure::lebesgue()};
  const auto closed = diagonal_derivatives(sc.pair, sc.measure, 0.3);
  const NumericDerivatives nd = diagonal_derivatives_numeric(sc, 0.3, 6);
  ASSERT_EQ(nd.h.size(), 6u);
  for (int k = 0; k < 6; ++k) EXPECT_LE(rel_err(nd.d[k], closed[k]), k < 4 ? 1e-5 : 1e-3) << "k=" << k + 1;
  EXPECT_LT(nd.fit_residual, 1e-12);
  const NumericDerivatives fixed = diagonal_derivatives_numeric(sc, 0.3, 4, 0.05);
  EXPECT_EQ(fixed.h, std::vector<double>(4, 0.05));
  for (int k = 0; k < 4; ++k) EXPECT_LE(rel_err(fixed.d[k], closed[k]), 1e-5) << "k=" << k + 1;
  EXPECT_EQ(kind_of([&] { diagonal_derivatives_numeric(sc, 1.5, 4); }), ErrorKind::OutOfInterval);
  EXPECT_EQ(kind_of([&] { diagonal_derivatives_numeric(sc, 0.0, 7); }), ErrorKind::OrderOutOfRange);
}

TEST(NumericOracle, MatchesClosedForms) {
  std::mt19937_64 rng(7);
  const Interval I{0.4, 2.6};
  for (const auto& rp : random_pairs(48, 20, I))
    for (const Measure& mu : {Measure::ebm(), Measure::lebesgue()}) {
      const MeanSpec s{rp.pair, mu};
      for (double x : random_points(rng, I, 5, 0.5)) {
        const auto closed = diagonal_derivatives(rp.pair, mu, x);
        const auto nd = diagonal_derivatives_numeric(s, x, 6);
        for (int k = 0; k < 6; ++k)
          EXPECT_LE(rel_err(nd.d[k], closed[k]), k < 4 ? 1e-5 : 1e-3)
              << rp.f << " / " << rp.g << " " << mu.name() << " x=" << x << " k=" << k + 1;
      }
    }
}

TEST(DiagonalDerivatives, EquivalentPairsAgree) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(-2, 2);
  for (const auto& rp : random_pairs(49, 8)) {
    const double a = 1 + std::fabs(c(rng)), b = c(rng), d = 2 + std::fabs(c(rng)), cc = 0.1 * c(rng);
    FunctionPair B;
    try {
      B = validate_pair(rp.pair.f.combine(a, rp.pair.g, b), rp.pair.f.combine(cc, rp.pair.g, d), rp.pair.interval, 6);
    } catch (const Error&) {
      continue;
    }
    for (const Measure& mu : {Measure::ebm(), Measure::lebesgue(), Measure::atoms({{0.2, 0.7}, {0.95, 0.3}})})
      for (double x : random_points(rng, rp.pair.interval, 3)) {
        const auto da = diagonal_derivatives(rp.pair, mu, x), db = diagonal_derivatives(B, mu, x);
        for (int k = 0; k < 6; ++k) EXPECT_LE(rel_err(da[k], db[k]), 1e-9) << "k=" << k + 1;
      }
  }
}
