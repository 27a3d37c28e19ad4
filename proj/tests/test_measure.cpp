#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace meanlab;

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

}  // namespace

TEST(Integrate, Examples) {
  EXPECT_DOUBLE_EQ(integrate(Measure::ebm(), [](double t) { return t; }), 0.5);
  EXPECT_NEAR(integrate(Measure::lebesgue(), [](double t) { return t * t; }), 1.0 / 3, 1e-15);
  EXPECT_NEAR(integrate(Measure::dirac(0.3), [](double t) { return t * t * t; }), 0.027, 1e-16);
  EXPECT_EQ(kind_of([] { integrate(Measure::lebesgue(), [](double t) { return 1.0 / (t - t); }); }),
            ErrorKind::QuadratureNonFinite);
}

TEST(GaussLegendre, ExactForHighDegreePolynomials) {
  for (int n : {1, 2, 5, 16, 32, 33}) {
    const QuadratureRule& r = gauss_legendre(n);
    double sumw = 0;
    for (double w : r.weights) sumw += w;
    EXPECT_NEAR(sumw, 1.0, 1e-14) << n;
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], d);
      EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Moments, Examples) {
  const MomentData e = moments(Measure::ebm(), 8);
  EXPECT_EQ(e.muHat1, 0.5);
  for (int n = 1; n <= 8; ++n) EXPECT_NEAR(e[n], n % 2 ? 0.0 : std::pow(0.5, n), 1e-16) << n;
  const MomentData l = moments(Measure::lebesgue(), 8);
  EXPECT_NEAR(l.muHat1, 0.5, 1e-15);
  for (int n = 1; n <= 8; ++n) EXPECT_NEAR(l[n], n % 2 ? 0.0 : 1.0 / ((n + 1) * std::pow(2.0, n)), 1e-14) << n;
  const MomentData d = moments(Measure::dirac(0.37), 6);
  EXPECT_EQ(d.muHat1, 0.37);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(d[n], 0.0);
}

TEST(Moments, Invariants) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    // symmetric under t -> 1 - t
    std::vector<std::pair<double, double>> atoms;
    const int k = 1 + trial % 4;
    double total = 0;
    std::vector<std::pair<double, double>> half;
    for (int i = 0; i < k; ++i) {
      half.emplace_back(0.5 * u(rng), 0.1 + u(rng));
      total += 2 * half.back().second;
    }
    double acc = 0;
    for (std::size_t i = 0; i < half.size(); ++i) {
      const double w = half[i].second / total;
      atoms.emplace_back(half[i].first, w);
      atoms.emplace_back(1 - half[i].first, w);
      acc += 2 * w;
    }
    atoms.back().second += 1.0 - acc;  // make the sum exact
    const MomentData m = moments(Measure::atoms(atoms), 8);
    EXPECT_NEAR(m[0], 1, 1e-13);
    EXPECT_NEAR(m[1], 0, 1e-13);
    for (int n : {3, 5, 7}) EXPECT_LE(std::fabs(m[n]), 1e-13);
    for (int n : {2, 4, 6, 8}) EXPECT_GE(m[n], -1e-13);
    EXPECT_GE(m[4], m[2] * m[2] - 1e-13);
  }
}

TEST(Measure, ValidationErrors) {
  EXPECT_EQ(kind_of([] { Measure::atoms({{0.2, 0.5}, {1.2, 0.5}}); }), ErrorKind::InvalidMeasure);
  EXPECT_EQ(kind_of([] { Measure::atoms({{0.2, 0.5}, {0.4, 0.4}}); }), ErrorKind::InvalidMeasure);
  EXPECT_EQ(kind_of([] { Measure::atoms({{0.2, 1.5}, {0.4, -0.5}}); }), ErrorKind::InvalidMeasure);
  EXPECT_NO_THROW(Measure::density(parse("2*x")));
  EXPECT_EQ(kind_of([] { Measure::density(parse("x")); }), ErrorKind::InvalidMeasure);
  EXPECT_EQ(kind_of([] { Measure::density(parse("4*x - 1")); }), ErrorKind::InvalidMeasure);
}

TEST(Measure, Density) {
  const Measure m = Measure::density(parse("6*x*(1 - x)"));
  const MomentData d = moments(m, 6);
  EXPECT_NEAR(d.muHat1, 0.5, 1e-15);
  EXPECT_NEAR(d[2], 1.0 / 20, 1e-15);  // Beta(2,2) variance
  EXPECT_NEAR(d[3], 0.0, 1e-15);
}

TEST(Classify, Examples) {
  const RegimeInfo e = classify(Measure::ebm());
  EXPECT_EQ(e.regime, Regime::EvenSymmetric);
  EXPECT_NEAR(*e.p, 2.0, 1e-14);
  ASSERT_TRUE(e.q.has_value());
  EXPECT_NEAR(*e.q, 2.0, 1e-12);
  EXPECT_EQ(e.moment_condition_6, 0.0);
  EXPECT_FALSE(e.r.has_value());

  const RegimeInfo l = classify(Measure::lebesgue());
  EXPECT_EQ(l.regime, Regime::EvenSymmetric);
  EXPECT_NEAR(*l.p, 2.0 / 3, 1e-14);
  EXPECT_NEAR(*l.q, 2.0 / 3, 1e-12);
  EXPECT_LE(std::fabs(l.moment_condition_6), 1e-15);

  const RegimeInfo a = classify(Measure::atoms({{0.0, 1.0 / 6}, {0.5, 2.0 / 3}, {1.0, 1.0 / 6}}));
  EXPECT_NEAR(a.moments[2], 1.0 / 12, 1e-16);
  EXPECT_NEAR(a.moments[4], 1.0 / 48, 1e-16);  // = 3 mu2^2
  EXPECT_NEAR(a.moments[6], 1.0 / 192, 1e-16);
  EXPECT_TRUE(a.mu4_eq_3mu2sq);
  ASSERT_TRUE(a.r.has_value());
  EXPECT_NEAR(*a.r, -1.0, 1e-12);
  EXPECT_NEAR(*a.p, 0.0, 1e-12);

  const RegimeInfo s = classify(Measure::atoms({{0.0, 0.5}, {0.7, 0.5}}));
  EXPECT_EQ(s.regime, Regime::EvenSymmetric);  // two atoms: symmetric about their mean
  const RegimeInfo t = classify(Measure::atoms({{0.0, 0.3}, {0.2, 0.3}, {1.0, 0.4}}));
  EXPECT_EQ(t.regime, Regime::Mu3Nonzero);
}

TEST(Classify, DiracIsDegenerate) {
  EXPECT_EQ(kind_of([] { classify(Measure::dirac(0.4)); }), ErrorKind::DegenerateMeasure);
  EXPECT_EQ(classify_moments(moments(Measure::dirac(0.4), 6)).regime, Regime::Degenerate);
}
