// Acceptance suite: one PASS/FAIL line per criterion, worst observed value
// and tolerance echoed. Exit status is nonzero if any criterion fails.

#include <array>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace meanlab;
using meanlab::testing::random_pairs;
using meanlab::testing::random_points;
using meanlab::testing::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome moment_closed_forms() {
  const MomentData e = moments(Measure::ebm(), 6), l = moments(Measure::lebesgue(), 6);
  const RegimeInfo ie = classify(Measure::ebm()), il = classify(Measure::lebesgue());
  const double errs[] = {std::fabs(e[2] - 0.25),       std::fabs(e[4] - 1.0 / 16), std::fabs(e[6] - 1.0 / 64),
                         std::fabs(*ie.p - 2),         std::fabs(l[2] - 1.0 / 12), std::fabs(l[4] - 1.0 / 80),
                         std::fabs(l[6] - 1.0 / 448), std::fabs(*il.p - 2.0 / 3)};
  double worst = 0;
  for (double x : errs) worst = std::max(worst, x);
  return {worst <= 1e-14, "max abs error " + sci(worst) + " (tol 1e-14)"};
}

Outcome moment_condition() {
  const double a = std::fabs(classify(Measure::ebm()).moment_condition_6);
  const double b = std::fabs(classify(Measure::lebesgue()).moment_condition_6);
  return {a <= 1e-15 && b <= 1e-15, "ebm " + sci(a) + ", lebesgue " + sci(b) + " (tol 1e-15)"};
}

Outcome derivative_sequences() {
  std::mt19937_64 rng(1003);
  double ident = 0, closed = 0;
  for (const auto& rp : random_pairs(3003, 20))
    for (double x : random_points(rng, rp.pair.interval, 10)) {
      const SeqPair s = recursion_seq(rp.pair, x, 6), c = closed_form_seq(rp.pair, x);
      for (const Func* h : {&rp.pair.f, &rp.pair.g}) {
        const Jet j = h->jet(x, 6);
        for (int i = 0; i <= 6; ++i) {
          const double hi = j.derivative_value(i);
          ident = std::max(ident, rel_err(s.phi[i] * j.derivative_value(1) + s.psi[i] * j[0], hi));
        }
      }
      for (int i = 0; i <= 6; ++i)
        closed = std::max({closed, rel_err(c.phi[i], s.phi[i]), rel_err(c.psi[i], s.psi[i])});
    }
  return {ident <= 1e-9 && closed <= 1e-10,
          "identity " + sci(ident) + " (tol 1e-9), closed vs recursion " + sci(closed) + " (tol 1e-10)"};
}

Outcome diagonal_derivatives_oracle() {
  std::mt19937_64 rng(1004);
  const Interval I{0.4, 2.6};
  double low = 0, high = 0;
  for (const auto& rp : random_pairs(3004, 20, I))
    for (const Measure& mu : {Measure::ebm(), Measure::lebesgue()})
      for (double x : random_points(rng, I, 5, 0.5)) {
        const auto closed = diagonal_derivatives(rp.pair, mu, x);
        const auto nd = diagonal_derivatives_numeric({rp.pair, mu}, x, 6);
        for (int k = 0; k < 6; ++k) (k < 4 ? low : high) = std::max(k < 4 ? low : high, rel_err(nd.d[k], closed[k]));
      }
  const double hand = std::fabs(diagonal_derivatives(validate_pair("log(x)", "1", {0.5, 2}, 6), Measure::ebm(), 1)[1] + 0.25);
  return {low <= 1e-5 && high <= 1e-3 && hand <= 1e-12, "k<=4 " + sci(low) + " (tol 1e-5), k=5,6 " + sci(high) +
                                                            " (tol 1e-3), (log,1) m'' " + sci(hand) + " (tol 1e-12)"};
}

bool all_hold(const EqualityReport& r, std::string& failing) {
  for (const Verdict& v : r.verdicts)
    if (!v.holds()) failing += " " + v.id;
  return failing.empty();
}

Outcome ebm_witness() {
  const Interval I{-0.7, 0.7};
  const EqualityReport r = check_EBM(validate_pair("sin(x)", "cos(x)", I, 6), validate_pair("x", "1", I, 6));
  const double gap = r.find("means_equal")->residual;
  const double ea = std::fabs(*r.fitted.alpha + 1), eb = std::fabs(*r.fitted.beta);
  std::string failing;
  const bool nine = all_hold(r, failing);
  return {gap <= 1e-11 && nine && ea <= 1e-8 && eb <= 1e-8,
          "sup-gap " + sci(gap) + " (tol 1e-11), assertions " + (nine ? "all hold" : "failing:" + failing) +
              ", |alpha+1| " + sci(ea) + ", |beta| " + sci(eb) + " (tol 1e-8)"};
}

Outcome ecm_witness() {
  const Interval I{-0.7, 0.7};
  const EqualityReport r = check_ECM(validate_pair("sin(x)", "cos(x)", I, 6), validate_pair("x", "1", I, 6));
  const double gap = r.find("means_equal")->residual;
  const double spread = r.find("wronskian_invariant_constant")->residual;
  std::string failing;
  const bool ok = all_hold(r, failing);
  return {gap <= 1e-10 && ok && spread <= 1e-8,
          "sup-gap " + sci(gap) + " (tol 1e-10), assertions " + (ok ? "all hold" : "failing:" + failing) +
              ", constancy spread " + sci(spread) + " (tol 1e-8)"};
}

Outcome equivalence_invariance() {
  const auto pairs = random_pairs(3007, 10);
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> c(-2, 2);
  double gap = 0, recovery = 0;
  int done = 0;
  for (int trial = 0; done < 100 && trial < 2000; ++trial) {
    const auto& A = pairs[static_cast<std::size_t>(trial) % pairs.size()].pair;
    const Matrix2 m{c(rng), c(rng), 0.3 * c(rng), 2.5 + std::fabs(c(rng))};
    if (std::fabs(m.det()) < 0.2) continue;
    FunctionPair B;
    try {
      B = validate_pair(A.f.combine(m.a, A.g, m.b), A.f.combine(m.c, A.g, m.d), A.interval, 6);
    } catch (const Error&) {
      continue;
    }
    const Measure mu = done % 2 ? Measure::lebesgue() : Measure::ebm();
    const auto grid = interior_grid(A.interval, 8);
    for (double x : grid)
      for (double y : grid) gap = std::max(gap, std::fabs(mean_eval(MeanSpec{A, mu}, x, y) - mean_eval(MeanSpec{B, mu}, x, y)));
    const EquivalenceFit e = fit_equivalence(A, B, 64, mu);
    const double ne = std::hypot(std::hypot(m.a, m.b), std::hypot(m.c, m.d));
    const double s = (e.matrix.a * m.a + e.matrix.b * m.b + e.matrix.c * m.c + e.matrix.d * m.d) >= 0 ? 1 : -1;
    const double num = std::max({std::fabs(e.matrix.a - s * m.a / ne), std::fabs(e.matrix.b - s * m.b / ne),
                                 std::fabs(e.matrix.c - s * m.c / ne), std::fabs(e.matrix.d - s * m.d / ne)});
    recovery = std::max(recovery, e.equivalent ? num : INFINITY);
    ++done;
  }
  return {done == 100 && gap <= 1e-11 && recovery <= 1e-8,
          std::to_string(done) + " transforms, mean sup-gap " + sci(gap) + " (tol 1e-11), matrix recovery " +
              sci(recovery) + " (tol 1e-8)"};
}

Outcome specializations() {
  std::mt19937_64 rng(1008);
  const Interval I{0.5, 2.5};
  std::uniform_real_distribution<double> u(0.51, 2.49);
  const std::array<std::pair<const char*, const char*>, 5> bajr = {
      {{"log(x)", "exp(0.5*x) + x"}, {"x^2", "1"}, {"sqrt(x)", "x"}, {"exp(-x)", "cosh(x)"}, {"1/(1 + x)", "x^(1/3)"}}};
  const std::array<std::pair<const char*, const char*>, 5> cauchy_gen = {
      {{"x^2", "x"}, {"exp(x)", "x"}, {"log(x)", "x"}, {"sin(x)", "x"}, {"x^3", "x^2 + x"}}};
  double gb = 0, gc = 0;
  for (auto [phi, p] : bajr) {
    const Func fphi = Func::parse(phi), fp = Func::parse(p);
    const MeanSpec s{validate_pair(fphi.times(fp), fp, I, 2), Measure::ebm()};
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng), y = u(rng);
      gb = std::max(gb, std::fabs(bajraktarevic(fphi, fp, x, y) - mean_eval(s, x, y)));
    }
  }
  for (auto [phi, psi] : cauchy_gen) {
    const Func fphi = Func::parse(phi), fpsi = Func::parse(psi);
    const MeanSpec s{validate_pair(fphi.derivative(), fpsi.derivative(), I, 2), Measure::lebesgue()};
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng), y = u(rng);
      gc = std::max(gc, std::fabs(cauchy(fphi, fpsi, x, y) - mean_eval(s, x, y)));
    }
  }
  return {gb <= 1e-10 && gc <= 1e-10, "Bajraktarevic " + sci(gb) + ", Cauchy " + sci(gc) + " (tol 1e-10)"};
}

Outcome negative_control() {
  const Interval I{-0.7, 0.7};
  const Measure mu = Measure::atoms({{0.0, 0.5}, {0.7, 0.5}});
  const EqualityReport r = check_N15(validate_pair("sin(x)", "cos(x)", I, 6), validate_pair("x", "1", I, 6), mu);
  const double psi_gap = r.find("phi_psi_equal")->constants.at("psi_gap");
  const double mean_gap = r.find("means_equal")->residual;
  return {psi_gap > 0.5 && mean_gap > 1e-4, "regime " + std::string(to_string(r.regime->regime)) + ", mu3 " +
                                                sci(r.regime->moments[3]) + ", Psi gap " + sci(psi_gap) +
                                                " (need > 0.5), mean sup-gap " + sci(mean_gap) + " (need > 1e-4)"};
}

Outcome determinism() {
  const std::string cmd = std::string(MEANLAB_CLI_PATH) +
                          " check-equality --f 'sin(x)' --g 'cos(x)' --F 'x' --G '1' --measure ebm"
                          " --lo -0.7 --hi 0.7 --format json";
  auto capture = [&] {
    std::string out;
    if (FILE* pipe = popen(cmd.c_str(), "r")) {
      std::array<char, 4096> buf{};
      std::size_t n = 0;
      while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
      pclose(pipe);
    }
    return out;
  };
  const std::string a = capture(), b = capture();
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"moment closed forms", moment_closed_forms},
      {"moment condition", moment_condition},
      {"derivative sequences", derivative_sequences},
      {"diagonal derivatives vs numeric oracle", diagonal_derivatives_oracle},
      {"equality witness, two-point measure", ebm_witness},
      {"equality witness, Lebesgue measure", ecm_witness},
      {"equivalence invariance", equivalence_invariance},
      {"specialization identities", specializations},
      {"negative control", negative_control},
      {"determinism", determinism},
  };
  std::cout << "seeds: pairs 3003/3004/3007, points 1003/1004/1007/1008\n";
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << c.name << ": " << o.detail << "\n";
  }
  std::cout << (10 - failed) << "/10 criteria pass\n";
  return failed ? 1 : 0;
}
