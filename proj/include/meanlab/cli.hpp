#pragma once

// Command-line front end. run() parses arguments, executes one
// subcommand and writes a text or JSON report. Exit codes: 0 success,
// 2 validation or usage failure, 1 internal error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meanlab/meanlab.hpp"
#include "meanlab/report.hpp"

namespace meanlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

struct RunConfig {
  std::string command;
  std::string f, g, F, G;
  std::optional<double> lo, hi;
  std::string measure = "ebm";
  std::optional<double> x, y;
  int nmax = 6;
  int kmax = 6;
  bool numeric = false;
  std::string battery = "auto";
  int grid = 65;
  int mean_grid = 50;
  std::vector<std::string> tol_overrides;
  double alpha = 0.0;
  std::string phi = "x";
  bool cauchy_flavor = false;
  bool arrays = true;
  std::string format = "text";
  std::string output;
};

namespace detail {

using meanlab::detail::format_number;

inline Tolerances parse_tolerances(const std::vector<std::string>& items) {
  Tolerances t;
  const std::pair<const char*, double*> fields[] = {
      {"phi_psi", &t.phi_psi},         {"identity", &t.identity},   {"mean", &t.mean},
      {"derivative", &t.derivative},   {"equivalence", &t.equivalence}, {"quadratic", &t.quadratic},
      {"constancy", &t.constancy},     {"polynomial", &t.polynomial}};
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::UsageError, "tolerance override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    double* slot = nullptr;
    for (auto [name, ptr] : fields)
      if (key == name) slot = ptr;
    if (!slot) fail(ErrorKind::UsageError, "unknown tolerance '" + key + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorKind::UsageError, "tolerance '" + key + "' is not a number");
    }
    if (!(v > 0) || !std::isfinite(v)) fail(ErrorKind::UsageError, "tolerance '" + key + "' must be positive");
    *slot = v;
  }
  return t;
}

inline Interval interval_of(const RunConfig& c) {
  if (!c.lo || !c.hi) fail(ErrorKind::UsageError, "--lo and --hi are required for " + c.command);
  return {*c.lo, *c.hi};
}

inline std::string fmt(double v) { return std::isfinite(v) ? format_number(v) : (std::isnan(v) ? "nan" : v > 0 ? "inf" : "-inf"); }

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "-"; }

inline Json detail_opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Config echo: only the fields the command reads, in a fixed order.
inline Json config_json(const RunConfig& c, const std::optional<Tolerances>& tol) {
  Json j;
  auto interval = [&] {
    if (c.lo) j["lo"] = *c.lo;
    if (c.hi) j["hi"] = *c.hi;
  };
  if (c.command == "eval") {
    j["f"] = c.f;
    j["g"] = c.g;
    j["measure"] = c.measure;
    interval();
    j["x"] = detail_opt(c.x);
    j["y"] = detail_opt(c.y);
  } else if (c.command == "moments") {
    j["measure"] = c.measure;
    j["nmax"] = c.nmax;
  } else if (c.command == "classify") {
    j["measure"] = c.measure;
  } else if (c.command == "derivatives") {
    j["f"] = c.f;
    j["g"] = c.g;
    j["measure"] = c.measure;
    interval();
    j["x"] = detail_opt(c.x);
    j["kmax"] = c.kmax;
    j["numeric"] = c.numeric;
  } else if (c.command == "check-equality") {
    j["f"] = c.f;
    j["g"] = c.g;
    j["F"] = c.F;
    j["G"] = c.G;
    j["measure"] = c.measure;
    interval();
    j["battery"] = c.battery;
    j["grid"] = c.grid;
    j["mean_grid"] = c.mean_grid;
    if (tol) j["tolerances"] = to_json(*tol);
  } else if (c.command == "make-pair") {
    j["alpha"] = c.alpha;
    j["phi"] = c.phi;
    j["cauchy"] = c.cauchy_flavor;
    interval();
  }
  j["format"] = c.format;
  return j;
}

struct Output {
  Json result;
  std::string text;
};

inline Output cmd_eval(const RunConfig& c) {
  if (!c.x || !c.y) fail(ErrorKind::UsageError, "--x and --y are required for eval");
  const Measure mu = measure_from_string(c.measure);
  const Func f = Func::parse(c.f), g = Func::parse(c.g);
  double m = 0.0;
  if (c.lo || c.hi) {
    const FunctionPair p = validate_pair(f, g, interval_of(c), 2);
    m = mean_eval(MeanSpec{p, mu}, *c.x, *c.y);
  } else {
    // no interval given: validate on the segment between the two points
    const double a = std::min(*c.x, *c.y), b = std::max(*c.x, *c.y);
    if (a < b) validate_pair(f, g, {a, b}, 2);
    m = mean_eval(f, g, mu, *c.x, *c.y);
  }
  return {Json{{"mean", meanlab::detail::number(m)}}, fmt(m) + "\n"};
}

inline Output cmd_moments(const RunConfig& c) {
  if (c.nmax < 2 || c.nmax > 16) fail(ErrorKind::UsageError, "--nmax must be in 2..16");
  const Measure mu = measure_from_string(c.measure);
  const MomentData md = moments(mu, std::max(c.nmax, 6));
  Json r;
  r["measure"] = to_json(mu);
  r["mu_hat_1"] = md.muHat1;
  Json central = Json::array();
  std::ostringstream t;
  t << "mu_hat_1 = " << fmt(md.muHat1) << "\n";
  for (int k = 0; k <= c.nmax; ++k) {
    central.push_back(md[k]);
    if (k >= 2) t << "mu" << k << " = " << fmt(md[k]) << "\n";
  }
  r["central_moments"] = central;
  const RegimeInfo info = classify_moments(md);
  r["p"] = meanlab::detail::optional_number(info.p);
  r["moment_condition_6"] = info.moment_condition_6;
  t << "p = " << fmt(info.p) << "\n";
  t << "moment_condition_6 = " << fmt(info.moment_condition_6) << "\n";
  return {r, t.str()};
}

inline Output cmd_classify(const RunConfig& c) {
  const Measure mu = measure_from_string(c.measure);
  const RegimeInfo info = classify(mu);
  std::ostringstream t;
  t << "regime = " << to_string(info.regime) << "\n"
    << "p = " << fmt(info.p) << "\n"
    << "q = " << fmt(info.q) << "\n"
    << "r = " << fmt(info.r) << "\n"
    << "moment_condition_6 = " << fmt(info.moment_condition_6) << "\n"
    << "mu4 = 3 mu2^2: " << (info.mu4_eq_3mu2sq ? "yes" : "no") << "\n"
    << "mu6 = 5 mu2 mu4: " << (info.mu6_eq_5mu2mu4 ? "yes" : "no") << "\n";
  Json r;
  r["measure"] = to_json(mu);
  r["classification"] = to_json(info);
  return {r, t.str()};
}

inline Output cmd_derivatives(const RunConfig& c) {
  if (!c.x) fail(ErrorKind::UsageError, "--x is required for derivatives");
  if (c.kmax < 1 || c.kmax > 6) fail(ErrorKind::UsageError, "--kmax must be in 1..6");
  const Measure mu = measure_from_string(c.measure);
  const FunctionPair p = validate_pair(c.f, c.g, interval_of(c), 6);
  const auto d = diagonal_derivatives(p, mu, *c.x);
  Json r;
  Json closed = Json::array();
  std::ostringstream t;
  for (int k = 1; k <= c.kmax; ++k) closed.push_back(meanlab::detail::number(d[static_cast<std::size_t>(k - 1)]));
  r["closed_form"] = closed;
  std::optional<NumericDerivatives> num;
  if (c.numeric) {
    num = diagonal_derivatives_numeric(MeanSpec{p, mu}, *c.x, c.kmax);
    Json vals = Json::array(), radii = Json::array();
    for (std::size_t k = 0; k < num->d.size(); ++k) {
      vals.push_back(meanlab::detail::number(num->d[k]));
      radii.push_back(num->h[k]);
    }
    r["numeric"] = {{"values", vals}, {"radius", radii}, {"condition", num->condition},
                    {"fit_residual", num->fit_residual}};
  }
  for (int k = 1; k <= c.kmax; ++k) {
    t << "m^(" << k << ")(0) = " << fmt(d[static_cast<std::size_t>(k - 1)]);
    if (num) t << "  numeric " << fmt(num->d[static_cast<std::size_t>(k - 1)]);
    t << "\n";
  }
  return {r, t.str()};
}

inline EqualityReport run_battery(const std::string& battery, const FunctionPair& A, const FunctionPair& B,
                                  const Measure& mu, const EqualityOptions& opt) {
  std::string b = battery;
  if (b == "auto") {
    if (mu.name() == "ebm") b = "bajraktarevic";
    else if (mu.name() == "lebesgue") b = "cauchy";
    else {
      switch (classify(mu).regime) {
        case Regime::Mu3Nonzero: b = "mu3_nonzero"; break;
        case Regime::Mu3ZeroMu5Nonzero: b = "mu3_zero_mu5_nonzero"; break;
        default: b = "even_moments"; break;
      }
    }
  }
  if (b == "bajraktarevic") {
    if (mu.name() != "ebm") fail(ErrorKind::NotApplicable, "the bajraktarevic battery needs --measure ebm");
    return check_EBM(A, B, opt);
  }
  if (b == "cauchy") {
    if (mu.name() != "lebesgue") fail(ErrorKind::NotApplicable, "the cauchy battery needs --measure lebesgue");
    return check_ECM(A, B, opt);
  }
  if (b == "mu3_nonzero") return check_N15(A, B, mu, opt);
  if (b == "mu3_zero_mu5_nonzero") return check_N25(A, B, mu, opt);
  if (b == "even_moments") return check_N3(A, B, mu, opt);
  fail(ErrorKind::UsageError, "unknown battery '" + battery + "'");
}

inline std::string report_text(const EqualityReport& r) {
  std::ostringstream t;
  t << "battery " << r.battery << " on (" << fmt(r.interval.lo) << ", " << fmt(r.interval.hi) << "), measure "
    << r.measure << "\n";
  if (r.regime) t << "regime " << to_string(r.regime->regime) << "\n";
  t << "equivalent pairs: " << (r.equivalent ? "yes" : "no") << "\n";
  for (const Verdict& v : r.verdicts) {
    t << "  ";
    if (v.index) t << "(" << v.index << ") ";
    t << v.id << ": " << to_string(v.status) << "  residual " << fmt(v.residual) << " (tol " << fmt(v.tolerance) << ")";
    for (const auto& [k, x] : v.constants) t << "  " << k << "=" << fmt(x);
    if (!v.note.empty()) t << "  [" << v.note << "]";
    t << "\n";
  }
  t << "fitted: alpha=" << fmt(r.fitted.alpha) << " beta=" << fmt(r.fitted.beta) << " gamma=" << fmt(r.fitted.gamma)
    << " delta=" << fmt(r.fitted.delta) << "\n";
  for (const auto& n : r.notes) t << "note: " << n << "\n";
  t << "all assertions hold: " << (r.all_hold() ? "yes" : "no") << "\n";
  return t.str();
}

inline Output cmd_check_equality(const RunConfig& c, const Tolerances& tol) {
  if (c.grid < 8 || c.mean_grid < 4) fail(ErrorKind::UsageError, "--grid must be >= 8 and --mean-grid >= 4");
  const Measure mu = measure_from_string(c.measure);
  const Interval I = interval_of(c);
  const FunctionPair A = validate_pair(c.f, c.g, I, 6);
  const FunctionPair B = validate_pair(c.F, c.G, I, 6);
  EqualityOptions opt;
  opt.grid_size = c.grid;
  opt.mean_grid = c.mean_grid;
  opt.tol = tol;
  const EqualityReport r = run_battery(c.battery, A, B, mu, opt);
  return {Json{{"report", to_json(r, c.arrays)}}, report_text(r)};
}

inline Output cmd_make_pair(const RunConfig& c) {
  const FunctionPair p = make_sincos_pair(c.alpha, parse(c.phi), interval_of(c), c.cauchy_flavor);
  const std::string f = to_string(*p.f.expr()), g = to_string(*p.g.expr());
  return {Json{{"f", f}, {"g", g}, {"validated_order", p.validated_order}},
          "f = " + f + "\ng = " + g + "\n"};
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"meanlab: generalized quasiarithmetic means and their equality", "meanlab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto common = [&](CLI::App* s) {
    s->add_option("--measure", c.measure, "Measure preset (ebm, lebesgue) or JSON text")->capture_default_str();
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    s->add_option("--output,-o", c.output, "Write the report to this file instead of stdout");
  };
  auto pair_opts = [&](CLI::App* s) {
    s->add_option("--f", c.f, "Numerator generator f(x)")->required();
    s->add_option("--g", c.g, "Denominator generator g(x)")->required();
  };
  auto interval_opts = [&](CLI::App* s, bool required) {
    auto* lo = s->add_option("--lo", c.lo, "Left end of the interval");
    auto* hi = s->add_option("--hi", c.hi, "Right end of the interval");
    if (required) lo->required(), hi->required();
    else lo->needs(hi), hi->needs(lo);
  };

  CLI::App* eval = app.add_subcommand("eval", "Evaluate M_{f,g;mu}(x, y)");
  pair_opts(eval);
  interval_opts(eval, false);
  eval->add_option("--x", c.x)->required();
  eval->add_option("--y", c.y)->required();
  common(eval);

  CLI::App* mom = app.add_subcommand("moments", "Centralized moments of a measure");
  mom->add_option("--nmax", c.nmax, "Highest moment order")->capture_default_str();
  common(mom);

  CLI::App* cls = app.add_subcommand("classify", "Moment regime of a measure");
  common(cls);

  CLI::App* der = app.add_subcommand("derivatives", "Derivatives of u -> M(x + (1-mu1)u, x - mu1 u) at u = 0");
  pair_opts(der);
  interval_opts(der, true);
  der->add_option("--x", c.x)->required();
  der->add_option("--kmax", c.kmax, "Highest derivative order (<= 6)")->capture_default_str();
  der->add_flag("--numeric", c.numeric, "Also run the polynomial-fit numeric estimate");
  common(der);

  CLI::App* chk = app.add_subcommand("check-equality", "Decide M_{f,g;mu} = M_{F,G;mu} on a grid");
  pair_opts(chk);
  chk->add_option("--F", c.F, "Second pair numerator")->required();
  chk->add_option("--G", c.G, "Second pair denominator")->required();
  interval_opts(chk, true);
  chk->add_option("--battery", c.battery, "Assertion battery")
      ->check(CLI::IsMember({"auto", "bajraktarevic", "cauchy", "mu3_nonzero", "mu3_zero_mu5_nonzero", "even_moments"}))
      ->capture_default_str();
  chk->add_option("--grid", c.grid, "1D grid size")->capture_default_str();
  chk->add_option("--mean-grid", c.mean_grid, "Mean comparisons use mean-grid^2 points")->capture_default_str();
  chk->add_option("--tol", c.tol_overrides, "Tolerance override key=value (repeatable)");
  chk->add_flag("!--no-arrays", c.arrays, "Omit the grid, R and S arrays from JSON");
  common(chk);

  CLI::App* mk = app.add_subcommand("make-pair", "Build (S_alpha(phi), C_alpha(phi)), optionally times phi'");
  mk->add_option("--alpha", c.alpha)->required();
  mk->add_option("--phi", c.phi, "Inner function phi(x)")->capture_default_str();
  mk->add_flag("--cauchy", c.cauchy_flavor, "Multiply both components by phi'");
  interval_opts(mk, true);
  common(mk);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitValidation;
  }
  c.command = app.get_subcommands().front()->get_name();

  std::optional<Tolerances> tol;
  Json report;
  int code = kExitOk;
  std::string text;
  try {
    if (c.command == "check-equality") tol = detail::parse_tolerances(c.tol_overrides);
    report = envelope(c.command, detail::config_json(c, tol));
    detail::Output o;
    if (c.command == "eval") o = detail::cmd_eval(c);
    else if (c.command == "moments") o = detail::cmd_moments(c);
    else if (c.command == "classify") o = detail::cmd_classify(c);
    else if (c.command == "derivatives") o = detail::cmd_derivatives(c);
    else if (c.command == "check-equality") o = detail::cmd_check_equality(c, *tol);
    else o = detail::cmd_make_pair(c);
    report["result"] = std::move(o.result);
    text = std::move(o.text);
  } catch (const Error& e) {
    code = kExitValidation;
    if (report.is_null()) report = envelope(c.command, Json::object());
    report["error"] = {{"kind", std::string(to_string(e.kind()))},
                       {"message", e.what()},
                       {"where", meanlab::detail::optional_number(e.where())}};
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }

  const bool json = c.format == "json";
  if (!json && code != kExitOk) return code;
  const std::string payload = json ? report.dump(2) + "\n" : text;
  if (c.output.empty()) {
    out << payload;
  } else {
    std::ofstream file(c.output, std::ios::binary);
    if (!file || !(file << payload)) {
      err << "error: cannot write " << c.output << "\n";
      return kExitInternal;
    }
  }
  return code;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace meanlab::cli
