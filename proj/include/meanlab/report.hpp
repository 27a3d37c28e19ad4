#pragma once

// JSON forms of measures, regimes and equality reports. Field order is
// fixed (ordered_json) so identical inputs serialize to identical bytes.

#include <cmath>
#include <string>
#include <string_view>

#include <json.hpp>

#include "meanlab/equality.hpp"
#include "meanlab/error.hpp"
#include "meanlab/measure.hpp"

#ifndef MEANLAB_VERSION
#define MEANLAB_VERSION "0.1.0"
#endif

namespace meanlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "meanlab-report/1";

namespace detail {
// Non-finite values become null rather than invalid JSON.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : Json(nullptr);
}
}  // namespace detail

/// Preset name ("ebm", "lebesgue") or a JSON object:
/// {"type":"atoms","atoms":[[t,w],...]} | {"type":"lebesgue"} |
/// {"type":"density","rho":"<expr>","order":N}.
inline Measure measure_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "ebm") return Measure::ebm();
    if (s == "lebesgue") return Measure::lebesgue();
    fail(ErrorKind::InvalidMeasure, "unknown measure preset '" + s + "'");
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail(ErrorKind::InvalidMeasure, "measure must be a preset name or an object with a \"type\" field");
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "atoms") {
      std::vector<std::pair<double, double>> tw;
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2) fail(ErrorKind::InvalidMeasure, "atoms are [t, w] pairs");
        tw.emplace_back(a[0].get<double>(), a[1].get<double>());
      }
      return Measure::atoms(std::move(tw));
    }
    if (type == "lebesgue") return Measure::lebesgue(j.value("order", 32));
    if (type == "density") return Measure::density(parse(j.at("rho").get<std::string>()), j.value("order", 32));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidMeasure, std::string("malformed measure: ") + e.what());
  }
  fail(ErrorKind::InvalidMeasure, "unknown measure type '" + type + "'");
}

/// Accepts a preset name or JSON text.
inline Measure measure_from_string(std::string_view text) {
  if (text == "ebm" || text == "lebesgue") return measure_from_json(Json(std::string(text)));
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidMeasure, "measure is neither a preset nor valid JSON: " + std::string(e.what()));
  }
  return measure_from_json(j);
}

inline Json to_json(const Measure& m) {
  Json j;
  switch (m.kind()) {
    case Measure::Kind::Atoms: {
      j["type"] = "atoms";
      if (m.name() == "ebm") j["preset"] = "ebm";
      Json atoms = Json::array();
      for (auto [t, w] : m.atom_list()) atoms.push_back({t, w});
      j["atoms"] = atoms;
      break;
    }
    case Measure::Kind::Lebesgue:
      j["type"] = "lebesgue";
      j["preset"] = "lebesgue";
      j["order"] = m.quadrature_order();
      break;
    case Measure::Kind::Density:
      j["type"] = "density";
      j["rho"] = to_string(*m.rho());
      j["order"] = m.quadrature_order();
      break;
  }
  return j;
}

inline Json to_json(const Tolerances& t) {
  return Json{{"phi_psi", t.phi_psi},       {"identity", t.identity},   {"mean", t.mean},
              {"derivative", t.derivative}, {"equivalence", t.equivalence}, {"quadratic", t.quadratic},
              {"constancy", t.constancy},   {"polynomial", t.polynomial}};
}

inline Json to_json(const RegimeInfo& r) {
  Json mu = Json::array();
  for (int k = 0; k <= r.moments.nmax(); ++k) mu.push_back(detail::number(r.moments[k]));
  return Json{{"regime", to_string(r.regime)},
              {"mu_hat_1", detail::number(r.moments.muHat1)},
              {"central_moments", mu},
              {"p", detail::optional_number(r.p)},
              {"q", detail::optional_number(r.q)},
              {"r", detail::optional_number(r.r)},
              {"moment_condition_6", detail::number(r.moment_condition_6)},
              {"mu4_eq_3mu2sq", r.mu4_eq_3mu2sq},
              {"mu6_eq_5mu2mu4", r.mu6_eq_5mu2mu4}};
}

inline Json to_json(const Verdict& v) {
  Json c = Json::object();
  for (const auto& [k, x] : v.constants) c[k] = detail::number(x);
  return Json{{"id", v.id},
              {"index", v.index},
              {"statement", v.statement},
              {"status", to_string(v.status)},
              {"holds", v.holds()},
              {"residual", detail::number(v.residual)},
              {"tolerance", v.tolerance},
              {"constants", c},
              {"note", v.note}};
}

inline Json to_json(const EqualityReport& r, bool with_arrays = true) {
  Json j;
  j["battery"] = r.battery;
  j["measure"] = r.measure;
  j["interval"] = {r.interval.lo, r.interval.hi};
  j["regularity"] = r.regularity;
  j["regime"] = r.regime ? to_json(*r.regime) : Json(nullptr);
  j["equivalent"] = r.equivalent;
  j["all_hold"] = r.all_hold();
  j["consistent"] = r.consistent;
  Json v = Json::array();
  for (const Verdict& x : r.verdicts) v.push_back(to_json(x));
  j["verdicts"] = v;
  j["fitted"] = {{"alpha", detail::optional_number(r.fitted.alpha)},
                 {"beta", detail::optional_number(r.fitted.beta)},
                 {"gamma", detail::optional_number(r.fitted.gamma)},
                 {"delta", detail::optional_number(r.fitted.delta)}};
  j["notes"] = r.notes;
  if (with_arrays) {
    auto arr = [](const std::vector<double>& xs) {
      Json a = Json::array();
      for (double x : xs) a.push_back(detail::number(x));
      return a;
    };
    j["grid"] = arr(r.grid);
    j["R"] = arr(r.R_values);
    j["S"] = arr(r.S_values);
  }
  return j;
}

/// Top-level envelope shared by every command.
inline Json envelope(std::string_view command, Json config) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = MEANLAB_VERSION;
  j["command"] = std::string(command);
  j["config"] = std::move(config);
  return j;
}

}  // namespace meanlab
