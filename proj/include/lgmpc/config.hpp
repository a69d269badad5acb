// Copyright 2026 The lgmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * @brief JSON scenario configuration and the built-in satellite cases.
 *
 * Every key is optional; missing keys keep the value of the base configuration. Infinite
 * bounds are written as null.
 */

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "simulator.hpp"

namespace lgmpc {

using Json = nlohmann::json;

namespace detail {

inline Json number_or_null(double v)
{
  if (std::isfinite(v)) { return v; }
  return nullptr;
}

inline double read_bound(const Json & j, double if_null)
{
  if (j.is_null()) { return if_null; }
  if (!j.is_number()) { throw ConfigError("expected a number or null, got " + j.dump()); }
  return j.get<double>();
}

inline Json to_json(const Vec3 & v) { return Json::array({v(0), v(1), v(2)}); }

inline Vec3 vec3_from(const Json & j, const char * what)
{
  if (!j.is_array() || j.size() != 3) { throw ConfigError(std::string(what) + ": expected an array of 3 numbers"); }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline Json to_json(const Mat3 & m)
{
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) { rows.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)})); }
  return rows;
}

/// Scalar s (s I), 3-array (diagonal) or 3x3 nested array.
inline Mat3 mat3_from(const Json & j, const char * what)
{
  if (j.is_number()) { return j.get<double>() * Mat3::Identity(); }
  if (j.is_array() && j.size() == 3 && j[0].is_number()) { return vec3_from(j, what).asDiagonal(); }
  if (j.is_array() && j.size() == 3) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) { m.row(r) = vec3_from(j[r], what).transpose(); }
    return m;
  }
  throw ConfigError(std::string(what) + ": expected scalar, 3-vector or 3x3 matrix");
}

inline Json box_to_json(const Box3 & b)
{
  Json lo = Json::array(), hi = Json::array();
  for (int i = 0; i < 3; ++i) {
    lo.push_back(number_or_null(b.lower(i)));
    hi.push_back(number_or_null(b.upper(i)));
  }
  return Json{{"lower", lo}, {"upper", hi}};
}

inline Box3 box_from(const Json & j, const char * what)
{
  if (j.is_number()) { return Box3::symmetric(j.get<double>()); }
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
    throw ConfigError(std::string(what) + ": expected {\"lower\": [...], \"upper\": [...]} or a symmetric bound");
  }
  Box3 b;
  for (int i = 0; i < 3; ++i) {
    b.lower(i) = read_bound(j["lower"].at(i), -std::numeric_limits<double>::infinity());
    b.upper(i) = read_bound(j["upper"].at(i), std::numeric_limits<double>::infinity());
  }
  return b;
}

template<typename E>
struct EnumName
{
  E value;
  const char * name;
};

inline constexpr EnumName<ControllerKind> kControllerNames[] = {{ControllerKind::Mpc, "mpc"}, {ControllerKind::Baseline, "baseline"}};
inline constexpr EnumName<Feedforward> kFeedforwardNames[] = {{Feedforward::Continuous, "continuous"}, {Feedforward::Zoh, "zoh"}};
inline constexpr EnumName<ReferenceKind> kReferenceNames[]  = {{ReferenceKind::Satellite, "satellite"},
   {ReferenceKind::PrintedRate, "printed_rate"},
   {ReferenceKind::Exponentials, "exponentials"},
   {ReferenceKind::Constant, "constant"}};
inline constexpr EnumName<InitialKind> kInitialNames[] = {{InitialKind::Nominal, "nominal"}, {InitialKind::Zero, "zero"}, {InitialKind::Custom, "custom"}};

template<typename E, std::size_t M>
const char * enum_name(const EnumName<E> (&table)[M], E v)
{
  for (const auto & e : table) {
    if (e.value == v) { return e.name; }
  }
  return "?";
}

template<typename E, std::size_t M>
E enum_from(const EnumName<E> (&table)[M], const Json & j, const char * what)
{
  const auto s = j.get<std::string>();
  for (const auto & e : table) {
    if (s == e.name) { return e.value; }
  }
  throw ConfigError(std::string(what) + ": unknown value \"" + s + "\"");
}

}  // namespace detail

inline Json to_json(const ScenarioConfig & c)
{
  using namespace detail;
  const MpcConfig & m = c.mpc;
  Json mpc{{"N", m.N},
    {"h", m.h},
    {"alpha", m.alpha},
    {"Q_R", to_json(m.Q_R)},
    {"Q_Omega", to_json(m.Q_Omega)},
    {"Q_u", to_json(m.Q_u)},
    {"Qf_R", to_json(m.Qf_R)},
    {"Qf_Omega", to_json(m.Qf_Omega)},
    {"u_box", box_to_json(m.u_box)},
    {"eR_box", m.eR_box ? box_to_json(*m.eR_box) : Json(nullptr)},
    {"eOmega_box", m.eOmega_box ? box_to_json(*m.eOmega_box) : Json(nullptr)},
    {"warm_start", m.warm_start},
    {"qp_tol", m.qp.tol},
    {"qp_max_iter", m.qp.max_iter}};
  return Json{{"name", c.name},
    {"duration", c.duration},
    {"seed", c.seed},
    {"controller", enum_name(kControllerNames, c.controller)},
    {"feedforward", enum_name(kFeedforwardNames, c.feedforward)},
    {"plant_alpha", c.plant_alpha},
    {"inertia", to_json(c.inertia)},
    {"noise", {{"sigma", c.noise_sigma}, {"on_perp", c.noise_on_perp}}},
    {"reference",
      {{"type", enum_name(kReferenceNames, c.reference.kind)},
        {"rates", to_json(c.reference.rates)},
        {"rotation_vector", to_json(c.reference.rotation_vector)}}},
    {"initial",
      {{"type", enum_name(kInitialNames, c.initial.kind)},
        {"eR_par", to_json(c.initial.eR_par)},
        {"eOmega", to_json(c.initial.eOmega)},
        {"attitude_scale", c.initial.attitude_scale}}},
    {"mpc", mpc},
    {"integrator",
      {{"rel_tol", c.integrator.rel_tol},
        {"abs_tol", c.integrator.abs_tol},
        {"initial_step", c.integrator.initial_step},
        {"max_step", number_or_null(c.integrator.max_step)},
        {"min_step", c.integrator.min_step}}}};
}

/// Overlays j onto base.
inline ScenarioConfig from_json(const Json & j, ScenarioConfig c = {})
{
  using namespace detail;
  if (!j.is_object()) { throw ConfigError("config: top level must be an object"); }
  try {
    if (j.contains("name")) { c.name = j["name"].get<std::string>(); }
    if (j.contains("duration")) { c.duration = j["duration"].get<double>(); }
    if (j.contains("seed")) { c.seed = j["seed"].get<std::uint64_t>(); }
    if (j.contains("controller")) { c.controller = enum_from(kControllerNames, j["controller"], "controller"); }
    if (j.contains("feedforward")) { c.feedforward = enum_from(kFeedforwardNames, j["feedforward"], "feedforward"); }
    if (j.contains("plant_alpha")) { c.plant_alpha = j["plant_alpha"].get<double>(); }
    if (j.contains("inertia")) { c.inertia = mat3_from(j["inertia"], "inertia"); }
    if (j.contains("noise")) {
      const Json & n = j["noise"];
      if (n.contains("sigma")) { c.noise_sigma = n["sigma"].get<double>(); }
      if (n.contains("on_perp")) { c.noise_on_perp = n["on_perp"].get<bool>(); }
    }
    if (j.contains("reference")) {
      const Json & r = j["reference"];
      if (r.contains("type")) { c.reference.kind = enum_from(kReferenceNames, r["type"], "reference.type"); }
      if (r.contains("rates")) { c.reference.rates = vec3_from(r["rates"], "reference.rates"); }
      if (r.contains("rotation_vector")) { c.reference.rotation_vector = vec3_from(r["rotation_vector"], "reference.rotation_vector"); }
    }
    if (j.contains("initial")) {
      const Json & i = j["initial"];
      if (i.contains("type")) { c.initial.kind = enum_from(kInitialNames, i["type"], "initial.type"); }
      if (i.contains("eR_par")) { c.initial.eR_par = vec3_from(i["eR_par"], "initial.eR_par"); }
      if (i.contains("eOmega")) { c.initial.eOmega = vec3_from(i["eOmega"], "initial.eOmega"); }
      if (i.contains("attitude_scale")) { c.initial.attitude_scale = i["attitude_scale"].get<double>(); }
    }
    if (j.contains("mpc")) {
      const Json & m = j["mpc"];
      MpcConfig & o  = c.mpc;
      if (m.contains("N")) { o.N = m["N"].get<std::size_t>(); }
      if (m.contains("h")) { o.h = m["h"].get<double>(); }
      if (m.contains("alpha")) { o.alpha = m["alpha"].get<double>(); }
      if (m.contains("Q_R")) { o.Q_R = mat3_from(m["Q_R"], "mpc.Q_R"); }
      if (m.contains("Q_Omega")) { o.Q_Omega = mat3_from(m["Q_Omega"], "mpc.Q_Omega"); }
      if (m.contains("Q_u")) { o.Q_u = mat3_from(m["Q_u"], "mpc.Q_u"); }
      if (m.contains("Qf_R")) { o.Qf_R = mat3_from(m["Qf_R"], "mpc.Qf_R"); }
      if (m.contains("Qf_Omega")) { o.Qf_Omega = mat3_from(m["Qf_Omega"], "mpc.Qf_Omega"); }
      if (m.contains("u_box")) { o.u_box = box_from(m["u_box"], "mpc.u_box"); }
      if (m.contains("eR_box")) { o.eR_box = m["eR_box"].is_null() ? std::nullopt : std::optional(box_from(m["eR_box"], "mpc.eR_box")); }
      if (m.contains("eOmega_box")) {
        o.eOmega_box = m["eOmega_box"].is_null() ? std::nullopt : std::optional(box_from(m["eOmega_box"], "mpc.eOmega_box"));
      }
      if (m.contains("warm_start")) { o.warm_start = m["warm_start"].get<bool>(); }
      if (m.contains("qp_tol")) { o.qp.tol = m["qp_tol"].get<double>(); }
      if (m.contains("qp_max_iter")) { o.qp.max_iter = m["qp_max_iter"].get<int>(); }
    }
    if (j.contains("integrator")) {
      const Json & s = j["integrator"];
      if (s.contains("rel_tol")) { c.integrator.rel_tol = s["rel_tol"].get<double>(); }
      if (s.contains("abs_tol")) { c.integrator.abs_tol = s["abs_tol"].get<double>(); }
      if (s.contains("initial_step")) { c.integrator.initial_step = s["initial_step"].get<double>(); }
      if (s.contains("max_step")) { c.integrator.max_step = read_bound(s["max_step"], std::numeric_limits<double>::infinity()); }
      if (s.contains("min_step")) { c.integrator.min_step = s["min_step"].get<double>(); }
    }
  } catch (const Json::exception & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline ScenarioConfig parse_config(const std::string & text, const ScenarioConfig & base = {})
{
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception & e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_json(j, base);
}

inline ScenarioConfig load_config(const std::string & path, const ScenarioConfig & base = {})
{
  std::ifstream in(path);
  if (!in) { throw ConfigError("config: cannot open " + path); }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

inline std::string serialize_config(const ScenarioConfig & c) { return to_json(c).dump(2); }

/// Field-by-field equality.
inline bool same_config(const ScenarioConfig & a, const ScenarioConfig & b)
{
  auto same_box = [](const std::optional<Box3> & x, const std::optional<Box3> & y) {
    if (x.has_value() != y.has_value()) { return false; }
    return !x || (x->lower == y->lower && x->upper == y->upper);
  };
  const MpcConfig &ma = a.mpc, &mb = b.mpc;
  return a.name == b.name && a.duration == b.duration && a.seed == b.seed && a.controller == b.controller && a.feedforward == b.feedforward
         && a.plant_alpha == b.plant_alpha && a.inertia == b.inertia && a.noise_sigma == b.noise_sigma && a.noise_on_perp == b.noise_on_perp
         && a.reference.kind == b.reference.kind && a.reference.rates == b.reference.rates
         && a.reference.rotation_vector == b.reference.rotation_vector && a.initial.kind == b.initial.kind
         && a.initial.eR_par == b.initial.eR_par && a.initial.eOmega == b.initial.eOmega
         && a.initial.attitude_scale == b.initial.attitude_scale && ma.N == mb.N && ma.h == mb.h && ma.alpha == mb.alpha
         && ma.Q_R == mb.Q_R && ma.Q_Omega == mb.Q_Omega && ma.Q_u == mb.Q_u && ma.Qf_R == mb.Qf_R && ma.Qf_Omega == mb.Qf_Omega
         && ma.u_box.lower == mb.u_box.lower && ma.u_box.upper == mb.u_box.upper && same_box(ma.eR_box, mb.eR_box)
         && same_box(ma.eOmega_box, mb.eOmega_box) && ma.warm_start == mb.warm_start && ma.qp.tol == mb.qp.tol
         && ma.qp.max_iter == mb.qp.max_iter && a.integrator.rel_tol == b.integrator.rel_tol && a.integrator.abs_tol == b.integrator.abs_tol
         && a.integrator.initial_step == b.integrator.initial_step && a.integrator.max_step == b.integrator.max_step
         && a.integrator.min_step == b.integrator.min_step;
}

/// Default seed for the built-in cases.
inline constexpr std::uint64_t kDefaultSeed = 1;

/**
 * @brief Satellite tracking scenarios.
 *
 * 1: control box +-10, no noise. 2: box +-6. 3: box +-10 with measurement noise sigma 0.03.
 * All: ESEO inertia, h = 0.2 s, N = 4, Q_R = 100 I, Q_Omega = 10 I, Q_u = 0.01 I, same terminal
 * weights, nominal initial error, 12 s.
 */
inline ScenarioConfig builtin_case(int which)
{
  ScenarioConfig c;
  c.seed = kDefaultSeed;
  switch (which) {
  case 1: c.name = "case1"; break;
  case 2:
    c.name      = "case2";
    c.mpc.u_box = Box3::symmetric(6.0);
    break;
  case 3:
    c.name        = "case3";
    c.noise_sigma = 0.03;
    break;
  default: throw ConfigError("builtin_case: expected 1, 2 or 3");
  }
  return c;
}

}  // namespace lgmpc
