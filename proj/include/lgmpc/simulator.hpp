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
 * @brief Sampled-data closed loop: sample the plant, form the tracking error, optionally corrupt
 *        it with measurement noise, compute du with MPC or the baseline law, hold du over the
 *        sampling interval and integrate the nonlinear plant.
 */

#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "dynamics.hpp"
#include "mpc.hpp"
#include "reference.hpp"
#include "rng.hpp"

namespace lgmpc {

enum class ControllerKind { Mpc, Baseline };

/// How u0 enters the plant between samples.
enum class Feedforward {
  Continuous,  ///< u(t) = u0(t) + du_k
  Zoh,         ///< u(t) = u0(t_k) + du_k
};

enum class ReferenceKind {
  Satellite,     ///< exp(t e1^) exp(t e2^) exp(t e3^) with its exact body rate
  PrintedRate,   ///< printed angular velocity, attitude integrated from I
  Exponentials,  ///< exp(t a e1^) exp(t b e2^) exp(t c e3^), rates (a, b, c)
  Constant,      ///< fixed attitude exp(hat(rotation_vector)), at rest
};

struct ReferenceSpec
{
  ReferenceKind kind = ReferenceKind::Satellite;
  Vec3 rates = Vec3::Ones();
  Vec3 rotation_vector = Vec3::Zero();
};

enum class InitialKind {
  Nominal,  ///< eR_par from the skew part of R0(0.2) - R0(0), zero rate error
  Zero,     ///< start on the reference
  Custom,   ///< given eR_par and eOmega
};

struct InitialErrorSpec
{
  InitialKind kind = InitialKind::Nominal;
  Vec3 eR_par = Vec3::Zero();
  Vec3 eOmega = Vec3::Zero();
  /// X(0) is multiplied by this factor; 1 keeps the plant on SO(3).
  double attitude_scale = 1.0;
};

struct ScenarioConfig
{
  std::string name = "case1";
  MpcConfig mpc;
  Mat3 inertia = eseo_inertia().matrix();
  ReferenceSpec reference;
  InitialErrorSpec initial;
  double duration = 12.0;
  double noise_sigma = 0.0;
  /// Also corrupt the measured eR_perp (the QP ignores it).
  bool noise_on_perp = false;
  std::uint64_t seed = 0;
  ControllerKind controller = ControllerKind::Mpc;
  Feedforward feedforward = Feedforward::Continuous;
  /// Drift gain of the simulated plant; 0 integrates the rigid body as is.
  double plant_alpha = 0.0;
  IntegratorSettings integrator;
};

struct SimRow
{
  std::size_t k = 0;
  double t = 0.0;
  AmbientState state;
  ReferencePoint ref;
  ErrorState error;     ///< true error
  Vec3 meas_eR_par = Vec3::Zero();
  Vec3 meas_eOmega = Vec3::Zero();
  Vec3 u = Vec3::Zero();   ///< applied torque at t_k
  Vec3 du = Vec3::Zero();
  double qp_objective = 0.0;
  int qp_iterations = 0;
  int qp_active = 0;
  QpStatus qp_status = QpStatus::Solved;
  double norm_eR_par = 0.0;
  double norm_eR_perp = 0.0;
  double norm_eOmega = 0.0;
  double orth_residual = 0.0;
};

struct SimLog
{
  std::string scenario;
  std::uint64_t seed = 0;
  double h = 0.0;
  Box3 u_box;
  std::vector<SimRow> rows;
};

inline std::unique_ptr<ReferenceTrajectory> make_reference(const ScenarioConfig & cfg)
{
  const Inertia j(cfg.inertia);
  switch (cfg.reference.kind) {
  case ReferenceKind::Satellite: return std::make_unique<SatelliteReference>(j);
  case ReferenceKind::PrintedRate:
    return std::make_unique<PrintedRateReference>(j, cfg.duration + double(cfg.mpc.N + 2) * cfg.mpc.h);
  case ReferenceKind::Exponentials: return std::make_unique<ProductOfExponentialsReference>(j, cfg.reference.rates);
  case ReferenceKind::Constant: return std::make_unique<ConstantReference>(exp_so3(cfg.reference.rotation_vector));
  }
  throw ConfigError("unknown reference kind");
}

/// Plant state realizing an initial error: X(0) = proj_SO3((I + hat(eR_par)) R0(0)), Omega(0) = Omega0(0) + eOmega.
inline AmbientState initial_state(const ReferencePoint & ref0, const Vec3 & eR_par, const Vec3 & eOmega)
{
  AmbientState s;
  s.X     = project_to_so3((Mat3::Identity() + hat(eR_par)) * ref0.R0.matrix()).matrix();
  s.Omega = ref0.Omega0 + eOmega;
  return s;
}

/// Initial parallel error (R0(0.2) - R0(0))_par with zero rate error.
inline ErrorState initial_error_nominal(const ReferenceTrajectory & traj)
{
  ErrorState e;
  e.eR_par = vee_par(traj.sample(0.2).R0.matrix() - traj.sample(0.0).R0.matrix());
  return e;
}

inline AmbientState initial_state(const ScenarioConfig & cfg, const ReferenceTrajectory & traj)
{
  const ReferencePoint ref0 = traj.sample(0.0);
  AmbientState s;
  switch (cfg.initial.kind) {
  case InitialKind::Nominal: s = initial_state(ref0, initial_error_nominal(traj).eR_par, Vec3::Zero()); break;
  case InitialKind::Zero: s = initial_state(ref0, Vec3::Zero(), Vec3::Zero()); break;
  case InitialKind::Custom: s = initial_state(ref0, cfg.initial.eR_par, cfg.initial.eOmega); break;
  }
  s.X *= cfg.initial.attitude_scale;
  return s;
}

inline std::size_t sample_count(const ScenarioConfig & cfg)
{
  return static_cast<std::size_t>(std::llround(cfg.duration / cfg.mpc.h));
}

/// Checks run before a scenario starts; empty when valid.
inline std::vector<std::string> validate(const ScenarioConfig & cfg)
{
  std::vector<std::string> issues = validate(cfg.mpc);
  if (!(cfg.duration > 0.0)) { issues.emplace_back("duration must be positive"); }
  if (!(cfg.noise_sigma >= 0.0)) { issues.emplace_back("noise sigma must be >= 0"); }
  if (!(cfg.initial.attitude_scale > 0.0)) { issues.emplace_back("initial attitude scale must be positive (det X0 > 0)"); }
  if (!(cfg.plant_alpha >= 0.0)) { issues.emplace_back("plant alpha must be >= 0"); }
  try {
    Inertia j(cfg.inertia);
  } catch (const Error & e) {
    issues.emplace_back(e.what());
  }
  return issues;
}

/**
 * @brief Runs the closed loop for duration / h sampling intervals.
 *
 * Rows are logged at t_k = k h for k = 0..K; the last row closes the run without integrating
 * further. Errors from the integrator or solver are rethrown as SimulationError with the step.
 */
inline SimLog run_scenario(const ScenarioConfig & cfg)
{
  if (auto issues = validate(cfg); !issues.empty()) { throw ConfigError(cfg.name + ": " + issues.front()); }

  const Inertia j(cfg.inertia);
  const auto traj        = make_reference(cfg);
  const std::size_t K    = sample_count(cfg);
  const std::size_t N    = cfg.mpc.N;
  const double h         = cfg.mpc.h;
  const ReferenceGrid grid(*traj, h, K + N + 1);
  verify_assumption2([&grid, h](double t) { return grid[static_cast<std::size_t>(std::llround(t / h))].R0.matrix(); },
    uniform_grid(0.0, double(K + N) * h, h));

  const AmbientField field = cfg.plant_alpha > 0.0
                             ? AmbientField([&j, a = cfg.plant_alpha](const AmbientState & s, const Vec3 & u) { return embedded_vector_field(s, u, j, a); })
                             : AmbientField([&j](const AmbientState & s, const Vec3 & u) { return rigid_body_vector_field(s, u, j); });

  DormandPrince<12> solver(cfg.integrator);
  MpcController mpc(cfg.mpc);
  const GainPair gains = default_discrete_gains(h);
  GaussianSource noise(cfg.seed);

  SimLog log;
  log.scenario = cfg.name;
  log.seed     = cfg.seed;
  log.h        = h;
  log.u_box    = cfg.mpc.u_box;
  log.rows.reserve(K + 1);

  AmbientState s = initial_state(cfg, *traj);
  std::vector<Vec3> u0_window(N);

  for (std::size_t k = 0; k <= K; ++k) {
    try {
      SimRow row;
      row.k     = k;
      row.t     = double(k) * h;
      row.state = s;
      row.ref   = grid[k];
      row.error = error_state(s, row.ref);

      ErrorState measured = row.error;
      if (cfg.noise_sigma > 0.0) {
        for (int i = 0; i < 3; ++i) { measured.eR_par(i) += cfg.noise_sigma * noise.next(); }
        for (int i = 0; i < 3; ++i) { measured.eOmega(i) += cfg.noise_sigma * noise.next(); }
        if (cfg.noise_on_perp) {
          for (int r = 0; r < 3; ++r) {
            for (int c = r; c < 3; ++c) {
              const double w       = cfg.noise_sigma * noise.next();
              measured.eR_perp(r, c) += w;
              if (c != r) { measured.eR_perp(c, r) += w; }
            }
          }
        }
      }
      row.meas_eR_par = measured.eR_par;
      row.meas_eOmega = measured.eOmega;

      if (cfg.controller == ControllerKind::Mpc) {
        const DiscreteLinearModel model = discretize(grid, j, cfg.mpc.alpha, k, N);
        for (std::size_t i = 0; i < N; ++i) { u0_window[i] = grid[k + i].u0; }
        const MpcStepResult r = mpc.step(measured, model, u0_window);
        row.du            = r.du;
        row.qp_objective  = r.solution.objective;
        row.qp_iterations = r.solution.iterations;
        row.qp_active     = r.solution.active;
        row.qp_status     = r.solution.status;
      } else {
        const Vec3 du = discrete_law(measured, grid[k], grid[k + 1], j, cfg.mpc.alpha, h, gains);
        row.du        = (row.ref.u0 + du).cwiseMax(cfg.mpc.u_box.lower).cwiseMin(cfg.mpc.u_box.upper) - row.ref.u0;
      }
      row.u = row.ref.u0 + row.du;

      row.norm_eR_par   = row.error.eR_par.norm();
      row.norm_eR_perp  = row.error.eR_perp.norm();
      row.norm_eOmega   = row.error.eOmega.norm();
      row.orth_residual = orthogonality_residual(s.X);
      log.rows.push_back(row);

      if (k < K) {
        const Vec3 du = row.du;
        ControlSignal control;
        if (cfg.feedforward == Feedforward::Continuous) {
          control = [&traj, du](double t) { return Vec3(traj->feedforward(t) + du); };
        } else {
          control = [u = row.u](double) { return u; };
        }
        s = integrate(solver, field, s, control, row.t, double(k + 1) * h);
      }
    } catch (const SimulationError &) {
      throw;
    } catch (const std::exception & e) {
      throw SimulationError(k, e.what());
    }
  }
  return log;
}

struct SimSummary
{
  double settling_time = 0.0;  ///< first t after which |eR_par| stays below the threshold
  bool settled = true;
  double max_abs_u = 0.0;
  std::size_t saturated_samples = 0;
  double rms_eR_par_tail = 0.0;  ///< over the final 25 % of the run
  double rms_eOmega_tail = 0.0;
  double peak_eR_par = 0.0;
  double peak_eOmega = 0.0;
  double tracking_cost = 0.0;  ///< sum of |eR_par|^2_Q_R + |eOmega|^2_Q_Omega + |du|^2_Q_u over samples
};

inline SimSummary summarize(const SimLog & log, double threshold = 0.02, const MpcConfig & weights = {})
{
  SimSummary s;
  if (log.rows.empty()) { return s; }
  const double t_end = log.rows.back().t;

  std::size_t last_above = log.rows.size();
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    if (log.rows[i].norm_eR_par >= threshold) { last_above = i; }
  }
  if (last_above == log.rows.size()) {
    s.settling_time = log.rows.front().t;
  } else if (last_above + 1 < log.rows.size()) {
    s.settling_time = log.rows[last_above + 1].t;
  } else {
    s.settled       = false;
    s.settling_time = std::numeric_limits<double>::infinity();
  }

  double sum_r = 0.0, sum_w = 0.0;
  std::size_t tail = 0;
  for (const SimRow & r : log.rows) {
    s.max_abs_u   = std::max(s.max_abs_u, r.u.cwiseAbs().maxCoeff());
    s.peak_eR_par = std::max(s.peak_eR_par, r.norm_eR_par);
    s.peak_eOmega = std::max(s.peak_eOmega, r.norm_eOmega);
    bool saturated = false;
    for (int i = 0; i < 3; ++i) {
      const double lo = log.u_box.lower(i), hi = log.u_box.upper(i);
      const double tol = 1e-9 * (1.0 + std::abs(r.u(i)));
      if ((std::isfinite(lo) && r.u(i) <= lo + tol) || (std::isfinite(hi) && r.u(i) >= hi - tol)) { saturated = true; }
    }
    if (saturated) { ++s.saturated_samples; }
    if (r.t >= 0.75 * t_end) {
      sum_r += r.norm_eR_par * r.norm_eR_par;
      sum_w += r.norm_eOmega * r.norm_eOmega;
      ++tail;
    }
    s.tracking_cost += r.error.eR_par.dot(weights.Q_R * r.error.eR_par) + r.error.eOmega.dot(weights.Q_Omega * r.error.eOmega)
                       + r.du.dot(weights.Q_u * r.du);
  }
  if (tail > 0) {
    s.rms_eR_par_tail = std::sqrt(sum_r / double(tail));
    s.rms_eOmega_tail = std::sqrt(sum_w / double(tail));
  }
  return s;
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> csv_columns()
{
  std::vector<std::string> cols = {"k", "t"};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) { cols.push_back("X" + std::to_string(r) + std::to_string(c)); }
  }
  for (const char * base : {"Omega_", "Omega0_", "u0_", "meas_eRpar_", "meas_eOmega_", "eRpar_", "eOmega_", "u_", "du_"}) {
    for (int i = 1; i <= 3; ++i) { cols.push_back(base + std::to_string(i)); }
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) { cols.push_back("R0_" + std::to_string(r) + std::to_string(c)); }
  }
  for (const char * c : {"norm_eRpar", "norm_eRperp", "norm_eOmega", "orth_residual", "qp_objective", "qp_iterations", "qp_active", "qp_status"}) {
    cols.emplace_back(c);
  }
  return cols;
}

inline void write_csv(std::ostream & os, const SimLog & log)
{
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) { os << (i ? "," : "") << cols[i]; }
  os << '\n';
  for (const SimRow & r : log.rows) {
    std::string line = std::to_string(r.k) + "," + format_double(r.t);
    auto put         = [&line](double v) { line += "," + format_double(v); };
    auto put3        = [&put](const Vec3 & v) { put(v(0)), put(v(1)), put(v(2)); };
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) { put(r.state.X(a, b)); }
    }
    put3(r.state.Omega);
    put3(r.ref.Omega0);
    put3(r.ref.u0);
    put3(r.meas_eR_par);
    put3(r.meas_eOmega);
    put3(r.error.eR_par);
    put3(r.error.eOmega);
    put3(r.u);
    put3(r.du);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) { put(r.ref.R0.matrix()(a, b)); }
    }
    put(r.norm_eR_par);
    put(r.norm_eR_perp);
    put(r.norm_eOmega);
    put(r.orth_residual);
    put(r.qp_objective);
    line += "," + std::to_string(r.qp_iterations) + "," + std::to_string(r.qp_active) + "," + to_string(r.qp_status);
    os << line << '\n';
  }
}

/// "<scenario>_<seed>.csv"
inline std::string csv_file_name(const SimLog & log) { return log.scenario + "_" + std::to_string(log.seed) + ".csv"; }

}  // namespace lgmpc
