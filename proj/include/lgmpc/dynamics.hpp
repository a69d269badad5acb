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
 * @brief Rigid-body plant, its stable embedding into R^{3x3} x R^3, tracking error and an
 *        adaptive Dormand-Prince 4(5) integrator.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "types.hpp"

namespace lgmpc {

/// dR/dt = R hat(Omega),  dOmega/dt = J^-1 ((J Omega) x Omega + u).
inline AmbientRate rigid_body_vector_field(const AmbientState & s, const Vec3 & u, const Inertia & j)
{
  AmbientRate r;
  r.dX     = s.X * hat(s.Omega);
  r.dOmega = j.inverse() * ((j.matrix() * s.Omega).cross(s.Omega) + u);
  return r;
}

/// Rigid body with the drift -alpha grad V(X) that makes SO(3) x R^3 attracting.
inline AmbientRate embedded_vector_field(const AmbientState & s, const Vec3 & u, const Inertia & j, double alpha)
{
  if (!(alpha >= 0.0)) { throw DomainError("embedded_vector_field: alpha must be >= 0"); }
  AmbientRate r = rigid_body_vector_field(s, u, j);
  r.dX -= alpha * grad_V(s.X);
  return r;
}

using StateVector = Eigen::Matrix<double, 12, 1>;

/// Row-major X followed by Omega.
inline StateVector flatten(const AmbientState & s)
{
  StateVector y;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) { y(3 * r + c) = s.X(r, c); }
  }
  y.tail<3>() = s.Omega;
  return y;
}

inline AmbientState unflatten(const StateVector & y)
{
  AmbientState s;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) { s.X(r, c) = y(3 * r + c); }
  }
  s.Omega = y.tail<3>();
  return s;
}

inline StateVector flatten(const AmbientRate & r) { return flatten(AmbientState{r.dX, r.dOmega}); }

struct IntegratorSettings
{
  double rel_tol      = 1e-6;
  double abs_tol      = 1e-6;
  double initial_step = 0.0;  ///< 0 selects a step automatically
  double max_step     = std::numeric_limits<double>::infinity();
  double min_step     = 1e-12;
};

struct IntegrationStats
{
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/**
 * @brief Dormand-Prince 4(5) pair with PI step-size control.
 *
 * The local error estimate is checked componentwise against abs_tol + rel_tol * max(|y|, |y_new|).
 * One instance carries the last accepted step size so consecutive calls continue smoothly.
 */
template<int Dim>
class DormandPrince
{
public:
  using Vector = Eigen::Matrix<double, Dim, 1>;

  explicit DormandPrince(IntegratorSettings settings = {}) : settings_(settings)
  {
    if (!(settings_.rel_tol > 0.0) || !(settings_.abs_tol > 0.0)) {
      throw DomainError("IntegratorSettings: tolerances must be positive");
    }
  }

  const IntegrationStats & stats() const { return stats_; }
  const IntegratorSettings & settings() const { return settings_; }

  /// Integrates dy/dt = f(t, y) from t0 to t1 > t0 and returns y(t1).
  template<typename F>
  Vector integrate(F && f, double t0, double t1, Vector y)
  {
    if (!(t1 > t0)) { throw DomainError("integrate: t1 must exceed t0"); }

    // clang-format off
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // clang-format on

    double t   = t0;
    Vector k1  = f(t, y);
    double h   = initial_step(f, t0, t1, y, k1);
    double err_prev = 1e-4;

    while (t < t1) {
      bool last = false;
      if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::abs(t1)) {
        h    = t1 - t;
        last = true;
      }
      if (!(h >= settings_.min_step) && !last) {
        throw StepSizeUnderflow(underflow_message(h, t));
      }

      const Vector k2 = f(t + c2 * h, y + h * (a21 * k1));
      const Vector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Vector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vector k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vector k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vector k7 = f(t + h, y_new);

      const Vector err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double scale = settings_.abs_tol + settings_.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
        err = std::max(err, std::abs(err_vec(i)) / scale);
      }

      if (err <= 1.0) {
        t  = last ? t1 : t + h;
        y  = y_new;
        k1 = k7;
        ++stats_.accepted;
        // PI controller (Gustafsson): exponents 0.7/5 and 0.4/5.
        const double e   = std::max(err, 1e-10);
        double fac       = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        fac              = std::clamp(fac, 0.2, 10.0);
        err_prev         = std::max(err, 1e-4);
        if (!last) { h = std::min(h * fac, settings_.max_step); }
        h_last_ = h;
      } else {
        ++stats_.rejected;
        const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
        h *= fac;
        if (!(h >= settings_.min_step)) {
          throw StepSizeUnderflow(underflow_message(h, t));
        }
      }
    }
    return y;
  }

private:
  std::string underflow_message(double h, double t) const
  {
    std::ostringstream os;
    os << "integrate: step size " << h << " below minimum " << settings_.min_step << " at t = " << t;
    return os.str();
  }

  template<typename F>
  double initial_step(F & f, double t0, double t1, const Vector & y0, const Vector & f0)
  {
    const double span = t1 - t0;
    if (h_last_ > 0.0) { return std::min({h_last_, span, settings_.max_step}); }
    if (settings_.initial_step > 0.0) { return std::min({settings_.initial_step, span, settings_.max_step}); }

    // Hairer, Norsett & Wanner starting step heuristic.
    const Vector sc = (settings_.abs_tol + settings_.rel_tol * y0.array().abs()).matrix();
    const double d0 = (y0.array() / sc.array()).matrix().stableNorm() / std::sqrt(double(y0.size()));
    const double d1 = (f0.array() / sc.array()).matrix().stableNorm() / std::sqrt(double(y0.size()));
    double h0       = (d0 < 1e-5 || d1 < 1e-5 || !std::isfinite(d0 / d1)) ? 1e-6 : 0.01 * d0 / d1;
    h0              = std::min(h0, span);
    const Vector y1 = y0 + h0 * f0;
    const Vector f1 = f(t0 + h0, y1);
    const double d2 = ((f1 - f0).array() / sc.array()).matrix().stableNorm() / std::sqrt(double(y0.size())) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span, settings_.max_step});
  }

  IntegratorSettings settings_;
  IntegrationStats stats_;
  double h_last_ = 0.0;
};

/// Control signal over an integration interval, u(t).
using ControlSignal = std::function<Vec3(double)>;

/// Any of the plant fields, evaluated as field(state, u).
using AmbientField = std::function<AmbientRate(const AmbientState &, const Vec3 &)>;

/// Integrates an ambient field under a time-varying control from t0 to t1.
inline AmbientState integrate(DormandPrince<12> & solver,
  const AmbientField & field,
  const AmbientState & s0,
  const ControlSignal & control,
  double t0,
  double t1)
{
  auto rhs = [&](double t, const StateVector & y) -> StateVector { return flatten(field(unflatten(y), control(t))); };
  return unflatten(solver.integrate(rhs, t0, t1, flatten(s0)));
}

/// Zero-order hold: the control is the constant u over [t0, t1].
template<typename Derived>
AmbientState integrate(DormandPrince<12> & solver,
  const AmbientField & field,
  const AmbientState & s0,
  const Eigen::MatrixBase<Derived> & u,
  double t0,
  double t1)
{
  const Vec3 held = u;
  return integrate(solver, field, s0, ControlSignal([held](double) { return held; }), t0, t1);
}

/// Split tracking error of s against a reference sample: X R0^T - I and Omega - Omega0.
inline ErrorState error_state(const AmbientState & s, const ReferencePoint & ref)
{
  // (X - R0) R0^T equals X R0^T - I on rotations and is exactly zero when X == R0
  const Mat3 e = (s.X - ref.R0.matrix()) * ref.R0.matrix().transpose();
  ErrorState out;
  out.eR_par  = vee_par(e);
  out.eR_perp = proj_perp(e);
  out.eOmega  = s.Omega - ref.Omega0;
  return out;
}

}  // namespace lgmpc
