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
 * @brief Reference attitude trajectories and the uniform bound check on R0 R0^T.
 */

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "types.hpp"

namespace lgmpc {

/// Feedforward torque that makes (R0, Omega0) a solution of the rigid-body equations.
inline Vec3 feedforward_torque(const Inertia & j, const Vec3 & omega0, const Vec3 & omega0_dot)
{
  return j.matrix() * omega0_dot - (j.matrix() * omega0).cross(omega0);
}

/// Time-parametrized reference. Implementations are immutable and thread-safe.
class ReferenceTrajectory
{
public:
  virtual ~ReferenceTrajectory() = default;
  virtual ReferencePoint sample(double t) const = 0;

  /// u0(t) alone; override when the attitude is expensive to evaluate.
  virtual Vec3 feedforward(double t) const { return sample(t).u0; }
};

/**
 * @brief R0(t) = exp(t a e1^) exp(t b e2^) exp(t c e3^) with its exact body rate.
 *
 * Omega0 = R0^T dR0/dt and its derivative are evaluated in closed form, so u0 carries no
 * differentiation noise.
 */
class ProductOfExponentialsReference : public ReferenceTrajectory
{
public:
  ProductOfExponentialsReference(Inertia j, Vec3 rates) : j_(std::move(j)), rates_(std::move(rates)) {}

  ReferencePoint sample(double t) const override
  {
    const double a = rates_.x(), b = rates_.y(), c = rates_.z();
    const Mat3 rx = exp_so3(Vec3(a * t, 0, 0)).matrix();
    const Mat3 ry = exp_so3(Vec3(0, b * t, 0)).matrix();
    const Mat3 rz = exp_so3(Vec3(0, 0, c * t)).matrix();
    const Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY(), e3 = Vec3::UnitZ();

    const Vec3 p = rz.transpose() * ry.transpose() * e1;
    const Vec3 q = rz.transpose() * e2;

    ReferencePoint out;
    out.t      = t;
    out.R0     = Rotation::unchecked(rx * ry * rz);
    out.Omega0 = a * p + b * q + c * e3;
    const Vec3 omega_dot =
      a * (-c * e3.cross(p) - b * rz.transpose() * e2.cross(ry.transpose() * e1)) - b * c * e3.cross(q);
    out.u0 = feedforward_torque(j_, out.Omega0, omega_dot);
    return out;
  }

  const Vec3 & rates() const { return rates_; }

private:
  Inertia j_;
  Vec3 rates_;
};

/// Body rate of exp(t e1^) exp(t e2^) exp(t e3^): (cos^2 t + sin t, cos t - sin t cos t, 1 + sin t).
inline Vec3 satellite_body_rate(double t)
{
  const double s = std::sin(t), c = std::cos(t);
  return Vec3(c * c + s, c - s * c, 1.0 + s);
}

inline Vec3 satellite_body_rate_dot(double t)
{
  const double s = std::sin(t), c = std::cos(t);
  return Vec3(c - 2.0 * s * c, -s - std::cos(2.0 * t), c);
}

/// The tracked satellite reference: R0(t) = exp(t e1^) exp(t e2^) exp(t e3^) with its body rate.
inline ReferencePoint satellite_reference(double t, const Inertia & j)
{
  ReferencePoint out;
  out.t      = t;
  out.R0     = exp_so3(Vec3(t, 0, 0)) * exp_so3(Vec3(0, t, 0)) * exp_so3(Vec3(0, 0, t));
  out.Omega0 = satellite_body_rate(t);
  out.u0     = feedforward_torque(j, out.Omega0, satellite_body_rate_dot(t));
  return out;
}

class SatelliteReference : public ReferenceTrajectory
{
public:
  explicit SatelliteReference(Inertia j) : j_(std::move(j)) {}
  ReferencePoint sample(double t) const override { return satellite_reference(t, j_); }

private:
  Inertia j_;
};

/// Angular velocity (1 + cos t, sin t - sin t cos t, cos t + sin^2 t) as printed for the satellite case.
inline Vec3 printed_rate(double t)
{
  const double s = std::sin(t), c = std::cos(t);
  return Vec3(1.0 + c, s - s * c, c + s * s);
}

inline Vec3 printed_rate_dot(double t)
{
  const double s = std::sin(t), c = std::cos(t);
  return Vec3(-s, c - std::cos(2.0 * t), -s + std::sin(2.0 * t));
}

/**
 * @brief Reference driven by the printed angular velocity; R0 integrates dR0/dt = R0 Omega0^ from I.
 *
 * R0 is tabulated on a fixed knot grid with tight tolerances at construction and refined between
 * knots on demand. Valid on [0, t_end].
 */
class PrintedRateReference : public ReferenceTrajectory
{
public:
  PrintedRateReference(Inertia j, double t_end, double knot_spacing = 0.05) : j_(std::move(j)), dt_(knot_spacing)
  {
    if (!(t_end > 0.0) || !(knot_spacing > 0.0)) { throw DomainError("PrintedRateReference: bad horizon"); }
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt_)) + 1;
    knots_.reserve(n);
    knots_.push_back(Mat3::Identity());
    DormandPrince<9> solver(tight());
    for (std::size_t i = 1; i < n; ++i) {
      knots_.push_back(advance(solver, knots_.back(), double(i - 1) * dt_, double(i) * dt_));
    }
    t_end_ = double(n - 1) * dt_;
  }

  ReferencePoint sample(double t) const override
  {
    if (t < 0.0 || t > t_end_ + 1e-12) { throw DomainError("PrintedRateReference: t outside tabulated range"); }
    auto i        = static_cast<std::size_t>(std::floor(t / dt_));
    i             = std::min(i, knots_.size() - 1);
    const double ti = double(i) * dt_;
    Mat3 r        = knots_[i];
    if (t - ti > 1e-14) {
      DormandPrince<9> solver(tight());
      r = advance(solver, r, ti, t);
    }
    ReferencePoint out;
    out.t      = t;
    out.R0     = project_to_so3(r);
    out.Omega0 = printed_rate(t);
    out.u0     = feedforward_torque(j_, out.Omega0, printed_rate_dot(t));
    return out;
  }

  Vec3 feedforward(double t) const override { return feedforward_torque(j_, printed_rate(t), printed_rate_dot(t)); }

private:
  static IntegratorSettings tight()
  {
    IntegratorSettings s;
    s.rel_tol = 1e-13;
    s.abs_tol = 1e-13;
    return s;
  }

  static Mat3 advance(DormandPrince<9> & solver, const Mat3 & r0, double t0, double t1)
  {
    using V9 = Eigen::Matrix<double, 9, 1>;
    auto rhs = [](double t, const V9 & y) -> V9 {
      const Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> r(y.data());
      const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> d = r * hat(printed_rate(t));
      return Eigen::Map<const V9>(d.data());
    };
    const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> rr = r0;
    const V9 y = solver.integrate(rhs, t0, t1, Eigen::Map<const V9>(rr.data()));
    return Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(y.data());
  }

  Inertia j_;
  double dt_;
  double t_end_ = 0.0;
  std::vector<Mat3> knots_;
};

/// Rest attitude: R0 constant, zero rate and torque.
class ConstantReference : public ReferenceTrajectory
{
public:
  explicit ConstantReference(Rotation r0 = Rotation::identity()) : r0_(std::move(r0)) {}

  ReferencePoint sample(double t) const override
  {
    ReferencePoint out;
    out.t  = t;
    out.R0 = r0_;
    return out;
  }

private:
  Rotation r0_;
};

/// Reference samples on the uniform grid t = k h, k = 0..count-1.
class ReferenceGrid
{
public:
  ReferenceGrid(const ReferenceTrajectory & traj, double h, std::size_t count) : h_(h)
  {
    if (!(h > 0.0)) { throw DomainError("ReferenceGrid: h must be positive"); }
    samples_.reserve(count);
    for (std::size_t k = 0; k < count; ++k) { samples_.push_back(traj.sample(double(k) * h)); }
  }

  const ReferencePoint & operator[](std::size_t k) const { return samples_.at(k); }
  std::size_t size() const { return samples_.size(); }
  double step() const { return h_; }
  const std::vector<ReferencePoint> & samples() const { return samples_; }

private:
  double h_;
  std::vector<ReferencePoint> samples_;
};

/// Extreme eigenvalues of R0 R0^T over a grid.
struct ReferenceBounds
{
  double beta_l = 1.0;
  double beta_u = 1.0;

  /// Both bounds equal one, i.e. the samples lie on SO(3).
  bool on_manifold(double tol = kStructureTol) const
  {
    return std::abs(beta_l - 1.0) <= tol && std::abs(beta_u - 1.0) <= tol;
  }
};

/// Throws AssumptionViolated if the lower bound is not positive.
inline ReferenceBounds verify_assumption2(const std::function<Mat3(double)> & attitude, const std::vector<double> & t_grid)
{
  ReferenceBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double t : t_grid) {
    const Mat3 g = attitude(t);
    Eigen::SelfAdjointEigenSolver<Mat3> es(g * g.transpose(), Eigen::EigenvaluesOnly);
    b.beta_l = std::min(b.beta_l, es.eigenvalues().minCoeff());
    b.beta_u = std::max(b.beta_u, es.eigenvalues().maxCoeff());
  }
  if (t_grid.empty()) { b = ReferenceBounds{}; }
  if (!(b.beta_l > 0.0)) { throw AssumptionViolated("reference: R0 R0^T is not uniformly positive definite"); }
  return b;
}

inline ReferenceBounds verify_assumption2(const ReferenceTrajectory & traj, const std::vector<double> & t_grid)
{
  return verify_assumption2([&traj](double t) { return traj.sample(t).R0.matrix(); }, t_grid);
}

/// t0, t0 + dt, ... up to and including t1 (within rounding).
inline std::vector<double> uniform_grid(double t0, double t1, double dt)
{
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) { g.push_back(t0 + double(i) * dt); }
  return g;
}

}  // namespace lgmpc
