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
 * @brief Non-predictive stabilizing laws for the split error dynamics.
 *
 * Both laws act on the auxiliary error zeta = R0 eOmega + W, where W collects the coupling of the
 * transversal error into the parallel direction. With zeta the closed loop on (eR_par, zeta) is
 * linear and time invariant:
 *   continuous  d/dt (e, zeta) = [[0, I], [Kp, Kd]] (e, zeta)
 *   discrete    (e, zeta)+     = [[I, hI], [Kp, Kd]] (e, zeta)
 */

#include <Eigen/Eigenvalues>

#include <cmath>

#include "linearization.hpp"
#include "types.hpp"

namespace lgmpc {

/// Gains acting on vee coordinates.
struct GainPair
{
  Mat3 Kp = -Mat3::Identity();
  Mat3 Kd = -2.0 * Mat3::Identity();
};

inline Mat6 continuous_gain_matrix(const GainPair & g)
{
  Mat6 m                      = Mat6::Zero();
  m.topRightCorner<3, 3>()    = Mat3::Identity();
  m.bottomLeftCorner<3, 3>()  = g.Kp;
  m.bottomRightCorner<3, 3>() = g.Kd;
  return m;
}

inline Mat6 discrete_gain_matrix(const GainPair & g, double h)
{
  Mat6 m                      = Mat6::Identity();
  m.topRightCorner<3, 3>()    = h * Mat3::Identity();
  m.bottomLeftCorner<3, 3>()  = g.Kp;
  m.bottomRightCorner<3, 3>() = g.Kd;
  return m;
}

inline double spectral_abscissa(const Mat6 & m)
{
  Eigen::EigenSolver<Mat6> es(m, false);
  return es.eigenvalues().real().maxCoeff();
}

inline double spectral_radius(const Mat6 & m)
{
  Eigen::EigenSolver<Mat6> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool is_hurwitz(const GainPair & g) { return spectral_abscissa(continuous_gain_matrix(g)) < 0.0; }
inline bool is_schur(const GainPair & g, double h) { return spectral_radius(discrete_gain_matrix(g, h)) < 1.0; }

/// Kp = -I, Kd = -2I: continuous closed-loop eigenvalues at -1.
inline GainPair default_continuous_gains() { return {}; }

/// Both discrete eigenvalues at exp(-h), the sampled image of the continuous design.
inline GainPair default_discrete_gains(double h)
{
  const double r = std::exp(-h);
  GainPair g;
  g.Kd = (2.0 * r - 1.0) * Mat3::Identity();
  g.Kp = -(1.0 - r) * (1.0 - r) / h * Mat3::Identity();
  return g;
}

/**
 * @brief Transversal-to-parallel coupling W = -alpha ( (hess V(I) eR_perp) (R0 R0^T)^-1 )_par.
 *
 * Returned in vee coordinates. Vanishes for rotation references since the Hessian keeps the
 * symmetric error symmetric.
 */
inline Vec3 coupling_W(const Mat3 & r0, const Mat3 & e_perp, double alpha)
{
  const Mat3 m_inv = (r0 * r0.transpose()).inverse();
  return -alpha * vee_par(hess_V_identity(e_perp) * m_inv);
}

/// Time derivative of W along the linearized flow, with dR0/dt = R0 hat(Omega0).
inline Vec3 coupling_W_rate(const Mat3 & r0, const Vec3 & omega0, const Mat3 & e_perp, double alpha)
{
  const Mat3 xi0    = hat(omega0);
  const Mat3 m      = r0 * r0.transpose();
  const Mat3 m_inv  = m.inverse();
  const Mat3 m_dot  = r0 * (xi0 + xi0.transpose()) * r0.transpose();
  const Mat3 minv_dot = -m_inv * m_dot * m_inv;
  const Mat3 e_perp_dot = -alpha * proj_perp(hess_V_identity(e_perp) * m_inv);
  return -alpha * vee_par(hess_V_identity(e_perp_dot) * m_inv + hess_V_identity(e_perp) * minv_dot);
}

/// zeta = R0 eOmega R0^-1 + W in vee coordinates.
inline Vec3 auxiliary_error(const ErrorState & err, const ReferencePoint & ref, double alpha)
{
  const Mat3 & r0 = ref.R0.matrix();
  return vee(r0 * hat(err.eOmega) * r0.inverse()) + coupling_W(r0, err.eR_perp, alpha);
}

/// PD-like continuous-time law; returns du = u - u0.
inline Vec3 continuous_law(const ErrorState & err, const ReferencePoint & ref, const Inertia & j, double alpha, const GainPair & gains)
{
  if (!is_hurwitz(gains)) { throw GainError("continuous_law: [[0, I], [Kp, Kd]] is not Hurwitz"); }
  const Mat3 & r0   = ref.R0.matrix();
  const Vec3 zeta   = auxiliary_error(err, ref, alpha);
  const Vec3 w_rate = coupling_W_rate(r0, ref.Omega0, err.eR_perp, alpha);
  // Y = R0^-1 (-dW/dt + Kp e + Kd zeta) R0, in vee coordinates R0^T (...)
  const Vec3 y       = vee(r0.inverse() * hat(-w_rate + gains.Kp * err.eR_par + gains.Kd * zeta) * r0);
  const Vec3 bracket = err.eOmega.cross(ref.Omega0);  // [eOmega^, Omega0^]
  return j.matrix() * (bracket + y - gyroscopic_jacobian(j, ref.Omega0) * err.eOmega);
}

/// Discrete-time law for the Euler model; ref_k and ref_next are the samples at k and k + 1.
inline Vec3 discrete_law(const ErrorState & err,
  const ReferencePoint & ref_k,
  const ReferencePoint & ref_next,
  const Inertia & j,
  double alpha,
  double h,
  const GainPair & gains)
{
  if (!is_schur(gains, h)) { throw GainError("discrete_law: [[I, hI], [Kp, Kd]] is not Schur"); }
  const Mat3 & r0k   = ref_k.R0.matrix();
  const Mat3 & r0n   = ref_next.R0.matrix();
  const Vec3 zeta    = auxiliary_error(err, ref_k, alpha);
  const Mat3 m_inv_k = (r0k * r0k.transpose()).inverse();
  const Mat3 perp_next = err.eR_perp - h * alpha * proj_perp(hess_V_identity(err.eR_perp) * m_inv_k);
  const Vec3 w_next  = coupling_W(r0n, perp_next, alpha);
  const Vec3 y       = vee(r0n.inverse() * hat(gains.Kp * err.eR_par + gains.Kd * zeta - w_next) * r0n);
  const Mat3 a_omega = Mat3::Identity() + h * gyroscopic_jacobian(j, ref_k.Omega0);
  return (1.0 / h) * j.matrix() * (y - a_omega * err.eOmega);
}

}  // namespace lgmpc
