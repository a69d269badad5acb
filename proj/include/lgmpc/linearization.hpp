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
 * @brief Split linearized tracking-error dynamics, their Euler discretization and the
 *        transversal stability condition.
 *
 * In vee coordinates, with x = (eR_par, eOmega):
 *   d/dt eR_perp = -2 alpha eR_perp
 *   d/dt eR_par  = R0 eOmega                      (R0 hat(w) R0^T = hat(R0 w))
 *   d/dt eOmega  = F(Omega0) eOmega + J^-1 du,    F = J^-1 (hat(J Omega0) - hat(Omega0) J)
 */

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "lie.hpp"
#include "reference.hpp"
#include "types.hpp"

namespace lgmpc {

using Mat6  = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Vec6  = Eigen::Matrix<double, 6, 1>;

/// Matrix of eOmega -> J^-1 (J eOmega x Omega0 + J Omega0 x eOmega).
inline Mat3 gyroscopic_jacobian(const Inertia & j, const Vec3 & omega0)
{
  return j.inverse() * (hat(j.matrix() * omega0) - hat(omega0) * j.matrix());
}

struct ContinuousSplitModel
{
  Mat6 A = Mat6::Zero();   ///< over (eR_par, eOmega)
  Mat63 B = Mat63::Zero();
  double transversal_rate = 0.0;  ///< d/dt eR_perp = transversal_rate * eR_perp

  Vec6 parallel_rate(const Vec6 & x, const Vec3 & du) const { return A * x + B * du; }
  Mat3 transversal_rate_of(const Mat3 & e_perp) const { return transversal_rate * e_perp; }
};

inline ContinuousSplitModel linearize_continuous(const ReferencePoint & ref, const Inertia & j, double alpha)
{
  ContinuousSplitModel m;
  m.A.topRightCorner<3, 3>()    = ref.R0.matrix();
  m.A.bottomRightCorner<3, 3>() = gyroscopic_jacobian(j, ref.Omega0);
  m.B.bottomRows<3>()           = j.inverse();
  m.transversal_rate            = -2.0 * alpha;
  return m;
}

/// Euler-discretized model over a window of reference samples.
struct DiscreteLinearModel
{
  double h = 0.0;
  double alpha = 0.0;
  std::vector<Mat6> A;   ///< A[k] = [[I, h R0_k], [0, I + h F_k]]
  std::vector<Mat63> B;  ///< B[k] = [[0], [h J^-1]]

  /// Hessian spectrum on the transversal space and reference bounds.
  double lambda_min = kHessLambdaMin;
  double lambda_max = kHessLambdaMax;
  double beta_l = 1.0;
  double beta_u = 1.0;

  std::size_t horizon() const { return A.size(); }

  /// Multiplier applied to eR_perp each step.
  double transversal_factor() const { return 1.0 - 2.0 * alpha * h; }

  Vec6 step(std::size_t k, const Vec6 & x, const Vec3 & du) const { return A[k] * x + B[k] * du; }
  Mat3 step_transversal(const Mat3 & e_perp) const { return transversal_factor() * e_perp; }
};

inline Mat6 discrete_A(const ReferencePoint & ref, const Inertia & j, double h)
{
  Mat6 a                        = Mat6::Identity();
  a.topRightCorner<3, 3>()      = h * ref.R0.matrix();
  a.bottomRightCorner<3, 3>()  += h * gyroscopic_jacobian(j, ref.Omega0);
  return a;
}

inline Mat63 discrete_B(const Inertia & j, double h)
{
  Mat63 b          = Mat63::Zero();
  b.bottomRows<3>() = h * j.inverse();
  return b;
}

/// Model for steps k0 .. k0 + n - 1 of a reference grid.
inline DiscreteLinearModel discretize(const ReferenceGrid & grid, const Inertia & j, double alpha, std::size_t k0, std::size_t n)
{
  if (n < 1) { throw DomainError("discretize: horizon must be >= 1"); }
  DiscreteLinearModel m;
  m.h     = grid.step();
  m.alpha = alpha;
  m.A.reserve(n);
  m.B.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.A.push_back(discrete_A(grid[k0 + i], j, m.h));
    m.B.push_back(discrete_B(j, m.h));
  }
  return m;
}

inline DiscreteLinearModel discretize(const ReferenceTrajectory & traj, const Inertia & j, double alpha, double h, std::size_t n)
{
  return discretize(ReferenceGrid(traj, h, n), j, alpha, 0, n);
}

struct TransversalCheck
{
  bool stable = false;
  double bound = 0.0;   ///< upper limit on alpha h
  double margin = 0.0;  ///< bound - alpha h
};

/**
 * @brief Sufficient condition 0 < alpha h < 2 lambda_min beta_l^2 / (lambda_max^2 beta_u)
 *        for exponential stability of the discrete transversal error.
 *
 * For SO(3) (lambda = 2, beta = 1) the bound is exactly 1.
 */
inline TransversalCheck check_transversal_condition(
  double alpha, double h, double lambda_min, double lambda_max, double beta_l, double beta_u)
{
  TransversalCheck c;
  const double ah = alpha * h;
  c.bound         = 2.0 * lambda_min * beta_l * beta_l / (lambda_max * lambda_max * beta_u);
  c.margin        = c.bound - ah;
  c.stable        = ah > 0.0 && ah < c.bound;
  return c;
}

inline TransversalCheck check_transversal_condition(double alpha, double h)
{
  return check_transversal_condition(alpha, h, kHessLambdaMin, kHessLambdaMax, 1.0, 1.0);
}

/// e_k = (1 - 2 alpha h)^k e0 for k = 0..steps, by repeated Euler steps.
inline std::vector<Mat3> simulate_transversal(double alpha, double h, std::size_t steps, const Mat3 & e0_perp)
{
  std::vector<Mat3> seq;
  seq.reserve(steps + 1);
  seq.push_back(e0_perp);
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat3 & e = seq.back();
    seq.push_back(e - h * alpha * hess_V_identity(e));
  }
  return seq;
}

}  // namespace lgmpc
