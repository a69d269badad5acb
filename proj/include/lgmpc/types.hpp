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
 * @brief Value types shared across modules: plant state, inertia, reference samples, split errors.
 */

#include <Eigen/Eigenvalues>

#include "lie.hpp"

namespace lgmpc {

/// State of the ambient (embedded) rigid body: attitude matrix X, possibly off SO(3), and body rate.
struct AmbientState
{
  Mat3 X = Mat3::Identity();
  Vec3 Omega = Vec3::Zero();
};

/// Time derivative of an AmbientState.
struct AmbientRate
{
  Mat3 dX = Mat3::Zero();
  Vec3 dOmega = Vec3::Zero();
};

/// Symmetric positive definite moment of inertia [kg m^2].
class Inertia
{
public:
  explicit Inertia(const Mat3 & j)
  {
    if (!((j - j.transpose()).norm() <= 1e-12)) { throw DomainError("Inertia: matrix is not symmetric"); }
    Eigen::SelfAdjointEigenSolver<Mat3> es(j, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) { throw DomainError("Inertia: matrix is not positive definite"); }
    j_ = j;
    j_inv_ = j.inverse();
  }

  static Inertia diagonal(double j1, double j2, double j3) { return Inertia(Vec3(j1, j2, j3).asDiagonal()); }

  const Mat3 & matrix() const { return j_; }
  const Mat3 & inverse() const { return j_inv_; }

private:
  Mat3 j_;
  Mat3 j_inv_;
};

/// ESEO satellite inertia used in the reproduced scenarios.
inline Inertia eseo_inertia() { return Inertia::diagonal(4.250, 4.337, 3.664); }

/// One sample of a reference trajectory obeying the rigid-body equations.
struct ReferencePoint
{
  double t = 0.0;
  Rotation R0;
  Vec3 Omega0 = Vec3::Zero();
  Vec3 u0 = Vec3::Zero();
};

/**
 * @brief Tracking error split along so(3) and its symmetric complement.
 *
 * eR_par holds vee of the skew part of X R0^T - I; eR_perp its symmetric part.
 */
struct ErrorState
{
  Vec3 eR_par = Vec3::Zero();
  Mat3 eR_perp = Mat3::Zero();
  Vec3 eOmega = Vec3::Zero();

  /// Stacked (eR_par, eOmega), the part the controllers act on.
  Eigen::Matrix<double, 6, 1> parallel_stack() const
  {
    Eigen::Matrix<double, 6, 1> x;
    x << eR_par, eOmega;
    return x;
  }
};

}  // namespace lgmpc
