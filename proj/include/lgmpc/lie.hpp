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
 * @brief SO(3) / so(3) primitives and the embedding potential on R^{3x3}.
 *
 * The ambient space R^{3x3} carries the Frobenius inner product <A, B> = trace(A^T B).
 * It splits orthogonally into skew matrices (the Lie algebra so(3), "parallel")
 * and symmetric matrices (its complement, "transversal").
 *
 * The potential V(X) = 1/4 |X^T X - I|^2 vanishes exactly on SO(3) and is
 * right-invariant, V(X R) = V(X).
 */

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

#include "errors.hpp"

namespace lgmpc {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Absolute tolerance on Frobenius residuals for skew / symmetric / orthogonality checks.
inline constexpr double kStructureTol = 1e-9;

/// Frobenius inner product.
inline double frob_inner(const Mat3 & a, const Mat3 & b) { return (a.transpose() * b).trace(); }

inline Mat3 hat(const Vec3 & v)
{
  Mat3 s;
  // clang-format off
  s <<  0.0,  -v.z(),  v.y(),
        v.z(),  0.0,  -v.x(),
       -v.y(),  v.x(),  0.0;
  // clang-format on
  return s;
}

/// Inverse of hat. Throws NotSkew if the symmetric part exceeds kStructureTol.
inline Vec3 vee(const Mat3 & s)
{
  const double residual = 0.5 * (s + s.transpose()).norm();
  if (!(residual <= kStructureTol)) {
    throw NotSkew("vee: symmetric residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return Vec3((s(2, 1) - s(1, 2)) / 2.0, (s(0, 2) - s(2, 0)) / 2.0, (s(1, 0) - s(0, 1)) / 2.0);
}

/// Skew (parallel) part of a matrix.
inline Mat3 proj_par(const Mat3 & a) { return 0.5 * (a - a.transpose()); }

/// Symmetric (transversal) part of a matrix.
inline Mat3 proj_perp(const Mat3 & a) { return 0.5 * (a + a.transpose()); }

/// vee of the skew part; never throws.
inline Vec3 vee_par(const Mat3 & a) { return vee(proj_par(a)); }

/// |R^T R - I|_F
inline double orthogonality_residual(const Mat3 & x)
{
  return (x.transpose() * x - Mat3::Identity()).norm();
}

/**
 * @brief Element of SO(3).
 *
 * Construction through from_matrix() validates |R^T R - I|_F <= 1e-9 and det R > 0.
 */
class Rotation
{
public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation from_matrix(const Mat3 & m)
  {
    if (!(orthogonality_residual(m) <= kStructureTol) || !(m.determinant() > 0.0)) {
      throw DomainError("Rotation: matrix is not in SO(3)");
    }
    return Rotation(m);
  }

  /// Skips validation; callers guarantee the invariant.
  static Rotation unchecked(const Mat3 & m) { return Rotation(m); }

  static Rotation identity() { return Rotation(); }

  const Mat3 & matrix() const { return m_; }
  Vec3 operator*(const Vec3 & v) const { return m_ * v; }
  Rotation operator*(const Rotation & o) const { return Rotation(m_ * o.m_); }
  Rotation inverse() const { return Rotation(m_.transpose()); }

private:
  explicit Rotation(const Mat3 & m) : m_(m) {}
  Mat3 m_;
};

/// Rodrigues formula; Taylor fallback below |v| < 1e-8.
inline Rotation exp_so3(const Vec3 & v)
{
  const double theta = v.norm();
  const Mat3 k = hat(v);
  double a, b;
  if (theta < 1e-8) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    const double s = std::sin(0.5 * theta) / theta;
    b = 2.0 * s * s;
  }
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

/// Closest rotation in Frobenius norm (polar factor). Requires det X > 0.
inline Rotation project_to_so3(const Mat3 & x)
{
  if (!(x.determinant() > 0.0)) { throw DomainError("project_to_so3: det X <= 0"); }
  Eigen::JacobiSVD<Mat3> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation::unchecked(svd.matrixU() * svd.matrixV().transpose());
}

namespace detail {
inline void require_positive_det(const Mat3 & x, const char * who)
{
  if (!(x.determinant() > 0.0)) { throw DomainError(std::string(who) + ": det X <= 0"); }
}
}  // namespace detail

/// V(X) = 1/4 |X^T X - I|_F^2 on {det X > 0}.
inline double potential_V(const Mat3 & x)
{
  detail::require_positive_det(x, "potential_V");
  return 0.25 * (x.transpose() * x - Mat3::Identity()).squaredNorm();
}

/// grad V(X) = X (X^T X - I).
inline Mat3 grad_V(const Mat3 & x)
{
  detail::require_positive_det(x, "grad_V");
  return x * (x.transpose() * x - Mat3::Identity());
}

/// Hessian action at an arbitrary point: d/ds grad V(X + s W) at s = 0.
inline Mat3 hess_V(const Mat3 & x, const Mat3 & w)
{
  detail::require_positive_det(x, "hess_V");
  return w * (x.transpose() * x - Mat3::Identity()) + x * (w.transpose() * x + x.transpose() * w);
}

/**
 * @brief Hessian of V at the identity applied to v.
 *
 * Equals 2 proj_perp(v): zero on skew matrices, multiplication by 2 on symmetric ones,
 * so the extreme eigenvalues on the transversal space are both 2.
 */
inline Mat3 hess_V_identity(const Mat3 & v) { return 2.0 * proj_perp(v); }

/// Extreme eigenvalues of hess V(I) restricted to symmetric matrices.
inline constexpr double kHessLambdaMin = 2.0;
inline constexpr double kHessLambdaMax = 2.0;

}  // namespace lgmpc
