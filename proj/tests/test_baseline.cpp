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

#include <gtest/gtest.h>

#include <lgmpc/baseline.hpp>
#include <lgmpc/dynamics.hpp>
#include <lgmpc/linearization.hpp>

#include "oracles.hpp"

using namespace lgmpc;

namespace {

const Inertia kJ = eseo_inertia();

Eigen::Matrix<double, 6, 6> block(const Mat3 & tl, const Mat3 & tr, const Mat3 & bl, const Mat3 & br)
{
  Eigen::Matrix<double, 6, 6> m;
  m << tl, tr, bl, br;
  return m;
}

double max_abs_eigenvalue(const Eigen::Matrix<double, 6, 6> & m)
{
  return Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>>(m).eigenvalues().cwiseAbs().maxCoeff();
}

double max_real_eigenvalue(const Eigen::Matrix<double, 6, 6> & m)
{
  return Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>>(m).eigenvalues().real().maxCoeff();
}

ErrorState from_stack(const Vec6 & x)
{
  ErrorState e;
  e.eR_par = x.head<3>();
  e.eOmega = x.tail<3>();
  return e;
}

/// Random gain pair whose discrete matrix is Schur for h.
GainPair random_schur_gains(std::mt19937_64 & g, double h)
{
  std::uniform_real_distribution<double> kp(-1.5, -0.2), kd(0.3, 0.9);
  for (;;) {
    GainPair p;
    p.Kp = kp(g) * Mat3::Identity() + 0.05 * oracle::random_matrix(g);
    p.Kd = kd(g) * Mat3::Identity() + 0.05 * oracle::random_matrix(g);
    if (is_schur(p, h)) { return p; }
  }
}

}  // namespace

TEST(Gains, DefaultsSatisfyMatrixConditions)
{
  const GainPair c = default_continuous_gains();
  EXPECT_EQ(c.Kp, -Mat3::Identity());
  EXPECT_EQ(c.Kd, -2.0 * Mat3::Identity());
  EXPECT_TRUE(is_hurwitz(c));
  EXPECT_NEAR(spectral_abscissa(continuous_gain_matrix(c)), -1.0, 1e-6);

  for (double h : {0.05, 0.2, 0.5, 1.0}) {
    const GainPair d = default_discrete_gains(h);
    EXPECT_TRUE(is_schur(d, h));
    EXPECT_NEAR(spectral_radius(discrete_gain_matrix(d, h)), std::exp(-h), 1e-6);
  }
}

TEST(Gains, ValidatorsAgreeWithEigenvalues)
{
  std::mt19937_64 g(31);
  const Mat3 i = Mat3::Identity(), z = Mat3::Zero();
  for (int n = 0; n < 200; ++n) {
    GainPair p{2.0 * oracle::random_matrix(g), 2.0 * oracle::random_matrix(g)};
    const auto cont = block(z, i, p.Kp, p.Kd);
    const auto disc = block(i, 0.2 * i, p.Kp, p.Kd);
    EXPECT_EQ(continuous_gain_matrix(p), cont);
    EXPECT_EQ(discrete_gain_matrix(p, 0.2), disc);
    EXPECT_EQ(is_hurwitz(p), max_real_eigenvalue(cont) < 0.0);
    EXPECT_EQ(is_schur(p, 0.2), max_abs_eigenvalue(disc) < 1.0);
  }
}

TEST(Coupling, VanishesOnRotationReferences)
{
  std::mt19937_64 g(32);
  for (int n = 0; n < 50; ++n) {
    const Mat3 r = oracle::random_rotation(g);
    const Mat3 a = oracle::random_matrix(g);
    const Mat3 s = 0.5 * (a + a.transpose());
    EXPECT_LT(coupling_W(r, s, 1.0).norm(), 1e-14);
    EXPECT_LT(coupling_W_rate(r, oracle::random_vector(g), s, 1.0).norm(), 1e-13);
  }
}

TEST(Coupling, NonzeroForScaledReference)
{
  // off-manifold reference: (R0 R0^T)^-1 = I / 2.25, still symmetric so the skew part is zero;
  // an anisotropic attitude breaks the symmetry of hess * M^-1
  Mat3 g0 = Vec3(1.0, 1.5, 0.8).asDiagonal();
  g0      = oracle::axis_rotation(2, 0.4) * g0;
  Mat3 s;
  s << 0.3, 0.1, 0, 0.1, -0.2, 0.05, 0, 0.05, 0.1;
  EXPECT_GT(coupling_W(g0, s, 1.0).norm(), 1e-3);
}

TEST(ContinuousLaw, ZeroErrorGivesZeroTorque)
{
  const ReferencePoint p = satellite_reference(1.3, kJ);
  EXPECT_EQ(continuous_law(ErrorState{}, p, kJ, 1.0, default_continuous_gains()), Vec3::Zero());
}

TEST(ContinuousLaw, RejectsNonHurwitzGains)
{
  GainPair bad;
  bad.Kp = Mat3::Identity();
  EXPECT_THROW(continuous_law(ErrorState{}, ReferencePoint{}, kJ, 1.0, bad), GainError);
}

TEST(ContinuousLaw, ClosedLoopMatchesCriticallyDampedSolution)
{
  // Under the law, (e, zeta) obeys e' = zeta, zeta' = -e - 2 zeta: e(t) = (1 + t) e^-t e0 with zeta(0) = 0.
  const SatelliteReference ref(kJ);
  const GainPair gains = default_continuous_gains();
  auto rhs = [&](double t, const Vec6 & x) -> Vec6 {
    const ReferencePoint p = ref.sample(t);
    const Vec3 du          = continuous_law(from_stack(x), p, kJ, 1.0, gains);
    return linearize_continuous(p, kJ, 1.0).parallel_rate(x, du);
  };
  const Vec6 x0 = (Vec6() << 0.1, 0, 0, 0, 0, 0).finished();
  for (double t : {1.0, 5.0, 8.0}) {
    const Vec6 x      = oracle::rk4(rhs, 0.0, t, x0, int(1000 * t));
    const Vec3 e_exp  = (1.0 + t) * std::exp(-t) * x0.head<3>();
    const Vec3 zeta   = -t * std::exp(-t) * x0.head<3>();
    const Vec3 om_exp = ref.sample(t).R0.matrix().transpose() * zeta;
    EXPECT_LT((x.head<3>() - e_exp).norm(), 1e-9) << t;
    EXPECT_LT((x.tail<3>() - om_exp).norm(), 1e-9) << t;
    const double ratio = x.norm() / x0.norm();
    EXPECT_NEAR(ratio, std::exp(-t) * std::sqrt((1 + t) * (1 + t) + t * t), 1e-8);
    if (t == 8.0) { EXPECT_LT(ratio, 1e-2); }
  }
}

TEST(DiscreteLaw, ZeroErrorGivesZeroTorque)
{
  const double h = 0.2;
  EXPECT_EQ(discrete_law(ErrorState{}, satellite_reference(0.0, kJ), satellite_reference(h, kJ), kJ, 1.0, h, default_discrete_gains(h)),
    Vec3::Zero());
}

TEST(DiscreteLaw, OneStepMapIsGainMatrix)
{
  std::mt19937_64 g(33);
  const double h = 0.2;
  const SatelliteReference ref(kJ);
  const ReferenceGrid grid(ref, h, 80);
  const DiscreteLinearModel model = discretize(grid, kJ, 1.0, 0, 79);
  std::uniform_int_distribution<std::size_t> pick(0, 78);
  for (int n = 0; n < 200; ++n) {
    const std::size_t k = pick(g);
    const GainPair gains = random_schur_gains(g, h);
    ErrorState e;
    e.eR_par  = oracle::random_vector(g);
    e.eOmega  = oracle::random_vector(g);
    const Mat3 a = oracle::random_matrix(g);
    e.eR_perp = 0.5 * (a + a.transpose());

    const Vec3 du    = discrete_law(e, grid[k], grid[k + 1], kJ, 1.0, h, gains);
    const Vec6 next  = model.step(k, e.parallel_stack(), du);
    const Vec3 zeta  = grid[k].R0.matrix() * e.eOmega;
    const Vec3 zeta1 = grid[k + 1].R0.matrix() * next.tail<3>();

    Vec6 lhs, xz;
    lhs << next.head<3>(), zeta1;
    xz << e.eR_par, zeta;
    EXPECT_LT((lhs - discrete_gain_matrix(gains, h) * xz).norm(), 1e-10);
  }
}

TEST(DiscreteLaw, DefaultGainsContract)
{
  const double h = 0.2;
  const GainPair gains = default_discrete_gains(h);
  const SatelliteReference ref(kJ);
  const ReferenceGrid grid(ref, h, 101);
  const DiscreteLinearModel model = discretize(grid, kJ, 1.0, 0, 100);
  for (int axis = 0; axis < 6; ++axis) {
    Vec6 x = Vec6::Unit(axis);
    for (std::size_t k = 0; k < 100; ++k) { x = model.step(k, x, discrete_law(from_stack(x), grid[k], grid[k + 1], kJ, 1.0, h, gains)); }
    EXPECT_LT(x.norm(), 1e-6) << "axis " << axis;
  }
}

TEST(DiscreteLaw, SlowSchurPairDecaysAtItsSpectralRate)
{
  const double h = 0.2;
  GainPair slow;
  slow.Kp = -0.5 * Mat3::Identity();
  slow.Kd = 0.8 * Mat3::Identity();
  ASSERT_TRUE(is_schur(slow, h));
  const double rho = spectral_radius(discrete_gain_matrix(slow, h));
  EXPECT_NEAR(rho, std::sqrt(0.9), 1e-12);

  const SatelliteReference ref(kJ);
  const ReferenceGrid grid(ref, h, 101);
  const DiscreteLinearModel model = discretize(grid, kJ, 1.0, 0, 100);
  Vec6 x = Vec6::Unit(0);
  for (std::size_t k = 0; k < 100; ++k) { x = model.step(k, x, discrete_law(from_stack(x), grid[k], grid[k + 1], kJ, 1.0, h, slow)); }
  EXPECT_LT(x.norm(), 10.0 * std::pow(rho, 100));
  EXPECT_LT(x.norm(), 1e-1);
}

TEST(DiscreteLaw, NonSchurGainsRejectedAndDiverge)
{
  const double h = 0.2;
  GainPair bad;
  bad.Kp = -4.0 * Mat3::Identity();
  bad.Kd = 1.5 * Mat3::Identity();
  EXPECT_FALSE(is_schur(bad, h));
  EXPECT_THROW(discrete_law(ErrorState{}, satellite_reference(0, kJ), satellite_reference(h, kJ), kJ, 1.0, h, bad), GainError);

  Vec6 xz = Vec6::Unit(0);
  const auto m = discrete_gain_matrix(bad, h);
  for (int k = 0; k < 100; ++k) { xz = m * xz; }
  EXPECT_GT(xz.norm(), 1e3);
}
