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
 * @brief Condensed tracking MPC over the parallel error (eR_par, eOmega).
 *
 * The transversal error is decoupled from the parallel dynamics and decays on its own, so it
 * does not enter the optimization.
 */

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linearization.hpp"
#include "qp.hpp"
#include "types.hpp"

namespace lgmpc {

/// Componentwise box on a 3-vector.
struct Box3
{
  Vec3 lower = Vec3::Constant(-std::numeric_limits<double>::infinity());
  Vec3 upper = Vec3::Constant(std::numeric_limits<double>::infinity());

  static Box3 symmetric(double bound) { return {Vec3::Constant(-bound), Vec3::Constant(bound)}; }
  bool contains(const Vec3 & v) const { return (v.array() >= lower.array()).all() && (v.array() <= upper.array()).all(); }
  bool is_entire_space() const { return !lower.array().isFinite().any() && !upper.array().isFinite().any(); }
};

struct MpcConfig
{
  std::size_t N = 4;
  double h = 0.2;
  double alpha = 1.0;

  Mat3 Q_R = 100.0 * Mat3::Identity();
  Mat3 Q_Omega = 10.0 * Mat3::Identity();
  Mat3 Q_u = 0.01 * Mat3::Identity();
  Mat3 Qf_R = 100.0 * Mat3::Identity();
  Mat3 Qf_Omega = 10.0 * Mat3::Identity();

  /// Admissible total torque u.
  Box3 u_box = Box3::symmetric(10.0);
  /// Optional boxes on predicted eR_par / eOmega (entire space when absent).
  std::optional<Box3> eR_box;
  std::optional<Box3> eOmega_box;

  bool warm_start = true;
  QpSettings qp;
};

inline bool is_psd(const Mat3 & q, double tol = 1e-12)
{
  if ((q - q.transpose()).norm() > 1e-12 * (1.0 + q.norm())) { return false; }
  Eigen::SelfAdjointEigenSolver<Mat3> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * (1.0 + q.norm());
}

/// One line per violated requirement; empty when the configuration is usable.
inline std::vector<std::string> validate(const MpcConfig & cfg)
{
  std::vector<std::string> issues;
  if (cfg.N < 1) { issues.emplace_back("horizon N must be >= 1"); }
  if (!(cfg.h > 0.0)) { issues.emplace_back("step h must be positive"); }
  const std::pair<const char *, const Mat3 *> weights[] = {
    {"Q_R", &cfg.Q_R}, {"Q_Omega", &cfg.Q_Omega}, {"Q_u", &cfg.Q_u}, {"Qf_R", &cfg.Qf_R}, {"Qf_Omega", &cfg.Qf_Omega}};
  for (const auto & [name, q] : weights) {
    if (!is_psd(*q)) { issues.emplace_back(std::string("weight ") + name + " is not symmetric positive semidefinite"); }
  }
  if (!(cfg.u_box.lower.array() < cfg.u_box.upper.array()).all()) { issues.emplace_back("control box requires lower < upper"); }
  if (!check_transversal_condition(cfg.alpha, cfg.h).stable) { issues.emplace_back("transversal condition 0 < alpha h < 1 violated"); }
  return issues;
}

/// Condensed prediction x_{1..N} = Phi x0 + Gamma U.
struct Prediction
{
  Eigen::MatrixXd Phi;    ///< 6N x 6
  Eigen::MatrixXd Gamma;  ///< 6N x 3N
};

inline Prediction condense(const DiscreteLinearModel & model, std::size_t n)
{
  const auto N = static_cast<Eigen::Index>(n);
  Prediction p;
  p.Phi   = Eigen::MatrixXd::Zero(6 * N, 6);
  p.Gamma = Eigen::MatrixXd::Zero(6 * N, 3 * N);
  Mat6 phi = Mat6::Identity();
  for (Eigen::Index i = 0; i < N; ++i) {
    phi = model.A[i] * phi;
    p.Phi.block<6, 6>(6 * i, 0) = phi;
    // x_{i+1} = A_i x_i + B_i u_i
    if (i > 0) { p.Gamma.block(6 * i, 0, 6, 3 * i) = model.A[i] * p.Gamma.block(6 * (i - 1), 0, 6, 3 * i); }
    p.Gamma.block<6, 3>(6 * i, 3 * i) = model.B[i];
  }
  return p;
}

inline Mat6 stage_weight(const Mat3 & q_r, const Mat3 & q_omega)
{
  Mat6 q                      = Mat6::Zero();
  q.topLeftCorner<3, 3>()     = q_r;
  q.bottomRightCorner<3, 3>() = q_omega;
  return q;
}

/**
 * @brief Explicit finite-horizon cost of an input sequence, by rolling the model forward.
 *
 * sum_{i<N} (|x_i|_Q^2 + |u_i|_Qu^2) + |x_N|_Qf^2 with x_0 the measured error.
 */
inline double rollout_cost(const DiscreteLinearModel & model, const MpcConfig & cfg, const Vec6 & x0, const Eigen::VectorXd & u)
{
  const Mat6 q  = stage_weight(cfg.Q_R, cfg.Q_Omega);
  const Mat6 qf = stage_weight(cfg.Qf_R, cfg.Qf_Omega);
  Vec6 x        = x0;
  double cost   = 0.0;
  for (std::size_t i = 0; i < cfg.N; ++i) {
    const Vec3 ui = u.segment<3>(3 * static_cast<Eigen::Index>(i));
    cost += x.dot(q * x) + ui.dot(cfg.Q_u * ui);
    x = model.step(i, x, ui);
  }
  return cost + x.dot(qf * x);
}

/**
 * @brief Condensed QP for one sampling instant.
 *
 * Decision variable: stacked du_{k..k+N-1}. The objective equals rollout_cost() exactly.
 * u0_window holds u0 at k..k+N-1; the total-torque box becomes du in [lo - u0, hi - u0].
 */
inline QpProblem build_qp(const ErrorState & err, const DiscreteLinearModel & model, const MpcConfig & cfg, std::span<const Vec3> u0_window)
{
  const std::size_t n = cfg.N;
  if (model.horizon() < n || u0_window.size() < n) { throw DomainError("build_qp: model or reference window shorter than horizon"); }
  const auto N = static_cast<Eigen::Index>(n);

  const Vec6 x0          = err.parallel_stack();
  const Prediction pred  = condense(model, n);
  const Mat6 q           = stage_weight(cfg.Q_R, cfg.Q_Omega);
  const Mat6 qf          = stage_weight(cfg.Qf_R, cfg.Qf_Omega);

  Eigen::MatrixXd qbar = Eigen::MatrixXd::Zero(6 * N, 6 * N);
  Eigen::MatrixXd qu   = Eigen::MatrixXd::Zero(3 * N, 3 * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    qbar.block<6, 6>(6 * i, 6 * i) = i + 1 < N ? q : qf;
    qu.block<3, 3>(3 * i, 3 * i)   = cfg.Q_u;
  }

  const Eigen::VectorXd free_resp = pred.Phi * x0;
  const Eigen::MatrixXd gq        = pred.Gamma.transpose() * qbar;

  QpProblem p;
  p.H        = 2.0 * (gq * pred.Gamma + qu);
  p.H        = 0.5 * (p.H + p.H.transpose());
  p.f        = 2.0 * gq * free_resp;
  p.constant = x0.dot(q * x0) + free_resp.dot(qbar * free_resp);

  p.lower.resize(3 * N);
  p.upper.resize(3 * N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Vec3 lo = cfg.u_box.lower - u0_window[static_cast<std::size_t>(i)];
    const Vec3 hi = cfg.u_box.upper - u0_window[static_cast<std::size_t>(i)];
    if (!(lo.array() <= hi.array()).all()) { throw InfeasibleBox("build_qp: empty control interval at prediction step " + std::to_string(i)); }
    p.lower.segment<3>(3 * i) = lo;
    p.upper.segment<3>(3 * i) = hi;
  }

  // Rows for predicted states x_{1..N}, only for components with a finite bound.
  std::vector<Eigen::Index> rows;
  std::vector<double> rlo, rhi;
  auto add_box = [&](const std::optional<Box3> & box, Eigen::Index offset) {
    if (!box || box->is_entire_space()) { return; }
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index c = 0; c < 3; ++c) {
        const double lo = box->lower(c), hi = box->upper(c);
        if (!std::isfinite(lo) && !std::isfinite(hi)) { continue; }
        const Eigen::Index r = 6 * i + offset + c;
        rows.push_back(r);
        rlo.push_back(lo - free_resp(r));
        rhi.push_back(hi - free_resp(r));
      }
    }
  };
  add_box(cfg.eR_box, 0);
  add_box(cfg.eOmega_box, 3);

  const auto m = static_cast<Eigen::Index>(rows.size());
  p.A.resize(m, 3 * N);
  p.a_lower.resize(m);
  p.a_upper.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    p.A.row(r)   = pred.Gamma.row(rows[static_cast<std::size_t>(r)]);
    p.a_lower(r) = rlo[static_cast<std::size_t>(r)];
    p.a_upper(r) = rhi[static_cast<std::size_t>(r)];
  }
  return p;
}

struct MpcStepResult
{
  Vec3 du = Vec3::Zero();
  QpSolution solution;
};

/**
 * @brief Receding-horizon controller workspace.
 *
 * Keeps the previous solution for warm starting; use one instance per control loop.
 */
class MpcController
{
public:
  explicit MpcController(MpcConfig cfg) : cfg_(std::move(cfg))
  {
    if (auto issues = validate(cfg_); !issues.empty()) { throw ConfigError("MpcConfig: " + issues.front()); }
  }

  const MpcConfig & config() const { return cfg_; }
  void reset() { previous_.reset(); }

  /// Solves the QP and returns the first control block du_{k|k}.
  MpcStepResult step(const ErrorState & err, const DiscreteLinearModel & model, std::span<const Vec3> u0_window)
  {
    const QpProblem p = build_qp(err, model, cfg_, u0_window);
    std::optional<Eigen::VectorXd> warm;
    if (cfg_.warm_start && previous_) {
      const auto n = previous_->size();
      Eigen::VectorXd shifted(n);
      shifted.head(n - 3) = previous_->tail(n - 3);
      shifted.tail(3)     = previous_->tail(3);
      warm                = shifted;
    }
    MpcStepResult r;
    r.solution = solve_qp(p, cfg_.qp, warm);
    if (r.solution.status == QpStatus::Infeasible) { throw Error("mpc_step: quadratic program is infeasible"); }
    r.solution.x = r.solution.x.cwiseMax(p.lower).cwiseMin(p.upper);
    previous_    = r.solution.x;
    r.du         = r.solution.x.head<3>();
    return r;
  }

private:
  MpcConfig cfg_;
  std::optional<Eigen::VectorXd> previous_;
};

/// Stateless single step (cold start).
inline Vec3 mpc_step(const ErrorState & err, const MpcConfig & cfg, const DiscreteLinearModel & model, std::span<const Vec3> u0_window)
{
  MpcConfig c  = cfg;
  c.warm_start = false;
  return MpcController(c).step(err, model, u0_window).du;
}

}  // namespace lgmpc
