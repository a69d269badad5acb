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
 * @brief Dense convex quadratic programming.
 *
 * The problem is
 *   min  1/2 x^T H x + f^T x + c
 *   s.t. lower <= x <= upper,  a_lower <= A x <= a_upper.
 *
 * Box-only problems are solved by a primal active-set method. General rows are handled by an
 * augmented Lagrangian over (x, z) with Ax = z, z boxed, whose subproblems are again box QPs.
 */

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace lgmpc {

struct QpProblem
{
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  double constant = 0.0;
  Eigen::VectorXd lower;  ///< may hold -inf
  Eigen::VectorXd upper;  ///< may hold +inf

  Eigen::MatrixXd A;  ///< general rows, may have zero rows
  Eigen::VectorXd a_lower;
  Eigen::VectorXd a_upper;

  Eigen::Index size() const { return f.size(); }

  double objective(const Eigen::VectorXd & x) const { return 0.5 * x.dot(H * x) + f.dot(x) + constant; }

  /// Unbounded problem of dimension n.
  static QpProblem unconstrained(Eigen::MatrixXd h, Eigen::VectorXd f)
  {
    QpProblem p;
    const auto n = f.size();
    p.H          = std::move(h);
    p.f          = std::move(f);
    p.lower      = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    p.upper      = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    p.A.resize(0, n);
    return p;
  }
};

enum class QpStatus { Solved, MaxIterations, Infeasible };

inline const char * to_string(QpStatus s)
{
  switch (s) {
  case QpStatus::Solved: return "solved";
  case QpStatus::MaxIterations: return "max_iterations";
  case QpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

struct QpSolution
{
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::Solved;
  int active = 0;           ///< bounds active at the solution
  double kkt_residual = 0.0;  ///< |x - clamp(x - grad)|_inf
};

struct QpSettings
{
  double tol = 1e-8;
  int max_iter = 10000;
};

namespace detail {

inline Eigen::VectorXd clamp(const Eigen::VectorXd & x, const Eigen::VectorXd & lo, const Eigen::VectorXd & hi)
{
  return x.cwiseMax(lo).cwiseMin(hi);
}

inline double projected_gradient_residual(
  const Eigen::MatrixXd & h, const Eigen::VectorXd & f, const Eigen::VectorXd & lo, const Eigen::VectorXd & hi, const Eigen::VectorXd & x)
{
  const Eigen::VectorXd g = h * x + f;
  return (x - clamp(x - g, lo, hi)).lpNorm<Eigen::Infinity>();
}

enum class Bound : signed char { Free = 0, Lower = -1, Upper = 1 };

/// Primal active-set for a strictly convex box QP. Returns iterations used, or -1 on cap.
inline int box_active_set(const Eigen::MatrixXd & h,
  const Eigen::VectorXd & f,
  const Eigen::VectorXd & lo,
  const Eigen::VectorXd & hi,
  Eigen::VectorXd & x,
  std::vector<Bound> & state,
  double tol,
  int max_iter)
{
  const Eigen::Index n = f.size();
  const double scale   = 1.0 + h.cwiseAbs().maxCoeff();
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd g = h * x + f;

    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == Bound::Free) { free.push_back(i); }
    }

    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    if (!free.empty()) {
      const auto m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hff(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        gf(a) = g(free[a]);
        for (Eigen::Index b = 0; b < m; ++b) { hff(a, b) = h(free[a], free[b]); }
      }
      const Eigen::VectorXd df = hff.llt().solve(-gf);
      for (Eigen::Index a = 0; a < m; ++a) { d(free[a]) = df(a); }
    }

    if (d.lpNorm<Eigen::Infinity>() <= tol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      // Stationary on the current face: release the bound with the most negative multiplier.
      Eigen::Index worst = -1;
      double worst_val   = tol * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == Bound::Free || lo(i) == hi(i)) { continue; }
        const double mult = state[i] == Bound::Lower ? -g(i) : g(i);  // > 0 means it wants to leave
        if (mult > worst_val) {
          worst_val = mult;
          worst     = i;
        }
      }
      if (worst < 0) { return it; }
      state[worst] = Bound::Free;
      continue;
    }

    double step          = 1.0;
    Eigen::Index block   = -1;
    Bound block_side     = Bound::Free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] != Bound::Free) { continue; }
      if (d(i) < 0.0 && std::isfinite(lo(i))) {
        const double s = (lo(i) - x(i)) / d(i);
        if (s < step) {
          step       = s;
          block      = i;
          block_side = Bound::Lower;
        }
      } else if (d(i) > 0.0 && std::isfinite(hi(i))) {
        const double s = (hi(i) - x(i)) / d(i);
        if (s < step) {
          step       = s;
          block      = i;
          block_side = Bound::Upper;
        }
      }
    }
    step = std::max(step, 0.0);
    x += step * d;
    if (block >= 0) {
      state[block] = block_side;
      x(block)     = block_side == Bound::Lower ? lo(block) : hi(block);
    }
  }
  return -1;
}

/// Box QP with warm start; PSD H is handled by proximal-point regularization.
inline QpSolution solve_box(const Eigen::MatrixXd & h,
  const Eigen::VectorXd & f,
  const Eigen::VectorXd & lo,
  const Eigen::VectorXd & hi,
  const Eigen::VectorXd & x0,
  const QpSettings & settings)
{
  const Eigen::Index n = f.size();
  QpSolution sol;
  sol.x = clamp(x0, lo, hi);

  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::Free);
  auto reset_state = [&](const Eigen::VectorXd & x) {
    for (Eigen::Index i = 0; i < n; ++i) {
      state[i] = x(i) <= lo(i) ? Bound::Lower : (x(i) >= hi(i) ? Bound::Upper : Bound::Free);
    }
  };
  reset_state(sol.x);

  Eigen::LLT<Eigen::MatrixXd> llt(h);
  const bool strictly_convex = llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 1e-12;

  if (strictly_convex) {
    const int it   = box_active_set(h, f, lo, hi, sol.x, state, 0.01 * settings.tol, settings.max_iter);
    sol.iterations = it < 0 ? settings.max_iter : it;
    sol.status     = it < 0 ? QpStatus::MaxIterations : QpStatus::Solved;
  } else {
    const double eps = 1e-3 * (1.0 + h.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd hr = h + eps * Eigen::MatrixXd::Identity(n, n);
    sol.status = QpStatus::MaxIterations;
    while (sol.iterations < settings.max_iter) {
      const Eigen::VectorXd prev = sol.x;
      const Eigen::VectorXd fr   = f - eps * prev;
      const int it = box_active_set(hr, fr, lo, hi, sol.x, state, 0.01 * settings.tol, settings.max_iter - sol.iterations);
      sol.iterations += it < 0 ? settings.max_iter : it;
      if (projected_gradient_residual(h, f, lo, hi, sol.x) <= settings.tol) {
        sol.status = QpStatus::Solved;
        break;
      }
      if (it < 0) { break; }
    }
  }

  sol.kkt_residual = projected_gradient_residual(h, f, lo, hi, sol.x);
  if (sol.status == QpStatus::Solved && sol.kkt_residual > settings.tol * (1.0 + f.lpNorm<Eigen::Infinity>())) {
    sol.status = QpStatus::MaxIterations;
  }
  sol.objective = 0.5 * sol.x.dot(h * sol.x) + f.dot(sol.x);
  sol.active    = static_cast<int>(std::count_if(state.begin(), state.end(), [](Bound b) { return b != Bound::Free; }));
  return sol;
}

}  // namespace detail

/**
 * @brief Solves a convex QP.
 *
 * Deterministic given the inputs and warm start. On MaxIterations the best iterate is returned.
 */
inline QpSolution solve_qp(const QpProblem & p, const QpSettings & settings = {}, const std::optional<Eigen::VectorXd> & warm = std::nullopt)
{
  const Eigen::Index n = p.size();
  if ((p.lower.array() > p.upper.array()).any()) {
    QpSolution sol;
    sol.x      = Eigen::VectorXd::Zero(n);
    sol.status = QpStatus::Infeasible;
    return sol;
  }
  const Eigen::VectorXd x0 = warm && warm->size() == n ? *warm : Eigen::VectorXd::Zero(n);
  const Eigen::Index m     = p.A.rows();

  if (m == 0) {
    QpSolution sol = detail::solve_box(p.H, p.f, p.lower, p.upper, x0, settings);
    sol.objective += p.constant;
    return sol;
  }

  if ((p.a_lower.array() > p.a_upper.array()).any()) {
    QpSolution sol;
    sol.x      = detail::clamp(x0, p.lower, p.upper);
    sol.status = QpStatus::Infeasible;
    return sol;
  }

  // Augmented Lagrangian on (x, z): Ax = z, a_lower <= z <= a_upper.
  const Eigen::Index nz = n + m;
  Eigen::VectorXd lo(nz), hi(nz), y = Eigen::VectorXd::Zero(m), xz(nz);
  lo << p.lower, p.a_lower;
  hi << p.upper, p.a_upper;
  xz << x0, detail::clamp(p.A * x0, p.a_lower, p.a_upper);

  const double h_scale = 1.0 + p.H.cwiseAbs().maxCoeff();
  double rho           = h_scale;
  double prev_viol     = std::numeric_limits<double>::infinity();
  QpSolution inner;
  int total = 0;
  QpSettings inner_settings = settings;
  inner_settings.tol        = 0.1 * settings.tol;

  for (int outer = 0; outer < 200 && total < settings.max_iter; ++outer) {
    Eigen::MatrixXd hz = Eigen::MatrixXd::Zero(nz, nz);
    hz.topLeftCorner(n, n)     = p.H + rho * p.A.transpose() * p.A;
    hz.topRightCorner(n, m)    = -rho * p.A.transpose();
    hz.bottomLeftCorner(m, n)  = -rho * p.A;
    hz.bottomRightCorner(m, m) = rho * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd fz(nz);
    fz << p.f + p.A.transpose() * y, -y;

    inner_settings.max_iter = settings.max_iter - total;
    inner = detail::solve_box(hz, fz, lo, hi, xz, inner_settings);
    total += inner.iterations;
    xz = inner.x;

    const Eigen::VectorXd x = xz.head(n);
    const Eigen::VectorXd r = p.A * x - xz.tail(m);
    y += rho * r;
    const double viol = r.lpNorm<Eigen::Infinity>();

    // Stationarity of the original problem with multipliers y on the rows.
    const Eigen::VectorXd g = p.H * x + p.f + p.A.transpose() * y;
    const double stat       = (x - detail::clamp(x - g, p.lower, p.upper)).lpNorm<Eigen::Infinity>();
    if (viol <= settings.tol && stat <= settings.tol * (1.0 + p.f.lpNorm<Eigen::Infinity>())) {
      QpSolution sol;
      sol.x            = x;
      sol.objective    = p.objective(x);
      sol.iterations   = total;
      sol.status       = QpStatus::Solved;
      sol.active       = inner.active;
      sol.kkt_residual = std::max(stat, viol);
      return sol;
    }
    if (viol > 0.25 * prev_viol) { rho *= 10.0; }
    prev_viol = viol;
    if (rho > 1e12 * h_scale) {
      QpSolution sol;
      sol.x            = x;
      sol.objective    = p.objective(x);
      sol.iterations   = total;
      sol.status       = viol > 1e-6 ? QpStatus::Infeasible : QpStatus::MaxIterations;
      sol.kkt_residual = std::max(stat, viol);
      return sol;
    }
  }

  QpSolution sol;
  sol.x          = xz.head(n);
  sol.objective  = p.objective(sol.x);
  sol.iterations = total;
  sol.status     = QpStatus::MaxIterations;
  return sol;
}

}  // namespace lgmpc
