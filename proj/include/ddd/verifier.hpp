#pragma once

// Data-driven (L, nu, N)-dissipativity test.
//
// From one trajectory z_[0,T+N-1] the stacked data Z_[0,T-1] is arranged in
// the Hankel matrix H = H_L(Z). Columns of H combine into every length-(L+N)
// trajectory of the system; the selector U picks z(0..nu-1) out of a column,
// so H * null(U H) spans the trajectories that start from rest. The supply
// is nonnegative over all of them iff
//
//   U_perp^T H^T Phi_L H U_perp  >= 0,   Phi_L = W (x) Phi_N,
//
// with W = I_L (all windows) or W = diag(0_nu, I_{L-nu}) (windows after the
// zero prefix only). See WindowWeighting.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/excitation.hpp"
#include "ddd/linalg.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"

namespace ddd {

/// Which stacked windows Z(k), k = 0..L-1, of a Hankel column enter the test.
///
/// kFromRest weights k = nu..L-1 only, so the test decides
///   sum_{k=0}^{L-1-nu} w(k) >= 0 over all trajectories from rest.
/// kAllWindows uses I_L (x) Phi_N for every window. For N >= 1 this also
/// counts the windows k = nu-N..nu-1 whose first samples are the zero
/// prefix, which adds boundary terms that the horizon-(L-nu) inequality does
/// not contain. Both agree for N = 0.
enum class WindowWeighting { kFromRest, kAllWindows };

inline const char* to_string(WindowWeighting w) {
  return w == WindowWeighting::kFromRest ? "from-rest" : "all-windows";
}

struct Tolerances {
  double eig_tol = 1e-8;  // accept min eigenvalue >= -eig_tol
  RankTolerance rank;
};

struct VerificationProblem {
  Trajectory traj;
  SupplyRate supply;
  Eigen::Index horizon = 1;                // L
  Eigen::Index nu = 0;                     // zero-initialization length
  std::optional<Eigen::Index> samples;     // T; defaults to traj.length() - N
  std::optional<Eigen::Index> order;       // n, when known
  Tolerances tol;
  WindowWeighting weighting = WindowWeighting::kFromRest;
};

struct Verdict {
  bool dissipative = false;
  double min_eigenvalue = 0.0;
  Eigen::Index nullspace_dim = 0;
  Eigen::Index pe_order_checked = 0;  // 0 when the order was not supplied
  bool pe_passed = false;
  bool statement_ii_applicable = false;

  // Smallest eigenvalue over directions that produce a nonzero trajectory
  // (the kernel of H U_perp only contributes exact zeros to the spectrum).
  double trajectory_min_eigenvalue = 0.0;
  Eigen::Index trajectory_dim = 0;

  // Audit trail.
  Eigen::Index horizon = 0, nu = 0, depth = 0, samples = 0;
  Eigen::Index hankel_rows = 0, hankel_cols = 0;
  Eigen::Index constraint_rows = 0, constraint_rank = 0;
  double constraint_norm = 0.0;     // ||U H||_F
  double nullspace_residual = 0.0;  // ||U H U_perp||_F
  double eig_tol = 0.0;
  WindowWeighting weighting = WindowWeighting::kFromRest;
};

/// U = [I_nu (x) (I_{m+p} 0_{(m+p) x (m+p)N}),  0], of size
/// nu(m+p) x L(N+1)(m+p).
inline Matrix build_selector_u(Eigen::Index nu, Eigen::Index horizon, Eigen::Index depth,
                               Eigen::Index inputs, Eigen::Index outputs) {
  if (nu < 1 || nu >= horizon) throw DimensionError("selector needs 0 < nu < L");
  if (depth < 0 || inputs < 1 || outputs < 1) throw DimensionError("invalid selector dimensions");
  const Eigen::Index s = inputs + outputs, stacked = s * (depth + 1);
  Matrix u = Matrix::Zero(nu * s, horizon * stacked);
  for (Eigen::Index b = 0; b < nu; ++b)
    u.block(b * s, b * stacked, s, s).setIdentity();
  return u;
}

/// Orthonormal U_perp with M U_perp = 0. An empty numerical null space is an
/// error: no trajectory starting from rest can be represented.
inline NullSpace constrained_nullspace(const Matrix& m, const RankTolerance& tol = {}) {
  if (m.size() == 0) throw DimensionError("constrained_nullspace needs a nonempty matrix");
  NullSpace ns = numerical_nullspace(m, tol);
  if (ns.basis.cols() == 0)
    throw NumericalError("empty null space of the initial-condition constraint (rank " +
                         std::to_string(ns.rank) + " of " + std::to_string(m.cols()) +
                         " columns); more data is needed");
  return ns;
}

/// Everything about the data that does not depend on the supply rate.
/// Reused across supplies with the same (L, nu, N, T).
struct ProjectedData {
  BlockHankel hankel;      // H_L(Z)
  NullSpace nullspace;     // of U H
  Matrix projected;        // H U_perp
  double constraint_norm = 0.0;
  double nullspace_residual = 0.0;
  Eigen::Index horizon = 0, nu = 0, depth = 0, samples = 0;
  ManifestLayout layout;
};

inline ProjectedData project_data(const Trajectory& traj, Eigen::Index horizon, Eigen::Index nu,
                                  Eigen::Index depth, std::optional<Eigen::Index> samples,
                                  const RankTolerance& rank_tol = {}) {
  if (nu < 1 || nu >= horizon) throw DimensionError("need 0 < nu < L");
  const Eigen::Index t = samples.value_or(traj.length() - depth);
  if (t < 1 || t + depth > traj.length())
    throw DimensionError("trajectory too short: need T + N = " + std::to_string(t + depth) +
                         " samples, have " + std::to_string(traj.length()));
  if (horizon > t)
    throw DimensionError("trajectory too short: L = " + std::to_string(horizon) +
                         " exceeds T = " + std::to_string(t));

  ProjectedData out;
  out.horizon = horizon;
  out.nu = nu;
  out.depth = depth;
  out.samples = t;
  out.layout = traj.layout();

  const Matrix z = interleave(traj).leftCols(t + depth);
  const StackedTrajectory stacked = stack_shifted(z, depth);
  out.hankel = build_hankel(stacked.samples, horizon);

  const Matrix selector =
      build_selector_u(nu, horizon, depth, out.layout.m, out.layout.p);
  const Matrix constraint = selector * out.hankel.matrix;
  out.nullspace = constrained_nullspace(constraint, rank_tol);
  out.projected = out.hankel.matrix * out.nullspace.basis;
  out.constraint_norm = constraint.norm();
  out.nullspace_residual = (constraint * out.nullspace.basis).norm();
  return out;
}

/// sum_{b=first}^{L-1} P_b^T Phi_N P_b, P_b the b-th block row of P; with
/// first = 0 this is P^T (I_L (x) Phi_N) P.
inline Matrix block_quadratic_form(const Matrix& projected, const Matrix& phi_n,
                                   Eigen::Index horizon, Eigen::Index first = 0) {
  const Eigen::Index s = phi_n.rows();
  if (projected.rows() != s * horizon) throw DimensionError("projected data does not match Phi_L");
  if (first < 0 || first >= horizon) throw DimensionError("first weighted window out of range");
  Matrix g = Matrix::Zero(projected.cols(), projected.cols());
  for (Eigen::Index b = first; b < horizon; ++b) {
    const auto pb = projected.middleRows(b * s, s);
    g.noalias() += pb.transpose() * (phi_n * pb);
  }
  return g;
}

inline void check_supply_matches(const ProjectedData& data, const SupplyRate& supply) {
  if (supply.depth() != data.depth || supply.inputs() != data.layout.m ||
      supply.outputs() != data.layout.p)
    throw DimensionError("supply rate does not match the projected data");
}

inline Eigen::Index first_window(const ProjectedData& data, WindowWeighting w) {
  return w == WindowWeighting::kFromRest ? data.nu : 0;
}

/// U_perp^T H^T Phi_L H U_perp.
inline Matrix test_matrix(const ProjectedData& data, const SupplyRate& supply,
                          WindowWeighting w = WindowWeighting::kFromRest) {
  check_supply_matches(data, supply);
  return block_quadratic_form(data.projected, supply.assembled(), data.horizon, first_window(data, w));
}

inline double min_eigenvalue_for(const ProjectedData& data, const SupplyRate& supply,
                                 WindowWeighting w = WindowWeighting::kFromRest) {
  return min_symmetric_eigenvalue(test_matrix(data, supply, w));
}

struct RestrictedEigenvalue {
  double min_eigenvalue = 0.0;
  Eigen::Index dim = 0;
};

/// Smallest eigenvalue of the test matrix restricted to the row space of the
/// weighted rows of H U_perp, i.e. over combinations that yield a nonzero
/// weighted trajectory segment.
inline RestrictedEigenvalue trajectory_eigenvalue_for(const ProjectedData& data,
                                                      const SupplyRate& supply,
                                                      WindowWeighting w = WindowWeighting::kFromRest,
                                                      const RankTolerance& tol = {}) {
  check_supply_matches(data, supply);
  const Eigen::Index first = first_window(data, w);
  const Eigen::Index s = supply.assembled().rows();
  const Matrix weighted = data.projected.bottomRows((data.horizon - first) * s);
  Eigen::JacobiSVD<Matrix> svd(weighted, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cut = tol.threshold(weighted.rows(), weighted.cols(), sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  RestrictedEigenvalue out;
  out.dim = rank;
  if (rank == 0) return out;
  const Matrix reduced = weighted * svd.matrixV().leftCols(rank);
  out.min_eigenvalue = min_symmetric_eigenvalue(
      block_quadratic_form(reduced, supply.assembled(), data.horizon - first));
  return out;
}

inline Verdict verify(const VerificationProblem& problem) {
  const Trajectory& traj = problem.traj;
  const SupplyRate& supply = problem.supply;
  if (supply.inputs() != traj.inputs() || supply.outputs() != traj.outputs())
    throw DimensionError("supply rate and trajectory dimensions differ");
  if (!(problem.tol.eig_tol >= 0.0)) throw DimensionError("eig_tol must be nonnegative");

  const ProjectedData data = project_data(traj, problem.horizon, problem.nu, supply.depth(),
                                          problem.samples, problem.tol.rank);
  Verdict v;
  v.min_eigenvalue = min_eigenvalue_for(data, supply, problem.weighting);
  v.weighting = problem.weighting;
  v.eig_tol = problem.tol.eig_tol;
  v.dissipative = v.min_eigenvalue >= -problem.tol.eig_tol;
  v.nullspace_dim = data.nullspace.basis.cols();
  const RestrictedEigenvalue restricted = trajectory_eigenvalue_for(data, supply, problem.weighting, problem.tol.rank);
  v.trajectory_min_eigenvalue = restricted.min_eigenvalue;
  v.trajectory_dim = restricted.dim;
  v.horizon = data.horizon;
  v.nu = data.nu;
  v.depth = data.depth;
  v.samples = data.samples;
  v.hankel_rows = data.hankel.matrix.rows();
  v.hankel_cols = data.hankel.matrix.cols();
  v.constraint_rows = data.nu * data.layout.dim();
  v.constraint_rank = data.nullspace.rank;
  v.constraint_norm = data.constraint_norm;
  v.nullspace_residual = data.nullspace_residual;
  v.statement_ii_applicable =
      data.samples >= min_T_for_nullspace(data.horizon, data.layout.m, data.layout.p);

  if (problem.order) {
    v.pe_order_checked = data.horizon + data.depth + *problem.order;
    const Matrix u = traj.u().leftCols(data.samples + data.depth);
    if (v.pe_order_checked <= u.cols())
      v.pe_passed = is_persistently_exciting(u, v.pe_order_checked, problem.tol.rank).exciting;
  }
  return v;
}

enum class StatementIiMode {
  kAllNu,     // check every nu in [n, L)
  kSingleNu,  // one nu, valid when T >= L(m+p+1) - 1
};

struct StatementIiResult {
  bool dissipative = false;
  StatementIiMode mode = StatementIiMode::kAllNu;
  std::vector<Verdict> verdicts;  // one per nu checked, ascending nu
};

/// (L, N)-dissipativity from the verdicts over nu in [n, L). In single-nu
/// mode only `base.nu` is checked (or n if base.nu is outside [n, L)), which
/// requires the larger data length bound.
inline StatementIiResult verify_statement_ii(const VerificationProblem& base, Eigen::Index order,
                                             StatementIiMode mode = StatementIiMode::kAllNu) {
  if (order < 1 || order >= base.horizon) throw DimensionError("statement (ii) needs 1 <= n < L");
  StatementIiResult result;
  result.mode = mode;
  VerificationProblem p = base;
  p.order = order;
  if (mode == StatementIiMode::kSingleNu) {
    const Eigen::Index t = base.samples.value_or(base.traj.length() - base.supply.depth());
    const long bound = min_T_for_nullspace(base.horizon, base.traj.inputs(), base.traj.outputs());
    if (t < bound)
      throw DimensionError("single-nu mode needs T >= " + std::to_string(bound) + ", have " +
                           std::to_string(t));
    if (p.nu < order || p.nu >= base.horizon) p.nu = order;
    result.verdicts.push_back(verify(p));
  } else {
    for (Eigen::Index nu = order; nu < base.horizon; ++nu) {
      p.nu = nu;
      result.verdicts.push_back(verify(p));
    }
  }
  result.dissipative = true;
  for (const Verdict& v : result.verdicts) result.dissipative = result.dissipative && v.dissipative;
  return result;
}

}  // namespace ddd
