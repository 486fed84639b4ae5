#pragma once

// Model-based ground truth for finite-horizon dissipativity.
//
// With zero initial state the stacked output is y = G u, G the block Toeplitz
// matrix of Markov parameters, so the supply summed over a finite horizon is
// a quadratic form in the stacked input. Dissipativity over all such
// trajectories is then a single eigenvalue question.

#include <algorithm>
#include <string>

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"
#include "ddd/lti.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"

namespace ddd {

/// (pK) x (mK) block lower-triangular Toeplitz matrix, block (i, j) = M_{i-j}.
inline Matrix toeplitz_response(const StateSpaceModel& model, Eigen::Index horizon) {
  if (horizon < 1) throw DimensionError("toeplitz_response needs K >= 1");
  const Eigen::Index p = model.outputs(), m = model.inputs();
  const auto markov = markov_parameters(model, horizon);
  Matrix g = Matrix::Zero(p * horizon, m * horizon);
  for (Eigen::Index i = 0; i < horizon; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      g.block(i * p, j * m, p, m) = markov[static_cast<std::size_t>(i - j)];
  return g;
}

/// Whether the stacked windows that straddle the zero prefix are counted.
///
/// kExcluded sums w(k) for k = 0 .. L-1-nu over a trajectory from rest,
/// which is the finite-horizon dissipation inequality itself.
/// kIncluded additionally counts the min(N, nu) windows Z(k), k < 0, whose
/// leading samples lie in the zero prefix. This is the quantity the
/// data-driven test sums over its L stacked windows; the two coincide when
/// N = 0.
enum class LeadIn { kExcluded, kIncluded };

/// Stacked manifest samples [z(0); ...; z(K-1)] as a linear map of the
/// stacked input [u(0); ...; u(K-1)] for zero initial state.
inline Matrix trajectory_map(const StateSpaceModel& model, Eigen::Index samples) {
  const ManifestLayout lay{model.inputs(), model.outputs()};
  const Matrix g = toeplitz_response(model, samples);
  Matrix out = Matrix::Zero(lay.dim() * samples, lay.m * samples);
  for (Eigen::Index t = 0; t < samples; ++t) {
    out.middleRows(t * lay.dim() + lay.output_offset(), lay.p) = g.middleRows(t * lay.p, lay.p);
    out.block(t * lay.dim() + lay.input_offset(), t * lay.m, lay.m, lay.m).setIdentity();
  }
  return out;
}

/// 0/1 map from [z(0); ...; z(K-1)] to the stacked windows
/// [Z(first); ...; Z(windows-1)], first = -lead_in, where z(t) = 0 for t < 0.
inline Matrix selection_map(const ManifestLayout& lay, Eigen::Index samples, Eigen::Index depth,
                            Eigen::Index windows, Eigen::Index lead_in = 0) {
  const Eigen::Index s = lay.dim(), stacked = s * (depth + 1);
  if (windows + depth > samples) throw DimensionError("selection map needs K >= windows + N");
  Matrix p = Matrix::Zero(stacked * (windows + lead_in), s * samples);
  for (Eigen::Index w = 0; w < windows + lead_in; ++w) {
    const Eigen::Index k = w - lead_in;
    for (Eigen::Index i = 0; i <= depth; ++i) {
      const Eigen::Index t = k + i;
      if (t < 0) continue;
      p.block(w * stacked + i * s, t * s, s, s).setIdentity();
    }
  }
  return p;
}

struct OracleVerdict {
  bool dissipative = false;
  double min_eigenvalue = 0.0;
  Eigen::Index input_dim = 0;  // size of the quadratic form
};

/// Decides sum_{k=0}^{L-1-nu} w(k) >= 0 over every trajectory from rest,
/// exactly, as min eig(W) >= -eig_tol with W the supply's quadratic form in
/// the stacked input over K = L - nu + N samples.
inline OracleVerdict oracle_dissipative(const StateSpaceModel& model, const SupplyRate& supply,
                                        Eigen::Index horizon, Eigen::Index nu,
                                        double eig_tol = 1e-8, LeadIn lead_in = LeadIn::kExcluded) {
  if (supply.inputs() != model.inputs() || supply.outputs() != model.outputs())
    throw DimensionError("supply rate and model dimensions differ");
  if (nu < 0 || nu >= horizon) throw DimensionError("oracle needs 0 <= nu < L");
  const Eigen::Index n = supply.depth();
  const Eigen::Index windows = horizon - nu;
  const Eigen::Index samples = windows + n;
  const Eigen::Index lead = lead_in == LeadIn::kIncluded ? std::min<Eigen::Index>(n, nu) : 0;
  const ManifestLayout lay{model.inputs(), model.outputs()};

  const Matrix stacked = selection_map(lay, samples, n, windows, lead) * trajectory_map(model, samples);
  const Matrix phi = block_diagonal_repeat(supply.assembled(), windows + lead);
  const Matrix w = stacked.transpose() * phi * stacked;

  OracleVerdict v;
  v.min_eigenvalue = min_symmetric_eigenvalue(w);
  v.dissipative = v.min_eigenvalue >= -eig_tol;
  v.input_dim = w.rows();
  return v;
}

/// Smallest gamma (to within `tol`) for which gamma^2 |u|^2 - |y|^2 summed
/// over L - nu samples from rest is nonnegative. Found by bisection on the
/// exact oracle decision.
inline double oracle_l2_gain(const StateSpaceModel& model, Eigen::Index horizon, Eigen::Index nu,
                             double tol = 1e-6) {
  if (!(tol > 0.0)) throw DimensionError("oracle_l2_gain needs tol > 0");
  const Eigen::Index m = model.inputs(), p = model.outputs();
  auto feasible = [&](double gamma) {
    return oracle_dissipative(model, SupplyRate::l2_gain(gamma, m, p), horizon, nu, 0.0).dissipative;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e150) throw NumericalError("oracle_l2_gain: no finite upper bound");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace ddd
