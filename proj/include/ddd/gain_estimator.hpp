#pragma once

// Data-driven upper bound on the finite-horizon L2 gain: bisection on gamma
// with the supply gamma^2 |u|^2 - |y|^2 checked by the dissipativity test.

#include <optional>
#include <utility>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"
#include "ddd/trajectory.hpp"
#include "ddd/verifier.hpp"

namespace ddd {

struct BisectionConfig {
  double abs_tol = 0.001;
  int max_iters = 50;
  double initial_upper = 1.0;  // doubled until feasible
  double eig_tol = 1e-8;
  int doubling_cap = 30;       // give up after initial_upper * 2^30
  RankTolerance rank;
};

struct GainSample {
  double gamma;
  double min_eigenvalue;
};

struct GainEstimate {
  std::optional<double> gamma;  // empty when infeasible
  int iterations = 0;           // bisection steps
  bool converged = false;       // final bracket narrower than abs_tol
  double lower = 0.0, upper = 0.0;
  std::vector<GainSample> history;

  bool feasible() const { return gamma.has_value(); }
};

/// The gamma-independent part of the test for one (data, L, nu): H U_perp is
/// split into its output and input rows so that
///   G(gamma) = gamma^2 * input_gram - output_gram.
class L2GainTest {
 public:
  L2GainTest(const Trajectory& traj, Eigen::Index horizon, Eigen::Index nu,
             std::optional<Eigen::Index> samples = std::nullopt, const RankTolerance& rank = {})
      : data_(project_data(traj, horizon, nu, 0, samples, rank)) {
    const ManifestLayout& lay = data_.layout;
    const Eigen::Index cols = data_.projected.cols();
    input_gram_ = Matrix::Zero(cols, cols);
    output_gram_ = Matrix::Zero(cols, cols);
    // Only windows after the zero prefix; with N = 0 the skipped ones vanish.
    for (Eigen::Index b = nu; b < horizon; ++b) {
      const auto block = data_.projected.middleRows(b * lay.dim(), lay.dim());
      const auto ys = block.middleRows(lay.output_offset(), lay.p);
      const auto us = block.middleRows(lay.input_offset(), lay.m);
      output_gram_.noalias() += ys.transpose() * ys;
      input_gram_.noalias() += us.transpose() * us;
    }
  }

  double min_eigenvalue(double gamma) const {
    return min_symmetric_eigenvalue(gamma * gamma * input_gram_ - output_gram_);
  }

  bool feasible(double gamma, double eig_tol = 1e-8) const {
    return min_eigenvalue(gamma) >= -eig_tol;
  }

  const ProjectedData& data() const { return data_; }

 private:
  ProjectedData data_;
  Matrix input_gram_, output_gram_;
};

/// Bracket [0, upper] with upper doubled from `initial_upper` until
/// feasible, then bisection on gamma until the bracket is below abs_tol or
/// max_iters steps were taken. Returns the feasible end of the bracket.
inline GainEstimate estimate_l2_gain(const L2GainTest& test, const BisectionConfig& cfg = {}) {
  if (!(cfg.abs_tol > 0.0)) throw DimensionError("bisection tolerance must be positive");
  if (cfg.max_iters < 1) throw DimensionError("bisection needs max_iters >= 1");
  if (!(cfg.initial_upper > 0.0)) throw DimensionError("initial upper bound must be positive");

  GainEstimate est;
  auto probe = [&](double gamma) {
    const double eig = test.min_eigenvalue(gamma);
    est.history.push_back({gamma, eig});
    return eig >= -cfg.eig_tol;
  };

  double hi = cfg.initial_upper;
  bool found = probe(hi);
  for (int d = 0; !found && d < cfg.doubling_cap; ++d) {
    hi *= 2.0;
    found = probe(hi);
  }
  est.upper = hi;
  if (!found) return est;

  double lo = 0.0;
  while (hi - lo >= cfg.abs_tol && est.iterations < cfg.max_iters) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? hi : lo) = mid;
    ++est.iterations;
  }
  est.lower = lo;
  est.upper = hi;
  est.converged = hi - lo < cfg.abs_tol;
  est.gamma = hi;
  return est;
}

inline GainEstimate estimate_l2_gain(const Trajectory& traj, Eigen::Index horizon, Eigen::Index nu,
                                     const BisectionConfig& cfg = {},
                                     std::optional<Eigen::Index> samples = std::nullopt) {
  return estimate_l2_gain(L2GainTest(traj, horizon, nu, samples, cfg.rank), cfg);
}

}  // namespace ddd
