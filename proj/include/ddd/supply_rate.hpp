#pragma once

// Generalized quadratic supply rates over shifted samples,
//   w(k) = sum_{i,j=0}^{N} z(k+i)^T Phi_ij z(k+j),
// stored block-wise. Only blocks with i <= j are kept; Phi_ji = Phi_ij^T.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"
#include "ddd/trajectory.hpp"

namespace ddd {

class SupplyRate {
 public:
  using BlockIndex = std::pair<int, int>;

  /// Blocks may be given for (i, j) with either ordering. Missing blocks are
  /// zero or, when the transposed position is present, its transpose.
  /// Giving both (i, j) and (j, i) is accepted only if they are transposes.
  SupplyRate(int depth, Eigen::Index inputs, Eigen::Index outputs,
             const std::map<BlockIndex, Matrix>& blocks, double sym_tol = 1e-12)
      : depth_(depth), layout_{inputs, outputs} {
    if (depth < 0) throw DimensionError("supply depth N must be nonnegative");
    if (inputs < 1 || outputs < 1) throw DimensionError("supply needs m >= 1 and p >= 1");
    const Eigen::Index s = layout_.dim();
    upper_.assign(static_cast<std::size_t>((depth + 1) * (depth + 2) / 2), Matrix::Zero(s, s));
    std::vector<bool> seen(upper_.size(), false);

    for (const auto& [ij, block] : blocks) {
      const auto [i, j] = ij;
      if (i < 0 || j < 0 || i > depth || j > depth)
        throw DimensionError("supply block index out of range");
      if (block.rows() != s || block.cols() != s)
        throw DimensionError("supply blocks must be (m+p) x (m+p)");
      if (!block.allFinite()) throw NumericalError("supply block contains non-finite entries");
      const Matrix oriented = i <= j ? block : Matrix(block.transpose());
      const std::size_t slot = upper_index(std::min(i, j), std::max(i, j));
      if (seen[slot]) {
        if (!nearly_equal(upper_[slot], oriented, sym_tol))
          throw DimensionError("inconsistent blocks (" + std::to_string(i) + "," + std::to_string(j) +
                               ") and their transpose");
        continue;
      }
      if (i == j && !nearly_equal(block, block.transpose(), sym_tol))
        throw DimensionError("diagonal supply block (" + std::to_string(i) + "," +
                             std::to_string(i) + ") is not symmetric");
      upper_[slot] = i == j ? Matrix(0.5 * (block + block.transpose())) : oriented;
      seen[slot] = true;
    }
    assemble();
  }

  /// Classical QSR supply [y;u]^T [Q S; S^T R] [y;u] with N = 0.
  static SupplyRate qsr(const Matrix& q, const Matrix& s, const Matrix& r) {
    const Eigen::Index p = q.rows(), m = r.rows();
    if (q.cols() != p || r.cols() != m || s.rows() != p || s.cols() != m)
      throw DimensionError("QSR blocks have inconsistent shapes");
    Matrix phi(p + m, p + m);
    phi << q, s, s.transpose(), r;
    return {0, m, p, {{{0, 0}, phi}}};
  }

  /// gamma^2 |u|^2 - |y|^2.
  static SupplyRate l2_gain(double gamma, Eigen::Index inputs, Eigen::Index outputs) {
    return qsr(-Matrix::Identity(outputs, outputs), Matrix::Zero(outputs, inputs),
               gamma * gamma * Matrix::Identity(inputs, inputs));
  }

  int depth() const { return depth_; }
  Eigen::Index inputs() const { return layout_.m; }
  Eigen::Index outputs() const { return layout_.p; }
  const ManifestLayout& layout() const { return layout_; }

  /// Phi_ij for any 0 <= i, j <= N.
  Matrix block(int i, int j) const {
    if (i < 0 || j < 0 || i > depth_ || j > depth_) throw DimensionError("supply block index out of range");
    return i <= j ? upper_[upper_index(i, j)] : Matrix(upper_[upper_index(j, i)].transpose());
  }

  /// Phi_N, exactly symmetric, size (N+1)(m+p).
  const Matrix& assembled() const { return phi_n_; }

  SupplyRate scaled(double alpha) const {
    SupplyRate out = *this;
    for (auto& b : out.upper_) b *= alpha;
    out.phi_n_ *= alpha;
    return out;
  }

  SupplyRate negated() const { return scaled(-1.0); }

  std::map<BlockIndex, Matrix> upper_blocks() const {
    std::map<BlockIndex, Matrix> out;
    for (int i = 0; i <= depth_; ++i)
      for (int j = i; j <= depth_; ++j) out.emplace(BlockIndex{i, j}, upper_[upper_index(i, j)]);
    return out;
  }

 private:
  std::size_t upper_index(int i, int j) const {
    // Row-major packing of the upper triangle (i <= j).
    return static_cast<std::size_t>(i * (depth_ + 1) - i * (i - 1) / 2 + (j - i));
  }

  static bool nearly_equal(const Matrix& a, const Matrix& b, double tol) {
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
  }

  void assemble() {
    const Eigen::Index s = layout_.dim();
    phi_n_ = Matrix::Zero(s * (depth_ + 1), s * (depth_ + 1));
    for (int i = 0; i <= depth_; ++i) {
      for (int j = i; j <= depth_; ++j) {
        const Matrix& b = upper_[upper_index(i, j)];
        phi_n_.block(i * s, j * s, s, s) = b;
        if (i != j) phi_n_.block(j * s, i * s, s, s) = b.transpose();
      }
    }
  }

  int depth_;
  ManifestLayout layout_;
  std::vector<Matrix> upper_;
  Matrix phi_n_;
};

inline const Matrix& assemble_phi_n(const SupplyRate& supply) { return supply.assembled(); }

/// Phi_L = I_L (x) Phi_N.
inline Matrix expand_phi_l(const SupplyRate& supply, Eigen::Index horizon) {
  if (horizon < 1) throw DimensionError("horizon L must be at least 1");
  return block_diagonal_repeat(supply.assembled(), horizon);
}

namespace detail {

inline void check_supply_matches(const SupplyRate& supply, const Trajectory& traj) {
  if (supply.inputs() != traj.inputs() || supply.outputs() != traj.outputs())
    throw DimensionError("supply rate and trajectory dimensions differ");
}

}  // namespace detail

/// w(k) by the double sum over blocks.
inline double evaluate_supply(const SupplyRate& supply, const Trajectory& traj, Eigen::Index k) {
  detail::check_supply_matches(supply, traj);
  const int n = supply.depth();
  if (k < 0 || k + n >= traj.length()) throw DimensionError("supply evaluation index out of range");
  const ManifestLayout lay = traj.layout();
  auto z = [&](Eigen::Index t) {
    Vector v(lay.dim());
    v.segment(lay.output_offset(), lay.p) = traj.y().col(t);
    v.segment(lay.input_offset(), lay.m) = traj.u().col(t);
    return v;
  };
  double w = 0.0;
  for (int i = 0; i <= n; ++i) {
    const Vector zi = z(k + i);
    for (int j = 0; j <= n; ++j) w += zi.dot(supply.block(i, j) * z(k + j));
  }
  return w;
}

/// w(k) as the stacked quadratic form Z(k)^T Phi_N Z(k).
inline double evaluate_supply_stacked(const SupplyRate& supply, const StackedTrajectory& stacked,
                                      Eigen::Index k) {
  if (stacked.depth != supply.depth()) throw DimensionError("stacking depth differs from supply depth");
  if (k < 0 || k >= stacked.length()) throw DimensionError("supply evaluation index out of range");
  const auto zk = stacked.samples.col(k);
  return zk.dot(supply.assembled() * zk);
}

/// sum_{k=0}^{K-1} w(k).
inline double sum_supply(const SupplyRate& supply, const Trajectory& traj, Eigen::Index horizon) {
  detail::check_supply_matches(supply, traj);
  if (horizon < 0 || horizon + supply.depth() > traj.length())
    throw DimensionError("supply horizon exceeds the data");
  if (horizon == 0) return 0.0;
  const StackedTrajectory stacked =
      stack_shifted(interleave(traj).leftCols(horizon + supply.depth()), supply.depth());
  const Matrix& phi = supply.assembled();
  return stacked.samples.cwiseProduct(phi * stacked.samples).sum();
}

}  // namespace ddd
