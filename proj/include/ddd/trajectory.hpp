#pragma once

// The one-shot data record and its rearrangements: manifest-variable
// interleaving, shifted stacking and block-Hankel construction.

#include <utility>

#include <Eigen/Dense>

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"

namespace ddd {

/// Row layout of the manifest variable z(k): the output block comes first,
/// then the input block. Every routine that splits or assembles z goes
/// through this type.
struct ManifestLayout {
  Eigen::Index m = 1;  // inputs
  Eigen::Index p = 1;  // outputs

  Eigen::Index dim() const { return m + p; }
  Eigen::Index output_offset() const { return 0; }
  Eigen::Index input_offset() const { return p; }
};

/// Measured input/output samples. `u` is m x T, `y` is p x T.
/// `origin` is the index of the first sample in the record it was cut from.
class Trajectory {
 public:
  Trajectory(Matrix u, Matrix y, Eigen::Index origin = 0)
      : u_(std::move(u)), y_(std::move(y)), origin_(origin) {
    if (u_.cols() != y_.cols()) throw DimensionError("u and y must have equal length");
    if (u_.rows() < 1 || y_.rows() < 1) throw DimensionError("trajectory needs m >= 1 and p >= 1");
    if (!u_.allFinite() || !y_.allFinite()) throw NumericalError("trajectory contains non-finite samples");
  }

  const Matrix& u() const { return u_; }
  const Matrix& y() const { return y_; }
  Eigen::Index origin() const { return origin_; }
  Eigen::Index length() const { return u_.cols(); }
  Eigen::Index inputs() const { return u_.rows(); }
  Eigen::Index outputs() const { return y_.rows(); }
  ManifestLayout layout() const { return {inputs(), outputs()}; }

  friend bool operator==(const Trajectory& l, const Trajectory& r) {
    return l.origin_ == r.origin_ && l.u_ == r.u_ && l.y_ == r.y_;
  }

 private:
  Matrix u_, y_;
  Eigen::Index origin_;
};

/// Z(k) = [z(k); z(k+1); ...; z(k+N)], one stacked sample per column.
struct StackedTrajectory {
  Matrix samples;          // (N+1)(m+p) x T
  Eigen::Index depth = 0;  // N

  Eigen::Index length() const { return samples.cols(); }
};

/// Block-Hankel matrix with `block_rows` rows of `sample_dim`-dimensional blocks.
struct BlockHankel {
  Matrix matrix;
  Eigen::Index block_rows = 0;
  Eigen::Index sample_dim = 0;

  Eigen::Index columns() const { return matrix.cols(); }
  auto block(Eigen::Index i, Eigen::Index j) const {
    return matrix.block(i * sample_dim, j, sample_dim, 1);
  }
};

/// H_L(seq): block (i, j) is seq(i + j); dimensions (L s) x (T - L + 1).
inline BlockHankel build_hankel(const Matrix& seq, Eigen::Index block_rows) {
  const Eigen::Index s = seq.rows(), t = seq.cols();
  if (block_rows < 1) throw DimensionError("Hankel matrix needs at least one block row");
  if (block_rows > t) throw DimensionError("Hankel block rows exceed sequence length");
  BlockHankel h{Matrix(block_rows * s, t - block_rows + 1), block_rows, s};
  for (Eigen::Index i = 0; i < block_rows; ++i)
    h.matrix.middleRows(i * s, s) = seq.middleCols(i, t - block_rows + 1);
  return h;
}

/// z(k) = [y(k); u(k)].
inline Matrix interleave(const Trajectory& traj) {
  const ManifestLayout lay = traj.layout();
  Matrix z(lay.dim(), traj.length());
  z.middleRows(lay.output_offset(), lay.p) = traj.y();
  z.middleRows(lay.input_offset(), lay.m) = traj.u();
  return z;
}

inline Trajectory deinterleave(const Matrix& z, const ManifestLayout& lay, Eigen::Index origin = 0) {
  if (z.rows() != lay.dim()) throw DimensionError("manifest samples have the wrong dimension");
  return {z.middleRows(lay.input_offset(), lay.m), z.middleRows(lay.output_offset(), lay.p), origin};
}

inline StackedTrajectory stack_shifted(const Matrix& z, Eigen::Index depth) {
  if (depth < 0) throw DimensionError("shift depth must be nonnegative");
  if (z.cols() < depth + 1) throw DimensionError("sequence shorter than shift depth + 1");
  const Eigen::Index s = z.rows(), t = z.cols() - depth;
  StackedTrajectory out{Matrix(s * (depth + 1), t), depth};
  for (Eigen::Index i = 0; i <= depth; ++i) out.samples.middleRows(i * s, s) = z.middleCols(i, t);
  return out;
}

inline Trajectory snapshot(const Trajectory& traj, Eigen::Index start, Eigen::Index length) {
  if (start < 0 || length < 1 || start + length > traj.length())
    throw DimensionError("snapshot window out of range");
  return {traj.u().middleCols(start, length), traj.y().middleCols(start, length),
          traj.origin() + start};
}

}  // namespace ddd
