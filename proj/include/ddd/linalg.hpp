#pragma once

// Small dense linear-algebra helpers shared by the rank test, the null-space
// computation and the semidefiniteness checks.

#include <algorithm>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "ddd/errors.hpp"

namespace ddd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular-value threshold used to decide numerical rank.
///
/// The default is the scale-invariant rule
///   tau = factor * max(rows, cols) * eps * sigma_max.
/// Setting `absolute` overrides it with a fixed threshold.
struct RankTolerance {
  double factor = 1.0;
  std::optional<double> absolute;

  double threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) const {
    if (absolute) return *absolute;
    return factor * static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma_max;
  }
};

struct RankInfo {
  Eigen::Index rank = 0;
  double threshold = 0.0;
  Vector singular_values;  // descending
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline RankInfo numerical_rank(const Matrix& m, const RankTolerance& tol = {}) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<Matrix> svd(m);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values(0) : 0.0;
  info.threshold = tol.threshold(m.rows(), m.cols(), smax);
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values(i) > info.threshold) ++info.rank;
  }
  return info;
}

/// Orthonormal basis of the numerical null space of `m` together with the
/// rank decision that produced it. Columns of `basis` satisfy m * basis ~ 0.
struct NullSpace {
  Matrix basis;
  Eigen::Index rank = 0;
  double threshold = 0.0;
};

inline NullSpace numerical_nullspace(const Matrix& m, const RankTolerance& tol = {}) {
  if (m.cols() == 0) throw DimensionError("null space of a matrix with no columns");
  NullSpace ns;
  if (m.rows() == 0) {
    ns.basis = Matrix::Identity(m.cols(), m.cols());
    return ns;
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  ns.threshold = tol.threshold(m.rows(), m.cols(), smax);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > ns.threshold) ++ns.rank;
  }
  ns.basis = svd.matrixV().rightCols(m.cols() - ns.rank);
  return ns;
}

/// Smallest eigenvalue of (G + G^T) / 2.
inline double min_symmetric_eigenvalue(const Matrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("eigenvalue of a non-square matrix");
  if (g.size() == 0) throw DimensionError("eigenvalue of an empty matrix");
  const Matrix sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double spectral_radius(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("spectral radius of a non-square matrix");
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Block-diagonal I_count (x) block.
inline Matrix block_diagonal_repeat(const Matrix& block, Eigen::Index count) {
  const Eigen::Index r = block.rows(), c = block.cols();
  Matrix out = Matrix::Zero(r * count, c * count);
  for (Eigen::Index i = 0; i < count; ++i) out.block(i * r, i * c, r, c) = block;
  return out;
}

}  // namespace ddd
