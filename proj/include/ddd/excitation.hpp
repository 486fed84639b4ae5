#pragma once

// Persistency of excitation and the data-length bounds that go with it.

#include "ddd/linalg.hpp"
#include "ddd/trajectory.hpp"

namespace ddd {

struct ExcitationReport {
  bool exciting = false;
  Eigen::Index rank = 0;
  Eigen::Index required_rank = 0;
  Vector singular_values;  // descending
};

/// u is persistently exciting of order L when rank H_L(u) = m L.
inline ExcitationReport is_persistently_exciting(const Matrix& u, Eigen::Index order,
                                                 const RankTolerance& tol = {}) {
  const BlockHankel h = build_hankel(u, order);
  const RankInfo info = numerical_rank(h.matrix, tol);
  ExcitationReport r;
  r.rank = info.rank;
  r.required_rank = u.rows() * order;
  r.exciting = r.rank == r.required_rank;
  r.singular_values = info.singular_values;
  return r;
}

/// Smallest T for which H_{L+N+n}(u_[0,T+N-1]) can have full row rank:
/// (L+n)(m+1) + N m - 1.
constexpr long min_T_for_pe(long horizon, long order, long inputs, long depth) {
  return (horizon + order) * (inputs + 1) + depth * inputs - 1;
}

/// Smallest T guaranteeing a nontrivial null space of U H_L(Z) for every
/// nu < L: L(m+p+1) - 1.
constexpr long min_T_for_nullspace(long horizon, long inputs, long outputs) {
  return horizon * (inputs + outputs + 1) - 1;
}

}  // namespace ddd
