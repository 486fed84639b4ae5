#pragma once

// Mass-spring-damper benchmark  y(k+2) + y(k+1) + y(k) = u(k)  with storage
// V(k) = y(k+1)^2 + y(k)^2 and the supply rates that go with it.

#include "ddd/lti.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"

namespace ddd::msd {

inline DifferenceEquationModel difference_equation() { return {{1.0, 1.0, 1.0}, {1.0}}; }

inline StateSpaceModel model() { return difference_equation().to_state_space(); }

inline constexpr Eigen::Index kOrder = 2;

/// w1 = u^2 - 2 y u - 2 y(k+1) u + 2 y y(k+1) + y(k+1)^2, i.e. V(k+1) - V(k).
inline SupplyRate supply_w1() {
  Matrix phi00(2, 2), phi10(2, 2), phi11(2, 2);
  phi00 << 0, -1, -1, 1;
  phi10 << 1, -1, 0, 0;
  phi11 << 1, 0, 0, 0;
  return {1, 1, 1, {{{0, 0}, phi00}, {{1, 0}, phi10}, {{1, 1}, phi11}}};
}

/// w2 = u^2 - 2 y u: the part of w1 that only involves sample k.
inline SupplyRate supply_w2() {
  Matrix phi00(2, 2);
  phi00 << 0, -1, -1, 1;
  return {0, 1, 1, {{{0, 0}, phi00}}};
}

inline double storage(const Trajectory& traj, Eigen::Index k) {
  const double y0 = traj.y()(0, k), y1 = traj.y()(0, k + 1);
  return y1 * y1 + y0 * y0;
}

}  // namespace ddd::msd
