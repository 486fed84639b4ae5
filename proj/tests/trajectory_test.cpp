#include <gtest/gtest.h>

#include "ddd/lti.hpp"
#include "ddd/trajectory.hpp"

using namespace ddd;

namespace {

Matrix ramp(Eigen::Index s, Eigen::Index len) {
  Matrix e(s, len);
  for (Eigen::Index k = 0; k < len; ++k)
    for (Eigen::Index i = 0; i < s; ++i) e(i, k) = 10.0 * static_cast<double>(k) + static_cast<double>(i);
  return e;
}

Trajectory random_traj(Eigen::Index m, Eigen::Index p, Eigen::Index len, std::uint64_t seed) {
  return {random_input(m, len, 1.0, seed), random_input(p, len, 1.0, seed + 1000)};
}

}  // namespace

TEST(Trajectory, Validation) {
  EXPECT_THROW(Trajectory(Matrix::Zero(1, 5), Matrix::Zero(1, 4)), DimensionError);
  EXPECT_THROW(Trajectory(Matrix::Zero(0, 5), Matrix::Zero(1, 5)), DimensionError);
  Matrix bad = Matrix::Zero(1, 3);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Trajectory(bad, Matrix::Zero(1, 3)), NumericalError);
}

TEST(BuildHankel, ScalarExample) {
  Matrix seq(1, 4);
  seq << 1, 2, 3, 4;
  const BlockHankel h = build_hankel(seq, 2);
  Matrix expected(2, 3);
  expected << 1, 2, 3, 2, 3, 4;
  EXPECT_EQ(h.matrix, expected);
}

TEST(BuildHankel, FullDepthIsSingleColumn) {
  const Matrix seq = ramp(2, 6);
  const BlockHankel h = build_hankel(seq, 6);
  ASSERT_EQ(h.matrix.cols(), 1);
  EXPECT_EQ(h.matrix.col(0), seq.reshaped());
}

TEST(BuildHankel, BlockIndexing) {
  const Matrix seq = ramp(2, 10);
  const BlockHankel h = build_hankel(seq, 3);
  EXPECT_EQ(h.matrix.rows(), 6);
  EXPECT_EQ(h.matrix.cols(), 8);
  EXPECT_EQ(Matrix(h.block(2, 5)), seq.col(7));
}

TEST(BuildHankel, ConstantAlongAntiDiagonals) {
  const Matrix seq = random_input(3, 25, 1.0, 4);
  const BlockHankel h = build_hankel(seq, 5);
  for (Eigen::Index i = 1; i < h.block_rows; ++i)
    for (Eigen::Index j = 0; j + 1 < h.columns(); ++j) EXPECT_EQ(Matrix(h.block(i, j)), Matrix(h.block(i - 1, j + 1)));
}

TEST(BuildHankel, RejectsBadDepth) {
  EXPECT_THROW(build_hankel(ramp(1, 3), 4), DimensionError);
  EXPECT_THROW(build_hankel(ramp(1, 3), 0), DimensionError);
}

TEST(Interleave, OutputFirst) {
  Matrix u(1, 1), y(1, 1);
  u << 2;
  y << 1;
  const Matrix z = interleave(Trajectory(u, y));
  EXPECT_EQ(z(0, 0), 1.0);
  EXPECT_EQ(z(1, 0), 2.0);

  Matrix y2(2, 1);
  y2 << 5, 6;
  Matrix u2(1, 1);
  u2 << 7;
  const Matrix z2 = interleave(Trajectory(u2, y2));
  EXPECT_EQ(z2.col(0), (Vector(3) << 5, 6, 7).finished());
}

TEST(Interleave, RoundTrip) {
  const Trajectory t(random_input(2, 30, 1.0, 1), random_input(3, 30, 1.0, 2), 12);
  EXPECT_EQ(deinterleave(interleave(t), t.layout(), 12), t);
}

TEST(StackShifted, DepthZeroIsIdentity) {
  const Matrix z = ramp(2, 7);
  EXPECT_EQ(stack_shifted(z, 0).samples, z);
}

TEST(StackShifted, DepthOne) {
  const Matrix z = ramp(2, 3);
  const StackedTrajectory st = stack_shifted(z, 1);
  ASSERT_EQ(st.length(), 2);
  EXPECT_EQ(st.samples.col(0).head(2), z.col(0));
  EXPECT_EQ(st.samples.col(0).tail(2), z.col(1));
  EXPECT_EQ(st.samples.col(1).head(2), z.col(1));
  EXPECT_EQ(st.samples.col(1).tail(2), z.col(2));
}

TEST(StackShifted, OverlapConsistency) {
  const Eigen::Index s = 3, n = 3;
  const StackedTrajectory st = stack_shifted(random_input(s, 40, 1.0, 8), n);
  EXPECT_EQ(st.length(), 40 - n);
  for (Eigen::Index k = 0; k + 1 < st.length(); ++k)
    EXPECT_EQ(st.samples.col(k).tail(s * n), st.samples.col(k + 1).head(s * n));
}

TEST(StackShifted, HankelOfStackedMatchesDeeperHankel) {
  // Column j of H_L(Z) and of H_{L+N}(z) describe the same window z(j..j+L+N-1).
  const Eigen::Index s = 2, l = 4, n = 2, t = 30;
  const Matrix z = random_input(s, t, 1.0, 3);
  const BlockHankel hz = build_hankel(stack_shifted(z, n).samples, l);
  const BlockHankel hd = build_hankel(z, l + n);
  ASSERT_EQ(hz.columns(), hd.columns());
  for (Eigen::Index j = 0; j < hz.columns(); ++j)
    for (Eigen::Index i = 0; i < l; ++i)
      for (Eigen::Index d = 0; d <= n; ++d)
        EXPECT_EQ(hz.matrix.block(i * s * (n + 1) + d * s, j, s, 1), hd.matrix.block((i + d) * s, j, s, 1));
}

TEST(Snapshot, FullIsIdentity) {
  const Trajectory t = random_traj(1, 1, 20, 3);
  EXPECT_EQ(snapshot(t, 0, 20), t);
}

TEST(Snapshot, OffsetWindow) {
  const Trajectory t = random_traj(2, 2, 500, 5);
  const Trajectory s = snapshot(t, 50, 101);
  EXPECT_EQ(s.length(), 101);
  EXPECT_EQ(s.origin(), 50);
  EXPECT_EQ(s.u().col(0), t.u().col(50));
  EXPECT_EQ(s.y().col(100), t.y().col(150));
}

TEST(Snapshot, OutOfRange) {
  const Trajectory t = random_traj(2, 2, 500, 5);
  EXPECT_THROW(snapshot(t, 450, 101), DimensionError);
  EXPECT_THROW(snapshot(t, -1, 10), DimensionError);
}
