#include <gtest/gtest.h>

#include "ddd/excitation.hpp"
#include "ddd/lti.hpp"

using namespace ddd;

TEST(PersistentExcitation, ZeroInputNeverExciting) {
  for (Eigen::Index l : {1, 3, 6}) {
    const auto r = is_persistently_exciting(Matrix::Zero(1, 20), l);
    EXPECT_FALSE(r.exciting);
    EXPECT_EQ(r.rank, 0);
  }
}

TEST(PersistentExcitation, ImpulseHasFullRank) {
  for (Eigen::Index l : {1, 2, 5, 9}) {
    Matrix u = Matrix::Zero(1, 2 * l - 1);
    u(0, l - 1) = 1.0;
    const auto r = is_persistently_exciting(u, l);
    EXPECT_TRUE(r.exciting) << "L=" << l;
    EXPECT_EQ(r.rank, l);
  }
}

TEST(PersistentExcitation, TooFewColumnsCannotExcite) {
  // H_L(u) with m L rows needs at least m L columns: T = L(m+1) - 2 is one short.
  const Eigen::Index l = 6, m = 2;
  const auto r = is_persistently_exciting(random_input(m, l * (m + 1) - 2, 10.0, 3), l);
  EXPECT_FALSE(r.exciting);
  EXPECT_EQ(r.required_rank, m * l);
}

TEST(PersistentExcitation, SeededInputsAtMinimumLength) {
  const long l = 30, n = 4, m = 2, depth = 1;
  const long t = min_T_for_pe(l, n, m, depth);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = is_persistently_exciting(random_input(m, t + depth, 10.0, seed), l + depth + n);
    EXPECT_TRUE(r.exciting) << "seed " << seed;
  }
}

TEST(PersistentExcitation, MonotoneInOrder) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix u = random_input(2, 40, 1.0, seed);
    const Eigen::Index top = 13;  // 2*13 <= 40 - 13 + 1
    ASSERT_TRUE(is_persistently_exciting(u, top).exciting);
    for (Eigen::Index l = 1; l < top; ++l) EXPECT_TRUE(is_persistently_exciting(u, l).exciting);
  }
}

TEST(PersistentExcitation, SingularValuesDescending) {
  const auto r = is_persistently_exciting(random_input(1, 30, 1.0, 2), 8);
  ASSERT_EQ(r.singular_values.size(), 8);
  for (Eigen::Index i = 1; i < 8; ++i) EXPECT_LE(r.singular_values(i), r.singular_values(i - 1));
}

TEST(PersistentExcitation, ScaleInvariant) {
  Matrix u = random_input(1, 30, 1.0, 2);
  u.col(29) = u.col(28);  // no effect on rank; just a non-generic signal
  const auto a = is_persistently_exciting(u, 10), b = is_persistently_exciting(1e-9 * u, 10),
             c = is_persistently_exciting(1e9 * u, 10);
  EXPECT_EQ(a.rank, b.rank);
  EXPECT_EQ(a.rank, c.rank);
}

TEST(DataLengthBounds, Formulas) {
  EXPECT_EQ(min_T_for_pe(30, 4, 2, 0), 101);
  EXPECT_EQ(min_T_for_pe(30, 4, 2, 1), 103);
  EXPECT_EQ(min_T_for_pe(1, 0, 1, 0), 1);
  EXPECT_EQ(min_T_for_nullspace(30, 2, 2), 149);
  EXPECT_EQ(min_T_for_nullspace(10, 1, 1), 29);
  static_assert(min_T_for_pe(30, 4, 2, 0) == 101);
}

TEST(DataLengthBounds, NullspaceBoundAtLeastHorizon) {
  for (long l = 1; l <= 40; ++l)
    for (long m = 1; m <= 4; ++m)
      for (long p = 1; p <= 4; ++p) EXPECT_GE(min_T_for_nullspace(l, m, p), l);
}
