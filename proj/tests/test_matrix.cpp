#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdsd/error.hpp"
#include "spdsd/matrix.hpp"
#include "spdsd/rng.hpp"

using namespace spdsd;

TEST(Matrix, IdentityAndTrace) {
  const Matrix i = Matrix::identity(4);
  EXPECT_EQ(trace(i), 4.0);
  EXPECT_EQ(frobenius_norm(i), 2.0);
  EXPECT_EQ(i.transposed(), i);
}

TEST(Matrix, ArithmeticRejectsMismatch) {
  Matrix a(3), b(4);
  EXPECT_THROW(a += b, DimensionMismatch);
  EXPECT_THROW(max_abs_diff(a, b), DimensionMismatch);
}

TEST(Matrix, FiniteCheck) {
  Matrix a(2);
  EXPECT_TRUE(all_finite(a));
  a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(all_finite(a));
}

TEST(SymMatrix, AcceptsNearSymmetricAndAverages) {
  Matrix m(2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0 + 1e-12;
  m(1, 1) = 3.0;
  const SymMatrix s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
}

TEST(SymMatrix, RejectsAsymmetricOrNonFinite) {
  Matrix m(2);
  m(0, 1) = 1.0;
  EXPECT_THROW(SymMatrix{m}, std::invalid_argument);
  Matrix n(2);
  n(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(SymMatrix{n}, std::invalid_argument);
}

TEST(SymMatrix, SetWritesBothTriangles) {
  SymMatrix s(3);
  s.set(2, 0, 5.0);
  EXPECT_EQ(s(0, 2), 5.0);
  EXPECT_EQ(s(2, 0), 5.0);
}

TEST(LowerTriangular, RejectsUpperEntries) {
  Matrix m = Matrix::identity(3);
  m(0, 2) = 1e-300;
  EXPECT_THROW(LowerTriangular{m}, std::invalid_argument);
  EXPECT_TRUE(LowerTriangular::identity(3).has_positive_diagonal());
  LowerTriangular l(2);
  l.at(0, 0) = 1.0;
  EXPECT_FALSE(l.has_positive_diagonal());
}

// Golden values from an independent Python transcription of the documented
// generator.
TEST(Rng, MatchesDocumentedStream) {
  Rng r(42);
  EXPECT_EQ(r.next(), 0x31b0ece7c4f697a2ULL);
  EXPECT_EQ(r.next(), 0x9008a3b1cb686f03ULL);
  EXPECT_EQ(r.next(), 0x7c7173abd97be16fULL);
  Rng s(7);
  EXPECT_DOUBLE_EQ(s.uniform01(), 0.08170555950360558);
  EXPECT_EQ(s.uniform_index(10), 2u);
  Rng z(0);
  EXPECT_EQ(z.next(), 0x7bbcb40d550682d0ULL);
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng r(1);
  for (int k = 0; k < 10000; ++k) {
    EXPECT_LT(r.uniform_index(7), 7u);
    const auto v = r.uniform_int(1, 10);
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 10);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
