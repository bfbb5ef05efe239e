#include <gtest/gtest.h>

#include <complex>

#include "mecrl/cmatrix.hpp"
#include "mecrl/error.hpp"
#include "mecrl/rng.hpp"

using namespace mecrl;
using namespace std::complex_literals;

namespace {

CMat random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  CMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = {rng.normal(0, 1), rng.normal(0, 1)};
  return m;
}

// Straight triple loop, used as an oracle for matmul.
CMat naive_product(const CMat& a, const CMat& b) {
  CMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      CScalar s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

TEST(CMat, ConstructorRejectsBadShapes) {
  EXPECT_THROW(CMat(0, 2), DimensionError);
  EXPECT_THROW(CMat(2, 2, std::vector<CScalar>(3)), DimensionError);
}

TEST(Hermitian, IdentityIsFixed) { EXPECT_EQ(hermitian(CMat::identity(2)), CMat::identity(2)); }

TEST(Hermitian, ConjugatesScalar) { EXPECT_EQ(hermitian(CMat{{1i}}), CMat{{-1i}}); }

TEST(Hermitian, HandExample) {
  const CMat a{{1, 1i}, {0, 2}};
  const CMat expected{{1, 0}, {-1i, 2}};
  EXPECT_EQ(hermitian(a), expected);
}

TEST(Hermitian, TransposesShape) {
  const CMat a(2, 3);
  const CMat h = hermitian(a);
  EXPECT_EQ(h.rows(), 3u);
  EXPECT_EQ(h.cols(), 2u);
}

TEST(Hermitian, InvolutionIsExact) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const CMat a = random_matrix(3, 5, rng);
    EXPECT_EQ(hermitian(hermitian(a)), a);
  }
}

TEST(Matmul, IdentityRight) {
  Rng rng(2);
  const CMat a = random_matrix(3, 4, rng);
  EXPECT_EQ(matmul(a, CMat::identity(4)), a);
}

TEST(Matmul, ImaginarySquare) { EXPECT_EQ(matmul(CMat{{1i}}, CMat{{1i}}), CMat{{-1}}); }

TEST(Matmul, RowTimesColumnCancels) {
  const CMat r{{1, 1i}};
  const CMat c{{1}, {1i}};
  EXPECT_EQ(matmul(r, c), CMat{{0}});
}

TEST(Matmul, MatchesNaiveOracle) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const CMat a = random_matrix(4, 3, rng), b = random_matrix(3, 5, rng);
    EXPECT_LT(max_abs_diff(matmul(a, b), naive_product(a, b)), 1e-12);
  }
}

TEST(Matmul, DimensionMismatchThrows) { EXPECT_THROW(matmul(CMat(2, 3), CMat(2, 3)), DimensionError); }

TEST(InvertHpd, Identity) { EXPECT_LT(max_abs_diff(invert_hpd(CMat::identity(3)), CMat::identity(3)), 1e-15); }

TEST(InvertHpd, Diagonal) {
  const CMat expected{{0.5, 0}, {0, 0.25}};
  EXPECT_LT(max_abs_diff(invert_hpd(CMat{{2, 0}, {0, 4}}), expected), 1e-15);
}

TEST(InvertHpd, TwoByTwoClosedForm) {
  const CMat a{{2, 1i}, {-1i, 2}};
  CMat expected{{2, -1i}, {1i, 2}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) expected(i, j) /= 3.0;
  EXPECT_LT(max_abs_diff(invert_hpd(a), expected), 1e-14);
  EXPECT_LT(max_abs_diff(matmul(invert_hpd(a), a), CMat::identity(2)), 1e-9);
}

TEST(InvertHpd, DoubleInverseRecovers) {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const CMat h = random_matrix(6, 3, rng);
    const CMat g = matmul(hermitian(h), h);
    EXPECT_LT(max_abs_diff(invert_hpd(invert_hpd(g)), g), 1e-8);
  }
}

TEST(InvertHpd, RejectsNonHermitian) { EXPECT_THROW(invert_hpd(CMat{{2, 1}, {0, 2}}), NotHermitianError); }

TEST(InvertHpd, RejectsSingular) { EXPECT_THROW(invert_hpd(CMat{{1, 1}, {1, 1}}), SingularMatrixError); }

TEST(InvertHpd, RejectsIndefinite) { EXPECT_THROW(invert_hpd(CMat{{1, 0}, {0, -1}}), SingularMatrixError); }

TEST(InvertHpd, RejectsNonSquare) { EXPECT_THROW(invert_hpd(CMat(2, 3)), DimensionError); }

TEST(PseudoInverse, SingleColumn) {
  const CMat h{{1}, {1i}};
  const CMat z = pseudo_inverse(h);
  ASSERT_EQ(z.rows(), 1u);
  ASSERT_EQ(z.cols(), 2u);
  EXPECT_LT(std::abs(z(0, 0) - CScalar(0.5)), 1e-15);
  EXPECT_LT(std::abs(z(0, 1) - CScalar(-0.5i)), 1e-15);
  EXPECT_LT(max_abs_diff(matmul(z, h), CMat::identity(1)), 1e-15);
}

TEST(PseudoInverse, IdentityIsFixed) {
  EXPECT_LT(max_abs_diff(pseudo_inverse(CMat::identity(3)), CMat::identity(3)), 1e-15);
}

TEST(PseudoInverse, EqualColumnsAreSingular) {
  const CMat h{{1, 1}, {2, 2}, {1i, 1i}};
  EXPECT_THROW(pseudo_inverse(h), SingularMatrixError);
}

TEST(PseudoInverse, WideMatrixRejected) { EXPECT_THROW(pseudo_inverse(CMat(2, 3)), DimensionError); }

TEST(PseudoInverse, ZeroForcingOnRandomChannels) {
  Rng rng(5);
  for (std::size_t m = 1; m <= 4; ++m)
    for (int t = 0; t < 100; ++t) {
      const CMat h = random_matrix(4, m, rng);
      EXPECT_LT(max_abs_diff(matmul(pseudo_inverse(h), h), CMat::identity(m)), 1e-9);
    }
}

TEST(RowNormSq, Examples) {
  EXPECT_DOUBLE_EQ(row_norm_sq(CMat{{1, 0}}, 0), 1.0);
  EXPECT_DOUBLE_EQ(row_norm_sq(CMat{{0.5, -0.5i}}, 0), 0.5);
  EXPECT_DOUBLE_EQ(row_norm_sq(CMat(2, 3), 1), 0.0);
}

TEST(RowNormSq, OutOfRange) { EXPECT_THROW(row_norm_sq(CMat(2, 2), 2), IndexError); }

TEST(RowNormSq, UnitPhaseInvariant) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    CMat z = random_matrix(1, 4, rng);
    const double before = row_norm_sq(z, 0);
    const CScalar phase = std::polar(1.0, rng.uniform(0, 6.283185307179586));
    for (std::size_t j = 0; j < 4; ++j) z(0, j) *= phase;
    EXPECT_NEAR(row_norm_sq(z, 0), before, 1e-12 * before);
  }
}
