#include <gtest/gtest.h>

#include "pencilkit/errors.hpp"
#include "pencilkit/subspace.hpp"

using namespace pencilkit;

namespace {

Matrix<double> mat(Index r, Index c, std::initializer_list<double> v) {
  Matrix<double> m(r, c);
  auto it = v.begin();
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      m(i, j) = *it++;
    }
  }
  return m;
}

} // namespace

TEST(Tolerance, ThresholdScalesWithShapeAndNorm) {
  Tolerance tol;
  EXPECT_DOUBLE_EQ(tol.threshold(2.0, 3, 5), 1e-10 * 2.0 * 5);
  tol.abs_floor = 1.0;
  EXPECT_DOUBLE_EQ(tol.threshold(2.0, 3, 5), 1.0);
  EXPECT_DOUBLE_EQ(Tolerance{}.threshold(1.0, 0, 0), 1e-10);
}

TEST(Tolerance, RejectsNonPositiveRel) {
  Tolerance tol;
  tol.rel = 0.0;
  EXPECT_THROW(tol.validate(), InputError);
  tol.rel = 1e-10;
  tol.abs_floor = -1.0;
  EXPECT_THROW(tol.validate(), InputError);
}

TEST(Rank, DecisionsUseTheGivenScale) {
  const Matrix<double> m = mat(2, 2, {1, 0, 0, 1e-12});
  EXPECT_EQ(numerical_rank<double>(m, {}), 1);
  // Against a tiny reference scale the small singular value counts.
  EXPECT_EQ(numerical_rank<double>(m, {}, 1e-6), 2);
  EXPECT_EQ(numerical_rank<double>(Matrix<double>::Zero(3, 2), {}), 0);
  EXPECT_EQ(numerical_rank<double>(Matrix<double>(0, 3), {}), 0);
}

TEST(Subspace, KernelAndRangeAreComplementary) {
  const Matrix<double> m = mat(2, 3, {1, 2, 3, 2, 4, 6});
  const auto range = range_basis<double>(m, {});
  const auto kernel = kernel_basis<double>(m, {});
  EXPECT_EQ(range.dim(), 1);
  EXPECT_EQ(kernel.dim(), 2);
  EXPECT_LT((m * kernel.basis()).norm(), 1e-12);
  EXPECT_EQ(kernel.complement().dim(), 1);
}

TEST(Subspace, RejectsNonOrthonormalBasis) {
  EXPECT_THROW(Subspace<double>(mat(2, 1, {1, 1})), InputError);
  EXPECT_THROW(Subspace<double>(Matrix<double>::Identity(2, 3)), InputError);
}

TEST(Subspace, ColumnPhaseIsNormalized) {
  const Subspace<double> s(mat(2, 1, {0, -1}));
  EXPECT_DOUBLE_EQ(s.basis()(1, 0), 1.0);
  Matrix<std::complex<double>> c(2, 1);
  c << std::complex<double>(0, 1), 0.0;
  const Subspace<std::complex<double>> t(c);
  EXPECT_NEAR(std::abs(t.basis()(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Subspace, SumAndIntersection) {
  const auto x = Subspace<double>(mat(3, 1, {1, 0, 0}));
  const auto y = Subspace<double>::orthonormalized(mat(3, 2, {1, 0, 0, 1, 0, 0}));
  const auto z = Subspace<double>(mat(3, 1, {0, 0, 1}));
  EXPECT_EQ(sum_basis(x, z, {}).dim(), 2);
  EXPECT_EQ(intersect_basis(x, z, {}).dim(), 0);
  EXPECT_EQ(intersect_basis(x, y, {}).dim(), 1);
  EXPECT_NEAR(subspace_gap(intersect_basis(x, y, {}), x), 0.0, 1e-14);
  EXPECT_NEAR(subspace_gap(x, z), 1.0, 1e-14);
}

TEST(Subspace, Preimage) {
  // A^-1(span e1) for A = diag(1, 0): everything maps into span e1.
  const Matrix<double> a = mat(2, 2, {1, 0, 0, 0});
  const auto target = Subspace<double>(mat(2, 1, {1, 0}));
  EXPECT_EQ(preimage_basis<double>(a, target, {}).dim(), 2);
  const Matrix<double> b = mat(2, 2, {0, 1, 1, 0});
  const auto pre = preimage_basis<double>(b, target, {});
  ASSERT_EQ(pre.dim(), 1);
  EXPECT_NEAR(std::abs(pre.basis()(1, 0)), 1.0, 1e-14);
}

TEST(InducedOperator, QuotientOfAnInvariantSplitting) {
  // m = [[1, 1], [0, 2]] keeps span e1; on the quotient it acts as 2.
  const Matrix<double> m = mat(2, 2, {1, 1, 0, 2});
  const auto e1 = Subspace<double>(mat(2, 1, {1, 0}));
  const auto r = induced_operator<double>(m, e1, e1, {});
  EXPECT_NEAR(std::abs(r.matrix(0, 0)), 1.0, 1e-14);
  const auto q = quotient_operator<double>(m, e1, e1, {});
  EXPECT_NEAR(std::abs(q.matrix(0, 0)), 2.0, 1e-14);
  const auto e2 = Subspace<double>(mat(2, 1, {0, 1}));
  EXPECT_THROW(induced_operator<double>(m, e2, e2, {}), InvarianceError);
}
