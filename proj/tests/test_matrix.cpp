// Dense/sparse container contracts: shapes, invariants, and the counting
// identities the learners rely on.
#include <gtest/gtest.h>

#include <gdl/matrix.hpp>
#include <gdl/rng.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace {

using gdl::BudgetTooLarge;
using gdl::DenseMatrix;
using gdl::DimensionMismatch;
using gdl::InvalidArgument;
using gdl::Rng;
using gdl::SparseCoeffMatrix;
using gdl::SparseVector;
using gdl::ZeroColumn;

TEST(DenseMatrix, ConstructsZeroedWithGivenShape) {
  DenseMatrix mat(3, 4);
  EXPECT_EQ(mat.rows(), 3u);
  EXPECT_EQ(mat.cols(), 4u);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(mat(r, c), 0.0);
}

TEST(DenseMatrix, FromValuesUsesRowMajorOrder) {
  const DenseMatrix mat =
      DenseMatrix::from_values(2, 3, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  EXPECT_EQ(mat(0, 0), 1.0);
  EXPECT_EQ(mat(0, 2), 3.0);
  EXPECT_EQ(mat(1, 0), 4.0);
  EXPECT_EQ(mat(1, 2), 6.0);
}

TEST(DenseMatrix, FromValuesRejectsWrongCountAndNonFinite) {
  EXPECT_THROW(DenseMatrix::from_values(2, 2, {1.0, 2.0, 3.0}),
               DimensionMismatch);
  EXPECT_THROW(DenseMatrix::from_values(
                   1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
               InvalidArgument);
  EXPECT_THROW(DenseMatrix::from_values(
                   1, 1, {std::numeric_limits<double>::infinity()}),
               InvalidArgument);
}

TEST(DenseMatrix, ColumnAccessorsRoundTrip) {
  DenseMatrix mat(3, 2);
  mat.set_column(1, {7.0, -8.0, 9.0});
  const std::vector<double> col = mat.column(1);
  EXPECT_EQ(col, (std::vector<double>{7.0, -8.0, 9.0}));
  EXPECT_DOUBLE_EQ(mat.column_norm_sq(1), 49.0 + 64.0 + 81.0);
  EXPECT_EQ(mat.column(0), (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(FrobeniusNormSq, MatchesHandCases) {
  EXPECT_EQ(gdl::frobenius_norm_sq(DenseMatrix(2, 2)), 0.0);
  const DenseMatrix eye = DenseMatrix::from_values(2, 2, {1, 0, 0, 1});
  EXPECT_DOUBLE_EQ(gdl::frobenius_norm_sq(eye), 2.0);
  const DenseMatrix m = DenseMatrix::from_values(2, 2, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(gdl::frobenius_norm_sq(m), 30.0);
}

TEST(FrobeniusNormSq, AgreesWithTraceFormulation) {
  Rng rng(42);
  DenseMatrix a(4, 3), b(3, 5);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) a(r, c) = rng.normal();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 5; ++c) b(r, c) = rng.normal();
  const DenseMatrix prod = gdl::matmul(a, b);
  const double direct = gdl::frobenius_norm_sq(prod);
  // trace(P Pᵀ) = Σ_r (P Pᵀ)[r,r]
  double trace = 0.0;
  for (std::size_t r = 0; r < prod.rows(); ++r)
    for (std::size_t c = 0; c < prod.cols(); ++c)
      trace += prod(r, c) * prod(r, c);
  EXPECT_NEAR(direct, trace, 1e-10 * std::abs(trace));
}

TEST(NormalizeColumns, ThreeFourFiveTriangle) {
  const DenseMatrix m = DenseMatrix::from_values(2, 1, {3.0, 4.0});
  const DenseMatrix n = gdl::normalize_columns(m);
  EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n(1, 0), 0.8);
}

TEST(NormalizeColumns, IdempotentOnUnitColumns) {
  const DenseMatrix m =
      DenseMatrix::from_values(2, 2, {1.0, 0.6, 0.0, 0.8});
  const DenseMatrix once = gdl::normalize_columns(m);
  const DenseMatrix twice = gdl::normalize_columns(once);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      EXPECT_NEAR(once(r, c), twice(r, c), 1e-15);
}

TEST(NormalizeColumns, ZeroColumnThrowsWithIndex) {
  const DenseMatrix m = DenseMatrix::from_values(2, 2, {1.0, 0.0, 2.0, 0.0});
  try {
    gdl::normalize_columns(m);
    FAIL() << "expected ZeroColumn";
  } catch (const ZeroColumn& e) {
    EXPECT_EQ(e.column, 1u);
  }
}

TEST(Matmul, HandCaseAndDimensionCheck) {
  const DenseMatrix a = DenseMatrix::from_values(2, 3, {1, 2, 3, 4, 5, 6});
  const DenseMatrix b = DenseMatrix::from_values(3, 2, {7, 8, 9, 10, 11, 12});
  const DenseMatrix p = gdl::matmul(a, b);
  EXPECT_DOUBLE_EQ(p(0, 0), 58.0);
  EXPECT_DOUBLE_EQ(p(0, 1), 64.0);
  EXPECT_DOUBLE_EQ(p(1, 0), 139.0);
  EXPECT_DOUBLE_EQ(p(1, 1), 154.0);
  EXPECT_THROW(gdl::matmul(a, a), DimensionMismatch);
}

TEST(Transpose, DoubleTransposeRestores) {
  const DenseMatrix a = DenseMatrix::from_values(2, 3, {1, 2, 3, 4, 5, 6});
  const DenseMatrix t = gdl::transpose(a);
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.cols(), 2u);
  EXPECT_DOUBLE_EQ(t(2, 1), 6.0);
  const DenseMatrix tt = gdl::transpose(t);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(tt(r, c), a(r, c));
}

TEST(SparseVector, FromEntriesSortsAndRoundTrips) {
  const SparseVector v =
      SparseVector::from_entries(6, {{4, 2.0}, {1, -1.0}, {5, 0.5}});
  EXPECT_EQ(v.dim(), 6u);
  EXPECT_EQ(v.nnz(), 3u);
  EXPECT_EQ(v.entries()[0].first, 1u);
  EXPECT_EQ(v.entries()[1].first, 4u);
  EXPECT_EQ(v.entries()[2].first, 5u);
  const std::vector<double> dense = v.to_dense();
  EXPECT_EQ(dense, (std::vector<double>{0.0, -1.0, 0.0, 0.0, 2.0, 0.5}));
  EXPECT_DOUBLE_EQ(v.norm_sq(), 1.0 + 4.0 + 0.25);
}

TEST(SparseVector, RejectsBadEntries) {
  EXPECT_THROW(SparseVector::from_entries(3, {{3, 1.0}}), DimensionMismatch);
  EXPECT_THROW(SparseVector::from_entries(3, {{0, 1.0}, {0, 2.0}}),
               InvalidArgument);
  EXPECT_THROW(SparseVector::from_entries(3, {{0, 0.0}}), InvalidArgument);
  EXPECT_THROW(SparseVector::from_entries(
                   3, {{0, std::numeric_limits<double>::quiet_NaN()}}),
               InvalidArgument);
}

TEST(SparseVector, DropZerosVariantFiltersSilently) {
  const SparseVector v = SparseVector::from_entries_drop_zeros(
      4, {{0, 0.0}, {2, 3.0}, {3, 0.0}});
  EXPECT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.entries()[0].first, 2u);
}

TEST(SparseCoeffMatrix, FromTripletsEnforcesBudgetAndValidity) {
  const SparseCoeffMatrix a =
      SparseCoeffMatrix::from_triplets(3, 4, 5, {{0, 0, 1.0}, {2, 3, -2.0}});
  EXPECT_EQ(a.rows(), 3u);
  EXPECT_EQ(a.cols(), 4u);
  EXPECT_EQ(a.nnz(), 2u);
  EXPECT_THROW(SparseCoeffMatrix::from_triplets(
                   2, 2, 1, {{0, 0, 1.0}, {1, 1, 1.0}}),
               BudgetTooLarge);
  EXPECT_THROW(SparseCoeffMatrix::from_triplets(
                   2, 2, 4, {{0, 0, 1.0}, {0, 0, 2.0}}),
               InvalidArgument);
  EXPECT_THROW(SparseCoeffMatrix::from_triplets(2, 2, 4, {{0, 0, 0.0}}),
               InvalidArgument);
  EXPECT_THROW(SparseCoeffMatrix::from_triplets(2, 2, 4, {{2, 0, 1.0}}),
               DimensionMismatch);
}

TEST(SparseCoeffMatrix, NnzCountsMatchSpecExample) {
  // Entries {(0,0),(1,0),(2,3)} → column counts [2,0,0,1].
  const SparseCoeffMatrix a = SparseCoeffMatrix::from_triplets(
      3, 4, 10, {{0, 0, 1.0}, {1, 0, 2.0}, {2, 3, 3.0}});
  EXPECT_EQ(a.nnz_per_column(), (std::vector<std::size_t>{2, 0, 0, 1}));
  EXPECT_EQ(a.nnz_per_row(), (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(a.column_nnz(0), 2u);
  EXPECT_EQ(a.column_nnz(1), 0u);
}

TEST(SparseCoeffMatrix, EmptyMatrixCountsAllZero) {
  const SparseCoeffMatrix a(3, 4, 5);
  EXPECT_EQ(a.nnz(), 0u);
  EXPECT_EQ(a.nnz_per_column(), (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_EQ(a.nnz_per_row(), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(SparseCoeffMatrix, CountingIdentityOnRandomMatrix) {
  Rng rng(7);
  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  std::vector<bool> used(20 * 30, false);
  while (triplets.size() < 100) {
    const std::size_t id = static_cast<std::size_t>(rng.below(20 * 30));
    if (used[id]) continue;
    used[id] = true;
    triplets.emplace_back(id % 20, id / 20, rng.normal() + 3.0);
  }
  const SparseCoeffMatrix a =
      SparseCoeffMatrix::from_triplets(20, 30, 150, triplets);
  std::size_t col_sum = 0, row_sum = 0;
  for (std::size_t c : a.nnz_per_column()) col_sum += c;
  for (std::size_t r : a.nnz_per_row()) row_sum += r;
  EXPECT_EQ(col_sum, a.nnz());
  EXPECT_EQ(row_sum, a.nnz());
  EXPECT_NO_THROW(a.validate_counts());
}

TEST(SparseCoeffMatrix, DenseRoundTripIsExact) {
  Rng rng(11);
  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  for (std::size_t i = 0; i < 8; ++i)
    triplets.emplace_back(i % 4, i, rng.normal() + 2.5);
  const SparseCoeffMatrix a = SparseCoeffMatrix::from_triplets(4, 8, 12, triplets);
  const DenseMatrix dense = a.to_dense();
  const SparseCoeffMatrix back = SparseCoeffMatrix::from_dense(dense, 12);
  ASSERT_EQ(back.nnz(), a.nnz());
  for (std::size_t c = 0; c < 8; ++c) {
    const auto lhs = a.column(c), rhs = back.column(c);
    ASSERT_EQ(lhs.size(), rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      EXPECT_EQ(lhs[i].first, rhs[i].first);
      EXPECT_EQ(lhs[i].second, rhs[i].second);
    }
  }
  EXPECT_THROW(SparseCoeffMatrix::from_dense(dense, 3), BudgetTooLarge);
}

TEST(SparseCoeffMatrix, SetColumnReplacesAndChecksBudget) {
  SparseCoeffMatrix a(3, 3, 4);
  a.set_column(0, SparseVector::from_entries(3, {{0, 1.0}, {2, 2.0}}));
  a.set_column(1, SparseVector::from_entries(3, {{1, 5.0}}));
  EXPECT_EQ(a.nnz(), 3u);
  a.set_column(0, SparseVector::from_entries(3, {{1, -4.0}}));
  EXPECT_EQ(a.nnz(), 2u);
  const auto col = a.column(0);
  ASSERT_EQ(col.size(), 1u);
  EXPECT_EQ(col[0].first, 1u);
  EXPECT_EQ(col[0].second, -4.0);
  // Budget 4: filling a column with 3 while 2 are stored elsewhere overflows.
  a.set_column(2, SparseVector::from_entries(3, {{0, 1.0}, {1, 1.0}}));
  EXPECT_THROW(
      a.set_column(0, SparseVector::from_entries(
                          3, {{0, 1.0}, {1, 1.0}, {2, 1.0}})),
      BudgetTooLarge);
}

TEST(SparseCoeffMatrix, RowSnapshotAndSetRow) {
  SparseCoeffMatrix a(3, 4, 8);
  a.set_column(0, SparseVector::from_entries(3, {{1, 2.0}}));
  a.set_column(2, SparseVector::from_entries(3, {{1, -3.0}, {2, 1.0}}));
  const auto row1 = a.row_snapshot(1);
  ASSERT_EQ(row1.size(), 2u);
  EXPECT_EQ(row1[0].first, 0u);
  EXPECT_EQ(row1[0].second, 2.0);
  EXPECT_EQ(row1[1].first, 2u);
  EXPECT_EQ(row1[1].second, -3.0);

  a.set_row(1, {{0, 7.0}, {3, 8.0}});
  const auto updated = a.row_snapshot(1);
  ASSERT_EQ(updated.size(), 2u);
  EXPECT_EQ(updated[0].first, 0u);
  EXPECT_EQ(updated[0].second, 7.0);
  EXPECT_EQ(updated[1].first, 3u);
  EXPECT_EQ(updated[1].second, 8.0);
  EXPECT_NO_THROW(a.validate_counts());

  EXPECT_THROW(a.set_row(0, {{2, 1.0}, {1, 1.0}}), InvalidArgument);  // unsorted
  EXPECT_THROW(a.set_row(0, {{1, 0.0}}), InvalidArgument);            // zero
}

TEST(SparseCoeffMatrix, ScaleRowMultipliesEveryEntry) {
  SparseCoeffMatrix a(2, 3, 6);
  a.set_row(0, {{0, 1.0}, {2, -2.0}});
  a.scale_row(0, 0.5);
  const auto row = a.row_snapshot(0);
  EXPECT_EQ(row[0].second, 0.5);
  EXPECT_EQ(row[1].second, -1.0);
  EXPECT_THROW(a.scale_row(0, 0.0), InvalidArgument);
  EXPECT_THROW(a.scale_row(0, std::numeric_limits<double>::quiet_NaN()),
               InvalidArgument);
}

}  // namespace
