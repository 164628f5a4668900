// Sparse rank-1 machinery: truncated power iteration, the support-enumeration
// oracle, and the direction/coefficient transform identities.
#include <gtest/gtest.h>

#include <gdl/matrix.hpp>
#include <gdl/rng.hpp>
#include <gdl/sparse_pca.hpp>

#include <cmath>
#include <vector>

namespace {

using gdl::DegenerateDirection;
using gdl::DenseMatrix;
using gdl::DimensionMismatch;
using gdl::InvalidArgument;
using gdl::Rng;
using gdl::SparsePcaConfig;
using gdl::SparseVector;
using gdl::TooLarge;
using gdl::ZeroMatrix;

DenseMatrix random_matrix(std::size_t d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix e(d, n);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < n; ++c) e(r, c) = rng.normal();
  return e;
}

double pca_objective(const DenseMatrix& e, const SparseVector& w) {
  // wᵀEᵀEw = ‖Ew‖₂²
  double total = 0.0;
  for (std::size_t r = 0; r < e.rows(); ++r) {
    double dot = 0.0;
    for (const auto& [c, v] : w.entries()) dot += e(r, c) * v;
    total += dot * dot;
  }
  return total;
}

TEST(SparsePcaRank1, SingleNonzeroColumnGivesIndicator) {
  DenseMatrix e(4, 5);
  e.set_column(3, {1.0, -2.0, 0.5, 3.0});
  const SparseVector w = gdl::sparse_pca_rank1(e, 1);
  ASSERT_EQ(w.nnz(), 1u);
  EXPECT_EQ(w.entries()[0].first, 3u);
  EXPECT_NEAR(std::abs(w.entries()[0].second), 1.0, 1e-12);
}

TEST(SparsePcaRank1, ExactSparseRankOneFactorRecovered) {
  // E = u vᵀ with v 2-sparse: optimum w = ±v/‖v‖, objective ‖u‖²‖v‖².
  const std::vector<double> u{1.0, 2.0, -1.5};
  std::vector<double> v(6, 0.0);
  v[1] = 3.0;
  v[4] = -4.0;  // ‖v‖ = 5
  DenseMatrix e(3, 6);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 6; ++c) e(r, c) = u[r] * v[c];
  const double u_norm_sq = 1.0 + 4.0 + 2.25;
  for (std::size_t k = 2; k <= 4; ++k) {
    const SparseVector w = gdl::sparse_pca_rank1(e, k);
    EXPECT_NEAR(pca_objective(e, w), u_norm_sq * 25.0, 1e-9 * u_norm_sq * 25.0)
        << "k=" << k;
    ASSERT_EQ(w.nnz(), 2u);
    EXPECT_EQ(w.entries()[0].first, 1u);
    EXPECT_EQ(w.entries()[1].first, 4u);
    EXPECT_NEAR(std::abs(w.entries()[0].second), 0.6, 1e-9);
    EXPECT_NEAR(std::abs(w.entries()[1].second), 0.8, 1e-9);
  }
}

TEST(SparsePcaRank1, RejectsDegenerateInputs) {
  EXPECT_THROW(gdl::sparse_pca_rank1(DenseMatrix(3, 4), 2), ZeroMatrix);
  DenseMatrix e = random_matrix(3, 4, 40);
  EXPECT_THROW(gdl::sparse_pca_rank1(e, 0), InvalidArgument);
  // Warm start must be unit-norm and respect the sparsity cap.
  const SparseVector bad_norm = SparseVector::from_entries(4, {{0, 0.5}});
  EXPECT_THROW(gdl::sparse_pca_rank1(e, 1, &bad_norm), InvalidArgument);
  const SparseVector too_dense = SparseVector::from_entries(
      4, {{0, 0.6}, {1, 0.8}});
  EXPECT_THROW(gdl::sparse_pca_rank1(e, 1, &too_dense), InvalidArgument);
  const SparseVector wrong_dim = SparseVector::from_entries(3, {{0, 1.0}});
  EXPECT_THROW(gdl::sparse_pca_rank1(e, 1, &wrong_dim), DimensionMismatch);
}

TEST(SparsePcaRank1, WarmStartNeverWorseThanWarmObjective) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix e = random_matrix(5, 6, 3000 + trial);
    // Random unit 2-sparse warm start.
    const std::size_t i1 = static_cast<std::size_t>(rng.below(6));
    std::size_t i2 = static_cast<std::size_t>(rng.below(6));
    while (i2 == i1) i2 = static_cast<std::size_t>(rng.below(6));
    double a = rng.normal(), b = rng.normal();
    const double norm = std::sqrt(a * a + b * b);
    a /= norm;
    b /= norm;
    const SparseVector warm = SparseVector::from_entries(
        6, {{std::min(i1, i2), a}, {std::max(i1, i2), b}});
    const SparseVector w = gdl::sparse_pca_rank1(e, 2, &warm);
    EXPECT_GE(pca_objective(e, w), pca_objective(e, warm) - 1e-10);
  }
}

TEST(SparsePcaOracle, DiagonalCasePicksLargestColumn) {
  // EᵀE = diag(3,1,2) via E with orthogonal columns of those norms².
  DenseMatrix e(3, 3);
  e(0, 0) = std::sqrt(3.0);
  e(1, 1) = 1.0;
  e(2, 2) = std::sqrt(2.0);
  const SparseVector w = gdl::sparse_pca_oracle(e, 1);
  ASSERT_EQ(w.nnz(), 1u);
  EXPECT_EQ(w.entries()[0].first, 0u);
  EXPECT_NEAR(pca_objective(e, w), 3.0, 1e-12);
}

TEST(SparsePcaOracle, KEqualsNMatchesLeadingEigenvector) {
  const DenseMatrix e = random_matrix(5, 4, 42);
  const SparseVector w = gdl::sparse_pca_oracle(e, 4);
  // Power-iterate EᵀE densely for the reference eigenvalue.
  std::vector<double> v{0.5, 0.5, 0.5, 0.5};
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> ev(5, 0.0);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 4; ++c) ev[r] += e(r, c) * v[c];
    std::vector<double> next(4, 0.0);
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t r = 0; r < 5; ++r) next[c] += e(r, c) * ev[r];
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : next) x /= norm;
    lambda = norm;
    v = next;
  }
  EXPECT_NEAR(pca_objective(e, w), lambda, 1e-8 * lambda);
}

TEST(SparsePcaOracle, HandCaseFromColumnNorms) {
  // E = [[1,0,2],[0,1,0]]: column norms² are (1,1,4) → support {2}, obj 4.
  DenseMatrix e(2, 3);
  e(0, 0) = 1.0;
  e(1, 1) = 1.0;
  e(0, 2) = 2.0;
  const SparseVector w = gdl::sparse_pca_oracle(e, 1);
  ASSERT_EQ(w.nnz(), 1u);
  EXPECT_EQ(w.entries()[0].first, 2u);
  EXPECT_NEAR(pca_objective(e, w), 4.0, 1e-12);
  // Sign convention: largest-magnitude entry positive.
  EXPECT_GT(w.entries()[0].second, 0.0);
}

TEST(SparsePcaOracle, RejectsBlowupAndBadK) {
  const DenseMatrix e = random_matrix(4, 50, 43);
  EXPECT_THROW(gdl::sparse_pca_oracle(e, 5), TooLarge);
  EXPECT_THROW(gdl::sparse_pca_oracle(e, 0), InvalidArgument);
  EXPECT_THROW(gdl::sparse_pca_oracle(e, 51), InvalidArgument);
  EXPECT_THROW(gdl::sparse_pca_oracle(DenseMatrix(3, 4), 1), ZeroMatrix);
}

TEST(Theorem1Transform, ExactFactorizationRecovered) {
  const std::vector<double> u{3.0, 4.0};  // ‖u‖ = 5
  std::vector<double> v(4, 0.0);
  v[0] = 0.6;
  v[2] = -0.8;  // already unit
  DenseMatrix e(2, 4);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 4; ++c) e(r, c) = u[r] * v[c];
  const SparseVector w =
      SparseVector::from_entries(4, {{0, 0.6}, {2, -0.8}});
  const auto [d, alpha] = gdl::theorem1_transform(e, w);
  EXPECT_NEAR(d[0], 0.6, 1e-12);
  EXPECT_NEAR(d[1], 0.8, 1e-12);
  ASSERT_EQ(alpha.nnz(), 2u);
  EXPECT_NEAR(alpha.entries()[0].second, 5.0 * 0.6, 1e-12);
  EXPECT_NEAR(alpha.entries()[1].second, 5.0 * -0.8, 1e-12);
  // Residual of E - d alphaᵀ is zero.
  double resid = 0.0;
  const std::vector<double> alpha_dense = alpha.to_dense();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      const double x = e(r, c) - d[r] * alpha_dense[c];
      resid += x * x;
    }
  EXPECT_LE(resid, 1e-20);
}

TEST(Theorem1Transform, AlgebraicIdentitiesOnRandomInputs) {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d_dim = 2 + rng.below(10);
    const std::size_t n = 2 + rng.below(10);
    const DenseMatrix e = random_matrix(d_dim, n, 5000 + trial);
    const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(4, n));
    const SparseVector w = gdl::sparse_pca_rank1(e, k);

    // Identity: ‖E − Ewwᵀ‖_F² + wᵀEᵀEw = ‖E‖_F², to 1e-10 relative.
    const std::vector<double> w_dense = w.to_dense();
    std::vector<double> ew(d_dim, 0.0);
    for (std::size_t r = 0; r < d_dim; ++r)
      for (std::size_t c = 0; c < n; ++c) ew[r] += e(r, c) * w_dense[c];
    double resid_sq = 0.0;
    for (std::size_t r = 0; r < d_dim; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double x = e(r, c) - ew[r] * w_dense[c];
        resid_sq += x * x;
      }
    const double e_norm_sq = gdl::frobenius_norm_sq(e);
    EXPECT_NEAR(resid_sq + pca_objective(e, w), e_norm_sq,
                1e-10 * e_norm_sq);

    const auto [dir, alpha] = gdl::theorem1_transform(e, w);
    // d ∥ E·alpha with positive orientation.
    std::vector<double> e_alpha(d_dim, 0.0);
    for (const auto& [c, v] : alpha.entries())
      for (std::size_t r = 0; r < d_dim; ++r) e_alpha[r] += e(r, c) * v;
    double dot = 0.0, ea_norm = 0.0;
    for (std::size_t r = 0; r < d_dim; ++r) {
      dot += dir[r] * e_alpha[r];
      ea_norm += e_alpha[r] * e_alpha[r];
    }
    ea_norm = std::sqrt(ea_norm);
    EXPECT_GE(dot / ea_norm, 1.0 - 1e-10);
    // ‖alpha‖₂² = ‖E·alpha‖₂ to 1e-8 relative.
    EXPECT_NEAR(alpha.norm_sq(), ea_norm, 1e-8 * ea_norm);
  }
}

TEST(Theorem1Transform, RejectsBadDirections) {
  const DenseMatrix e = random_matrix(3, 4, 45);
  const SparseVector non_unit = SparseVector::from_entries(4, {{1, 0.5}});
  EXPECT_THROW(gdl::theorem1_transform(e, non_unit), InvalidArgument);
  const SparseVector wrong_dim = SparseVector::from_entries(3, {{1, 1.0}});
  EXPECT_THROW(gdl::theorem1_transform(e, wrong_dim), DimensionMismatch);
  // Direction in the null space: column 3 is zero.
  DenseMatrix e_null(3, 4);
  e_null(0, 0) = 1.0;
  const SparseVector null_dir = SparseVector::from_entries(4, {{3, 1.0}});
  EXPECT_THROW(gdl::theorem1_transform(e_null, null_dir),
               DegenerateDirection);
}

TEST(SparseRank1Update, ExactSparseRankOneGivesZeroResidual) {
  const std::vector<double> u{1.0, -2.0};
  std::vector<double> v(5, 0.0);
  v[1] = 2.0;
  v[3] = -1.0;
  DenseMatrix e(2, 5);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 5; ++c) e(r, c) = u[r] * v[c];
  const auto fit = gdl::sparse_rank1_update(e, 2);
  const std::vector<double> alpha_dense = fit.row.to_dense();
  double resid = 0.0;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      const double x = e(r, c) - fit.atom[r] * alpha_dense[c];
      resid += x * x;
    }
  EXPECT_LE(resid, 1e-18);
}

TEST(SparseRank1Update, EckartYoungLimitAtFullSupport) {
  // k = n → best rank-1 approximation: residual² = ‖E‖_F² − σ₁².
  const DenseMatrix e = random_matrix(6, 9, 77);
  SparsePcaConfig cfg;
  cfg.inner_iters = 200;
  const auto fit = gdl::sparse_rank1_update(e, 9, nullptr, cfg);
  const std::vector<double> alpha_dense = fit.row.to_dense();
  double resid = 0.0;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 9; ++c) {
      const double x = e(r, c) - fit.atom[r] * alpha_dense[c];
      resid += x * x;
    }
  // Reference leading singular value via long power iteration.
  std::vector<double> v(9, 1.0 / 3.0);
  double sigma = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> ev(6, 0.0);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 9; ++c) ev[r] += e(r, c) * v[c];
    double un = 0.0;
    for (double x : ev) un += x * x;
    un = std::sqrt(un);
    for (double& x : ev) x /= un;
    std::vector<double> next(9, 0.0);
    for (std::size_t c = 0; c < 9; ++c)
      for (std::size_t r = 0; r < 6; ++r) next[c] += e(r, c) * ev[r];
    double vn = 0.0;
    for (double x : next) vn += x * x;
    vn = std::sqrt(vn);
    for (double& x : next) x /= vn;
    sigma = vn;
    v = next;
  }
  const double expected = gdl::frobenius_norm_sq(e) - sigma * sigma;
  EXPECT_NEAR(resid, expected, 1e-8 * gdl::frobenius_norm_sq(e));
}

TEST(SparseRank1Update, OracleAgreementOnSmallInstances) {
  // d=5, n=6, k=2 with every single-coordinate start: within 1e-6 of the
  // oracle on ≥95/100, within 5% relative on all.
  SparsePcaConfig cfg;
  cfg.restarts = 7;  // dense leading-direction start + all 6 coordinates
  std::size_t close = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const DenseMatrix e = random_matrix(5, 6, Rng::derive_seed(301, t));
    const SparseVector w = gdl::sparse_pca_rank1(e, 2, nullptr, cfg);
    const SparseVector w_ref = gdl::sparse_pca_oracle(e, 2);
    const double got = pca_objective(e, w);
    const double ref = pca_objective(e, w_ref);
    EXPECT_GE(got, ref * 0.95) << "instance " << t;
    if (std::abs(got - ref) <= 1e-6) ++close;
  }
  EXPECT_GE(close, 95u);
}

}  // namespace
