#include <gtest/gtest.h>

#include <random>

#include "spla/reproduce.hpp"
#include "spla/variance.hpp"

using namespace spla;

namespace {

Matrix random_matrix(Index r, Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix a(r, c);
  for (double& v : a.data()) v = nd(gen);
  return a;
}

CovMatrix random_spd(Index m, std::mt19937_64& gen) {
  const Matrix a = random_matrix(m + 3, m, gen);
  Matrix s = transpose_times(a, a);
  for (Index i = 0; i < m; ++i) s(i, i) += 0.1;
  return CovMatrix(s);
}

LoadingMatrix random_orthonormal(Index m, std::mt19937_64& gen) {
  return {qr_decompose(random_matrix(m, m, gen)).q, 1e-9, LoadingSource::Manual};
}

}  // namespace

TEST(CorrectedVariances, EigenvectorsGiveEigenvalues) {
  std::mt19937_64 gen(1);
  const CovMatrix cov = random_spd(5, gen);
  const EigenResult e = sym_eigen(cov.values());
  const CorrectedVariances cv = corrected_variances(cov, {e.vectors, 1e-9, LoadingSource::Eigenvectors});
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(cv.r_squared[i], e.values[i], 1e-9 * e.values[0]);
}

TEST(CorrectedVariances, IdentityOnDiagonal) {
  const CovMatrix cov(Matrix{{3, 0, 0}, {0, 1, 0}, {0, 0, 2}});
  const CorrectedVariances cv = corrected_variances(cov, {Matrix::identity(3), 1e-9, LoadingSource::Manual});
  EXPECT_NEAR(cv.r_squared[0], 3.0, 1e-14);
  EXPECT_NEAR(cv.r_squared[1], 1.0, 1e-14);
  EXPECT_NEAR(cv.r_squared[2], 2.0, 1e-14);
}

TEST(CorrectedVariances, ThreeByThreeRegressionOracle) {
  const CovMatrix cov(Matrix{{1, .2, .2}, {.2, 1, 0}, {.2, 0, 1}});
  const CorrectedVariances cv = corrected_variances(cov, {Matrix::identity(3), 1e-9, LoadingSource::Manual});
  // X3 on (X1, X2): beta = [[1,.2],[.2,1]]^{-1} (.2, 0).
  const Matrix sol = solve_spd(Matrix{{1, .2}, {.2, 1}}, Matrix{{.2}, {0}});
  const Vector beta{sol(0, 0), sol(1, 0)};
  const double residual = 1.0 - (0.2 * beta[0] + 0.0 * beta[1]);
  EXPECT_NEAR(cv.r_squared[0], 1.0, 1e-14);
  EXPECT_NEAR(cv.r_squared[1], 0.96, 1e-14);
  EXPECT_NEAR(cv.r_squared[2], residual, 1e-14);
  EXPECT_NEAR(residual, 1.0 - 0.04 / 0.96, 1e-14);
}

TEST(CorrectedVariances, TotalBoundedByTrace) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 50; ++rep) {
    const Index m = 2 + rep % 6;
    const CovMatrix cov = random_spd(m, gen);
    const CorrectedVariances cv = corrected_variances(cov, random_orthonormal(m, gen));
    double total = 0.0;
    for (double r : cv.r_squared) {
      EXPECT_GE(r, 0.0);
      total += r;
    }
    EXPECT_LE(total, cov.trace() + 1e-8);
  }
}

TEST(CorrectedVariances, CholeskyAndQrAgree) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Index m = 2 + rep % 5;
    const DataMatrix d(random_matrix(40, m, gen));
    const CovMatrix cov = sample_cov(d);
    const LoadingMatrix u = random_orthonormal(m, gen);
    const CorrectedVariances a = corrected_variances(cov, u);
    const CorrectedVariances b = corrected_variances_qr(d, u);
    for (Index i = 0; i < m; ++i) EXPECT_NEAR(a.r_squared[i], b.r_squared[i], 1e-8 * cov.trace());
  }
}

TEST(VarianceShares, EigenvectorsSingleBlockReachHundred) {
  std::mt19937_64 gen(5);
  const CovMatrix cov = random_spd(4, gen);
  const BlockPartition p = single_block(4);
  const LoadingMatrix u{sym_eigen(cov.values()).vectors, 1e-9, LoadingSource::Eigenvectors};
  const VarianceShares s = variance_shares(corrected_variances(cov, u, p), cov, p);
  EXPECT_NEAR(s.block_cv.back(), 100.0, 1e-8);
}

TEST(VarianceShares, OecdSingletonBlocks) {
  const CovMatrix cov = oecd_cov(SPLA_DATA_DIR);
  const BlockPartition p = pinned_partition(oecd_detail_order(), cov.names());
  const VarianceShares s = variance_shares(corrected_variances(cov, block_eigen_loadings(cov, p), p), cov, p);
  EXPECT_NEAR(s.block_sv[0], 16.67, 0.05);
  EXPECT_NEAR(s.block_sv[1], 16.04, 0.05);
  EXPECT_NEAR(s.block_sv[2], 15.57, 0.05);
  for (Index b = 1; b < p.size(); ++b) EXPECT_NEAR(s.block_cv[b], s.block_cv[b - 1] + s.block_sv[b], 1e-10);
  EXPECT_LE(s.block_cv.back(), 100.0 + 1e-6);
}

// Block SV equals the trace of the block's partial covariance given the
// preceding blocks when the block's loadings are eigenvectors of that partial
// covariance (singletons always qualify).
TEST(VarianceShares, BlockSvMatchesPartialTrace) {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 10; ++rep) {
    const CovMatrix cov = random_spd(6, gen);
    const BlockPartition p = partition_from_groups({{0}, {1, 2}, {3, 4, 5}}, 6);
    Matrix u(6, 6);
    for (Index b = 0; b < p.size(); ++b) {
      IndexList pre;
      for (Index k = 0; k < b; ++k) pre.insert(pre.end(), p[k].variables.begin(), p[k].variables.end());
      const Matrix ev = sym_eigen(partial_cov(cov, p[b].variables, pre).values).vectors;
      for (Index a = 0; a < p[b].size(); ++a)
        for (Index k = 0; k < p[b].size(); ++k) u(p[b].variables[a], p[b].loadings[k]) = ev(a, k);
    }
    const VarianceShares s = variance_shares(corrected_variances(cov, {u, 1e-9, LoadingSource::Manual}, p), cov, p);
    for (Index b = 0; b < p.size(); ++b) {
      IndexList pre;
      for (Index k = 0; k < b; ++k) pre.insert(pre.end(), p[k].variables.begin(), p[k].variables.end());
      const double tr = partial_cov(cov, p[b].variables, pre).values.trace();
      EXPECT_NEAR(s.block_sv[b], 100.0 * tr / cov.trace(), 1e-8);
    }
  }
}

TEST(PartialCov, Examples) {
  const CovMatrix c2(Matrix{{1, 0.5}, {0.5, 1}});
  EXPECT_NEAR(partial_cov(c2, {1}).values(0, 0), 0.75, 1e-15);

  const Matrix s{{2, 0.5, 0, 0}, {0.5, 1, 0, 0}, {0, 0, 3, -1}, {0, 0, -1, 2}};
  const PartialCov pc = partial_cov(CovMatrix(s), {2, 3});
  EXPECT_EQ(pc.values, (Matrix{{3, -1}, {-1, 2}}));
  EXPECT_EQ(pc.conditioned_on, (IndexList{0, 1}));
}

TEST(PartialCov, MatchesRegressionResiduals) {
  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Index m = 4 + rep % 3;
    Matrix x = random_matrix(60, m, gen);
    for (Index i = 0; i < 60; ++i) x(i, m - 1) += 0.7 * x(i, 0);  // some dependence
    const DataMatrix d = center(DataMatrix(x));
    const CovMatrix cov = sample_cov(d);
    const IndexList dset{2, m - 1};
    const IndexList kset = complement(dset, m);
    // Least squares of X_D on X_K through QR of X_K.
    const Matrix xk = d.values().select_cols(kset);
    const Matrix xd = d.values().select_cols(dset);
    const QrResult qr = qr_decompose(xk);
    const Matrix fitted = qr.q * transpose_times(qr.q, xd);
    Matrix resid = xd;
    resid -= fitted;
    Matrix brute = transpose_times(resid, resid);
    for (double& v : brute.data()) v /= 59.0;
    const PartialCov pc = partial_cov(cov, dset);
    EXPECT_LT((pc.values - brute).max_abs(), 1e-8);
    const double tr = pc.values.trace();
    EXPECT_GT(tr, 0.0);
    EXPECT_LE(tr, cov.values().select(dset, dset).trace() + 1e-10);
  }
}

TEST(PartialCov, Errors) {
  const CovMatrix c(Matrix{{1, 0.5}, {0.5, 1}});
  EXPECT_THROW(partial_cov(c, {}), Error);
  EXPECT_THROW(partial_cov(c, {0, 1}), Error);
}

TEST(PartialTraceShare, IdentityCovariance) {
  const CovMatrix id(Matrix::identity(5));
  EXPECT_NEAR(partial_trace_share(id, {1, 3}), 40.0, 1e-12);
  EXPECT_NEAR(partial_trace_share(id, {4}), 20.0, 1e-12);
}

TEST(PartialTraceShare, OecdTable) {
  const CovMatrix cov = oecd_cov(SPLA_DATA_DIR);
  const BlockPartition p = pinned_partition(oecd_detail_order(), cov.names());
  const double expected[] = {10.23, 12.41, 12.94, 41.73};
  for (Index b = 0; b < p.size(); ++b) EXPECT_NEAR(partial_trace_share(cov, p[b].variables), expected[b], 0.05);
}
