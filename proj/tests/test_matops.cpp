#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spla/linalg.hpp"

using namespace spla;

namespace {

Matrix random_matrix(Index r, Index c, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (double& x : m.data()) x = nd(gen);
  return m;
}

Matrix random_spd(Index n, unsigned seed) {
  const Matrix a = random_matrix(n + 2, n, seed);
  Matrix s = transpose_times(a, a);
  for (Index i = 0; i < n; ++i) s(i, i) += 0.1;
  return s;
}

double orthonormality_error(const Matrix& q) {
  return (transpose_times(q, q) - Matrix::identity(q.cols())).max_abs();
}

}  // namespace

TEST(SymEigen, TwoByTwoHandSolution) {
  const auto e = sym_eigen(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.values[0], 3.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), h, 1e-12);
  EXPECT_NEAR(e.vectors(0, 0), e.vectors(1, 0), 1e-12);
  EXPECT_NEAR(e.vectors(0, 1), -e.vectors(1, 1), 1e-12);
}

TEST(SymEigen, DiagonalIsAxisPermutation) {
  const auto e = sym_eigen(Matrix::diagonal(Vector{3, 1, 2}));
  EXPECT_EQ(e.values, (Vector{3, 2, 1}));
  EXPECT_EQ(e.vectors, (Matrix{{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
}

TEST(SymEigen, IdentityKeepsOrder) {
  const auto e = sym_eigen(Matrix::identity(3));
  EXPECT_EQ(e.values, (Vector{1, 1, 1}));
  EXPECT_LT(orthonormality_error(e.vectors), 1e-12);
}

TEST(SymEigen, RejectsAsymmetric) {
  try {
    sym_eigen(Matrix{{1, 2}, {0, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSymmetric);
  }
}

TEST(SymEigen, ReconstructsRandomSpd) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const Matrix a = random_spd(6, seed);
    const auto e = sym_eigen(a);
    const Matrix back = e.vectors * Matrix::diagonal(e.values) * e.vectors.transpose();
    EXPECT_LT(relative_error(back, a), 1e-8);
    EXPECT_LT(orthonormality_error(e.vectors), 1e-10);
    double sum = 0.0;
    for (Index i = 0; i < e.values.size(); ++i) {
      EXPECT_GT(e.values[i], 0.0);
      if (i > 0) {
        EXPECT_GE(e.values[i - 1], e.values[i]);
      }
      sum += e.values[i];
    }
    EXPECT_NEAR(sum, a.trace(), 1e-8 * a.trace());
  }
}

TEST(Cholesky, Examples) {
  EXPECT_EQ(cholesky_upper(Matrix::diagonal(Vector{4, 9})), Matrix::diagonal(Vector{2, 3}));
  const Matrix r = cholesky_upper(Matrix{{1, 0.5}, {0.5, 1}});
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r(0, 1), 0.5, 1e-15);
  EXPECT_EQ(r(1, 0), 0.0);
  EXPECT_NEAR(r(1, 1), std::sqrt(0.75), 1e-15);
  try {
    cholesky_upper(Matrix{{1, 1}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
}

TEST(Cholesky, ReconstructsRandomSpd) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const Matrix a = random_spd(5, seed);
    const Matrix r = cholesky_upper(a);
    EXPECT_LT(relative_error(transpose_times(r, r), a), 1e-10);
    for (Index i = 0; i < 5; ++i) EXPECT_GT(r(i, i), 0.0);
  }
}

TEST(Qr, Examples) {
  const auto id = qr_decompose(Matrix::identity(3));
  EXPECT_LT((id.q - Matrix::identity(3)).max_abs(), 1e-15);
  EXPECT_LT((id.r - Matrix::identity(3)).max_abs(), 1e-15);

  const auto col = qr_decompose(Matrix{{3}, {4}});
  EXPECT_NEAR(col.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(col.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(col.r(0, 0), 5.0, 1e-14);
}

TEST(Qr, MatchesCholeskyOfGram) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const Matrix x = random_matrix(12, 5, seed);
    const auto qr = qr_decompose(x);
    EXPECT_LT(relative_error(qr.q * qr.r, x), 1e-10);
    EXPECT_LT(orthonormality_error(qr.q), 1e-12);
    const Matrix rc = cholesky_upper(transpose_times(x, x));
    for (Index i = 0; i < 5; ++i) {
      EXPECT_GE(qr.r(i, i), 0.0);
      EXPECT_NEAR(qr.r(i, i), rc(i, i), 1e-8 * rc(i, i));
      for (Index j = 0; j < i; ++j) EXPECT_EQ(qr.r(i, j), 0.0);
    }
  }
}

TEST(Svd, Examples) {
  const auto d = svd(Matrix{{2, 0}, {0, 1}});
  EXPECT_NEAR(d.sigma[0], 2.0, 1e-14);
  EXPECT_NEAR(d.sigma[1], 1.0, 1e-14);

  Vector u{1, 2, 2}, v{0, 0.6, 0.8};
  normalize(u);
  Matrix uv(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) uv(i, j) = u[i] * v[j];
  const auto r1 = svd(uv);
  EXPECT_NEAR(r1.sigma[0], 1.0, 1e-12);
  EXPECT_NEAR(r1.sigma[1], 0.0, 1e-12);
  EXPECT_NEAR(r1.sigma[2], 0.0, 1e-12);
  EXPECT_LT(orthonormality_error(r1.u), 1e-10);
}

TEST(Svd, ReconstructsRandom) {
  for (unsigned seed = 1; seed <= 10; ++seed)
    for (auto [r, c] : {std::pair<Index, Index>{4, 3}, {3, 4}, {6, 6}}) {
      const Matrix a = random_matrix(r, c, seed);
      const auto s = svd(a);
      const Matrix back = s.u * Matrix::diagonal(s.sigma) * s.v.transpose();
      EXPECT_LT(relative_error(back, a), 1e-8);
      for (Index i = 1; i < s.sigma.size(); ++i) EXPECT_GE(s.sigma[i - 1], s.sigma[i]);
      // Unit singular values give orthonormal columns.
      if (r >= c) {
        EXPECT_LT(orthonormality_error(polar_factor(a)), 1e-10);
      }
    }
}

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(Vector{3, -1, 0.5}, 1.0), (Vector{2, 0, 0}));
  EXPECT_EQ(soft_threshold(Vector{3, -1, 0.5}, 0.0), (Vector{3, -1, 0.5}));
  EXPECT_EQ(soft_threshold(Vector{1, 1}, 2.0), (Vector{0, 0}));
  EXPECT_EQ(soft_threshold(Vector{-3}, 1.0), (Vector{-2}));
  EXPECT_THROW(soft_threshold(Vector{1}, -1.0), Error);
}

TEST(SolveSpd, Examples) {
  const Matrix b{{1, 2}, {3, 4}};
  EXPECT_EQ(solve_spd(Matrix::identity(2), b), b);
  const Matrix x = solve_spd(Matrix::diagonal(Vector{2, 4}), Matrix{{2}, {4}});
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 1.0, 1e-15);
}

TEST(SolveSpd, AgreesWithAdjugateInverse) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const Matrix a = random_spd(3, seed);
    const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                       a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                       a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    Matrix inv(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) {
        const Index r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        inv(i, j) = (a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0)) / det;
      }
    const Matrix b = random_matrix(3, 2, seed + 100);
    EXPECT_LT(relative_error(solve_spd(a, b), inv * b), 1e-8);
  }
}
