#ifndef SPLA_SPARSE_LOADINGS_HPP
#define SPLA_SPARSE_LOADINGS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "spla/blocks.hpp"
#include "spla/data.hpp"
#include "spla/error.hpp"
#include "spla/linalg.hpp"
#include "spla/loading.hpp"

namespace spla {

enum class SparseMethod { Pmd, Spca };

constexpr std::string_view to_string(SparseMethod m) noexcept {
  return m == SparseMethod::Pmd ? "pmd" : "spca";
}

/// Iteration controls shared by both sparse-loading methods.
struct PenaltyConfig {
  int max_iter = 500;  ///< penalized decomposition
  double conv_tol = 1e-10;
  int enet_max_iter = 5000;
  double enet_conv_tol = 1e-8;
  int bisection_iter = 50;
  int cd_max_sweeps = 3;
  double cd_tol = 1e-12;
  double zero_tol = 1e-9;
};

struct RankOneFactor {
  Vector left;
  Vector loading;
  double d = 0.0;
};

namespace detail {

inline void positive_largest(std::span<double> v, std::span<double> partner = {}) {
  Index arg = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg]) + 1e-14) arg = i;
  if (!v.empty() && v[arg] < 0.0) {
    scale(v, -1.0);
    scale(partner, -1.0);
  }
}

/// Unit vector soft_threshold(a, δ)/‖·‖ with the smallest δ giving ‖·‖₁ <= c.
/// Bisection keeps the feasible upper end; if that thresholds everything away
/// the largest coordinate of a is kept alone.
inline Vector l1_unit_projection(const Vector& a, double c, int iterations) {
  Vector v = a;
  if (normalize(v) == 0.0) {
    v.assign(a.size(), 0.0);
    v[0] = 1.0;
    return v;
  }
  if (norm1(v) <= c) return v;
  double lo = 0.0;
  double hi = norm_inf(a);
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vector s = soft_threshold(a, mid);
    const double n2 = norm2(s);
    if (n2 == 0.0 || norm1(s) / n2 <= c)
      hi = mid;
    else
      lo = mid;
  }
  Vector s = soft_threshold(a, hi);
  if (normalize(s) == 0.0) {
    s.assign(a.size(), 0.0);
    Index arg = 0;
    for (Index i = 1; i < a.size(); ++i)
      if (std::abs(a[i]) > std::abs(a[arg])) arg = i;
    s[arg] = 1.0;
  }
  return s;
}

inline Vector leading_right_singular_vector(const Matrix& x) {
  return sym_eigen(transpose_times(x, x)).vectors.col(0);
}

}  // namespace detail

/// One factor of the penalized matrix decomposition: L2 constraints on both
/// sides, L1 bound c on the loading side.
inline RankOneFactor penalized_rank_one(const Matrix& x, double c, const PenaltyConfig& cfg = {}) {
  const Index m = x.cols();
  if (m == 0 || x.max_abs() == 0.0) throw Error(ErrorKind::InvalidArgument, "penalized_rank_one needs a nonzero x");
  if (c < 1.0 - 1e-12 || c > std::sqrt(static_cast<double>(m)) + 1e-12)
    throw Error(ErrorKind::InvalidArgument, "l1 bound c must lie in [1, sqrt(M)]");
  RankOneFactor f;
  Vector v = detail::leading_right_singular_vector(x);
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    Vector u = x * v;
    if (normalize(u) == 0.0) {
      converged = true;
      break;
    }
    Vector vn = detail::l1_unit_projection(transpose_times(x, u), c, cfg.bisection_iter);
    double change = 0.0;
    for (Index i = 0; i < m; ++i) change = std::max(change, std::abs(vn[i] - v[i]));
    v = std::move(vn);
    if (change < cfg.conv_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "penalized rank-one factor did not converge");
  f.left = x * v;
  f.d = normalize(f.left);
  f.loading = std::move(v);
  detail::positive_largest(f.loading, f.left);
  return f;
}

/// Nearest orthonormal matrix, globally or block by block on p's diagonal blocks
/// (zeros outside the blocks stay exact).
inline LoadingMatrix orthogonalize(const LoadingMatrix& lm, const std::optional<BlockPartition>& p = std::nullopt) {
  const Matrix& u = lm.u;
  if (!u.is_square()) throw Error(ErrorKind::InvalidArgument, "orthogonalize needs a square matrix");
  auto polar_checked = [](const Matrix& a) {
    const SvdResult s = svd(a);
    if (s.sigma.empty() || s.sigma.back() < 1e-10)
      throw Error(ErrorKind::RankDeficient, "loading matrix is rank deficient");
    return Matrix(s.u * s.v.transpose());
  };
  LoadingMatrix out = lm;
  if (!p) {
    out.u = polar_checked(u);
    return out;
  }
  (void)permute_to_block_diagonal(lm, *p);
  out.u = Matrix(u.rows(), u.cols());
  for (const auto& b : p->blocks) {
    const Matrix q = polar_checked(u.select(b.variables, b.loadings));
    for (Index a = 0; a < b.size(); ++a)
      for (Index k = 0; k < b.size(); ++k) out.u(b.variables[a], b.loadings[k]) = q(a, k);
  }
  return out;
}

/// Makes every column's largest-magnitude entry positive.
inline void apply_sign_convention(LoadingMatrix& lm) {
  for (Index j = 0; j < lm.u.cols(); ++j) {
    Vector c = lm.u.col(j);
    detail::positive_largest(c);
    lm.u.set_col(j, c);
  }
}

struct SparseLoadingResult {
  LoadingMatrix raw;         ///< extracted loadings before orthogonalization
  LoadingMatrix orthogonal;  ///< globally orthogonalized
  Vector d;
};

/// M factors of the penalized decomposition with deflation x <- x − d·left·loadingᵀ.
inline SparseLoadingResult sparse_loading_matrix(const Matrix& x, double c, const PenaltyConfig& cfg = {}) {
  const Index m = x.cols();
  Matrix r = x;
  SparseLoadingResult res;
  res.raw = {Matrix(m, m), cfg.zero_tol, LoadingSource::PenalizedDecomposition};
  const double scale_ref = x.frobenius_norm();
  for (Index k = 0; k < m; ++k) {
    if (r.frobenius_norm() <= 1e-12 * scale_ref)
      throw Error(ErrorKind::RankDeficient, "sample exhausted before all loadings were extracted");
    const RankOneFactor f = penalized_rank_one(r, c, cfg);
    res.raw.u.set_col(k, f.loading);
    res.d.push_back(f.d);
    for (Index i = 0; i < r.rows(); ++i)
      for (Index j = 0; j < m; ++j) r(i, j) -= f.d * f.left[i] * f.loading[j];
  }
  res.orthogonal = orthogonalize(res.raw);
  apply_sign_convention(res.orthogonal);
  return res;
}

inline SparseLoadingResult sparse_loading_matrix(const DataMatrix& d, double c, const PenaltyConfig& cfg = {}) {
  return sparse_loading_matrix(center(d).values(), c, cfg);
}

/// Sparse regression loadings: for fixed orthonormal A each column of B solves
///   min βᵀ(Σ + ridge·I)β − 2 A_jᵀ Σ β + l1_j ‖β‖₁
/// by coordinate descent; then A <- polar(ΣB). Returns the normalized M×k
/// matrix B; columns thresholded away entirely stay zero.
inline Matrix elastic_net_raw(const CovMatrix& cov, const Vector& l1, double ridge, Index k,
                              const PenaltyConfig& cfg = {}) {
  const Index m = cov.dim();
  if (k == 0 || k > m) throw Error(ErrorKind::InvalidArgument, "k must lie in [1, M]");
  if (l1.size() != k) throw Error(ErrorKind::InvalidArgument, "need one l1 weight per loading");
  if (ridge < 0.0 || std::any_of(l1.begin(), l1.end(), [](double w) { return w < 0.0; }))
    throw Error(ErrorKind::InvalidArgument, "penalties must be nonnegative");
  const Matrix& s = cov.values();
  Matrix g = s;
  for (Index i = 0; i < m; ++i) g(i, i) += ridge;

  const Matrix v = sym_eigen(s).vectors;
  Matrix a(m, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = v(i, j);
  Matrix b = a;

  bool converged = false;
  for (int it = 0; it < cfg.enet_max_iter && !converged; ++it) {
    const Matrix b_old = b;
    const Matrix sa = s * a;
    for (Index j = 0; j < k; ++j) {
      // gb tracks G·b_j so each coordinate step costs O(M) only when it moves.
      Vector gb = g * b.col(j);
      for (int sweep = 0; sweep < cfg.cd_max_sweeps; ++sweep) {
        double delta = 0.0;
        for (Index i = 0; i < m; ++i) {
          const double r = sa(i, j) - gb[i] + g(i, i) * b(i, j);
          const double mag = std::abs(r) - 0.5 * l1[j];
          const double nb = mag > 0.0 ? std::copysign(mag, r) / g(i, i) : 0.0;
          const double step = nb - b(i, j);
          if (step == 0.0) continue;
          for (Index q = 0; q < m; ++q) gb[q] += step * g(q, i);
          b(i, j) = nb;
          delta = std::max(delta, std::abs(step));
        }
        if (delta < cfg.cd_tol) break;
      }
    }
    a = polar_factor(s * b);
    converged = (b - b_old).max_abs() < cfg.enet_conv_tol;
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "elastic-net loadings did not converge");
  for (Index j = 0; j < k; ++j) {
    Vector c = b.col(j);
    if (normalize(c) <= cfg.zero_tol) c.assign(m, 0.0);
    b.set_col(j, c);
  }
  return b;
}

/// Completes an M×k sparse loading matrix to M×M without merging blocks:
/// zero columns are dropped, each support component with fewer loadings than
/// variables is filled with eigenvectors of Σ[D,D] projected off the loadings
/// already there, and variables without any loading become singletons.
/// A component with more loadings than variables cannot be completed.
inline Matrix complete_within_blocks(const CovMatrix& cov, const Matrix& b, double zero_tol = 1e-9) {
  const Index m = cov.dim();
  if (b.rows() != m) throw Error(ErrorKind::InvalidArgument, "loading rows must match the covariance");
  IndexList keep;
  for (Index j = 0; j < b.cols(); ++j)
    if (norm_inf(b.col(j)) > zero_tol) keep.push_back(j);
  const Matrix kept = b.select_cols(keep);

  std::vector<Vector> cols;
  for (const Block& comp : support_components(kept, zero_tol)) {
    if (comp.loadings.size() > comp.variables.size())
      throw Error(ErrorKind::NonSquareBlock, "component with " + std::to_string(comp.variables.size()) +
                                                 " variables carries " + std::to_string(comp.loadings.size()) +
                                                 " loadings");
    const Index first_new = cols.size();
    std::vector<Vector> basis;  // orthonormal span of this component's loadings
    for (Index j : comp.loadings) {
      Vector c = kept.col(j);
      cols.push_back(c);
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& q : basis) {
          const double p = dot(q, c);
          for (Index i = 0; i < m; ++i) c[i] -= p * q[i];
        }
      if (normalize(c) > 1e-8) basis.push_back(std::move(c));
    }
    if (comp.loadings.size() == comp.variables.size()) continue;
    const Matrix ev = sym_eigen(cov.values().select(comp.variables, comp.variables)).vectors;
    for (Index e = 0; e < ev.cols() && cols.size() - first_new < comp.variables.size(); ++e) {
      Vector c(m, 0.0);
      for (Index a = 0; a < comp.variables.size(); ++a) c[comp.variables[a]] = ev(a, e);
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& q : basis) {
          const double p = dot(q, c);
          for (Index i = 0; i < m; ++i) c[i] -= p * q[i];
        }
      if (normalize(c) > 1e-8) {
        cols.push_back(c);
        basis.push_back(std::move(c));
      }
    }
  }
  if (cols.size() != m) throw Error(ErrorKind::RankDeficient, "could not complete the loading basis");
  return Matrix::from_columns(cols, m);
}

/// Elastic-net loadings completed within their blocks and orthogonalized
/// block by block, so the zero pattern of the sparse columns survives.
inline LoadingMatrix elastic_net_loadings(const CovMatrix& cov, const Vector& l1, double ridge, Index k,
                                          const PenaltyConfig& cfg = {}) {
  LoadingMatrix lm{complete_within_blocks(cov, elastic_net_raw(cov, l1, ridge, k, cfg), cfg.zero_tol),
                   cfg.zero_tol, LoadingSource::ElasticNet};
  const BlockPartition p = detect_blocks(lm);
  LoadingMatrix out = orthogonalize(lm, p);
  apply_sign_convention(out);
  return out;
}

/// Per-loading weights t·sqrt(λ₁λ_j) from the eigenvalues of Σ, so the
/// penalty scales with the covariance.
inline Vector spca_weights(const CovMatrix& cov, double t) {
  const Vector lambda = sym_eigen(cov.values()).values;
  Vector w(lambda.size());
  for (Index j = 0; j < w.size(); ++j) w[j] = t * std::sqrt(lambda[0] * std::max(lambda[j], 0.0));
  return w;
}

}  // namespace spla

#endif  // SPLA_SPARSE_LOADINGS_HPP
