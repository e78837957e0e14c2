#ifndef SPLA_VARIANCE_HPP
#define SPLA_VARIANCE_HPP

#include <algorithm>
#include <numeric>

#include "spla/blocks.hpp"
#include "spla/data.hpp"
#include "spla/linalg.hpp"
#include "spla/loading.hpp"

namespace spla {

/// r_ii² per loading, in covariance units, for the loadings taken in loading_order.
struct CorrectedVariances {
  Vector r_squared;
  IndexList loading_order;
};

namespace detail {

inline IndexList identity_order(Index m) {
  IndexList o(m);
  std::iota(o.begin(), o.end(), Index{0});
  return o;
}

}  // namespace detail

/// Variance of each projected variable after regressing out the earlier ones:
/// squared diagonal of the Cholesky factor of UᵀΣU, columns taken in `order`.
inline CorrectedVariances corrected_variances(const CovMatrix& cov, const LoadingMatrix& lm, IndexList order) {
  if (lm.u.rows() != cov.dim()) throw Error(ErrorKind::InvalidArgument, "loading/covariance dimension mismatch");
  const Matrix uo = lm.u.select_cols(order);
  Matrix gram = transpose_times(uo, cov.values() * uo);
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = i + 1; j < gram.cols(); ++j) gram(i, j) = gram(j, i) = 0.5 * (gram(i, j) + gram(j, i));
  const Matrix r = cholesky_upper(gram);
  CorrectedVariances cv{Vector(order.size()), std::move(order)};
  for (Index i = 0; i < cv.r_squared.size(); ++i) cv.r_squared[i] = r(i, i) * r(i, i);
  return cv;
}

inline CorrectedVariances corrected_variances(const CovMatrix& cov, const LoadingMatrix& lm) {
  return corrected_variances(cov, lm, detail::identity_order(lm.u.cols()));
}

/// Loadings taken block by block in the partition's order.
inline CorrectedVariances corrected_variances(const CovMatrix& cov, const LoadingMatrix& lm,
                                              const BlockPartition& p) {
  return corrected_variances(cov, lm, block_permutation(p).col_perm);
}

/// Sample path: (N−1)⁻¹ r̂_ii² from the QR decomposition of x·U (x centered internally).
inline CorrectedVariances corrected_variances_qr(const DataMatrix& d, const LoadingMatrix& lm, IndexList order) {
  const Matrix x = center(d).values();
  const QrResult qr = qr_decompose(x * lm.u.select_cols(order));
  const double scale = 1.0 / static_cast<double>(x.rows() - 1);
  CorrectedVariances cv{Vector(order.size()), std::move(order)};
  for (Index i = 0; i < cv.r_squared.size(); ++i) cv.r_squared[i] = qr.r(i, i) * qr.r(i, i) * scale;
  return cv;
}

inline CorrectedVariances corrected_variances_qr(const DataMatrix& d, const LoadingMatrix& lm) {
  return corrected_variances_qr(d, lm, detail::identity_order(lm.u.cols()));
}

/// Percent shares of tr(Σ).
struct VarianceShares {
  Vector loading_sv;  ///< aligned with CorrectedVariances::loading_order
  Vector block_sv;    ///< aligned with the partition's block order
  Vector block_cv;
};

inline VarianceShares variance_shares(const CorrectedVariances& cv, const CovMatrix& cov, const BlockPartition& p) {
  const double total = cov.trace();
  VarianceShares s;
  for (double r2 : cv.r_squared) s.loading_sv.push_back(100.0 * r2 / total);
  double cum = 0.0;
  for (const auto& b : p.blocks) {
    double sv = 0.0;
    for (Index l : b.loadings) {
      const auto it = std::find(cv.loading_order.begin(), cv.loading_order.end(), l);
      if (it == cv.loading_order.end())
        throw Error(ErrorKind::InconsistentPartition, "block loading missing from corrected variances");
      sv += s.loading_sv[static_cast<Index>(it - cv.loading_order.begin())];
    }
    cum += sv;
    s.block_sv.push_back(sv);
    s.block_cv.push_back(cum);
  }
  return s;
}

/// Covariance of the variables in d_set after regression on conditioned_on.
struct PartialCov {
  Matrix values;
  IndexList variables;
  IndexList conditioned_on;
};

inline IndexList complement(const IndexList& set, Index m) {
  std::vector<bool> in(m, false);
  for (Index i : set) {
    if (i >= m) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
    in[i] = true;
  }
  IndexList out;
  for (Index i = 0; i < m; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

/// Σ[D,D] − Σ[D,K] Σ[K,K]⁻¹ Σ[K,D].
inline PartialCov partial_cov(const CovMatrix& cov, const IndexList& d_set, const IndexList& k_set) {
  if (d_set.empty()) throw Error(ErrorKind::InvalidArgument, "partial covariance needs a nonempty variable set");
  const Matrix& s = cov.values();
  Matrix out = s.select(d_set, d_set);
  if (!k_set.empty()) {
    const Matrix skd = s.select(k_set, d_set);
    out -= transpose_times(skd, solve_spd(s.select(k_set, k_set), skd));
  }
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = i + 1; j < out.cols(); ++j) out(i, j) = out(j, i) = 0.5 * (out(i, j) + out(j, i));
  return {std::move(out), d_set, k_set};
}

/// Conditions on every variable outside d_set.
inline PartialCov partial_cov(const CovMatrix& cov, const IndexList& d_set) {
  const IndexList k = complement(d_set, cov.dim());
  if (k.empty()) throw Error(ErrorKind::InvalidArgument, "variable set must be a proper subset");
  return partial_cov(cov, d_set, k);
}

/// 100 · tr(Σ_{2·1}) / tr(Σ).
inline double partial_trace_share(const CovMatrix& cov, const IndexList& d_set) {
  return 100.0 * partial_cov(cov, d_set).values.trace() / cov.trace();
}

}  // namespace spla

#endif  // SPLA_VARIANCE_HPP
