#ifndef SPLA_EVALUATION_HPP
#define SPLA_EVALUATION_HPP

#include <algorithm>
#include <limits>
#include <optional>

#include "spla/blocks.hpp"
#include "spla/data.hpp"
#include "spla/linalg.hpp"
#include "spla/loading.hpp"
#include "spla/variance.hpp"

namespace spla {

struct EcGate {
  double c_ec = 0.6;

  explicit EcGate(double c = 0.6) : c_ec(c) {
    if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::InvalidArgument, "c_ec must lie in (0,1)");
  }
};

/// EC of one block. The first block in the ordering has no value.
struct BlockEc {
  std::optional<double> ec;
  Index delta_star = 0;
  IndexList corrected_against;

  bool is_first() const noexcept { return !ec.has_value(); }
};

struct PartitionEvaluation {
  std::vector<BlockEc> entries;
  double min_ec = 1.0;
  bool pass = true;
};

/// Within-block eigenvectors of Σ[D,D], placed on each block's loading columns.
inline LoadingMatrix block_eigen_loadings(const CovMatrix& cov, const BlockPartition& p) {
  const Index m = cov.dim();
  p.validate(m);
  Matrix u(m, m);
  for (const auto& b : p.blocks) {
    const EigenResult e = sym_eigen(cov.values().select(b.variables, b.variables));
    for (Index k = 0; k < b.size(); ++k)
      for (Index a = 0; a < b.size(); ++a) u(b.variables[a], b.loadings[k]) = e.vectors(a, k);
  }
  return {std::move(u), 1e-9, LoadingSource::Eigenvectors};
}

/// Replaces the block's first loading by D^{-1/2}·1 on its variables and
/// re-orthonormalizes the block's remaining loadings against it inside the block.
inline LoadingMatrix replace_with_weight(const LoadingMatrix& lm, const BlockPartition& p, Index b) {
  const Index m = lm.dim();
  if (b >= p.size()) throw Error(ErrorKind::InconsistentPartition, "block index out of range");
  (void)permute_to_block_diagonal(lm, p);
  const Block& blk = p[b];
  const Index d = blk.size();
  IndexList loads = blk.loadings;
  std::sort(loads.begin(), loads.end());

  // Block coordinates of the current loadings, new weight first.
  std::vector<Vector> cols;
  cols.emplace_back(d, 1.0 / std::sqrt(static_cast<double>(d)));
  for (Index k = 1; k < d; ++k) {
    Vector c(d);
    for (Index a = 0; a < d; ++a) c[a] = lm.u(blk.variables[a], loads[k]);
    cols.push_back(std::move(c));
  }
  // Modified Gram–Schmidt; degenerate columns are refilled from coordinate axes.
  Index axis = 0;
  for (Index k = 1; k < d; ++k) {
    const Vector original = cols[k];
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass)
        for (Index j = 0; j < k; ++j) {
          const double pr = dot(cols[j], cols[k]);
          for (Index a = 0; a < d; ++a) cols[k][a] -= pr * cols[j][a];
        }
      if (normalize(cols[k]) > 1e-8) break;
      if (axis >= d) throw Error(ErrorKind::RankDeficient, "cannot complete block basis");
      cols[k].assign(d, 0.0);
      cols[k][axis++] = 1.0;
    }
    if (dot(cols[k], original) < 0.0) scale(cols[k], -1.0);
  }

  LoadingMatrix out = lm;
  for (Index k = 0; k < d; ++k) {
    for (Index i = 0; i < m; ++i) out.u(i, loads[k]) = 0.0;
    for (Index a = 0; a < d; ++a) out.u(blk.variables[a], loads[k]) = cols[k][a];
  }
  return out;
}

inline IndexList preceding_variables(const BlockPartition& p, Index b) {
  IndexList pre;
  for (Index k = 0; k < b; ++k) pre.insert(pre.end(), p[k].variables.begin(), p[k].variables.end());
  return pre;
}

/// EC of block b given the blocks ordered before it, in closed form:
/// wᵀ Σ_{D·pre} w / wᵀ Σ[D,D] w with w = D^{-1/2}·1.
inline BlockEc block_ec(const CovMatrix& cov, const BlockPartition& p, Index b) {
  if (b >= p.size()) throw Error(ErrorKind::InconsistentPartition, "block index out of range");
  const Block& blk = p[b];
  BlockEc out;
  out.delta_star = *std::min_element(blk.loadings.begin(), blk.loadings.end());
  out.corrected_against = preceding_variables(p, b);
  if (b == 0) return out;
  const Vector w(blk.size(), 1.0 / std::sqrt(static_cast<double>(blk.size())));
  const double num = quadratic_form(partial_cov(cov, blk.variables, out.corrected_against).values, w);
  const double den = quadratic_form(cov.values().select(blk.variables, blk.variables), w);
  out.ec = num / den;
  return out;
}

/// The same EC by the loading route: replace the block's first loading by the
/// weight vector and take its corrected variance after all preceding loadings.
inline std::optional<double> block_ec_literal(const CovMatrix& cov, const LoadingMatrix& lm, const BlockPartition& p,
                                              Index b) {
  if (b == 0) return std::nullopt;
  const LoadingMatrix r = replace_with_weight(lm, p, b);
  IndexList order;
  for (Index k = 0; k < b; ++k) order.insert(order.end(), p[k].loadings.begin(), p[k].loadings.end());
  const Index star = *std::min_element(p[b].loadings.begin(), p[b].loadings.end());
  order.push_back(star);
  const CorrectedVariances cv = corrected_variances(cov, r, order);
  return cv.r_squared.back() / quadratic_form(cov.values(), r.u.col(star));
}

/// Every block's EC under p's ordering; gate on the smallest computed value.
inline PartitionEvaluation evaluate_partition(const CovMatrix& cov, const BlockPartition& p, const EcGate& gate) {
  p.validate(cov.dim());
  PartitionEvaluation ev;
  for (Index b = 0; b < p.size(); ++b) {
    ev.entries.push_back(block_ec(cov, p, b));
    if (ev.entries.back().ec) ev.min_ec = std::min(ev.min_ec, *ev.entries.back().ec);
  }
  ev.pass = ev.min_ec >= gate.c_ec;
  return ev;
}

}  // namespace spla

#endif  // SPLA_EVALUATION_HPP
