#ifndef SPLA_PIPELINE_HPP
#define SPLA_PIPELINE_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spla/blocks.hpp"
#include "spla/data.hpp"
#include "spla/evaluation.hpp"
#include "spla/sparse_loadings.hpp"
#include "spla/variance.hpp"

namespace spla {

/// Penalty grid lo:hi with the given number of points. The spca weight scale
/// runs geometrically from lo up to hi; the pmd bound c runs linearly from hi
/// down to lo. Either way the first point is the least sparse.
struct PenaltyGrid {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;

  static PenaltyGrid defaults(SparseMethod method, Index m) {
    if (method == SparseMethod::Pmd) return {1.0, std::sqrt(static_cast<double>(m)), 40};
    return {1e-2, 3.0, 30};
  }

  Vector values(SparseMethod method) const {
    if (steps < 1 || !(lo <= hi)) throw Error(ErrorKind::EmptyGrid, "penalty grid is empty");
    Vector v;
    for (int k = 0; k < steps; ++k) {
      const double f = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
      if (method == SparseMethod::Pmd)
        v.push_back(hi - f * (hi - lo));
      else
        v.push_back(lo * std::pow(hi / lo, f));
    }
    return v;
  }
};

struct SplaConfig {
  SparseMethod method = SparseMethod::Spca;
  std::optional<PenaltyGrid> grid;
  EcGate gate{0.6};
  /// A block is flagged when its SV is below flag_fraction · (100/M) · |D|.
  double flag_fraction = 0.9;
  /// A flagged block is confirmed when its partial share is below verify_fraction · (100/M) · |D|.
  double verify_fraction = 0.5;
  /// Explicit evaluation order (variable groups); used whenever it matches a detected partition.
  std::optional<std::vector<IndexList>> block_order;
  bool standardize = false;
  PenaltyConfig penalty;
};

struct GridPoint {
  double penalty = 0.0;
  std::optional<BlockPartition> partition;  ///< in evaluation order
  std::optional<LoadingMatrix> loadings;
  double min_ec = 0.0;
  bool pass = false;
  std::string error;
};

struct Recommendation {
  Index block = 0;  ///< position in the evaluation order
  double sv = 0.0;
  double flag_threshold = 0.0;
  bool flagged = false;
  std::optional<double> partial_share;  ///< only computed for flagged blocks
  double verify_threshold = 0.0;
  bool verified = false;

  bool discard() const noexcept { return flagged && verified; }
};

struct ScanResult {
  std::vector<GridPoint> trace;
  std::optional<Index> chosen;  ///< grid index; empty when falling back to one block
  BlockPartition partition;
  LoadingMatrix loadings;
  PartitionEvaluation evaluation;
};

struct SplaReport {
  std::vector<std::string> names;
  SparseMethod method = SparseMethod::Spca;
  bool standardized = false;
  double c_ec = 0.6;
  BlockPartition partition;  ///< in evaluation order
  LoadingMatrix loadings;
  PartitionEvaluation evaluation;
  CorrectedVariances corrected;
  VarianceShares shares;
  Vector partial_shares;  ///< per block, conditioning on all other variables
  std::vector<Recommendation> recommendations;
  std::vector<GridPoint> trace;
  std::optional<Index> chosen;
};

namespace detail {

using LoadingFn = std::function<LoadingMatrix(double)>;

inline BlockPartition evaluation_order(const CovMatrix& cov, const BlockPartition& p, const SplaConfig& cfg) {
  if (cfg.block_order) {
    try {
      return order_by_groups(p, *cfg.block_order);
    } catch (const Error&) {
      // The requested order names a different partition; fall back to the default.
    }
  }
  return order_by_block_trace(cov, p);
}

inline ScanResult scan(const CovMatrix& cov, const SplaConfig& cfg, const LoadingFn& loadings_at) {
  const Index m = cov.dim();
  const PenaltyGrid grid = cfg.grid.value_or(PenaltyGrid::defaults(cfg.method, m));
  ScanResult res;
  for (double penalty : grid.values(cfg.method)) {
    GridPoint gp;
    gp.penalty = penalty;
    try {
      LoadingMatrix raw = loadings_at(penalty);
      const BlockPartition p = evaluation_order(cov, detect_blocks(raw), cfg);
      LoadingMatrix lm = orthogonalize(raw, p);
      apply_sign_convention(lm);
      const PartitionEvaluation ev = evaluate_partition(cov, p, cfg.gate);
      gp.partition = p;
      gp.loadings = std::move(lm);
      gp.min_ec = ev.min_ec;
      gp.pass = ev.pass;
    } catch (const Error& e) {
      gp.error = e.what();
    }
    res.trace.push_back(std::move(gp));
  }

  for (Index k = 0; k < res.trace.size(); ++k) {
    const GridPoint& gp = res.trace[k];
    if (!gp.pass) continue;
    if (!res.chosen) {
      res.chosen = k;
      continue;
    }
    const GridPoint& best = res.trace[*res.chosen];
    if (gp.partition->size() > best.partition->size() ||
        (gp.partition->size() == best.partition->size() && gp.min_ec > best.min_ec))
      res.chosen = k;
  }
  if (res.chosen) {
    res.partition = *res.trace[*res.chosen].partition;
    res.loadings = *res.trace[*res.chosen].loadings;
  } else {
    res.partition = single_block(m);
    res.loadings = {sym_eigen(cov.values()).vectors, cfg.penalty.zero_tol, LoadingSource::Eigenvectors};
  }
  res.evaluation = evaluate_partition(cov, res.partition, cfg.gate);
  return res;
}

inline LoadingFn spca_loadings(const CovMatrix& cov, const PenaltyConfig& pc) {
  return [&cov, pc](double t) {
    const Index m = cov.dim();
    LoadingMatrix lm{complete_within_blocks(cov, elastic_net_raw(cov, spca_weights(cov, t), 0.0, m, pc), pc.zero_tol),
                     pc.zero_tol, LoadingSource::ElasticNet};
    return lm;
  };
}

inline LoadingFn pmd_loadings(Matrix x, const PenaltyConfig& pc) {
  return [x = std::move(x), pc](double c) { return sparse_loading_matrix(x, c, pc).raw; };
}

inline void fill_report(SplaReport& rep, const CovMatrix& cov, const SplaConfig& cfg) {
  const Index m = cov.dim();
  const BlockPartition& p = rep.partition;
  rep.corrected = corrected_variances(cov, rep.loadings, p);
  rep.shares = variance_shares(rep.corrected, cov, p);
  rep.partial_shares.clear();
  for (const auto& b : p.blocks)
    rep.partial_shares.push_back(b.size() == m ? 100.0 : partial_trace_share(cov, b.variables));
  rep.recommendations.clear();
  const double per_var = 100.0 / static_cast<double>(m);
  for (Index b = 0; b < p.size(); ++b) {
    Recommendation r;
    r.block = b;
    r.sv = rep.shares.block_sv[b];
    r.flag_threshold = cfg.flag_fraction * per_var * static_cast<double>(p[b].size());
    r.verify_threshold = cfg.verify_fraction * per_var * static_cast<double>(p[b].size());
    r.flagged = p.size() > 1 && r.sv < r.flag_threshold;
    if (r.flagged) {
      r.partial_share = rep.partial_shares[b];
      r.verified = *r.partial_share < r.verify_threshold;
    }
    rep.recommendations.push_back(r);
  }
}

}  // namespace detail

/// Steps one to three on a covariance matrix: scan the grid, detect, gate, select.
inline ScanResult structure_scan(const CovMatrix& cov, const SplaConfig& cfg) {
  if (cfg.method == SparseMethod::Spca) return detail::scan(cov, cfg, detail::spca_loadings(cov, cfg.penalty));
  return detail::scan(cov, cfg, detail::pmd_loadings(cholesky_upper(cov.values()), cfg.penalty));
}

/// Full analysis on a covariance matrix (sample-free).
inline SplaReport run_spla(const CovMatrix& cov, const SplaConfig& cfg) {
  ScanResult s = structure_scan(cov, cfg);
  SplaReport rep;
  rep.names = cov.names();
  rep.method = cfg.method;
  rep.standardized = cov.is_correlation();
  rep.c_ec = cfg.gate.c_ec;
  rep.partition = std::move(s.partition);
  rep.loadings = std::move(s.loadings);
  rep.evaluation = std::move(s.evaluation);
  rep.trace = std::move(s.trace);
  rep.chosen = s.chosen;
  detail::fill_report(rep, cov, cfg);
  return rep;
}

/// Full analysis on a sample. The pmd method works on the (standardized) sample itself.
inline SplaReport run_spla(const DataMatrix& d, const SplaConfig& cfg) {
  const DataMatrix x = cfg.standardize ? standardize(d) : center(d);
  const CovMatrix cov = sample_cov(x, cfg.standardize);
  if (cfg.method == SparseMethod::Spca) return run_spla(cov, cfg);
  ScanResult s = detail::scan(cov, cfg, detail::pmd_loadings(x.values(), cfg.penalty));
  SplaReport rep;
  rep.names = cov.names();
  rep.method = cfg.method;
  rep.standardized = cfg.standardize;
  rep.c_ec = cfg.gate.c_ec;
  rep.partition = std::move(s.partition);
  rep.loadings = std::move(s.loadings);
  rep.evaluation = std::move(s.evaluation);
  rep.trace = std::move(s.trace);
  rep.chosen = s.chosen;
  detail::fill_report(rep, cov, cfg);
  return rep;
}

}  // namespace spla

#endif  // SPLA_PIPELINE_HPP
