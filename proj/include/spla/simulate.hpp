#ifndef SPLA_SIMULATE_HPP
#define SPLA_SIMULATE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "spla/blocks.hpp"
#include "spla/data.hpp"
#include "spla/evaluation.hpp"
#include "spla/pipeline.hpp"

namespace spla {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent sub-stream: each key is folded in with mix64, so
/// adding a grid cell never shifts the draws of another cell.
inline std::uint64_t split_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t k : keys) s = mix64(s ^ mix64(k));
  return s;
}

inline std::uint64_t real_key(double x) { return std::bit_cast<std::uint64_t>(x); }

/// mt19937_64 stream. Uniforms take the top 53 bits; normals use Box–Muller
/// with both deviates consumed in order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double variance) { return std::sqrt(variance) * normal(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// X_j = sqrt(1−ρ) Z_i + sqrt(ρ) Y + W_j, with consecutive groups of
/// block_size variables sharing Z_i.
struct BlockDesign {
  Index n_blocks = 7;
  Index block_size = 2;
  double rho = 0.0;
  double latent_var = 10.0;
  double noise_var = 1.0;

  Index dim() const noexcept { return n_blocks * block_size; }

  void validate() const {
    if (n_blocks < 1 || block_size < 1) throw Error(ErrorKind::InvalidArgument, "block design needs sizes >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in [0,1)");
    if (!(latent_var > 0.0 && noise_var > 0.0)) throw Error(ErrorKind::InvalidArgument, "variances must be positive");
  }

  BlockPartition true_partition() const {
    std::vector<IndexList> g;
    for (Index b = 0; b < n_blocks; ++b) {
      IndexList v;
      for (Index k = 0; k < block_size; ++k) v.push_back(b * block_size + k);
      g.push_back(v);
    }
    return partition_from_groups(g, dim());
  }
};

/// Standardized sample of the block design.
inline DataMatrix gen_block_sample(const BlockDesign& design, Index n, std::uint64_t seed) {
  design.validate();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
  Rng rng(seed);
  const Index m = design.dim();
  const double a = std::sqrt(1.0 - design.rho);
  const double c = std::sqrt(design.rho);
  Matrix x(n, m);
  Vector z(design.n_blocks);
  for (Index i = 0; i < n; ++i) {
    const double y = rng.normal(design.latent_var);
    for (double& zi : z) zi = rng.normal(design.latent_var);
    for (Index j = 0; j < m; ++j) x(i, j) = a * z[j / design.block_size] + c * y + rng.normal(design.noise_var);
  }
  return standardize(DataMatrix(std::move(x)));
}

/// Population correlation matrix of the block design.
inline CovMatrix population_cov(const BlockDesign& design) {
  design.validate();
  const Index m = design.dim();
  Matrix s(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      double v = design.rho * design.latent_var;
      if (i / design.block_size == j / design.block_size) v += (1.0 - design.rho) * design.latent_var;
      if (i == j) v += design.noise_var;
      s(i, j) = v;
    }
  return CovMatrix(std::move(s)).to_correlation();
}

/// ECs of the listed blocks (1-based) under the true partition in index order,
/// one row per replicate.
inline std::vector<Vector> ec_distribution(const BlockDesign& design, Index n, Index reps,
                                           const IndexList& blocks_to_eval, std::uint64_t seed) {
  const BlockPartition p = design.true_partition();
  for (Index b : blocks_to_eval)
    if (b < 2 || b > p.size()) throw Error(ErrorKind::InvalidArgument, "evaluated blocks must lie in [2, n_blocks]");
  std::vector<Vector> out;
  for (Index r = 0; r < reps; ++r) {
    const DataMatrix d = gen_block_sample(design, n, split_seed(seed, {n, real_key(design.rho), r}));
    const CovMatrix cov = sample_cov(d, true);
    Vector row;
    for (Index b : blocks_to_eval) row.push_back(*block_ec(cov, p, b - 1).ec);
    out.push_back(std::move(row));
  }
  return out;
}

struct RateRow {
  std::string detector = "spla";
  Index n = 0;
  double rho = 0.0;
  double c_ec = 0.6;
  Index reps = 0;
  Index successes = 0;

  double rate() const { return reps == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(reps); }
};

/// Share of replicates whose selected partition equals the design's.
inline std::vector<RateRow> identification_rate(BlockDesign design, const IndexList& n_list, const Vector& rho_list,
                                                Index reps, const SplaConfig& cfg, std::uint64_t seed) {
  std::vector<RateRow> rows;
  for (Index n : n_list)
    for (double rho : rho_list) {
      design.rho = rho;
      const auto truth = design.true_partition().key();
      RateRow row{"spla", n, rho, cfg.gate.c_ec, reps, 0};
      for (Index r = 0; r < reps; ++r) {
        const DataMatrix d = gen_block_sample(design, n, split_seed(seed, {n, real_key(rho), r}));
        const ScanResult s = structure_scan(sample_cov(d, true), cfg);
        if (s.partition.key() == truth) ++row.successes;
      }
      rows.push_back(row);
    }
  return rows;
}

struct WishartDraw {
  Index blocks = 1;
  double ec = 0.0;
};

namespace detail {

/// All partitions of {0..m-1} into at least two blocks.
inline std::vector<std::vector<IndexList>> multi_block_partitions(Index m) {
  std::vector<std::vector<IndexList>> all{{}};
  for (Index v = 0; v < m; ++v) {
    std::vector<std::vector<IndexList>> next;
    for (const auto& p : all) {
      for (Index b = 0; b < p.size(); ++b) {
        auto q = p;
        q[b].push_back(v);
        next.push_back(std::move(q));
      }
      auto q = p;
      q.push_back({v});
      next.push_back(std::move(q));
    }
    all = std::move(next);
  }
  std::erase_if(all, [](const auto& p) { return p.size() < 2; });
  return all;
}

}  // namespace detail

/// A = uniform 3×3, Σ = AᵀA as a correlation matrix, structure-scanned.
/// A detected structure reports its min EC. A single block reports the best
/// min EC among the rejected multi-block structures met on the grid, or among
/// all multi-block partitions when the grid met none.
inline std::vector<WishartDraw> random_wishart_demo(Index reps, const SplaConfig& cfg, std::uint64_t seed) {
  std::vector<WishartDraw> out;
  constexpr Index m = 3;
  for (Index r = 0; r < reps; ++r) {
    Rng rng(split_seed(seed, {r}));
    std::optional<CovMatrix> cov;
    while (!cov) {
      Matrix a(m, m);
      for (double& v : a.data()) v = rng.uniform();
      try {
        cov = CovMatrix(transpose_times(a, a)).to_correlation();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
      }
    }
    const ScanResult s = structure_scan(*cov, cfg);
    WishartDraw w;
    w.blocks = s.partition.size();
    if (w.blocks >= 2) {
      w.ec = s.evaluation.min_ec;
    } else {
      bool seen = false;
      for (const auto& gp : s.trace)
        if (gp.partition && gp.partition->size() >= 2) {
          w.ec = seen ? std::max(w.ec, gp.min_ec) : gp.min_ec;
          seen = true;
        }
      if (!seen)
        for (const auto& g : detail::multi_block_partitions(m)) {
          const BlockPartition p = order_by_block_trace(*cov, partition_from_groups(g, m));
          const double e = evaluate_partition(*cov, p, cfg.gate).min_ec;
          w.ec = seen ? std::max(w.ec, e) : e;
          seen = true;
        }
    }
    out.push_back(w);
  }
  return out;
}

/// X_j = Z_1 + θ_j (j = 1..4), Z_2 + θ_j (j = 5..8) and, with ten_vars,
/// −0.3 Z_1 + 0.925 Z_2 + θ_j (j = 9, 10); Z_1 ~ N(0,290), Z_2 ~ N(0,300),
/// θ_j ~ N(0,1). Returned unstandardized.
inline DataMatrix gen_spiked_sample(bool ten_vars, Index n, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
  Rng rng(seed);
  const Index m = ten_vars ? 10 : 8;
  Matrix x(n, m);
  for (Index i = 0; i < n; ++i) {
    const double z1 = rng.normal(290.0);
    const double z2 = rng.normal(300.0);
    for (Index j = 0; j < m; ++j) {
      const double base = j < 4 ? z1 : j < 8 ? z2 : -0.3 * z1 + 0.925 * z2;
      x(i, j) = base + rng.normal();
    }
  }
  return DataMatrix(std::move(x));
}

/// Population covariance of the spiked construction.
inline CovMatrix spiked_population_cov(bool ten_vars) {
  const Index m = ten_vars ? 10 : 8;
  auto coef = [](Index j) -> std::pair<double, double> {
    if (j < 4) return {1.0, 0.0};
    if (j < 8) return {0.0, 1.0};
    return {-0.3, 0.925};
  };
  Matrix s(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const auto [a1, a2] = coef(i);
      const auto [b1, b2] = coef(j);
      s(i, j) = 290.0 * a1 * b1 + 300.0 * a2 * b2 + (i == j ? 1.0 : 0.0);
    }
  return CovMatrix(std::move(s));
}

}  // namespace spla

#endif  // SPLA_SIMULATE_HPP
