#ifndef SPLA_BLOCKS_HPP
#define SPLA_BLOCKS_HPP

#include <algorithm>
#include <charconv>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spla/data.hpp"
#include "spla/error.hpp"
#include "spla/linalg.hpp"
#include "spla/loading.hpp"
#include "spla/matrix.hpp"

namespace spla {

/// One diagonal block: variable indices paired with the loadings living on them.
struct Block {
  IndexList variables;
  IndexList loadings;

  Index size() const noexcept { return variables.size(); }
  Index min_variable() const { return *std::min_element(variables.begin(), variables.end()); }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Blocks in evaluation order. The vector order is the ordering.
struct BlockPartition {
  std::vector<Block> blocks;

  Index size() const noexcept { return blocks.size(); }
  const Block& operator[](Index b) const { return blocks[b]; }

  Index dim() const {
    Index m = 0;
    for (const auto& b : blocks) m += b.size();
    return m;
  }

  /// Variable sets only, each sorted, blocks sorted by first variable.
  /// Two partitions of the same variables are equal iff their keys agree.
  std::vector<IndexList> key() const {
    std::vector<IndexList> k;
    for (const auto& b : blocks) {
      IndexList v = b.variables;
      std::sort(v.begin(), v.end());
      k.push_back(std::move(v));
    }
    std::sort(k.begin(), k.end());
    return k;
  }

  /// Same blocks, new order: order[k] is the current position of the block placed k-th.
  BlockPartition reordered(const IndexList& order) const {
    if (order.size() != blocks.size())
      throw Error(ErrorKind::InconsistentPartition, "ordering length differs from block count");
    std::vector<bool> seen(blocks.size(), false);
    BlockPartition out;
    for (Index pos : order) {
      if (pos >= blocks.size() || seen[pos])
        throw Error(ErrorKind::InconsistentPartition, "ordering is not a permutation of the blocks");
      seen[pos] = true;
      out.blocks.push_back(blocks[pos]);
    }
    return out;
  }

  /// Throws InconsistentPartition unless variables and loadings each cover 0..m-1
  /// exactly once and every block is square.
  void validate(Index m) const {
    std::vector<int> var_hits(m, 0), load_hits(m, 0);
    for (const auto& b : blocks) {
      if (b.variables.empty() || b.variables.size() != b.loadings.size())
        throw Error(ErrorKind::InconsistentPartition, "blocks must be nonempty and square");
      for (Index v : b.variables) {
        if (v >= m) throw Error(ErrorKind::InconsistentPartition, "variable index out of range");
        ++var_hits[v];
      }
      for (Index l : b.loadings) {
        if (l >= m) throw Error(ErrorKind::InconsistentPartition, "loading index out of range");
        ++load_hits[l];
      }
    }
    for (Index i = 0; i < m; ++i)
      if (var_hits[i] != 1 || load_hits[i] != 1)
        throw Error(ErrorKind::InconsistentPartition, "blocks must cover every variable and loading once");
  }
};

/// Variable groups to a partition whose loading sets mirror the variable sets.
inline BlockPartition partition_from_groups(const std::vector<IndexList>& groups, Index m) {
  BlockPartition p;
  for (const auto& g : groups) p.blocks.push_back({g, g});
  p.validate(m);
  return p;
}

inline BlockPartition single_block(Index m) {
  IndexList all(m);
  std::iota(all.begin(), all.end(), Index{0});
  return partition_from_groups({all}, m);
}

inline BlockPartition singleton_blocks(Index m) {
  std::vector<IndexList> g;
  for (Index i = 0; i < m; ++i) g.push_back({i});
  return partition_from_groups(g, m);
}

/// Row and column permutations realizing the block-diagonal shape.
struct PermutationPair {
  IndexList row_perm;  ///< row k of the permuted matrix is row row_perm[k] of the original
  IndexList col_perm;
};

/// Connected components of the bipartite support graph of a (possibly
/// rectangular) matrix. Components may have no rows or no columns.
/// Sorted by smallest row index; row-less components come last by column.
inline std::vector<Block> support_components(const Matrix& u, double zero_tol) {
  const Index m = u.rows();
  const Index k = u.cols();
  std::vector<int> comp(m + k, -1);
  std::vector<Block> out;
  std::vector<Index> stack;
  for (Index start = 0; start < m + k; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const Index node = stack.back();
      stack.pop_back();
      if (node < m) {
        out[id].variables.push_back(node);
        for (Index j = 0; j < k; ++j)
          if (comp[m + j] < 0 && std::abs(u(node, j)) > zero_tol) {
            comp[m + j] = id;
            stack.push_back(m + j);
          }
      } else {
        const Index j = node - m;
        out[id].loadings.push_back(j);
        for (Index i = 0; i < m; ++i)
          if (comp[i] < 0 && std::abs(u(i, j)) > zero_tol) {
            comp[i] = id;
            stack.push_back(i);
          }
      }
    }
  }
  for (auto& b : out) {
    std::sort(b.variables.begin(), b.variables.end());
    std::sort(b.loadings.begin(), b.loadings.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const Block& a, const Block& b) {
    if (a.variables.empty() != b.variables.empty()) return b.variables.empty();
    if (a.variables.empty()) return a.loadings.front() < b.loadings.front();
    return a.variables.front() < b.variables.front();
  });
  return out;
}

/// Blocks of the zero pattern of u, ordered by ascending smallest variable index.
inline BlockPartition detect_blocks(const LoadingMatrix& lm) {
  const Matrix& u = lm.u;
  if (!u.is_square()) throw Error(ErrorKind::InvalidArgument, "detect_blocks needs a square loading matrix");
  BlockPartition p;
  p.blocks = support_components(u, lm.zero_tol);
  for (const auto& b : p.blocks)
    if (b.loadings.empty())
      throw Error(ErrorKind::IsolatedVariable,
                  "variable " + std::to_string(b.variables.front() + 1) + " has no incident loading");
  for (const auto& b : p.blocks)
    if (b.variables.size() != b.loadings.size())
      throw Error(ErrorKind::NonSquareBlock, "component with " + std::to_string(b.variables.size()) +
                                                 " variables and " + std::to_string(b.loadings.size()) +
                                                 " loadings");
  return p;
}

inline PermutationPair block_permutation(const BlockPartition& p) {
  PermutationPair pp;
  for (const auto& b : p.blocks) {
    pp.row_perm.insert(pp.row_perm.end(), b.variables.begin(), b.variables.end());
    pp.col_perm.insert(pp.col_perm.end(), b.loadings.begin(), b.loadings.end());
  }
  return pp;
}

/// P₁ᵀ U P₂ with the blocks of p on the diagonal in partition order.
inline std::pair<LoadingMatrix, PermutationPair> permute_to_block_diagonal(const LoadingMatrix& lm,
                                                                           const BlockPartition& p) {
  const Index m = lm.dim();
  if (!lm.u.is_square()) throw Error(ErrorKind::InconsistentPartition, "loading matrix must be square");
  p.validate(m);
  std::vector<Index> block_of_var(m), block_of_load(m);
  for (Index b = 0; b < p.size(); ++b) {
    for (Index v : p[b].variables) block_of_var[v] = b;
    for (Index l : p[b].loadings) block_of_load[l] = b;
  }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (block_of_var[i] != block_of_load[j] && lm.in_support(i, j))
        throw Error(ErrorKind::InconsistentPartition, "support reaches outside the partition's blocks");
  PermutationPair pp = block_permutation(p);
  LoadingMatrix out = lm;
  out.u = lm.u.select(pp.row_perm, pp.col_perm);
  return {std::move(out), std::move(pp)};
}

inline LoadingMatrix unpermute(const LoadingMatrix& permuted, const PermutationPair& pp) {
  LoadingMatrix out = permuted;
  for (Index i = 0; i < pp.row_perm.size(); ++i)
    for (Index j = 0; j < pp.col_perm.size(); ++j) out.u(pp.row_perm[i], pp.col_perm[j]) = permuted.u(i, j);
  return out;
}

/// Hard-threshold detector: eigenvector entries with |v| <= tau are zeroed.
/// Returns nothing when the thresholded pattern admits no square blocks.
inline std::optional<BlockPartition> pla_detect(const CovMatrix& cov, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0,1)");
  LoadingMatrix lm{sym_eigen(cov.values()).vectors, tau, LoadingSource::Eigenvectors};
  try {
    return detect_blocks(lm);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonSquareBlock || e.kind() == ErrorKind::IsolatedVariable) return std::nullopt;
    throw;
  }
}

/// Ascending trace of the block covariance, ties by smallest variable index.
inline BlockPartition order_by_block_trace(const CovMatrix& cov, const BlockPartition& p) {
  IndexList order(p.size());
  std::iota(order.begin(), order.end(), Index{0});
  Vector tr(p.size(), 0.0);
  for (Index b = 0; b < p.size(); ++b)
    for (Index v : p[b].variables) tr[b] += cov(v, v);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (tr[a] != tr[b]) return tr[a] < tr[b];
    return p[a].min_variable() < p[b].min_variable();
  });
  return p.reordered(order);
}

/// Parses a block spec such as "I/Y;SCH;RD;POP,Y85,Y60" or "1;2,3".
/// Blocks are separated by ';', members by ','. Members are variable names
/// or 1-based indices.
inline std::vector<IndexList> parse_block_spec(const std::string& spec, const std::vector<std::string>& names) {
  std::vector<IndexList> groups;
  std::stringstream blocks(spec);
  std::string block;
  while (std::getline(blocks, block, ';')) {
    IndexList g;
    std::stringstream members(block);
    std::string item;
    while (std::getline(members, item, ',')) {
      const auto t = detail::trim(item);
      if (t.empty()) continue;
      const auto it = std::find(names.begin(), names.end(), t);
      if (it != names.end()) {
        g.push_back(static_cast<Index>(it - names.begin()));
        continue;
      }
      Index idx = 0;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), idx);
      if (res.ec != std::errc() || res.ptr != t.data() + t.size() || idx == 0 || idx > names.size())
        throw Error(ErrorKind::InvalidArgument, "unknown variable in block spec: '" + std::string(t) + "'");
      g.push_back(idx - 1);
    }
    if (g.empty()) throw Error(ErrorKind::InvalidArgument, "empty block in block spec");
    groups.push_back(std::move(g));
  }
  if (groups.empty()) throw Error(ErrorKind::InvalidArgument, "empty block spec");
  return groups;
}

/// Reorders p to match the given variable groups, which must be exactly p's blocks.
inline BlockPartition order_by_groups(const BlockPartition& p, const std::vector<IndexList>& groups) {
  if (groups.size() != p.size())
    throw Error(ErrorKind::InconsistentPartition, "order spec has " + std::to_string(groups.size()) +
                                                      " blocks, partition has " + std::to_string(p.size()));
  IndexList order;
  for (IndexList g : groups) {
    std::sort(g.begin(), g.end());
    Index found = p.size();
    for (Index b = 0; b < p.size(); ++b) {
      IndexList v = p[b].variables;
      std::sort(v.begin(), v.end());
      if (v == g) found = b;
    }
    if (found == p.size())
      throw Error(ErrorKind::InconsistentPartition, "order spec names a block not in the partition");
    order.push_back(found);
  }
  return p.reordered(order);
}

inline std::string block_label(const Block& b, const std::vector<std::string>& names) {
  std::string s = "{";
  for (Index k = 0; k < b.variables.size(); ++k) {
    if (k) s += ",";
    s += names[b.variables[k]];
  }
  return s + "}";
}

}  // namespace spla

#endif  // SPLA_BLOCKS_HPP
