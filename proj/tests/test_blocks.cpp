#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "spla/blocks.hpp"
#include "spla/reproduce.hpp"

using namespace spla;

namespace {

LoadingMatrix loadings(Matrix u) { return {std::move(u), 1e-9, LoadingSource::Manual}; }

std::vector<std::vector<std::string>> named_key(const BlockPartition& p, const std::vector<std::string>& names) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : p.blocks) {
    std::vector<std::string> v;
    for (Index i : b.variables) v.push_back(names[i]);
    std::sort(v.begin(), v.end());
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<std::string> oecd_names{"Y60", "Y85", "I/Y", "SCH", "POP", "RD"};

}  // namespace

TEST(DetectBlocks, IdentityGivesSingletons) {
  const BlockPartition p = detect_blocks(loadings(Matrix::identity(4)));
  ASSERT_EQ(p.size(), 4u);
  for (Index b = 0; b < 4; ++b) {
    EXPECT_EQ(p[b].variables, IndexList{b});
    EXPECT_EQ(p[b].loadings, IndexList{b});
  }
}

TEST(DetectBlocks, PrintedOecdPattern) {
  // Rows in file order Y60, Y85, I/Y, SCH, POP, RD; columns u1..u6.
  // A printed 0.00 is a nonzero entry that rounds away.
  Matrix u(6, 6);
  u(2, 2) = 1.0;  // I/Y on u3
  u(3, 3) = 1.0;  // SCH on u4
  u(5, 1) = 1.0;  // RD on u2
  const double pop[] = {0.50, -0.87, 0.001};
  const double y85[] = {0.64, 0.36, 0.68};
  const double y60[] = {0.59, 0.34, -0.73};
  const Index cols[] = {0, 4, 5};
  for (int k = 0; k < 3; ++k) {
    u(4, cols[k]) = pop[k];
    u(1, cols[k]) = y85[k];
    u(0, cols[k]) = y60[k];
  }
  const BlockPartition p = detect_blocks(loadings(u));
  EXPECT_EQ(named_key(p, oecd_names),
            (std::vector<std::vector<std::string>>{{"I/Y"}, {"POP", "Y60", "Y85"}, {"RD"}, {"SCH"}}));
  for (const auto& b : p.blocks) {
    if (b.variables == IndexList{2}) { EXPECT_EQ(b.loadings, IndexList{2}); }
    if (b.variables == IndexList{3}) { EXPECT_EQ(b.loadings, IndexList{3}); }
    if (b.variables == IndexList{5}) { EXPECT_EQ(b.loadings, IndexList{1}); }
    if (b.size() == 3) { EXPECT_EQ(b.loadings, (IndexList{0, 4, 5})); }
  }
  // Default order: ascending smallest variable index.
  for (Index b = 1; b < p.size(); ++b) EXPECT_LT(p[b - 1].min_variable(), p[b].min_variable());
}

TEST(DetectBlocks, DenseColumnJoinsEverything) {
  Matrix u = Matrix::identity(5);
  for (Index i = 0; i < 5; ++i) u(i, 2) = 0.3;
  const BlockPartition p = detect_blocks(loadings(u));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].size(), 5u);
}

TEST(DetectBlocks, Errors) {
  try {
    detect_blocks(loadings(Matrix{{1, 0}, {0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IsolatedVariable);
  }
  try {
    detect_blocks(loadings(Matrix{{1, 1, 0}, {0, 0, 1}, {0, 0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSquareBlock);
  }
}

TEST(DetectBlocks, InvariantUnderSimultaneousPermutation) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix u(6, 6);
  const std::vector<IndexList> groups{{0, 3}, {1, 4, 5}, {2}};
  for (const auto& g : groups)
    for (Index i : g)
      for (Index j : g) u(i, j) = unif(gen);
  const BlockPartition p = detect_blocks(loadings(u));
  IndexList perm{4, 2, 0, 5, 1, 3};
  Matrix v(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) v(i, j) = u(perm[i], perm[j]);
  const BlockPartition q = detect_blocks(loadings(v));
  BlockPartition relabeled = q;
  for (auto& b : relabeled.blocks) {
    for (Index& i : b.variables) i = perm[i];
    for (Index& j : b.loadings) j = perm[j];
    std::sort(b.variables.begin(), b.variables.end());
    std::sort(b.loadings.begin(), b.loadings.end());
  }
  EXPECT_EQ(relabeled.key(), p.key());
  Index total = 0;
  for (const auto& b : p.blocks) total += b.size();
  EXPECT_EQ(total, 6u);
}

TEST(Permute, BlockDiagonalUnchanged) {
  Matrix u{{0.6, 0.8, 0}, {-0.8, 0.6, 0}, {0, 0, 1}};
  const LoadingMatrix lm = loadings(u);
  const auto [perm, pp] = permute_to_block_diagonal(lm, detect_blocks(lm));
  EXPECT_EQ(perm.u, u);
}

TEST(Permute, AntiDiagonalSwapped) {
  Matrix u{{0, 0, 0.6, 0.8}, {0, 0, -0.8, 0.6}, {1, 0, 0, 0}, {0, 1, 0, 0}};
  const LoadingMatrix lm = loadings(u);
  const BlockPartition p = detect_blocks(lm);
  const auto [perm, pp] = permute_to_block_diagonal(lm, p);
  EXPECT_EQ(perm.u, (Matrix{{0.6, 0.8, 0, 0}, {-0.8, 0.6, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
  EXPECT_EQ(unpermute(perm, pp).u, u);
}

TEST(Permute, RoundTripBitForBit) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix u(7, 7);
  const std::vector<IndexList> groups{{0, 5}, {1, 2, 6}, {3}, {4}};
  for (const auto& g : groups)
    for (Index i : g)
      for (Index j : g) u(i, j) = unif(gen);
  const LoadingMatrix lm = loadings(u);
  BlockPartition p = detect_blocks(lm);
  p = p.reordered({2, 0, 3, 1});
  const auto [perm, pp] = permute_to_block_diagonal(lm, p);
  EXPECT_EQ(unpermute(perm, pp).u, u);
}

TEST(Permute, InconsistentPartition) {
  const LoadingMatrix lm = loadings(Matrix{{0.6, 0.8}, {-0.8, 0.6}});
  try {
    permute_to_block_diagonal(lm, singleton_blocks(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InconsistentPartition);
  }
}

TEST(PlaDetect, OecdThresholds) {
  const CovMatrix cov = oecd_cov(SPLA_DATA_DIR);
  const auto p40 = pla_detect(cov, 0.40);
  ASSERT_TRUE(p40.has_value());
  EXPECT_EQ(named_key(*p40, oecd_names),
            (std::vector<std::vector<std::string>>{{"I/Y", "POP", "SCH"}, {"RD", "Y60", "Y85"}}));
  const auto p50 = pla_detect(cov, 0.50);
  ASSERT_TRUE(p50.has_value());
  EXPECT_EQ(named_key(*p50, oecd_names),
            (std::vector<std::vector<std::string>>{{"I/Y", "POP", "SCH"}, {"RD"}, {"Y60", "Y85"}}));
}

TEST(PlaDetect, ExactBlockDiagonal) {
  Matrix s{{2, 0.5, 0, 0}, {0.5, 1, 0, 0}, {0, 0, 3, -1}, {0, 0, -1, 2}};
  const auto p = pla_detect(CovMatrix(s), 0.01);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->key(), (std::vector<IndexList>{{0, 1}, {2, 3}}));
}

TEST(Ordering, ByBlockTraceAndGroups) {
  Matrix s{{5, 0, 0}, {0, 1, 0}, {0, 0, 2}};
  const CovMatrix cov(s);
  const BlockPartition p = order_by_block_trace(cov, singleton_blocks(3));
  EXPECT_EQ(p[0].variables, IndexList{1});
  EXPECT_EQ(p[1].variables, IndexList{2});
  EXPECT_EQ(p[2].variables, IndexList{0});
  const auto groups = parse_block_spec("c;1,b", {"a", "b", "c"});
  EXPECT_EQ(groups, (std::vector<IndexList>{{2}, {0, 1}}));
  const BlockPartition q = order_by_groups(partition_from_groups({{0, 1}, {2}}, 3), groups);
  EXPECT_EQ(q[0].variables, IndexList{2});
  try {
    parse_block_spec("a;zz", {"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}
