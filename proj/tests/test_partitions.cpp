#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "wicklab/numbers.hpp"
#include "wicklab/partitions.hpp"

using namespace wicklab;

namespace {

std::set<std::vector<std::vector<unsigned>>> as_set(const std::vector<EvenPartition>& ps) {
  std::set<std::vector<std::vector<unsigned>>> s;
  for (const auto& p : ps) s.insert(p.vertex_sets());
  return s;
}

std::set<std::vector<std::vector<unsigned>>> oracle_set(unsigned K, const std::vector<unsigned>& counts,
                                                        bool exclude, bool pairs) {
  std::set<std::vector<std::vector<unsigned>>> s;
  for (auto p : oracle::all_set_partitions(K)) {
    if (!(pairs ? oracle::all_pairs(p) : oracle::all_even(p))) continue;
    if (exclude && oracle::has_monochromatic_block(p, counts)) continue;
    std::sort(p.begin(), p.end());
    s.insert(p);
  }
  return s;
}

}  // namespace

TEST(Partitions, SmallExamples) {
  const auto one = enumerate_even_partitions(VertexLabeling::from_counts({2}), false);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].vertex_sets(), (std::vector<std::vector<unsigned>>{{1, 2}}));

  const auto ex = enumerate_even_partitions(VertexLabeling::from_counts({2, 2}), true);
  ASSERT_EQ(ex.size(), 3u);
  EXPECT_EQ(ex[0].vertex_sets(), (std::vector<std::vector<unsigned>>{{1, 3}, {2, 4}}));
  EXPECT_EQ(ex[1].vertex_sets(), (std::vector<std::vector<unsigned>>{{1, 4}, {2, 3}}));
  EXPECT_EQ(ex[2].vertex_sets(), (std::vector<std::vector<unsigned>>{{1, 2, 3, 4}}));

  EXPECT_EQ(enumerate_even_partitions(VertexLabeling::from_counts({2, 2}), false).size(), 4u);
  EXPECT_EQ(enumerate_even_partitions(2).size(), 1u);
  EXPECT_EQ(enumerate_even_partitions(4).size(), 4u);
  EXPECT_EQ(enumerate_even_partitions(6).size(), 31u);
  EXPECT_EQ(enumerate_even_partitions(8).size(), 379u);
  EXPECT_TRUE(enumerate_even_partitions(5).empty());
}

TEST(Partitions, PairExamples) {
  EXPECT_EQ(enumerate_pair_partitions(VertexLabeling::from_counts({2, 2}), true).size(), 2u);
  EXPECT_EQ(enumerate_pair_partitions(4).size(), 3u);
  EXPECT_EQ(enumerate_pair_partitions(6).size(), 15u);
  EXPECT_EQ(enumerate_pair_partitions(10).size(), 945u);
  EXPECT_TRUE(enumerate_pair_partitions(3).empty());
}

TEST(Partitions, CapEnforced) {
  EXPECT_THROW(enumerate_even_partitions(18), CapacityError);
  EXPECT_NO_THROW(enumerate_pair_partitions(18, 18));
}

TEST(Partitions, MatchesNaiveOracle) {
  const std::vector<std::vector<unsigned>> labelings{
      {2}, {1, 1}, {4}, {2, 2}, {3, 1}, {1, 1, 1, 1}, {3, 3}, {2, 2, 2}, {4, 2}, {5, 1},
      {2, 3, 1}, {4, 4}, {3, 3, 2}, {2, 2, 2, 2}, {1, 2, 3, 2}, {6, 2}};
  for (const auto& counts : labelings) {
    unsigned K = 0;
    for (unsigned c : counts) K += c;
    const auto lab = VertexLabeling::from_counts(counts);
    for (bool exclude : {false, true}) {
      const auto got = enumerate_even_partitions(lab, exclude);
      EXPECT_EQ(as_set(got).size(), got.size()) << "duplicates";
      EXPECT_EQ(as_set(got), oracle_set(K, counts, exclude, false));
      const auto pairs = enumerate_pair_partitions(lab, exclude);
      EXPECT_EQ(as_set(pairs).size(), pairs.size());
      EXPECT_EQ(as_set(pairs), oracle_set(K, counts, exclude, true));
    }
  }
}

TEST(Partitions, ExclusionIsFilter) {
  const auto lab = VertexLabeling::from_counts({3, 2, 3});
  auto all = enumerate_even_partitions(lab, false);
  std::vector<EvenPartition> kept;
  for (const auto& p : all) {
    bool mono = false;
    for (auto b : p.blocks) mono = mono || lab.monochromatic(b);
    if (!mono) kept.push_back(p);
  }
  EXPECT_EQ(kept, enumerate_even_partitions(lab, true));
}

TEST(Partitions, CanonicalBlocks) {
  for (const auto& p : enumerate_even_partitions(8)) {
    VertexMask seen = 0;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      EXPECT_EQ(p.blocks[i] & seen, 0u);
      seen |= p.blocks[i];
      EXPECT_EQ(std::popcount(p.blocks[i]) % 2, 0);
      if (i > 0) {
        EXPECT_LT(std::countr_zero(p.blocks[i - 1]), std::countr_zero(p.blocks[i]));
      }
    }
    EXPECT_EQ(seen, 0xFFu);
  }
}

TEST(Traversals, Examples) {
  const unsigned b13[] = {1, 3};
  auto t = enumerate_traversals(b13);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].ascents, 1u);
  EXPECT_EQ(t[0].sign(), 1);

  const unsigned b24[] = {2, 4};
  EXPECT_EQ(enumerate_traversals(b24)[0].ascents, 1u);

  const unsigned b1234[] = {1, 2, 3, 4};
  const auto six = enumerate_traversals(b1234);
  ASSERT_EQ(six.size(), 6u);
  std::map<std::vector<unsigned>, unsigned> m;
  for (const auto& tr : six) m[tr.order] = tr.ascents;
  EXPECT_EQ(m[(std::vector<unsigned>{1, 2, 3, 4})], 3u);
  EXPECT_EQ(m[(std::vector<unsigned>{1, 4, 3, 2})], 1u);
  EXPECT_EQ(m[(std::vector<unsigned>{1, 3, 4, 2})], 2u);
  EXPECT_EQ(m[(std::vector<unsigned>{1, 2, 4, 3})], 2u);
  EXPECT_EQ(m[(std::vector<unsigned>{1, 3, 2, 4})], 2u);
  EXPECT_EQ(m[(std::vector<unsigned>{1, 4, 2, 3})], 2u);
  // lexicographic tails
  EXPECT_EQ(six.front().order, (std::vector<unsigned>{1, 2, 3, 4}));
  EXPECT_EQ(six.back().order, (std::vector<unsigned>{1, 4, 3, 2}));
  EXPECT_THROW(enumerate_traversals(VertexMask{0b111}), std::invalid_argument);
}

TEST(Traversals, StructuralInvariants) {
  for (VertexMask block : {0b11u, 0b1111u, 0b101101u, 0b11111111u}) {
    const auto ts = enumerate_traversals(block);
    std::set<std::vector<unsigned>> distinct;
    for (const auto& tr : ts) {
      EXPECT_EQ(tr.order.front(), mask_vertices(block).front());
      EXPECT_EQ(vertices_mask(tr.order), block);
      EXPECT_EQ(tr.order.size(), static_cast<std::size_t>(std::popcount(block)));
      distinct.insert(tr.order);
    }
    EXPECT_EQ(distinct.size(), ts.size());
  }
}

TEST(Traversals, SignSumsAreBlockCoefficients) {
  for (unsigned size = 2; size <= 10; size += 2) {
    const VertexMask block = static_cast<VertexMask>((1u << size) - 1) << 3;  // shifted block
    long sum = 0;
    for (const auto& tr : enumerate_traversals(block)) sum += tr.sign();
    EXPECT_EQ(Rational(sum), block_coefficient(size)) << size;
  }
}

TEST(Labeling, Basics) {
  const auto lab = VertexLabeling::from_counts({2, 3});
  EXPECT_EQ(lab.size(), 5u);
  EXPECT_EQ(lab.multipliers(), 2u);
  EXPECT_EQ(lab.multiplier_of(2), 1u);
  EXPECT_EQ(lab.multiplier_of(3), 2u);
  EXPECT_TRUE(lab.monochromatic(0b11100));
  EXPECT_FALSE(lab.monochromatic(0b00110));
  EXPECT_THROW(VertexLabeling::from_counts({2, 0}), std::invalid_argument);
}
