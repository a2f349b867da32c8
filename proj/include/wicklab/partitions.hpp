#ifndef WICKLAB_PARTITIONS_HPP
#define WICKLAB_PARTITIONS_HPP

// Even-block set partitions of diagram vertices, per-block traversals and
// perfect matchings.
//
// Vertices are numbered 1..K in the public API; internally a block is a
// bitmask with bit (v - 1) set for vertex v.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace wicklab {

using VertexMask = std::uint32_t;

inline constexpr unsigned kDefaultMaxVertices = 16;
inline constexpr unsigned kHardMaxVertices = 31;

/// Vertex -> multiplier map. Vertices of each multiplier are contiguous: the
/// first n_1 vertices belong to multiplier 1, the next n_2 to multiplier 2, ...
class VertexLabeling {
 public:
  VertexLabeling() = default;

  static VertexLabeling from_counts(std::span<const unsigned> counts) {
    VertexLabeling l;
    unsigned v = 0;
    for (std::size_t m = 0; m < counts.size(); ++m) {
      if (counts[m] == 0) throw std::invalid_argument("VertexLabeling: empty multiplier");
      VertexMask mask = 0;
      for (unsigned j = 0; j < counts[m]; ++j, ++v) {
        if (v >= kHardMaxVertices)
          throw CapacityError("VertexLabeling: more than " + std::to_string(kHardMaxVertices) +
                              " vertices");
        l.multiplier_of_.push_back(static_cast<unsigned>(m + 1));
        mask |= VertexMask{1} << v;
      }
      l.masks_.push_back(mask);
    }
    return l;
  }
  static VertexLabeling from_counts(std::initializer_list<unsigned> counts) {
    return from_counts(std::span<const unsigned>(counts.begin(), counts.size()));
  }

  /// Every vertex its own multiplier (no block is ever monochromatic).
  static VertexLabeling distinct(unsigned K) {
    return from_counts(std::vector<unsigned>(K, 1u));
  }

  unsigned size() const noexcept { return static_cast<unsigned>(multiplier_of_.size()); }
  unsigned multipliers() const noexcept { return static_cast<unsigned>(masks_.size()); }
  /// 1-based multiplier index of 1-based vertex v.
  unsigned multiplier_of(unsigned v) const { return multiplier_of_.at(v - 1); }
  VertexMask multiplier_mask(unsigned m) const { return masks_.at(m - 1); }
  VertexMask all() const noexcept {
    return size() == 0 ? 0 : static_cast<VertexMask>((std::uint64_t{1} << size()) - 1);
  }

  /// True when every vertex of `block` belongs to one multiplier.
  bool monochromatic(VertexMask block) const noexcept {
    for (VertexMask m : masks_)
      if ((block & m) == block) return true;
    return false;
  }

 private:
  std::vector<unsigned> multiplier_of_;
  std::vector<VertexMask> masks_;
};

inline std::vector<unsigned> mask_vertices(VertexMask mask) {
  std::vector<unsigned> v;
  v.reserve(static_cast<std::size_t>(std::popcount(mask)));
  for (unsigned i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) v.push_back(i + 1);
  return v;
}

inline VertexMask vertices_mask(std::span<const unsigned> vertices) {
  VertexMask m = 0;
  for (unsigned v : vertices) m |= VertexMask{1} << (v - 1);
  return m;
}

/// Blocks in canonical order (sorted by minimum vertex).
struct EvenPartition {
  std::vector<VertexMask> blocks;

  std::vector<std::vector<unsigned>> vertex_sets() const {
    std::vector<std::vector<unsigned>> out;
    out.reserve(blocks.size());
    for (VertexMask b : blocks) out.push_back(mask_vertices(b));
    return out;
  }
  bool operator==(const EvenPartition&) const = default;
};

struct Traversal {
  VertexMask block = 0;
  std::vector<unsigned> order;
  /// Neighbouring pairs with order[i] <= order[i+1], first pair included.
  unsigned ascents = 0;

  int sign() const noexcept { return (ascents - 1) % 2 == 0 ? 1 : -1; }
  bool operator==(const Traversal&) const = default;
};

struct Diagram {
  EvenPartition partition;
  std::vector<Traversal> traversals;
};

inline unsigned count_ascents(std::span<const unsigned> order) {
  unsigned m = 0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (order[i] <= order[i + 1]) ++m;
  return m;
}

namespace detail {

inline void check_vertex_cap(unsigned K, unsigned max_vertices) {
  if (K > max_vertices)
    throw CapacityError("partition enumeration: K = " + std::to_string(K) + " exceeds cap " +
                        std::to_string(max_vertices));
  if (K > kHardMaxVertices)
    throw CapacityError("partition enumeration: K beyond hard limit " +
                        std::to_string(kHardMaxVertices));
}

/// Calls visit(companions) for every subset of `pool` of size `size`, in
/// lexicographic order of the sorted vertex lists.
template <class Visit>
void for_each_combination(std::span<const unsigned> pool, unsigned size, Visit&& visit) {
  if (size > pool.size()) return;
  std::vector<unsigned> pick(size);
  std::iota(pick.begin(), pick.end(), 0u);
  const unsigned n = static_cast<unsigned>(pool.size());
  for (;;) {
    VertexMask m = 0;
    for (unsigned p : pick) m |= VertexMask{1} << pool[p];
    visit(m);
    int i = static_cast<int>(size) - 1;
    while (i >= 0 && pick[i] == n - size + static_cast<unsigned>(i)) --i;
    if (i < 0) return;
    ++pick[i];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
}

// The smallest unassigned vertex anchors the next block; its companions are
// chosen by increasing count, then lexicographically. This fixes one canonical
// order and never produces the same partition twice.
template <class Visit>
void even_partitions_rec(VertexMask remaining, const VertexLabeling& labeling, bool exclude,
                         bool pairs_only, std::vector<VertexMask>& blocks, Visit& visit) {
  if (remaining == 0) {
    visit(static_cast<const std::vector<VertexMask>&>(blocks));
    return;
  }
  const unsigned anchor = static_cast<unsigned>(std::countr_zero(remaining));
  const VertexMask anchor_bit = VertexMask{1} << anchor;
  std::vector<unsigned> pool;
  for (VertexMask rest = remaining & ~anchor_bit; rest; rest &= rest - 1)
    pool.push_back(static_cast<unsigned>(std::countr_zero(rest)));

  const unsigned max_size = pairs_only ? 1u : static_cast<unsigned>(pool.size());
  for (unsigned size = 1; size <= max_size; size += 2) {
    for_each_combination(pool, size, [&](VertexMask companions) {
      const VertexMask block = anchor_bit | companions;
      if (exclude && labeling.monochromatic(block)) return;
      blocks.push_back(block);
      even_partitions_rec(remaining & ~block, labeling, exclude, pairs_only, blocks, visit);
      blocks.pop_back();
    });
  }
}

template <class Visit>
void for_each_partition_impl(const VertexLabeling& labeling, bool exclude, bool pairs_only,
                             unsigned max_vertices, Visit&& visit) {
  const unsigned K = labeling.size();
  if (K == 0 || K % 2 == 1) return;
  check_vertex_cap(K, max_vertices);
  std::vector<VertexMask> blocks;
  blocks.reserve(K / 2);
  auto adapter = [&](const std::vector<VertexMask>& b) { visit(b); };
  even_partitions_rec(labeling.all(), labeling, exclude, pairs_only, blocks, adapter);
}

}  // namespace detail

/// Streams every partition of {1..K} (K = labeling.size()) into even blocks
/// to `visit(const std::vector<VertexMask>& blocks)`. With
/// `exclude_same_multiplier`, partitions having a block whose vertices all
/// share one multiplier are skipped. Odd K yields nothing.
template <class Visit>
void for_each_even_partition(const VertexLabeling& labeling, bool exclude_same_multiplier,
                             Visit&& visit, unsigned max_vertices = kDefaultMaxVertices) {
  detail::for_each_partition_impl(labeling, exclude_same_multiplier, false, max_vertices,
                                  std::forward<Visit>(visit));
}

/// Same contract restricted to blocks of size two (perfect matchings).
template <class Visit>
void for_each_pair_partition(const VertexLabeling& labeling, bool exclude_same_multiplier,
                             Visit&& visit, unsigned max_vertices = kDefaultMaxVertices) {
  detail::for_each_partition_impl(labeling, exclude_same_multiplier, true, max_vertices,
                                  std::forward<Visit>(visit));
}

inline std::vector<EvenPartition> enumerate_even_partitions(
    const VertexLabeling& labeling, bool exclude_same_multiplier,
    unsigned max_vertices = kDefaultMaxVertices) {
  std::vector<EvenPartition> out;
  for_each_even_partition(
      labeling, exclude_same_multiplier,
      [&](const std::vector<VertexMask>& b) { out.push_back(EvenPartition{b}); }, max_vertices);
  return out;
}

/// All even partitions of {1..K}, no exclusion.
inline std::vector<EvenPartition> enumerate_even_partitions(
    unsigned K, unsigned max_vertices = kDefaultMaxVertices) {
  detail::check_vertex_cap(K, max_vertices);
  return enumerate_even_partitions(VertexLabeling::distinct(K), false, max_vertices);
}

inline std::vector<EvenPartition> enumerate_pair_partitions(
    const VertexLabeling& labeling, bool exclude_same_multiplier,
    unsigned max_vertices = kDefaultMaxVertices) {
  std::vector<EvenPartition> out;
  for_each_pair_partition(
      labeling, exclude_same_multiplier,
      [&](const std::vector<VertexMask>& b) { out.push_back(EvenPartition{b}); }, max_vertices);
  return out;
}

inline std::vector<EvenPartition> enumerate_pair_partitions(
    unsigned K, unsigned max_vertices = kDefaultMaxVertices) {
  detail::check_vertex_cap(K, max_vertices);
  return enumerate_pair_partitions(VertexLabeling::distinct(K), false, max_vertices);
}

/// All (|block| - 1)! traversals starting at the block minimum, tails in
/// lexicographic order.
inline std::vector<Traversal> enumerate_traversals(VertexMask block) {
  const auto verts = mask_vertices(block);
  if (verts.size() < 2 || verts.size() % 2 == 1)
    throw std::invalid_argument("enumerate_traversals: block size must be even and >= 2");
  std::vector<Traversal> out;
  std::vector<unsigned> order = verts;
  do {
    out.push_back(Traversal{block, order, count_ascents(order)});
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return out;
}

inline std::vector<Traversal> enumerate_traversals(std::span<const unsigned> block) {
  return enumerate_traversals(vertices_mask(block));
}

}  // namespace wicklab

#endif  // WICKLAB_PARTITIONS_HPP
