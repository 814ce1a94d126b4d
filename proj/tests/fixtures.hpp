#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cuckoowalk/graph.hpp"
#include "cuckoowalk/table.hpp"

namespace fixtures {

using namespace cuckoowalk;

/// Table of m slots holding ids 0..placed-1 according to a maximum matching
/// of their hash graph, or nullopt when they cannot all be placed.
inline std::optional<CuckooTable> placed_table(std::size_t m, std::uint32_t d, std::uint64_t seed,
                                               std::size_t placed) {
  CuckooTable table(m, d, seed);
  std::vector<ElementId> ids(placed);
  for (std::size_t i = 0; i < placed; ++i) ids[i] = i;
  const auto graph = build_graph(table.family(), ids);
  const auto matching = maximum_matching(graph);
  if (!matching.is_perfect_on_left) return std::nullopt;
  for (std::size_t v = 0; v < placed; ++v) {
    for (HashIndex k = 0; k < d; ++k) {
      if (table.family().eval(ids[v], k) == *matching.pairing[v]) {
        table.assign(ids[v], k);
        break;
      }
    }
  }
  return table;
}

/// First seed >= start for which `accept` holds on the family (m, d, seed).
inline std::uint64_t find_seed(std::size_t m, std::uint32_t d, const std::function<bool(const HashFamily&)>& accept,
                               std::uint64_t start = 1) {
  for (std::uint64_t seed = start;; ++seed) {
    if (accept(HashFamily(d, m, seed))) return seed;
  }
}

inline bool has_slot(const HashFamily& f, ElementId x, Slot y) {
  for (HashIndex k = 0; k < f.d(); ++k) {
    if (f.eval(x, k) == y) return true;
  }
  return false;
}

inline std::optional<HashIndex> index_to(const HashFamily& f, ElementId x, Slot y) {
  for (HashIndex k = 0; k < f.d(); ++k) {
    if (f.eval(x, k) == y) return k;
  }
  return std::nullopt;
}

}  // namespace fixtures
