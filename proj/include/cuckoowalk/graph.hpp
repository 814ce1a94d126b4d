#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cuckoowalk/hash_family.hpp"

namespace cuckoowalk {

class CuckooTable;

/// Left vertices are elements (indexed 0..n-1 in construction order), right
/// vertices are slots. Each left vertex keeps its d hashes with multiplicity;
/// neighbour sets, matchings and cycles use the deduplicated edges.
/// Immutable after construction.
class BipartiteGraph {
 public:
  /// `hashes` holds n*d slot indices, row-major per element.
  BipartiteGraph(std::size_t m, std::uint32_t d, std::vector<ElementId> element_ids,
                 std::vector<Slot> hashes, std::uint64_t seed = 0);

  [[nodiscard]] std::size_t n() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::uint32_t d() const noexcept { return d_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return hashes_.size(); }

  [[nodiscard]] const std::vector<ElementId>& element_ids() const noexcept { return ids_; }
  /// h_0..h_{d-1} of left vertex v, duplicates included.
  [[nodiscard]] std::span<const Slot> hashes(std::size_t v) const {
    return {hashes_.data() + v * d_, d_};
  }
  /// Distinct slots adjacent to left vertex v, ascending.
  [[nodiscard]] std::span<const Slot> distinct_neighbors(std::size_t v) const {
    return {left_adj_.data() + left_off_[v], left_off_[v + 1] - left_off_[v]};
  }
  /// Distinct left vertices hashing to slot y, ascending.
  [[nodiscard]] std::span<const std::size_t> left_neighbors(Slot y) const {
    return {right_adj_.data() + right_off_[y], right_off_[y + 1] - right_off_[y]};
  }

 private:
  std::size_t m_;
  std::uint32_t d_;
  std::uint64_t seed_;
  std::vector<ElementId> ids_;
  std::vector<Slot> hashes_;
  std::vector<std::size_t> left_off_;
  std::vector<Slot> left_adj_;
  std::vector<std::size_t> right_off_;
  std::vector<std::size_t> right_adj_;
};

/// adjacency[v][k] = family.eval(element_ids[v], k).
BipartiteGraph build_graph(const HashFamily& family, std::span<const ElementId> element_ids);

/// Graph over the elements currently stored in `table`, in slot order.
BipartiteGraph graph_of(const CuckooTable& table);

/// N(S) for a set of left vertex indices, deduplicated and ascending.
std::vector<Slot> neighbors(const BipartiteGraph& graph, std::span<const std::size_t> left_set);

struct MatchingResult {
  std::size_t size = 0;
  /// pairing[v] is the slot matched to left vertex v.
  std::vector<std::optional<Slot>> pairing;
  bool is_perfect_on_left = false;
};

/// Maximum-cardinality matching by Hopcroft-Karp layered augmentation.
MatchingResult maximum_matching(const BipartiteGraph& graph);

enum class HallMode {
  Exhaustive,  ///< subsets in size order; n <= 20 only; returns a smallest witness
  Heuristic,   ///< alternating-path closure of an unmatched vertex; any size
};

inline constexpr std::size_t kHallExhaustiveLimit = 20;

/// A set W of left vertices with |N(W)| < |W|, or nullopt when every subset
/// satisfies Hall's condition. Throws InvalidArgument for exhaustive mode with
/// n > 20.
std::optional<std::vector<std::size_t>> hall_violation_search(const BipartiteGraph& graph,
                                                              HallMode mode = HallMode::Exhaustive);

struct CycleCount {
  std::uint64_t total = 0;
  std::map<std::size_t, std::uint64_t> by_length;  ///< bipartite length -> count
  std::vector<std::size_t> left_on_cycles;          ///< S_Cyc as left vertex indices
  std::uint64_t expansions = 0;
};

inline constexpr std::uint64_t kDefaultCycleBudget = 100'000'000;

/// Exact count of simple cycles with at most `max_len` edges in the simple
/// bipartite graph. Throws BudgetExceeded once more than `budget` DFS
/// expansions are needed; never returns a partial count.
CycleCount count_short_cycles(const BipartiteGraph& graph, std::size_t max_len,
                              std::uint64_t budget = kDefaultCycleBudget);

/// Tabulated load threshold c_d* for 2 <= d <= 7 (three printed decimals).
/// Throws InvalidArgument otherwise.
double threshold(int d);

/// Leading-order large-d threshold 1 - e^{-d}.
double asymptotic_threshold(int d);

/// Text form: "n m d seed" header then one "x h1 ... hd" line per element.
void write_graph(std::ostream& out, const BipartiteGraph& graph);
/// Throws InvalidArgument on malformed input.
BipartiteGraph read_graph(std::istream& in);

}  // namespace cuckoowalk
