#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "cuckoowalk/hash_family.hpp"

namespace cuckoowalk {

/// Reserved id marking an empty slot; it can never be inserted.
inline constexpr ElementId kNoElement = std::numeric_limits<ElementId>::max();

enum class StrategyKind {
  RandomWalkBacktracking,     ///< every step picks uniformly among all d hashes
  RandomWalkNonBacktracking,  ///< after an eviction, never the index just vacated
  BfsShortestPath,            ///< shortest augmenting path, deterministic
};

/// Insertion policy plus the seeded generator that random walks draw from.
///
/// A strategy object is stateful: consecutive inserts continue its stream.
/// It also owns the scratch space used by BFS, so one strategy must not be
/// shared between concurrently running tables.
class InsertionStrategy {
 public:
  /// `ban_first_choice` only affects the non-backtracking walk: the inserted
  /// element then starts with d-1 choices, one uniformly random index banned.
  InsertionStrategy(StrategyKind kind, std::uint64_t rng_seed, bool ban_first_choice = false);

  [[nodiscard]] StrategyKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::uint64_t rng_seed() const noexcept { return rng_seed_; }
  [[nodiscard]] bool ban_first_choice() const noexcept { return ban_first_choice_; }

  /// Uniform draw in [0, bound).
  std::uint32_t draw(std::uint32_t bound);

 private:
  friend class CuckooTable;

  StrategyKind kind_;
  std::uint64_t rng_seed_;
  bool ban_first_choice_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> visit_stamp_;
  std::uint32_t stamp_ = 0;
};

/// One placement made during an insertion.
struct WalkStep {
  ElementId mover;                     ///< x_t, the element being placed
  HashIndex hash_index;                ///< index chosen for the mover
  Slot destination;                    ///< slot the mover now occupies
  std::optional<ElementId> evicted;    ///< previous occupant, if any
  HashIndex evicted_hash_index = 0;    ///< index the evicted element sat on
};

enum class WalkOutcome { Success, StepLimitExceeded };

/// Ordered record of one insertion.
///
/// `reassignments` counts the steps that displaced an occupant, so placing
/// straight into a free slot costs 0. On StepLimitExceeded after a walk, the
/// last step's evicted element is homeless and absent from the table.
struct WalkTrace {
  ElementId inserted = kNoElement;
  std::vector<WalkStep> steps;
  std::size_t reassignments = 0;
  WalkOutcome outcome = WalkOutcome::Success;

  [[nodiscard]] bool succeeded() const noexcept { return outcome == WalkOutcome::Success; }
  [[nodiscard]] std::optional<ElementId> homeless() const;

  friend bool operator==(const WalkTrace&, const WalkTrace&) = default;
};

inline bool operator==(const WalkStep& a, const WalkStep& b) {
  return a.mover == b.mover && a.hash_index == b.hash_index && a.destination == b.destination &&
         a.evicted == b.evicted && (!a.evicted || a.evicted_hash_index == b.evicted_hash_index);
}

/// Where a stored element sits and through which of its hashes.
struct Placement {
  Slot slot;
  HashIndex hash_index;
};

/// d-ary cuckoo hash table with capacity-one slots over abstract element ids.
///
/// Single writer; concurrent readers are fine while no writer is active.
class CuckooTable {
 public:
  /// Throws InvalidArgument for m == 0 or d < 2.
  CuckooTable(std::size_t m, std::uint32_t d, std::uint64_t seed);
  explicit CuckooTable(HashFamily family);

  [[nodiscard]] const HashFamily& family() const noexcept { return family_; }
  [[nodiscard]] std::size_t m() const noexcept { return slots_.size(); }
  [[nodiscard]] std::uint32_t d() const noexcept { return family_.d(); }
  [[nodiscard]] std::size_t occupancy() const noexcept { return position_.size(); }

  /// Probes h_0(x)..h_{d-1}(x) only.
  [[nodiscard]] std::optional<Slot> lookup(ElementId x) const;
  [[nodiscard]] bool contains(ElementId x) const { return position_.contains(x); }
  [[nodiscard]] std::optional<ElementId> occupant(Slot y) const;
  [[nodiscard]] std::optional<Placement> placement(ElementId x) const;

  /// Removes x; returns whether it was present. No other slot changes.
  bool erase(ElementId x);

  /// Inserts x with the given strategy, allowing at most `max_steps`
  /// reassignments. On step-limit failure the table keeps the state reached
  /// at the limit; undo() with the returned trace restores the prior state.
  /// Throws InvalidArgument for duplicates and for kNoElement.
  WalkTrace insert(ElementId x, InsertionStrategy& strategy, std::size_t max_steps);

  /// Puts x directly on h_k(x), which must be free. For building pinned instances.
  void assign(ElementId x, HashIndex k);

  /// Reverts an insertion recorded in `trace`; the table must be in the
  /// state the insertion left it in.
  void undo(const WalkTrace& trace);

  /// Reassignments on a shortest augmenting path from x to a free slot under
  /// the current placement; 0 iff some h_k(x) is free, nullopt if none exists.
  [[nodiscard]] std::optional<std::size_t> bfs_distance_to_empty(ElementId x) const;

  /// Stored elements ordered by slot.
  [[nodiscard]] std::vector<ElementId> elements() const;

  /// Throws std::logic_error if the slot/position bijection or the
  /// "every element sits on one of its hashes" property is broken.
  void check_invariants() const;

 private:
  struct SearchNode {
    ElementId element;
    std::uint32_t parent;
    HashIndex hash_index;
    Slot slot;
    std::uint32_t depth;
  };

  // Places mover on h_k(mover) and returns the displaced occupant, if any.
  WalkStep place(ElementId mover, HashIndex k);

  WalkTrace random_walk_insert(ElementId x, InsertionStrategy& strategy, std::size_t max_steps);
  WalkTrace bfs_insert(ElementId x, InsertionStrategy& strategy, std::size_t max_steps);

  // Breadth-first search over the static placement; returns the index of the
  // node whose next hash reaches a free slot (written to *free_k / *free_slot).
  std::optional<std::uint32_t> shortest_path_search(ElementId x, std::vector<std::uint32_t>& stamp,
                                                    std::uint32_t& current,
                                                    std::vector<SearchNode>& nodes, HashIndex* free_k,
                                                    Slot* free_slot) const;

  HashFamily family_;
  std::vector<ElementId> slots_;
  std::unordered_map<ElementId, Placement> position_;
};

/// Exact rational number with positive denominator.
struct Ratio {
  std::int64_t num;
  std::int64_t den;

  [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

/// Predicted mean walk length ratio, backtracking over non-backtracking:
/// (d+1)/(d-1) in lowest terms. Throws InvalidArgument for d < 2.
Ratio expected_backtracking_ratio(std::int64_t d);

}  // namespace cuckoowalk
