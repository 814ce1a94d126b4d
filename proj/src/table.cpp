#include "cuckoowalk/table.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cuckoowalk/error.hpp"

namespace cuckoowalk {

InsertionStrategy::InsertionStrategy(StrategyKind kind, std::uint64_t rng_seed, bool ban_first_choice)
    : kind_(kind), rng_seed_(rng_seed), ban_first_choice_(ban_first_choice), rng_(mix64(rng_seed)) {}

std::uint32_t InsertionStrategy::draw(std::uint32_t bound) {
  return static_cast<std::uint32_t>(bounded_draw([this] { return rng_(); }, bound));
}

std::optional<ElementId> WalkTrace::homeless() const {
  if (outcome == WalkOutcome::Success || steps.empty()) return std::nullopt;
  return steps.back().evicted;
}

CuckooTable::CuckooTable(std::size_t m, std::uint32_t d, std::uint64_t seed)
    : CuckooTable(HashFamily(d, m, seed)) {}

CuckooTable::CuckooTable(HashFamily family)
    : family_(family), slots_(family.m(), kNoElement) {}

std::optional<Slot> CuckooTable::lookup(ElementId x) const {
  if (x == kNoElement) return std::nullopt;
  for (HashIndex k = 0; k < family_.d(); ++k) {
    const Slot y = family_.eval(x, k);
    if (slots_[y] == x) return y;
  }
  return std::nullopt;
}

std::optional<ElementId> CuckooTable::occupant(Slot y) const {
  if (y >= slots_.size() || slots_[y] == kNoElement) return std::nullopt;
  return slots_[y];
}

std::optional<Placement> CuckooTable::placement(ElementId x) const {
  const auto it = position_.find(x);
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

bool CuckooTable::erase(ElementId x) {
  const auto it = position_.find(x);
  if (it == position_.end()) return false;
  slots_[it->second.slot] = kNoElement;
  position_.erase(it);
  return true;
}

void CuckooTable::assign(ElementId x, HashIndex k) {
  if (x == kNoElement) throw InvalidArgument("reserved element id");
  if (k >= family_.d()) throw InvalidArgument("hash index out of range");
  if (contains(x)) throw InvalidArgument("element already stored");
  const Slot y = family_.eval(x, k);
  if (slots_[y] != kNoElement) throw InvalidArgument("slot h_k(x) is occupied");
  slots_[y] = x;
  position_.emplace(x, Placement{y, k});
}

WalkStep CuckooTable::place(ElementId mover, HashIndex k) {
  const Slot y = family_.eval(mover, k);
  WalkStep step{mover, k, y, std::nullopt, 0};
  const ElementId previous = slots_[y];
  if (previous != kNoElement) {
    const auto it = position_.find(previous);
    step.evicted = previous;
    step.evicted_hash_index = it->second.hash_index;
    position_.erase(it);
  }
  slots_[y] = mover;
  position_.insert_or_assign(mover, Placement{y, k});
  return step;
}

WalkTrace CuckooTable::insert(ElementId x, InsertionStrategy& strategy, std::size_t max_steps) {
  if (x == kNoElement) throw InvalidArgument("reserved element id");
  if (contains(x)) throw InvalidArgument("duplicate insert of element " + std::to_string(x));
  if (strategy.kind() == StrategyKind::BfsShortestPath) return bfs_insert(x, strategy, max_steps);
  return random_walk_insert(x, strategy, max_steps);
}

WalkTrace CuckooTable::random_walk_insert(ElementId x, InsertionStrategy& strategy,
                                          std::size_t max_steps) {
  const std::uint32_t d = family_.d();
  const bool non_backtracking = strategy.kind() == StrategyKind::RandomWalkNonBacktracking;

  WalkTrace trace;
  trace.inserted = x;
  ElementId mover = x;
  std::optional<HashIndex> banned;
  if (non_backtracking && strategy.ban_first_choice()) banned = strategy.draw(d);

  for (;;) {
    HashIndex k;
    if (non_backtracking && banned) {
      k = strategy.draw(d - 1);
      if (k >= *banned) ++k;
    } else {
      k = strategy.draw(d);
    }
    WalkStep step = place(mover, k);
    trace.steps.push_back(step);
    if (!step.evicted) return trace;

    ++trace.reassignments;
    if (trace.reassignments >= max_steps) {
      trace.outcome = WalkOutcome::StepLimitExceeded;
      return trace;
    }
    mover = *step.evicted;
    banned = step.evicted_hash_index;
  }
}

std::optional<std::uint32_t> CuckooTable::shortest_path_search(
    ElementId x, std::vector<std::uint32_t>& stamp, std::uint32_t& current,
    std::vector<SearchNode>& nodes, HashIndex* free_k, Slot* free_slot) const {
  if (stamp.size() != slots_.size()) {
    stamp.assign(slots_.size(), 0);
    current = 0;
  }
  if (++current == 0) {
    std::fill(stamp.begin(), stamp.end(), 0);
    current = 1;
  }
  nodes.clear();
  nodes.push_back(SearchNode{x, 0, 0, 0, 0});
  if (const auto it = position_.find(x); it != position_.end()) stamp[it->second.slot] = current;

  const std::uint32_t d = family_.d();
  for (std::uint32_t head = 0; head < nodes.size(); ++head) {
    const ElementId e = nodes[head].element;
    const std::uint32_t depth = nodes[head].depth;
    for (HashIndex k = 0; k < d; ++k) {
      const Slot y = family_.eval(e, k);
      if (stamp[y] == current) continue;
      stamp[y] = current;
      const ElementId occ = slots_[y];
      if (occ == kNoElement) {
        *free_k = k;
        *free_slot = y;
        return head;
      }
      nodes.push_back(SearchNode{occ, head, k, y, depth + 1});
    }
  }
  return std::nullopt;
}

WalkTrace CuckooTable::bfs_insert(ElementId x, InsertionStrategy& strategy, std::size_t max_steps) {
  WalkTrace trace;
  trace.inserted = x;

  std::vector<SearchNode> nodes;
  HashIndex free_k = 0;
  Slot free_slot = 0;
  const auto last = shortest_path_search(x, strategy.visit_stamp_, strategy.stamp_, nodes, &free_k,
                                         &free_slot);
  if (!last || nodes[*last].depth > max_steps) {
    // No placement is attempted: either no augmenting path exists or the
    // shortest one is longer than the limit.
    trace.outcome = WalkOutcome::StepLimitExceeded;
    return trace;
  }

  // Hash indices along the path, root first.
  std::vector<HashIndex> indices;
  indices.push_back(free_k);
  for (std::uint32_t at = *last; at != 0; at = nodes[at].parent) indices.push_back(nodes[at].hash_index);
  std::reverse(indices.begin(), indices.end());

  ElementId mover = x;
  for (const HashIndex k : indices) {
    WalkStep step = place(mover, k);
    trace.steps.push_back(step);
    if (!step.evicted) break;
    ++trace.reassignments;
    mover = *step.evicted;
  }
  return trace;
}

void CuckooTable::undo(const WalkTrace& trace) {
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    if (slots_[it->destination] != it->mover) throw std::logic_error("undo: table does not match trace");
    position_.erase(it->mover);
    if (it->evicted) {
      slots_[it->destination] = *it->evicted;
      position_.insert_or_assign(*it->evicted, Placement{it->destination, it->evicted_hash_index});
    } else {
      slots_[it->destination] = kNoElement;
    }
  }
}

std::optional<std::size_t> CuckooTable::bfs_distance_to_empty(ElementId x) const {
  std::vector<std::uint32_t> stamp;
  std::uint32_t current = 0;
  std::vector<SearchNode> nodes;
  HashIndex k = 0;
  Slot y = 0;
  const auto last = shortest_path_search(x, stamp, current, nodes, &k, &y);
  if (!last) return std::nullopt;
  return nodes[*last].depth;
}

std::vector<ElementId> CuckooTable::elements() const {
  std::vector<ElementId> out;
  out.reserve(position_.size());
  for (const ElementId e : slots_) {
    if (e != kNoElement) out.push_back(e);
  }
  return out;
}

void CuckooTable::check_invariants() const {
  std::size_t filled = 0;
  for (Slot y = 0; y < slots_.size(); ++y) {
    const ElementId e = slots_[y];
    if (e == kNoElement) continue;
    ++filled;
    const auto it = position_.find(e);
    if (it == position_.end() || it->second.slot != y) {
      throw std::logic_error("slot " + std::to_string(y) + " holds an element with a different position");
    }
  }
  if (filled != position_.size()) throw std::logic_error("position map has entries for empty slots");
  for (const auto& [e, where] : position_) {
    if (where.hash_index >= family_.d() || family_.eval(e, where.hash_index) != where.slot) {
      throw std::logic_error("element " + std::to_string(e) + " is not on one of its hash slots");
    }
  }
}

Ratio expected_backtracking_ratio(std::int64_t d) {
  if (d < 2) throw InvalidArgument("backtracking ratio needs d >= 2");
  const std::int64_t g = std::gcd(d + 1, d - 1);
  return Ratio{(d + 1) / g, (d - 1) / g};
}

}  // namespace cuckoowalk
