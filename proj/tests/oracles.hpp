#pragma once

// Slow, independent reference implementations used by the unit and
// acceptance tests. None of these share code paths with the library beyond
// the public table/graph accessors.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "cuckoowalk/graph.hpp"
#include "cuckoowalk/table.hpp"

namespace oracle {

using cuckoowalk::BipartiteGraph;
using cuckoowalk::CuckooTable;
using cuckoowalk::ElementId;
using cuckoowalk::HashIndex;
using cuckoowalk::Slot;

/// Maximum matching size by trying every slot choice per vertex (n <= 12).
inline std::size_t brute_force_matching(const BipartiteGraph& g) {
  std::vector<char> used(g.m(), 0);
  std::size_t best = 0;
  std::function<void(std::size_t, std::size_t)> go = [&](std::size_t v, std::size_t size) {
    if (size + (g.n() - v) <= best) return;
    if (v == g.n()) {
      best = std::max(best, size);
      return;
    }
    for (const Slot y : g.hashes(v)) {
      if (used[y]) continue;
      used[y] = 1;
      go(v + 1, size + 1);
      used[y] = 0;
    }
    go(v + 1, size);
  };
  go(0, 0);
  return best;
}

/// Whether some subset W has |N(W)| < |W| (n <= 16), by plain enumeration.
inline bool brute_force_hall_violated(const BipartiteGraph& g) {
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << g.n()); ++mask) {
    std::set<Slot> nb;
    std::size_t size = 0;
    for (std::size_t v = 0; v < g.n(); ++v) {
      if (!(mask >> v & 1U)) continue;
      ++size;
      for (const Slot y : g.hashes(v)) nb.insert(y);
    }
    if (nb.size() < size) return true;
  }
  return false;
}

/// One enumerated non-backtracking walk: the element it ends on, or the
/// reassignment count at which it reached a free slot.
struct Walk {
  std::optional<ElementId> end;
  std::size_t free_at = 0;
};

/// Every non-backtracking walk of `depth` reassignments from x, listed
/// explicitly. x's own hashes come from the family; later steps ban the
/// index the moving element currently sits on.
inline std::vector<Walk> enumerate_walks(const CuckooTable& t, ElementId x, std::size_t depth) {
  std::vector<Walk> out;
  std::function<void(ElementId, std::optional<HashIndex>, std::size_t)> step =
      [&](ElementId e, std::optional<HashIndex> banned, std::size_t done) {
        for (HashIndex k = 0; k < t.d(); ++k) {
          if (banned && k == *banned) continue;
          const Slot y = t.family().eval(e, k);
          const auto occ = t.occupant(y);
          if (!occ) {
            out.push_back({std::nullopt, done + 1});
            continue;
          }
          if (done + 1 == depth) {
            out.push_back({*occ, 0});
          } else {
            step(*occ, t.placement(*occ)->hash_index, done + 1);
          }
        }
      };
  step(x, std::nullopt, 0);
  return out;
}

/// Shortest augmenting path length from x by iterative deepening over all
/// eviction sequences (tiny tables only).
inline std::optional<std::size_t> brute_force_distance(const CuckooTable& t, ElementId x, std::size_t limit) {
  for (std::size_t depth = 0; depth <= limit; ++depth) {
    std::function<bool(ElementId, std::size_t, std::set<Slot>&)> reach = [&](ElementId e, std::size_t left,
                                                                            std::set<Slot>& used) {
      for (HashIndex k = 0; k < t.d(); ++k) {
        const Slot y = t.family().eval(e, k);
        if (used.contains(y)) continue;
        const auto occ = t.occupant(y);
        if (!occ || *occ == x) {
          if (!occ) return true;
          continue;
        }
        if (left == 0) continue;
        used.insert(y);
        const bool ok = reach(*occ, left - 1, used);
        used.erase(y);
        if (ok) return true;
      }
      return false;
    };
    std::set<Slot> used;
    if (const auto p = t.placement(x)) used.insert(p->slot);
    if (reach(x, depth, used)) return depth;
  }
  return std::nullopt;
}

/// Exact expected number of evictions of one random-walk insertion of x
/// into the current table, from the absorbing Markov chain whose state is
/// (hash index every element sits on, homeless element, banned index).
inline double markov_expected_reassignments(const CuckooTable& t, ElementId x, bool non_backtracking,
                                            bool ban_first_choice = false) {
  const std::uint32_t d = t.d();
  std::vector<ElementId> ids = t.elements();
  ids.push_back(x);
  const std::size_t count = ids.size();
  std::vector<std::vector<Slot>> hashes(count);
  for (std::size_t e = 0; e < count; ++e) {
    for (HashIndex k = 0; k < d; ++k) hashes[e].push_back(t.family().eval(ids[e], k));
  }

  struct State {
    std::vector<int> index_of;  // hash index each element sits on, -1 while homeless
    int homeless;
    int banned;  // -1: every index allowed
    bool operator<(const State& o) const {
      return std::tie(index_of, homeless, banned) < std::tie(o.index_of, o.homeless, o.banned);
    }
  };

  std::map<State, std::size_t> index;
  std::vector<State> states;
  const auto intern = [&](const State& s) {
    const auto [it, fresh] = index.emplace(s, states.size());
    if (fresh) states.push_back(s);
    return it->second;
  };

  State base;
  base.index_of.assign(count, -1);
  for (std::size_t e = 0; e + 1 < count; ++e) base.index_of[e] = static_cast<int>(t.placement(ids[e])->hash_index);
  base.homeless = static_cast<int>(count - 1);

  std::vector<std::pair<double, std::size_t>> initial;
  if (non_backtracking && ban_first_choice) {
    for (HashIndex b = 0; b < d; ++b) {
      State s = base;
      s.banned = static_cast<int>(b);
      initial.emplace_back(1.0 / d, intern(s));
    }
  } else {
    State s = base;
    s.banned = -1;
    initial.emplace_back(1.0, intern(s));
  }

  // transitions[i]: (probability, successor) for each eviction; absorption
  // into a free slot has no successor and costs nothing.
  std::vector<std::vector<std::pair<double, std::size_t>>> transitions;
  for (std::size_t head = 0; head < states.size(); ++head) {
    const State s = states[head];
    std::vector<int> owner(t.m(), -1);
    for (std::size_t e = 0; e < count; ++e) {
      if (s.index_of[e] >= 0) owner[hashes[e][static_cast<std::size_t>(s.index_of[e])]] = static_cast<int>(e);
    }
    std::vector<HashIndex> choices;
    for (HashIndex k = 0; k < d; ++k) {
      if (non_backtracking && s.banned >= 0 && static_cast<int>(k) == s.banned) continue;
      choices.push_back(k);
    }
    std::vector<std::pair<double, std::size_t>> out;
    for (const HashIndex k : choices) {
      const Slot y = hashes[static_cast<std::size_t>(s.homeless)][k];
      if (owner[y] < 0) continue;
      State next = s;
      const int evicted = owner[y];
      next.index_of[static_cast<std::size_t>(s.homeless)] = static_cast<int>(k);
      next.banned = s.index_of[static_cast<std::size_t>(evicted)];
      next.index_of[static_cast<std::size_t>(evicted)] = -1;
      next.homeless = evicted;
      out.emplace_back(1.0 / static_cast<double>(choices.size()), intern(next));
    }
    transitions.push_back(std::move(out));
  }

  // E = 1_evict + Q E  =>  (I - Q) E = r, r_i = P(evict from i).
  const auto n_states = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_states, n_states);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_states);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    for (const auto& [p, j] : transitions[i]) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= p;
      r(static_cast<Eigen::Index>(i)) += p;
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw std::runtime_error("walk is not absorbed with probability one");
  const Eigen::VectorXd e = lu.solve(r);
  double expected = 0;
  for (const auto& [p, i] : initial) expected += p * e(static_cast<Eigen::Index>(i));
  return expected;
}

/// 4- and 6-cycles of the simple graph by direct pair/triple enumeration.
inline std::map<std::size_t, std::uint64_t> brute_force_cycles(const BipartiteGraph& g) {
  std::map<std::size_t, std::uint64_t> out;
  const std::size_t n = g.n();
  const auto common = [&](std::size_t u, std::size_t v) {
    std::vector<Slot> c;
    const auto a = g.distinct_neighbors(u);
    const auto b = g.distinct_neighbors(v);
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
    return c;
  };
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const std::uint64_t k = common(u, v).size();
      out[4] += k * (k - 1) / 2;
      for (std::size_t w = v + 1; w < n; ++w) {
        const auto uv = common(u, v);
        const auto vw = common(v, w);
        const auto wu = common(w, u);
        for (const Slot a : uv) {
          for (const Slot b : vw) {
            for (const Slot c : wu) {
              if (a != b && b != c && a != c) ++out[6];
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
