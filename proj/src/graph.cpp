#include "cuckoowalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cuckoowalk/error.hpp"
#include "cuckoowalk/table.hpp"

namespace cuckoowalk {

namespace {

constexpr std::size_t kNil = std::numeric_limits<std::size_t>::max();

}  // namespace

BipartiteGraph::BipartiteGraph(std::size_t m, std::uint32_t d, std::vector<ElementId> element_ids,
                               std::vector<Slot> hashes, std::uint64_t seed)
    : m_(m), d_(d), seed_(seed), ids_(std::move(element_ids)), hashes_(std::move(hashes)) {
  if (d_ < 1) throw InvalidArgument("graph needs d >= 1");
  if (m_ == 0) throw InvalidArgument("graph needs m >= 1");
  if (hashes_.size() != ids_.size() * d_) throw InvalidArgument("adjacency size is not n*d");
  for (const Slot y : hashes_) {
    if (y >= m_) throw InvalidArgument("slot index out of range");
  }

  const std::size_t n = ids_.size();
  left_off_.assign(n + 1, 0);
  left_adj_.reserve(hashes_.size());
  std::vector<std::size_t> degree(m_, 0);
  std::vector<Slot> row(d_);
  for (std::size_t v = 0; v < n; ++v) {
    std::copy_n(hashes_.begin() + static_cast<std::ptrdiff_t>(v * d_), d_, row.begin());
    std::sort(row.begin(), row.end());
    const auto end = std::unique(row.begin(), row.end());
    for (auto it = row.begin(); it != end; ++it) {
      left_adj_.push_back(*it);
      ++degree[*it];
    }
    left_off_[v + 1] = left_adj_.size();
  }

  right_off_.assign(m_ + 1, 0);
  for (Slot y = 0; y < m_; ++y) right_off_[y + 1] = right_off_[y] + degree[y];
  right_adj_.resize(left_adj_.size());
  std::vector<std::size_t> fill(right_off_.begin(), right_off_.end() - 1);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = left_off_[v]; i < left_off_[v + 1]; ++i) right_adj_[fill[left_adj_[i]]++] = v;
  }
}

BipartiteGraph build_graph(const HashFamily& family, std::span<const ElementId> element_ids) {
  std::vector<Slot> hashes;
  hashes.reserve(element_ids.size() * family.d());
  for (const ElementId x : element_ids) {
    for (HashIndex k = 0; k < family.d(); ++k) hashes.push_back(family.eval(x, k));
  }
  return BipartiteGraph(family.m(), family.d(), {element_ids.begin(), element_ids.end()},
                        std::move(hashes), family.seed());
}

BipartiteGraph graph_of(const CuckooTable& table) {
  const auto ids = table.elements();
  return build_graph(table.family(), ids);
}

std::vector<Slot> neighbors(const BipartiteGraph& graph, std::span<const std::size_t> left_set) {
  std::vector<Slot> out;
  for (const std::size_t v : left_set) {
    if (v >= graph.n()) throw InvalidArgument("left vertex out of range");
    const auto adj = graph.distinct_neighbors(v);
    out.insert(out.end(), adj.begin(), adj.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MatchingResult maximum_matching(const BipartiteGraph& graph) {
  const std::size_t n = graph.n();
  const std::size_t m = graph.m();
  std::vector<std::size_t> match_left(n, kNil);
  std::vector<std::size_t> match_right(m, kNil);

  std::size_t size = 0;
  for (std::size_t v = 0; v < n; ++v) {
    for (const Slot y : graph.distinct_neighbors(v)) {
      if (match_right[y] == kNil) {
        match_right[y] = v;
        match_left[v] = y;
        ++size;
        break;
      }
    }
  }

  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> layer(n);
  std::vector<std::size_t> queue;
  std::vector<std::size_t> cursor(n);
  std::vector<std::size_t> stack;
  queue.reserve(n);

  for (;;) {
    // Layer the free left vertices and everything reachable by alternating paths.
    queue.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (match_left[v] == kNil) {
        layer[v] = 0;
        queue.push_back(v);
      } else {
        layer[v] = kInf;
      }
    }
    bool reachable_free = false;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      for (const Slot y : graph.distinct_neighbors(v)) {
        const std::size_t w = match_right[y];
        if (w == kNil) {
          reachable_free = true;
        } else if (layer[w] == kInf) {
          layer[w] = layer[v] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!reachable_free) break;

    // Vertex-disjoint augmentations along the layering, iterative DFS.
    std::fill(cursor.begin(), cursor.end(), 0);
    std::size_t augmented = 0;
    for (std::size_t root = 0; root < n; ++root) {
      if (match_left[root] != kNil || layer[root] != 0) continue;
      stack.assign(1, root);
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        const auto adj = graph.distinct_neighbors(v);
        if (cursor[v] == adj.size()) {
          layer[v] = kInf;
          stack.pop_back();
          if (!stack.empty()) ++cursor[stack.back()];
          continue;
        }
        const Slot y = adj[cursor[v]];
        const std::size_t w = match_right[y];
        if (w == kNil) {
          for (const std::size_t u : stack) {
            const Slot uy = graph.distinct_neighbors(u)[cursor[u]];
            match_left[u] = uy;
            match_right[uy] = u;
          }
          ++augmented;
          break;
        }
        if (layer[w] != kInf && layer[w] == layer[v] + 1) {
          stack.push_back(w);
        } else {
          ++cursor[v];
        }
      }
    }
    if (augmented == 0) break;
    size += augmented;
  }

  MatchingResult result;
  result.size = size;
  result.pairing.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (match_left[v] != kNil) result.pairing[v] = match_left[v];
  }
  result.is_perfect_on_left = size == n;
  return result;
}

namespace {

std::optional<std::vector<std::size_t>> exhaustive_hall(const BipartiteGraph& graph) {
  const std::size_t n = graph.n();
  std::vector<std::uint32_t> stamp(graph.m(), 0);
  std::uint32_t current = 0;
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= n; ++size) {
    pick.resize(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    for (;;) {
      ++current;
      std::size_t covered = 0;
      for (const std::size_t v : pick) {
        for (const Slot y : graph.distinct_neighbors(v)) {
          if (stamp[y] != current) {
            stamp[y] = current;
            ++covered;
          }
        }
      }
      if (covered < size) return pick;
      // Next combination in lexicographic order.
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> alternating_closure(const BipartiteGraph& graph,
                                                            const MatchingResult& matching) {
  const std::size_t n = graph.n();
  std::size_t root = kNil;
  for (std::size_t v = 0; v < n; ++v) {
    if (!matching.pairing[v]) {
      root = v;
      break;
    }
  }
  if (root == kNil) return std::nullopt;

  std::vector<std::size_t> match_right(graph.m(), kNil);
  for (std::size_t v = 0; v < n; ++v) {
    if (matching.pairing[v]) match_right[*matching.pairing[v]] = v;
  }
  std::vector<char> seen_left(n, 0);
  std::vector<char> seen_right(graph.m(), 0);
  std::vector<std::size_t> queue{root};
  seen_left[root] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Slot y : graph.distinct_neighbors(queue[head])) {
      if (seen_right[y]) continue;
      seen_right[y] = 1;
      const std::size_t w = match_right[y];
      if (w == kNil) throw std::logic_error("matching is not maximum: augmenting path found");
      if (!seen_left[w]) {
        seen_left[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

}  // namespace

std::optional<std::vector<std::size_t>> hall_violation_search(const BipartiteGraph& graph, HallMode mode) {
  const MatchingResult matching = maximum_matching(graph);
  if (mode == HallMode::Heuristic) return alternating_closure(graph, matching);

  if (graph.n() > kHallExhaustiveLimit) {
    throw InvalidArgument("exhaustive Hall search is limited to n <= 20");
  }
  auto witness = exhaustive_hall(graph);
  if (witness.has_value() == matching.is_perfect_on_left) {
    throw std::logic_error("Hall witness disagrees with maximum matching");
  }
  return witness;
}

namespace {

struct CycleSearch {
  const BipartiteGraph& graph;
  std::size_t max_len;
  std::uint64_t budget;
  std::size_t root = 0;
  std::vector<std::size_t> path;
  std::vector<char> on_path;
  std::vector<char> left_on_cycle;
  CycleCount result;

  // Vertices 0..n-1 are left, n.. are right (slot y -> n + y).
  void for_each_neighbor(std::size_t u, auto&& fn) const {
    const std::size_t n = graph.n();
    if (u < n) {
      for (const Slot y : graph.distinct_neighbors(u)) fn(n + y);
    } else {
      for (const std::size_t v : graph.left_neighbors(u - n)) fn(v);
    }
  }

  void extend(std::size_t u) {
    for_each_neighbor(u, [&](std::size_t w) {
      if (++result.expansions > budget) {
        throw BudgetExceeded("cycle enumeration exceeded its expansion budget");
      }
      if (w == root) {
        if (path.size() >= 4) record();
        return;
      }
      if (w < root || on_path[w] || path.size() >= max_len) return;
      on_path[w] = 1;
      path.push_back(w);
      extend(w);
      path.pop_back();
      on_path[w] = 0;
    });
  }

  void record() {
    ++result.by_length[path.size()];
    for (const std::size_t v : path) {
      if (v < graph.n()) left_on_cycle[v] = 1;
    }
  }
};

}  // namespace

CycleCount count_short_cycles(const BipartiteGraph& graph, std::size_t max_len, std::uint64_t budget) {
  CycleSearch search{graph, max_len, budget, 0, {}, {}, {}, {}};
  const std::size_t vertices = graph.n() + graph.m();
  search.on_path.assign(vertices, 0);
  search.left_on_cycle.assign(graph.n(), 0);
  if (max_len >= 4) {
    for (std::size_t r = 0; r < vertices; ++r) {
      search.root = r;
      search.path.assign(1, r);
      search.on_path[r] = 1;
      search.extend(r);
      search.on_path[r] = 0;
    }
  }

  CycleCount out = std::move(search.result);
  // Every cycle was found once in each direction from its smallest vertex.
  for (auto& [len, count] : out.by_length) {
    count /= 2;
    out.total += count;
  }
  for (std::size_t v = 0; v < graph.n(); ++v) {
    if (search.left_on_cycle[v]) out.left_on_cycles.push_back(v);
  }
  return out;
}

double threshold(int d) {
  switch (d) {
    case 2: return 0.5;
    case 3: return 0.918;
    case 4: return 0.977;
    case 5: return 0.992;
    case 6: return 0.997;
    case 7: return 0.999;
    default:
      throw InvalidArgument("no tabulated threshold for d = " + std::to_string(d) +
                            "; for large d use the asymptotic form 1 - (1 + o(1)) e^{-d}"
                            " (asymptotic_threshold)");
  }
}

double asymptotic_threshold(int d) {
  if (d < 2) throw InvalidArgument("asymptotic threshold needs d >= 2");
  return 1.0 - std::exp(-static_cast<double>(d));
}

void write_graph(std::ostream& out, const BipartiteGraph& graph) {
  out << graph.n() << ' ' << graph.m() << ' ' << graph.d() << ' ' << graph.seed() << '\n';
  for (std::size_t v = 0; v < graph.n(); ++v) {
    out << graph.element_ids()[v];
    for (const Slot y : graph.hashes(v)) out << ' ' << y;
    out << '\n';
  }
}

BipartiteGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("graph file: missing header");
  std::istringstream header(line);
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint32_t d = 0;
  std::uint64_t seed = 0;
  if (!(header >> n >> m >> d >> seed)) throw InvalidArgument("graph file: malformed header");

  std::vector<ElementId> ids;
  std::vector<Slot> hashes;
  ids.reserve(n);
  hashes.reserve(n * d);
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::getline(in, line)) throw InvalidArgument("graph file: expected " + std::to_string(n) + " element lines");
    std::istringstream row(line);
    ElementId x = 0;
    if (!(row >> x)) throw InvalidArgument("graph file: malformed element line " + std::to_string(v + 1));
    ids.push_back(x);
    for (std::uint32_t k = 0; k < d; ++k) {
      Slot y = 0;
      if (!(row >> y)) throw InvalidArgument("graph file: element line " + std::to_string(v + 1) + " has fewer than d hashes");
      hashes.push_back(y);
    }
    std::string extra;
    if (row >> extra) throw InvalidArgument("graph file: element line " + std::to_string(v + 1) + " has more than d hashes");
  }
  return BipartiteGraph(m, d, std::move(ids), std::move(hashes), seed);
}

}  // namespace cuckoowalk
