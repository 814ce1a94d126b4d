#include "cuckoowalk/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "cuckoowalk/error.hpp"

namespace cuckoowalk {

PlacementView::PlacementView(const CuckooTable& table) : d_(table.d()) {
  const HashFamily& family = table.family();
  const std::size_t m = table.m();
  occupant_.assign(m, kFree);
  ids_ = table.elements();
  const std::size_t n = ids_.size();
  hashes_.reserve(n * d_);
  slot_.resize(n);
  own_index_.resize(n);
  index_.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    const ElementId x = ids_[e];
    const Placement where = *table.placement(x);
    slot_[e] = where.slot;
    own_index_[e] = where.hash_index;
    occupant_[where.slot] = static_cast<std::uint32_t>(e);
    index_.emplace(x, e);
    for (HashIndex k = 0; k < d_; ++k) hashes_.push_back(family.eval(x, k));
  }

  std::vector<std::size_t> count(m, 0);
  std::vector<Slot> row(d_);
  auto distinct_row = [&](std::size_t e) {
    std::copy_n(hashes_.begin() + static_cast<std::ptrdiff_t>(e * d_), d_, row.begin());
    std::sort(row.begin(), row.end());
    return std::unique(row.begin(), row.end());
  };
  for (std::size_t e = 0; e < n; ++e) {
    const auto end = distinct_row(e);
    for (auto it = row.begin(); it != end; ++it) ++count[*it];
  }
  into_off_.assign(m + 1, 0);
  for (Slot y = 0; y < m; ++y) into_off_[y + 1] = into_off_[y] + count[y];
  into_.resize(into_off_[m]);
  std::vector<std::size_t> fill(into_off_.begin(), into_off_.end() - 1);
  for (std::size_t e = 0; e < n; ++e) {
    const auto end = distinct_row(e);
    for (auto it = row.begin(); it != end; ++it) into_[fill[*it]++] = static_cast<std::uint32_t>(e);
  }
}

std::optional<std::size_t> PlacementView::index_of(ElementId x) const {
  const auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

constexpr HashIndex kNoBan = std::numeric_limits<HashIndex>::max();

// Depth-first enumeration of non-backtracking walks. `on_real(depth, e)` is
// called for every walk that lands on element e after `depth` reassignments,
// `on_free(depth)` for every walk that lands on a free slot at that depth.
template <class OnReal, class OnFree>
struct WalkEnumerator {
  const PlacementView& view;
  std::size_t max_depth;
  OnReal on_real;
  OnFree on_free;

  void from_hashes(std::span<const Slot> hashes, HashIndex banned, std::size_t depth) {
    for (HashIndex k = 0; k < hashes.size(); ++k) {
      if (k == banned) continue;
      const std::uint32_t o = view.occupant(hashes[k]);
      if (o == PlacementView::kFree) {
        on_free(depth + 1);
        continue;
      }
      on_real(depth + 1, o);
      if (depth + 1 < max_depth) from_hashes(view.hashes(o), view.own_index(o), depth + 1);
    }
  }
};

template <class OnReal, class OnFree>
void enumerate_walks(const PlacementView& view, std::span<const Slot> first_hashes, std::size_t max_depth,
                     OnReal on_real, OnFree on_free) {
  WalkEnumerator<OnReal, OnFree> walker{view, max_depth, on_real, on_free};
  walker.from_hashes(first_hashes, kNoBan, 0);
}

std::vector<std::uint64_t> powers(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> out(count + 1, 1);
  for (std::size_t i = 1; i <= count; ++i) out[i] = out[i - 1] * base;
  return out;
}

}  // namespace

std::uint64_t walk_count(std::uint32_t d, std::size_t depth) {
  if (depth == 0) return 1;
  std::uint64_t total = d;
  for (std::size_t i = 1; i < depth; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / (d - 1)) return std::numeric_limits<std::uint64_t>::max();
    total *= d - 1;
  }
  return total;
}

ForwardWalkSet forward_walk_set(const CuckooTable& table, ElementId x, std::size_t depth, std::uint64_t budget) {
  if (depth == 0) throw InvalidArgument("forward walk set needs depth >= 1");
  const std::uint32_t d = table.d();
  if (walk_count(d, depth) > budget) {
    throw BudgetExceeded("forward walk set: d(d-1)^(i-1) = " + std::to_string(walk_count(d, depth)) +
                         " walks exceed the budget");
  }
  const PlacementView view(table);
  const auto first = table.family().slots_of(x);
  const auto pow = powers(d - 1, depth);

  ForwardWalkSet out;
  out.source = x;
  out.depth = depth;
  enumerate_walks(
      view, first, depth,
      [&](std::size_t j, std::uint32_t e) {
        if (j == depth) {
          ++out.real_endpoints[view.ids()[e]];
          ++out.real_walks;
        }
      },
      [&](std::size_t j) { out.dummy_count += pow[depth - j]; });
  return out;
}

std::vector<ElementId> reverse_walk_set(const CuckooTable& table, std::span<const ElementId> targets,
                                        std::size_t j) {
  const PlacementView view(table);
  std::vector<ElementId> out(targets.begin(), targets.end());
  std::vector<char> seen(view.n(), 0);
  std::vector<std::uint32_t> frontier;
  for (const ElementId x : targets) {
    if (const auto e = view.index_of(x); e && !seen[*e]) {
      seen[*e] = 1;
      frontier.push_back(static_cast<std::uint32_t>(*e));
    }
  }
  std::vector<std::uint32_t> next;
  for (std::size_t level = 0; level < j && !frontier.empty(); ++level) {
    next.clear();
    for (const std::uint32_t e : frontier) {
      for (const std::uint32_t w : view.hashing_into(view.slot_of(e))) {
        if (seen[w]) continue;
        seen[w] = 1;
        next.push_back(w);
        out.push_back(view.ids()[w]);
      }
    }
    frontier.swap(next);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::optional<std::size_t>> distances_to_free(const PlacementView& view) {
  std::vector<std::optional<std::size_t>> dist(view.n());
  std::vector<std::uint32_t> queue;
  for (Slot y = 0; y < view.m(); ++y) {
    if (view.occupant(y) != PlacementView::kFree) continue;
    for (const std::uint32_t e : view.hashing_into(y)) {
      if (!dist[e]) {
        dist[e] = 0;
        queue.push_back(e);
      }
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t e = queue[head];
    for (const std::uint32_t w : view.hashing_into(view.slot_of(e))) {
      if (!dist[w]) {
        dist[w] = *dist[e] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::size_t BadSetReport::g_size() const {
  if (in_g.empty()) return 0;
  return static_cast<std::size_t>(std::count(in_g[0].begin(), in_g[0].end(), 1));
}

double BadSetReport::g_threshold(std::size_t i) const {
  return static_cast<double>(walk_count(d, i)) / (c0 * std::pow(static_cast<double>(i), exponent));
}

BadSetReport compute_bad_sets(const CuckooTable& table, const BadSetParams& params) {
  if (params.i_max == 0) throw InvalidArgument("bad sets need i_max >= 1");
  if (!(params.c0 > 0)) throw InvalidArgument("bad sets need c0 > 0");
  const PlacementView view(table);
  const std::uint32_t d = view.d();
  const std::size_t n = view.n();

  std::uint64_t per_element = 0;
  for (std::size_t i = 1; i <= params.i_max; ++i) per_element += walk_count(d, i);
  if (n > 0 && per_element > params.budget / n) {
    throw BudgetExceeded("bad-set computation needs " + std::to_string(per_element) + " walk steps per element for " +
                         std::to_string(n) + " elements, over the budget");
  }

  BadSetReport report;
  report.d = d;
  report.m = view.m();
  report.c0 = params.c0;
  report.alpha = params.alpha;
  report.exponent = params.exponent;
  report.i_max = params.i_max;
  report.elements = view.ids();
  report.distance = distances_to_free(view);

  if (params.radius) {
    report.radius = *params.radius;
  } else {
    // Smallest M with |{x : dist(x) > M}| <= alpha n.
    std::vector<std::size_t> finite;
    std::size_t infinite = 0;
    for (const auto& dist : report.distance) {
      if (dist) finite.push_back(*dist);
      else ++infinite;
    }
    std::sort(finite.begin(), finite.end());
    const double allowed = params.alpha * static_cast<double>(n);
    report.radius = finite.empty() ? 0 : finite.back();
    report.alpha_satisfied = static_cast<double>(infinite) <= allowed;
    if (report.alpha_satisfied) {
      for (std::size_t radius = 0; radius <= (finite.empty() ? 0 : finite.back()); ++radius) {
        const auto within = static_cast<std::size_t>(std::upper_bound(finite.begin(), finite.end(), radius) - finite.begin());
        if (static_cast<double>(n - within) <= allowed) {
          report.radius = radius;
          break;
        }
      }
    }
  }

  const std::size_t i_max = params.i_max;
  report.in_g.assign(i_max + 1, std::vector<char>(n, 0));
  report.good_walks.assign(i_max + 1, std::vector<std::uint64_t>(n, 0));
  for (std::size_t e = 0; e < n; ++e) {
    report.in_g[0][e] = report.distance[e] && *report.distance[e] <= report.radius;
  }

  const auto pow = powers(d - 1, i_max);
  const auto& in_g0 = report.in_g[0];
  std::vector<std::uint64_t> good(i_max + 1);
  for (std::size_t e = 0; e < n; ++e) {
    std::fill(good.begin(), good.end(), 0);
    enumerate_walks(
        view, view.hashes(e), i_max,
        [&](std::size_t j, std::uint32_t o) {
          if (in_g0[o]) ++good[j];
        },
        [&](std::size_t j) {
          for (std::size_t i = j; i <= i_max; ++i) good[i] += pow[i - j];
        });
    for (std::size_t i = 1; i <= i_max; ++i) {
      report.good_walks[i][e] = good[i];
      report.in_g[i][e] = static_cast<double>(good[i]) >= report.g_threshold(i);
    }
  }

  report.in_b.assign(i_max + 1, std::vector<char>(n, 0));
  report.b_sizes.assign(i_max + 1, 0);
  for (std::size_t e = 0; e < n; ++e) {
    bool covered = false;
    for (std::size_t i = 0; i <= i_max; ++i) {
      covered = covered || report.in_g[i][e];
      report.in_b[i][e] = !covered;
      if (!covered) ++report.b_sizes[i];
    }
  }
  return report;
}

double expansion_constant(std::uint32_t d, PsVariant variant) {
  if (d < 2) throw InvalidArgument("expansion constant needs d >= 2");
  const double dm1 = static_cast<double>(d) - 1.0;
  if (variant == PsVariant::LogLogCutoff) return dm1 * std::exp(static_cast<double>(d));
  switch (d) {
    case 3: return 8.1;
    case 4: return 15.0;
    case 5: return 24.0;
    default: return dm1 * std::exp(dm1);
  }
}

double ps_cutoff(std::size_t n, std::uint32_t d, const ExpansionParams& params) {
  if (params.cutoff) return *params.cutoff;
  const double nn = static_cast<double>(n);
  if (params.variant == PsVariant::LogLogCutoff) {
    return nn > std::numbers::e ? std::log(std::log(nn)) : 0.0;
  }
  return nn > 1 ? std::log(nn) / (2.0 * d) : 0.0;
}

double ps_value(std::size_t s, std::size_t n, std::uint32_t d, const ExpansionParams& params) {
  if (static_cast<double>(s) <= ps_cutoff(n, d, params)) return 0.0;
  const double a = params.a_d.value_or(expansion_constant(d, params.variant));
  const double log_d = std::log(static_cast<double>(d));
  const double denominator = std::log(static_cast<double>(n) / static_cast<double>(s)) / log_d - 1.0;
  if (!(denominator > 0)) return std::numeric_limits<double>::infinity();
  return (std::log(a) / log_d) / denominator;
}

std::size_t ps_size_limit(std::size_t n, std::uint32_t d, const ExpansionParams& params) {
  const double tau = params.tau.value_or(1.0 / d);
  return static_cast<std::size_t>(std::floor(tau * static_cast<double>(n) + 1e-9));
}

namespace {

class NeighborCounter {
 public:
  explicit NeighborCounter(const BipartiteGraph& graph) : graph_(graph), stamp_(graph.m(), 0) {}

  std::size_t count(std::span<const std::size_t> set) {
    ++current_;
    std::size_t covered = 0;
    for (const std::size_t v : set) {
      for (const Slot y : graph_.distinct_neighbors(v)) {
        if (stamp_[y] != current_) {
          stamp_[y] = current_;
          ++covered;
        }
      }
    }
    return covered;
  }

 private:
  const BipartiteGraph& graph_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t current_ = 0;
};

std::vector<std::size_t> mask_members(std::uint64_t mask) {
  std::vector<std::size_t> out;
  while (mask) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

// Uniform k-subset of [0, n), ascending.
std::vector<std::size_t> sample_subset(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + bounded_draw([&] { return rng(); }, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

ExpansionCertificate expansion_check(const BipartiteGraph& graph, ScanMode mode, const ExpansionParams& params) {
  const std::size_t n = graph.n();
  const std::uint32_t d = graph.d();
  ExpansionCertificate cert;
  cert.d = d;
  cert.n = n;
  cert.mode = mode;
  cert.variant = params.variant;
  cert.a_d = params.a_d.value_or(expansion_constant(d, params.variant));
  cert.cutoff = ps_cutoff(n, d, params);
  cert.size_limit = std::min(ps_size_limit(n, d, params), n);
  cert.is_proof = mode == ScanMode::Exhaustive;

  NeighborCounter counter(graph);
  const auto examine = [&](std::vector<std::size_t> set) {
    ++cert.sets_examined;
    const std::size_t s = set.size();
    const double bound = (static_cast<double>(d) - 1.0 - ps_value(s, n, d, params)) * static_cast<double>(s);
    const std::size_t covered = counter.count(set);
    if (static_cast<double>(covered) < bound) cert.violations.push_back({std::move(set), covered, bound});
  };

  if (mode == ScanMode::Exhaustive) {
    if (n > kExpansionExhaustiveLimit) throw InvalidArgument("exhaustive expansion check is limited to n <= 20");
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > cert.size_limit) continue;
      examine(mask_members(mask));
    }
    return cert;
  }

  std::mt19937_64 rng(mix64(params.seed));
  for (const std::size_t s : params.sizes) {
    if (s == 0 || s > cert.size_limit) continue;
    for (std::size_t t = 0; t < params.samples_per_size; ++t) examine(sample_subset(rng, n, s));
  }
  return cert;
}

double upper_neighbor_bound(std::size_t n, std::uint32_t d, std::size_t z) {
  const double zz = static_cast<double>(z);
  return 3.0 * d * std::log(static_cast<double>(n) / zz) * zz;
}

std::optional<UpperNeighborViolation> upper_neighbor_violation(const BipartiteGraph& graph, std::span<const Slot> z) {
  const std::size_t n = graph.n();
  if (z.empty() || z.size() > n / 12) return std::nullopt;
  std::vector<char> seen(n, 0);
  std::size_t count = 0;
  for (const Slot y : z) {
    for (const std::size_t v : graph.left_neighbors(y)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
      }
    }
  }
  const double bound = upper_neighbor_bound(n, graph.d(), z.size());
  if (static_cast<double>(count) < bound) return std::nullopt;
  return UpperNeighborViolation{{z.begin(), z.end()}, count, bound};
}

std::vector<UpperNeighborViolation> upper_neighbor_check(const BipartiteGraph& graph, std::size_t samples,
                                                         std::uint64_t seed) {
  std::vector<UpperNeighborViolation> out;
  const std::size_t max_size = std::min(graph.n() / 12, graph.m());
  if (max_size == 0) return out;
  std::mt19937_64 rng(mix64(seed ^ 0x2545f4914f6cdd1dULL));
  for (std::size_t t = 0; t < samples; ++t) {
    const std::size_t size = 1 + bounded_draw([&] { return rng(); }, max_size);
    const auto picked = sample_subset(rng, graph.m(), size);
    const std::vector<Slot> z(picked.begin(), picked.end());
    if (auto violation = upper_neighbor_violation(graph, z)) out.push_back(std::move(*violation));
  }
  return out;
}

GrowthSchedule growth_schedule(std::uint32_t d, double a_d, double epsilon, double n, std::optional<double> cutoff) {
  if (d < 3) throw InvalidArgument("growth schedule needs d >= 3");
  if (!(epsilon > 0 && epsilon < 1)) throw InvalidArgument("growth schedule needs 0 < epsilon < 1");
  if (!(a_d > 1)) throw InvalidArgument("growth schedule needs a_d > 1");
  if (!(n > std::numbers::e)) throw InvalidArgument("growth schedule needs n > e");

  const double dd = static_cast<double>(d);
  const double log_d = std::log(dd);
  GrowthSchedule out;
  out.cutoff = cutoff.value_or(std::log(std::log(n)));
  out.gamma = (std::log(a_d) / log_d) / (std::log(1.0 / epsilon) / log_d - 1.0);
  const double log_dm1 = std::log(dd - 1.0);
  const double log_n = std::log(n) / log_dm1;
  const double inner = dd - 1.0 - out.gamma;
  out.formula_steps = inner > 1.0 ? log_n + (std::log(a_d) / ((dd - 1.0) * std::log(inner))) * (std::log(log_n) / log_dm1)
                                  : std::numeric_limits<double>::quiet_NaN();

  constexpr std::size_t kMaxSteps = 100'000;
  out.s.push_back(1.0);
  while (out.s.back() <= epsilon * n) {
    const double s = out.s.back();
    double p = 0.0;
    if (s > out.cutoff) {
      const double denominator = std::log(n / s) / log_d - 1.0;
      p = denominator > 0 ? (std::log(a_d) / log_d) / denominator : std::numeric_limits<double>::infinity();
    }
    const double factor = dd - 1.0 - p;
    if (!(factor > 1.0)) {
      throw ConvergenceError("growth schedule stalls at i = " + std::to_string(out.s.size()) +
                             " (p_s = " + std::to_string(p) + " >= d - 2)");
    }
    out.s.push_back(factor * s);
    if (out.s.size() > kMaxSteps) throw ConvergenceError("growth schedule did not reach epsilon n");
  }
  out.steps = out.s.size() - 1;
  return out;
}

bool is_failing_set(const BipartiteGraph& graph, std::span<const std::size_t> set, const ExpansionParams& params) {
  const std::size_t s = set.size();
  const std::size_t n = graph.n();
  if (s == 0 || s > ps_size_limit(n, graph.d(), params)) return false;
  const double bound = (static_cast<double>(graph.d()) - 1.0 - ps_value(s, n, graph.d(), params)) * static_cast<double>(s);
  const auto covered = neighbors(graph, set).size();
  return static_cast<double>(covered) < bound;
}

FailingSetScan failing_set_scan(const BipartiteGraph& graph, ScanMode mode, const ExpansionParams& params) {
  const std::size_t n = graph.n();
  const std::uint32_t d = graph.d();
  const std::size_t limit = std::min(ps_size_limit(n, d, params), n);
  FailingSetScan scan;
  scan.mode = mode;
  NeighborCounter counter(graph);
  const auto failing_now = [&](std::span<const std::size_t> set) {
    const std::size_t s = set.size();
    if (s == 0 || s > limit) return false;
    const double bound = (static_cast<double>(d) - 1.0 - ps_value(s, n, d, params)) * static_cast<double>(s);
    return static_cast<double>(counter.count(set)) < bound;
  };

  if (mode == ScanMode::Exhaustive) {
    if (n > kFailingExhaustiveLimit) throw InvalidArgument("exhaustive failing-set scan is limited to n <= 18");
    const std::uint64_t full = std::uint64_t{1} << n;
    std::vector<char> failing(full, 0);
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      const auto members = mask_members(mask);
      if (members.size() > limit) continue;
      auto& counts = scan.per_size[members.size()];
      ++counts.examined;
      failing[mask] = failing_now(members);
    }
    // any_sub[mask]: some non-empty submask (mask included) is failing.
    std::vector<char> any_sub(failing);
    for (std::size_t bit = 0; bit < n; ++bit) {
      for (std::uint64_t mask = 0; mask < full; ++mask) {
        if (mask >> bit & 1U) any_sub[mask] = any_sub[mask] || any_sub[mask ^ (std::uint64_t{1} << bit)];
      }
    }
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      if (!failing[mask]) continue;
      const auto members = mask_members(mask);
      auto& counts = scan.per_size[members.size()];
      ++counts.failing;
      bool proper_fails = false;
      for (std::uint64_t rest = mask; rest; rest &= rest - 1) {
        const std::uint64_t sub = mask & ~(rest & (0 - rest));
        if (sub && any_sub[sub]) {
          proper_fails = true;
          break;
        }
      }
      if (!proper_fails) {
        ++counts.minimal;
        scan.minimal_sets.push_back(members);
      }
      scan.failing_sets.push_back(members);
    }
    return scan;
  }

  std::mt19937_64 rng(mix64(params.seed ^ 0x9fb21c651e98df25ULL));
  for (const std::size_t s : params.sizes) {
    if (s == 0 || s > limit) continue;
    auto& counts = scan.per_size[s];
    for (std::size_t t = 0; t < params.samples_per_size; ++t) {
      const auto set = sample_subset(rng, n, s);
      ++counts.examined;
      if (!failing_now(set)) continue;
      ++counts.failing;
      scan.failing_sets.push_back(set);
      if (s > kFailingExhaustiveLimit) {
        ++counts.minimality_unknown;
        continue;
      }
      bool proper_fails = false;
      std::vector<std::size_t> sub;
      for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << s) && !proper_fails; ++mask) {
        sub.clear();
        for (const std::size_t i : mask_members(mask)) sub.push_back(set[i]);
        proper_fails = failing_now(sub);
      }
      if (!proper_fails) {
        ++counts.minimal;
        scan.minimal_sets.push_back(set);
      }
    }
  }
  return scan;
}

}  // namespace cuckoowalk
