#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cuckoowalk/graph.hpp"
#include "cuckoowalk/hash_family.hpp"
#include "cuckoowalk/table.hpp"

namespace cuckoowalk {

/// Dense, immutable copy of a table's placement used by the walk-set code.
/// Elements are indexed in slot order.
class PlacementView {
 public:
  static constexpr std::uint32_t kFree = 0xffffffffu;

  explicit PlacementView(const CuckooTable& table);

  [[nodiscard]] std::uint32_t d() const noexcept { return d_; }
  [[nodiscard]] std::size_t n() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t m() const noexcept { return occupant_.size(); }
  [[nodiscard]] const std::vector<ElementId>& ids() const noexcept { return ids_; }
  [[nodiscard]] std::span<const Slot> hashes(std::size_t e) const { return {hashes_.data() + e * d_, d_}; }
  [[nodiscard]] std::uint32_t occupant(Slot y) const { return occupant_[y]; }
  [[nodiscard]] Slot slot_of(std::size_t e) const { return slot_[e]; }
  [[nodiscard]] HashIndex own_index(std::size_t e) const { return own_index_[e]; }
  [[nodiscard]] std::optional<std::size_t> index_of(ElementId x) const;
  /// Stored elements with slot y among their hashes (deduplicated).
  [[nodiscard]] std::span<const std::uint32_t> hashing_into(Slot y) const {
    return {into_.data() + into_off_[y], into_off_[y + 1] - into_off_[y]};
  }

 private:
  std::uint32_t d_;
  std::vector<ElementId> ids_;
  std::vector<Slot> hashes_;
  std::vector<std::uint32_t> occupant_;
  std::vector<Slot> slot_;
  std::vector<HashIndex> own_index_;
  std::unordered_map<ElementId, std::size_t> index_;
  std::vector<std::size_t> into_off_;
  std::vector<std::uint32_t> into_;
};

/// Endpoints of all depth-i non-backtracking walks from one element under a
/// fixed placement. The first step has all d choices; each later step
/// excludes the hash index the current element sits on. A walk that reaches
/// a free slot on reassignment j stands for (d-1)^(i-j) dummy endpoints.
struct ForwardWalkSet {
  ElementId source = kNoElement;
  std::size_t depth = 0;
  std::map<ElementId, std::uint64_t> real_endpoints;  ///< endpoint -> number of walks
  std::uint64_t real_walks = 0;
  std::uint64_t dummy_count = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return real_walks + dummy_count; }
};

inline constexpr std::uint64_t kDefaultWalkBudget = 10'000'000;

/// d (d-1)^(depth-1), saturating at UINT64_MAX.
std::uint64_t walk_count(std::uint32_t d, std::size_t depth);

/// Throws InvalidArgument for depth 0, BudgetExceeded when d(d-1)^(depth-1)
/// exceeds `budget`.
ForwardWalkSet forward_walk_set(const CuckooTable& table, ElementId x, std::size_t depth,
                                std::uint64_t budget = kDefaultWalkBudget);

/// W_{-j}(S): stored elements that reach some member of S within j
/// reassignments, plus S itself. Sorted ascending.
std::vector<ElementId> reverse_walk_set(const CuckooTable& table, std::span<const ElementId> targets,
                                        std::size_t j);

struct BadSetParams {
  double c0 = 10.0;
  /// G radius; chosen per instance from `alpha` when absent.
  std::optional<std::size_t> radius;
  double alpha = 0.05;
  std::size_t i_max = 8;
  double exponent = 0.99;
  std::uint64_t budget = 4'000'000'000ULL;
};

/// Good/bad partition of the stored elements X.
///
/// G holds elements whose BFS distance to a free slot is at most the radius.
/// For i >= 1, x is in G_i when the number of depth-i walks from x ending in
/// G, plus its dummy endpoints, is at least d(d-1)^(i-1) / (c0 i^exponent).
/// B_i = X minus (G_0 ∪ ... ∪ G_i), with G_0 = G.
struct BadSetReport {
  std::uint32_t d = 0;
  std::size_t m = 0;
  double c0 = 0;
  std::size_t radius = 0;
  double alpha = 0;
  bool alpha_satisfied = true;
  double exponent = 0;
  std::size_t i_max = 0;

  std::vector<ElementId> elements;                  ///< X in slot order
  std::vector<std::optional<std::size_t>> distance;  ///< BFS distance to a free slot
  std::vector<std::vector<char>> in_g;              ///< in_g[i][e]: e in G_i, i = 0..i_max
  std::vector<std::vector<std::uint64_t>> good_walks;  ///< [i][e]: |W_i(e) ∩ (G ∪ U_i(e))|, i >= 1
  std::vector<std::vector<char>> in_b;              ///< in_b[i][e]: e in B_i, i = 0..i_max
  std::vector<std::size_t> b_sizes;                 ///< |B_i|, i = 0..i_max

  [[nodiscard]] std::size_t n() const noexcept { return elements.size(); }
  [[nodiscard]] std::size_t g_size() const;
  /// Membership cut-off for G_i, i >= 1.
  [[nodiscard]] double g_threshold(std::size_t i) const;
};

BadSetReport compute_bad_sets(const CuckooTable& table, const BadSetParams& params = {});

/// BFS distance to a free slot for every stored element, in PlacementView order.
std::vector<std::optional<std::size_t>> distances_to_free(const PlacementView& view);

/// Which neighbour lower bound to use for p_s.
enum class PsVariant {
  SmallSetCutoff,  ///< cutoff log(n)/(2d); a_3 = 8.1, a_4 = 15, a_5 = 24, a_d = (d-1)e^(d-1) for d >= 6
  LogLogCutoff,    ///< cutoff log log n; a_d = (d-1)e^d
};

struct ExpansionParams {
  PsVariant variant = PsVariant::SmallSetCutoff;
  std::optional<double> a_d;     ///< overrides the variant's constant
  std::optional<double> cutoff;  ///< overrides the variant's small-set cutoff
  /// Sets larger than tau * n are outside the bound and are not examined;
  /// defaults to 1/d.
  std::optional<double> tau;
  std::vector<std::size_t> sizes;  ///< sampled mode: sizes to draw
  std::size_t samples_per_size = 0;
  std::uint64_t seed = 0;
};

double expansion_constant(std::uint32_t d, PsVariant variant);
double ps_cutoff(std::size_t n, std::uint32_t d, const ExpansionParams& params);
/// p_s: 0 up to the cutoff, log_d(a_d) / (log_d(n/s) - 1) above it
/// (+inf when the denominator is not positive).
double ps_value(std::size_t s, std::size_t n, std::uint32_t d, const ExpansionParams& params);
/// Largest set size the bound applies to.
std::size_t ps_size_limit(std::size_t n, std::uint32_t d, const ExpansionParams& params);

enum class ScanMode { Exhaustive, Sampled };

inline constexpr std::size_t kExpansionExhaustiveLimit = 20;
inline constexpr std::size_t kFailingExhaustiveLimit = 18;

struct ExpansionViolation {
  std::vector<std::size_t> set;  ///< left vertex indices
  std::size_t neighbor_count = 0;
  double bound = 0;  ///< (d - 1 - p_s) s
};

struct ExpansionCertificate {
  std::uint32_t d = 0;
  std::size_t n = 0;
  ScanMode mode = ScanMode::Exhaustive;
  PsVariant variant = PsVariant::SmallSetCutoff;
  double a_d = 0;
  double cutoff = 0;
  std::size_t size_limit = 0;
  std::uint64_t sets_examined = 0;
  /// Sampled runs without violations are evidence, not proof.
  bool is_proof = false;
  std::vector<ExpansionViolation> violations;
};

/// Reports every examined S (1 <= |S| <= size limit) with |N(S)| < (d-1-p_s)|S|.
/// Exhaustive mode requires n <= 20.
ExpansionCertificate expansion_check(const BipartiteGraph& graph, ScanMode mode, const ExpansionParams& params);

struct UpperNeighborViolation {
  std::vector<Slot> z;
  std::size_t left_neighbor_count = 0;
  double bound = 0;  ///< 3 d log(n/|Z|) |Z|
};

/// 3 d log(n / z) z.
double upper_neighbor_bound(std::size_t n, std::uint32_t d, std::size_t z);
/// Violation for one Z, or nullopt when Z satisfies the bound or |Z| is
/// outside 1..n/12.
std::optional<UpperNeighborViolation> upper_neighbor_violation(const BipartiteGraph& graph,
                                                               std::span<const Slot> z);
/// Samples Z with uniform size in 1..n/12 and uniform members.
std::vector<UpperNeighborViolation> upper_neighbor_check(const BipartiteGraph& graph, std::size_t samples,
                                                         std::uint64_t seed = 0);

struct GrowthSchedule {
  std::vector<double> s;  ///< s_0 = 1, ..., s_T
  std::size_t steps = 0;  ///< T: first index with s_T > epsilon n
  double cutoff = 0;
  double gamma = 0;       ///< log_d(a_d) / (log_d(1/epsilon) - 1)
  /// log_{d-1} n + log(a_d) / ((d-1) log(d-1-gamma)) * log_{d-1} log_{d-1} n;
  /// NaN when d-1-gamma <= 1.
  double formula_steps = 0;
};

/// s_i = (d - 1 - p_{s_{i-1}}) s_{i-1} with real-valued s and p_s using
/// log_d(a_d) over the log log n cutoff (or `cutoff` when given).
/// Throws InvalidArgument for d < 3 or epsilon outside (0,1), ConvergenceError
/// when the growth factor drops to 1 or below.
GrowthSchedule growth_schedule(std::uint32_t d, double a_d, double epsilon, double n,
                               std::optional<double> cutoff = std::nullopt);

struct FailingSizeCounts {
  std::uint64_t examined = 0;
  std::uint64_t failing = 0;
  std::uint64_t minimal = 0;
  std::uint64_t minimality_unknown = 0;  ///< sampled sets too large to certify
};

struct FailingSetScan {
  ScanMode mode = ScanMode::Exhaustive;
  std::map<std::size_t, FailingSizeCounts> per_size;
  std::vector<std::vector<std::size_t>> failing_sets;  ///< every failing set found
  std::vector<std::vector<std::size_t>> minimal_sets;  ///< the minimal ones among them
};

/// Classifies sets as non-failing / failing / minimal failing against
/// |N(S)| < (d-1-p_s) s. Exhaustive mode requires n <= 18.
FailingSetScan failing_set_scan(const BipartiteGraph& graph, ScanMode mode, const ExpansionParams& params);

/// Evaluates the failing predicate for one set of left vertices.
bool is_failing_set(const BipartiteGraph& graph, std::span<const std::size_t> set, const ExpansionParams& params);

}  // namespace cuckoowalk
