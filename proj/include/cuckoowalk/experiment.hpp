#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuckoowalk/table.hpp"

namespace cuckoowalk {

struct ExperimentConfig {
  std::uint32_t d = 4;
  double c = 0.9;  ///< target load factor, in (0, 1)
  std::vector<std::size_t> n_values{10'000};
  std::size_t trials = 10;
  StrategyKind strategy = StrategyKind::RandomWalkBacktracking;
  /// Reassignment limit per insertion; default_max_steps(m) when absent.
  std::optional<std::size_t> max_steps;
  bool bad_sets = false;
  bool expansion = false;
  bool cycles = false;
  bool thresholds = false;
  std::uint64_t master_seed = 1;
  /// Worker threads; 0 means one per hardware thread. Never affects output.
  std::size_t jobs = 1;
};

/// Throws InvalidArgument describing the first problem found.
void validate(const ExperimentConfig& config);

/// m = ceil(n / c).
std::size_t table_size(std::size_t n, double c);
/// floor(c m): the number of insertions that bring m slots to load c.
std::size_t fill_count(std::size_t m, double c);
/// 50 (log2 m)^2, at least 100.
std::size_t default_max_steps(std::size_t m);

/// Seed of trial `trial` at point n.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial);

std::string_view strategy_name(StrategyKind kind);
/// Accepts "rw", "rw-nb", "bfs".
std::optional<StrategyKind> parse_strategy(std::string_view name);

enum class InsertOutcome { Success, StepLimit, NoAugmentingPath };
std::string_view outcome_name(InsertOutcome outcome);

/// One insertion of one trial.
struct TrialRecord {
  std::uint64_t seed = 0;
  std::uint32_t d = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double c_actual = 0;
  std::size_t insertion = 0;  ///< 0-based insertion index
  std::size_t reassignments = 0;
  InsertOutcome outcome = InsertOutcome::Success;
  double budget_used = 0;  ///< reassignments / max_steps
};

/// All insertions of one trial. A trial stops at its first failed insertion.
struct TrialResult {
  std::uint64_t seed = 0;
  std::uint32_t d = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t target = 0;  ///< insertions attempted when nothing fails
  std::size_t max_steps = 0;
  std::vector<std::uint32_t> reassignments;
  InsertOutcome outcome = InsertOutcome::Success;  ///< outcome of the last insertion

  [[nodiscard]] bool failed() const noexcept { return outcome != InsertOutcome::Success; }
  [[nodiscard]] double c_actual() const noexcept { return static_cast<double>(target) / static_cast<double>(m); }
  [[nodiscard]] TrialRecord record(std::size_t insertion) const;
};

struct FilledTable {
  CuckooTable table;
  TrialResult trial;
};

/// Builds a table of ceil(n/c) slots seeded with `seed` and inserts ids
/// 0, 1, ... up to floor(c m) or the first failure.
FilledTable fill_table(std::uint32_t d, double c, std::size_t n, StrategyKind strategy, std::uint64_t seed,
                       std::optional<std::size_t> max_steps = std::nullopt);

/// fill_table without keeping the table.
TrialResult run_trial(std::uint32_t d, double c, std::size_t n, StrategyKind strategy, std::uint64_t seed,
                      std::optional<std::size_t> max_steps = std::nullopt);

/// Trials sorted by (seed, n); identical for any job count.
std::vector<TrialResult> run_build_experiment(const ExperimentConfig& config);

/// Runs fn(0..count-1) on `jobs` threads (0: hardware concurrency). The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct MeanEstimate {
  double mean = 0;
  double se = 0;
  std::size_t samples = 0;
};

MeanEstimate estimate_mean(const std::vector<double>& values);

struct PointSummary {
  std::uint32_t d = 0;
  double c = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  double c_actual = 0;
  StrategyKind strategy = StrategyKind::RandomWalkBacktracking;
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  MeanEstimate whole;        ///< every insertion of successful trials
  MeanEstimate last_decile;  ///< insertions with index >= ceil(0.9 target)
  std::size_t max_reassignments = 0;

  [[nodiscard]] double failure_rate() const noexcept {
    return trials ? static_cast<double>(failed_trials) / static_cast<double>(trials) : 0.0;
  }
};

/// First insertion index counted in the last decile.
std::size_t last_decile_start(std::size_t target);

std::vector<PointSummary> summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials);

/// "%.9g".
std::string format_double(double value);

void write_records_csv(std::ostream& out, const std::vector<TrialResult>& trials);
void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& summaries);

enum class TailPhase {
  All,         ///< every insertion of the build
  LastDecile,  ///< insertions into a table already at load >= 0.9 c
};

struct TailRow {
  std::size_t ell = 0;
  std::uint64_t survivors = 0;  ///< walks with at least ell reassignments
  double survival = 0;
  double ci_low = 0;   ///< Wilson 95% interval
  double ci_high = 0;
};

struct TailReport {
  std::size_t walks = 0;
  std::vector<TailRow> rows;  ///< ell = 0, 1, ... while survivors >= min_hits
  bool partial = false;       ///< rows stop before the requested max_ell
  /// Least-squares slope of log(-log P) against log ell over rows with 0 < P < 1, ell >= 1.
  std::optional<double> loglog_slope;
  /// Slopes of log P against log ell over [2^k, 2^(k+1)].
  std::vector<double> dyadic_slopes;
  std::vector<double> dyadic_slope_se;
};

struct TailConfig {
  ExperimentConfig build;
  TailPhase phase = TailPhase::All;
  std::size_t max_ell = 200;
  std::uint64_t min_hits = 10;
};

TailReport tail_from_lengths(const std::vector<std::uint32_t>& lengths, std::size_t max_ell, std::uint64_t min_hits);
TailReport run_tail_experiment(const TailConfig& config);
void write_tail_csv(std::ostream& out, const TailReport& report);

/// Whether log P is convex (within `z` standard errors) over the rows with
/// survivors >= min_hits, and P is non-increasing.
bool tail_is_log_convex(const TailReport& report, double z);
/// Whether every dyadic slope is at most the previous one plus z standard
/// errors and the last is strictly below the first.
bool tail_slopes_steepen(const TailReport& report, double z);

struct ThresholdPoint {
  double c = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t perfect = 0;

  [[nodiscard]] double probability() const noexcept {
    return trials ? static_cast<double>(perfect) / static_cast<double>(trials) : 0.0;
  }
};

struct ThresholdScan {
  std::uint32_t d = 0;
  std::size_t n = 0;
  std::vector<ThresholdPoint> points;
  /// Linear interpolation of the first downward crossing of 1/2.
  std::optional<double> crossing;
};

/// Graph of n elements on ceil(n/c) slots per grid point; trial t uses the
/// same hash seed at every c. Throws InvalidArgument for n > 10^6.
ThresholdScan run_threshold_scan(std::uint32_t d, std::size_t n, const std::vector<double>& c_grid,
                                 std::size_t trials, std::uint64_t master_seed = 1, std::size_t jobs = 1);
std::optional<double> half_crossing(const std::vector<ThresholdPoint>& points);
void write_threshold_csv(std::ostream& out, const ThresholdScan& scan);

struct StrategyComparison {
  std::uint32_t d = 0;
  double c = 0;
  std::size_t n = 0;
  std::vector<PointSummary> per_strategy;  ///< rw, rw-nb, bfs
  double ratio = 0;       ///< whole-build mean rw / rw-nb
  double ratio_se = 0;
  double last_decile_ratio = 0;
  double last_decile_ratio_se = 0;
  Ratio predicted{0, 1};  ///< (d+1)/(d-1)
};

StrategyComparison run_strategy_comparison(std::uint32_t d, double c, std::size_t n, std::size_t trials,
                                           std::uint64_t master_seed = 1, std::size_t jobs = 1,
                                           std::optional<std::size_t> max_steps = std::nullopt);
void write_comparison_csv(std::ostream& out, const StrategyComparison& comparison);

}  // namespace cuckoowalk
