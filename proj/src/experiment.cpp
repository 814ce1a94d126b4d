#include "cuckoowalk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "cuckoowalk/error.hpp"
#include "cuckoowalk/graph.hpp"

namespace cuckoowalk {

void validate(const ExperimentConfig& config) {
  if (config.d < 2) throw InvalidArgument("d must be at least 2");
  if (!(config.c > 0.0 && config.c < 1.0)) throw InvalidArgument("load factor c must lie in (0, 1)");
  if (config.n_values.empty()) throw InvalidArgument("at least one n is required");
  for (const std::size_t n : config.n_values) {
    if (n == 0) throw InvalidArgument("n must be positive");
  }
  if (config.trials == 0) throw InvalidArgument("trials must be positive");
  if (config.max_steps && *config.max_steps == 0) throw InvalidArgument("max_steps must be positive");
}

std::size_t table_size(std::size_t n, double c) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n) / c - 1e-9));
}

std::size_t fill_count(std::size_t m, double c) {
  return static_cast<std::size_t>(std::floor(c * static_cast<double>(m) + 1e-9));
}

std::size_t default_max_steps(std::size_t m) {
  const double lg = std::log2(static_cast<double>(std::max<std::size_t>(m, 2)));
  return std::max<std::size_t>(100, static_cast<std::size_t>(50.0 * lg * lg));
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t n, std::size_t trial) {
  return derive_seed(derive_seed(master_seed, n), trial);
}

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RandomWalkBacktracking: return "rw";
    case StrategyKind::RandomWalkNonBacktracking: return "rw-nb";
    case StrategyKind::BfsShortestPath: return "bfs";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  if (name == "rw") return StrategyKind::RandomWalkBacktracking;
  if (name == "rw-nb") return StrategyKind::RandomWalkNonBacktracking;
  if (name == "bfs") return StrategyKind::BfsShortestPath;
  return std::nullopt;
}

std::string_view outcome_name(InsertOutcome outcome) {
  switch (outcome) {
    case InsertOutcome::Success: return "success";
    case InsertOutcome::StepLimit: return "step_limit";
    case InsertOutcome::NoAugmentingPath: return "no_augmenting_path";
  }
  return "?";
}

TrialRecord TrialResult::record(std::size_t insertion) const {
  TrialRecord r;
  r.seed = seed;
  r.d = d;
  r.n = n;
  r.m = m;
  r.c_actual = c_actual();
  r.insertion = insertion;
  r.reassignments = reassignments.at(insertion);
  r.outcome = insertion + 1 == reassignments.size() ? outcome : InsertOutcome::Success;
  r.budget_used = static_cast<double>(r.reassignments) / static_cast<double>(max_steps);
  return r;
}

FilledTable fill_table(std::uint32_t d, double c, std::size_t n, StrategyKind strategy, std::uint64_t seed,
                       std::optional<std::size_t> max_steps) {
  TrialResult result;
  result.seed = seed;
  result.d = d;
  result.n = n;
  result.m = table_size(n, c);
  result.target = fill_count(result.m, c);
  result.max_steps = max_steps.value_or(default_max_steps(result.m));
  result.reassignments.reserve(result.target);

  CuckooTable table(result.m, d, seed);
  InsertionStrategy policy(strategy, derive_seed(seed, 1));
  for (std::size_t i = 0; i < result.target; ++i) {
    const ElementId x = i;
    const WalkTrace trace = table.insert(x, policy, result.max_steps);
    result.reassignments.push_back(static_cast<std::uint32_t>(trace.reassignments));
    if (trace.succeeded()) continue;
    if (strategy == StrategyKind::BfsShortestPath && !table.bfs_distance_to_empty(x)) {
      result.outcome = InsertOutcome::NoAugmentingPath;
    } else {
      result.outcome = InsertOutcome::StepLimit;
    }
    break;
  }
  return {std::move(table), std::move(result)};
}

TrialResult run_trial(std::uint32_t d, double c, std::size_t n, StrategyKind strategy, std::uint64_t seed,
                      std::optional<std::size_t> max_steps) {
  return fill_table(d, c, n, strategy, seed, max_steps).trial;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || stop.load()) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          stop.store(true);
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<TrialResult> run_build_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::size_t per_point = config.trials;
  const std::size_t total = per_point * config.n_values.size();
  std::vector<TrialResult> results(total);
  parallel_for(total, config.jobs, [&](std::size_t job) {
    const std::size_t n = config.n_values[job / per_point];
    const std::size_t trial = job % per_point;
    results[job] = run_trial(config.d, config.c, n, config.strategy, trial_seed(config.master_seed, n, trial),
                             config.max_steps);
  });
  std::sort(results.begin(), results.end(), [](const TrialResult& a, const TrialResult& b) {
    return a.seed != b.seed ? a.seed < b.seed : a.n < b.n;
  });
  return results;
}

MeanEstimate estimate_mean(const std::vector<double>& values) {
  MeanEstimate out;
  out.samples = values.size();
  if (values.empty()) return out;
  double sum = 0;
  for (const double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0;
    for (const double v : values) sq += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(sq / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return out;
}

std::size_t last_decile_start(std::size_t target) {
  return static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(target) - 1e-9));
}

std::vector<PointSummary> summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials) {
  std::vector<PointSummary> out;
  for (const std::size_t n : config.n_values) {
    PointSummary s;
    s.d = config.d;
    s.c = config.c;
    s.n = n;
    s.m = table_size(n, config.c);
    s.c_actual = static_cast<double>(fill_count(s.m, config.c)) / static_cast<double>(s.m);
    s.strategy = config.strategy;
    std::vector<double> whole;
    std::vector<double> last;
    for (const TrialResult& t : trials) {
      if (t.n != n) continue;
      ++s.trials;
      for (const std::uint32_t r : t.reassignments) s.max_reassignments = std::max<std::size_t>(s.max_reassignments, r);
      if (t.failed()) {
        ++s.failed_trials;
        continue;
      }
      const std::size_t start = last_decile_start(t.target);
      for (std::size_t i = 0; i < t.reassignments.size(); ++i) {
        whole.push_back(t.reassignments[i]);
        if (i >= start) last.push_back(t.reassignments[i]);
      }
    }
    s.whole = estimate_mean(whole);
    s.last_decile = estimate_mean(last);
    out.push_back(s);
  }
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

void write_records_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "schema=1,seed,d,n,m,c_actual,insertion,reassignments,outcome,budget_used\n";
  for (const TrialResult& t : trials) {
    for (std::size_t i = 0; i < t.reassignments.size(); ++i) {
      const TrialRecord r = t.record(i);
      out << ',' << r.seed << ',' << r.d << ',' << r.n << ',' << r.m << ',' << format_double(r.c_actual) << ','
          << r.insertion << ',' << r.reassignments << ',' << outcome_name(r.outcome) << ','
          << format_double(r.budget_used) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& summaries) {
  out << "schema=1,d,c,n,m,c_actual,strategy,trials,failed_trials,failure_rate,mean,mean_se,samples,"
         "last_decile_mean,last_decile_se,last_decile_samples,max_reassignments\n";
  for (const PointSummary& s : summaries) {
    out << ',' << s.d << ',' << format_double(s.c) << ',' << s.n << ',' << s.m << ',' << format_double(s.c_actual)
        << ',' << strategy_name(s.strategy) << ',' << s.trials << ',' << s.failed_trials << ','
        << format_double(s.failure_rate()) << ',' << format_double(s.whole.mean) << ','
        << format_double(s.whole.se) << ',' << s.whole.samples << ',' << format_double(s.last_decile.mean) << ','
        << format_double(s.last_decile.se) << ',' << s.last_decile.samples << ',' << s.max_reassignments << '\n';
  }
}

namespace {

constexpr double kZ95 = 1.959963984540054;

std::pair<double, double> wilson(std::uint64_t hits, std::uint64_t total) {
  const double nn = static_cast<double>(total);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kZ95 * kZ95;
  const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = kZ95 * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  const double low = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = hits == total ? 1.0 : std::min(1.0, centre + half);
  return {std::min(low, p), std::max(high, p)};
}

// Delta-method standard error of log P for a binomial estimate.
double log_se(const TailRow& row, std::size_t walks) {
  return std::sqrt((1.0 - row.survival) / (row.survival * static_cast<double>(walks)));
}

}  // namespace

TailReport tail_from_lengths(const std::vector<std::uint32_t>& lengths, std::size_t max_ell, std::uint64_t min_hits) {
  TailReport report;
  report.walks = lengths.size();
  if (lengths.empty()) {
    report.partial = true;
    return report;
  }
  const std::uint32_t longest = *std::max_element(lengths.begin(), lengths.end());
  std::vector<std::uint64_t> at(static_cast<std::size_t>(longest) + 2, 0);
  for (const std::uint32_t l : lengths) ++at[l];
  std::uint64_t survivors = lengths.size();
  for (std::size_t ell = 0; ell <= max_ell; ++ell) {
    if (survivors < min_hits) {
      report.partial = true;
      break;
    }
    TailRow row;
    row.ell = ell;
    row.survivors = survivors;
    row.survival = static_cast<double>(survivors) / static_cast<double>(lengths.size());
    std::tie(row.ci_low, row.ci_high) = wilson(survivors, lengths.size());
    report.rows.push_back(row);
    if (ell < at.size()) survivors -= at[ell];
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (const TailRow& row : report.rows) {
    if (row.ell == 0 || !(row.survival > 0 && row.survival < 1)) continue;
    const double x = std::log(static_cast<double>(row.ell));
    const double y = std::log(-std::log(row.survival));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k >= 2) {
    const double kk = static_cast<double>(k);
    const double denom = kk * sxx - sx * sx;
    if (denom > 0) report.loglog_slope = (kk * sxy - sx * sy) / denom;
  }

  for (std::size_t lo = 1; 2 * lo < report.rows.size(); lo *= 2) {
    const TailRow& a = report.rows[lo];
    const TailRow& b = report.rows[2 * lo];
    report.dyadic_slopes.push_back((std::log(b.survival) - std::log(a.survival)) / std::log(2.0));
    // Nested binomial counts: Var(log Pb - log Pa) = 1/Sb - 1/Sa.
    const double var = 1.0 / static_cast<double>(b.survivors) - 1.0 / static_cast<double>(a.survivors);
    report.dyadic_slope_se.push_back(std::sqrt(std::max(0.0, var)) / std::log(2.0));
  }
  return report;
}

TailReport run_tail_experiment(const TailConfig& config) {
  const auto trials = run_build_experiment(config.build);
  std::vector<std::uint32_t> lengths;
  for (const TrialResult& t : trials) {
    const std::size_t start = config.phase == TailPhase::LastDecile ? last_decile_start(t.target) : 0;
    for (std::size_t i = start; i < t.reassignments.size(); ++i) lengths.push_back(t.reassignments[i]);
  }
  return tail_from_lengths(lengths, config.max_ell, config.min_hits);
}

void write_tail_csv(std::ostream& out, const TailReport& report) {
  out << "schema=1,ell,survivors,walks,survival,ci_low,ci_high\n";
  for (const TailRow& row : report.rows) {
    out << ',' << row.ell << ',' << row.survivors << ',' << report.walks << ',' << format_double(row.survival) << ','
        << format_double(row.ci_low) << ',' << format_double(row.ci_high) << '\n';
  }
}

bool tail_is_log_convex(const TailReport& report, double z) {
  const auto& rows = report.rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].survival > rows[i - 1].survival) return false;
  }
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (rows[i + 1].survivors == 0) break;
    const double second = std::log(rows[i + 1].survival) - 2 * std::log(rows[i].survival) + std::log(rows[i - 1].survival);
    const double se = std::sqrt(std::pow(log_se(rows[i - 1], report.walks), 2) + 4 * std::pow(log_se(rows[i], report.walks), 2) +
                                std::pow(log_se(rows[i + 1], report.walks), 2));
    if (second < -z * se) return false;
  }
  return true;
}

bool tail_slopes_steepen(const TailReport& report, double z) {
  const auto& slopes = report.dyadic_slopes;
  if (slopes.size() < 2) return false;
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    const double allowance = z * std::hypot(report.dyadic_slope_se[i], report.dyadic_slope_se[i - 1]);
    if (slopes[i] > slopes[i - 1] + allowance) return false;
  }
  return slopes.back() < slopes.front();
}

std::optional<double> half_crossing(const std::vector<ThresholdPoint>& points) {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double p0 = points[i].probability();
    const double p1 = points[i + 1].probability();
    if (p0 >= 0.5 && p1 < 0.5) {
      const double t = (p0 - 0.5) / (p0 - p1);
      return points[i].c + t * (points[i + 1].c - points[i].c);
    }
  }
  return std::nullopt;
}

ThresholdScan run_threshold_scan(std::uint32_t d, std::size_t n, const std::vector<double>& c_grid,
                                 std::size_t trials, std::uint64_t master_seed, std::size_t jobs) {
  if (n == 0 || n > 1'000'000) throw InvalidArgument("threshold scan needs 1 <= n <= 10^6");
  if (d < 2) throw InvalidArgument("d must be at least 2");
  for (const double c : c_grid) {
    if (!(c > 0.0 && c < 1.0)) throw InvalidArgument("grid loads must lie in (0, 1)");
  }
  ThresholdScan scan;
  scan.d = d;
  scan.n = n;
  std::vector<double> grid(c_grid);
  std::sort(grid.begin(), grid.end());
  std::vector<ElementId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;

  const std::size_t total = grid.size() * trials;
  std::vector<char> perfect(total, 0);
  parallel_for(total, jobs, [&](std::size_t job) {
    const double c = grid[job / trials];
    const std::size_t trial = job % trials;
    const HashFamily family(d, table_size(n, c), trial_seed(master_seed, n, trial));
    perfect[job] = maximum_matching(build_graph(family, ids)).is_perfect_on_left;
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ThresholdPoint point;
    point.c = grid[g];
    point.m = table_size(n, grid[g]);
    point.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) point.perfect += perfect[g * trials + t];
    scan.points.push_back(point);
  }
  scan.crossing = half_crossing(scan.points);
  return scan;
}

void write_threshold_csv(std::ostream& out, const ThresholdScan& scan) {
  out << "schema=1,d,n,c,m,trials,perfect,probability\n";
  for (const ThresholdPoint& p : scan.points) {
    out << ',' << scan.d << ',' << scan.n << ',' << format_double(p.c) << ',' << p.m << ',' << p.trials << ','
        << p.perfect << ',' << format_double(p.probability()) << '\n';
  }
}

namespace {

std::pair<double, double> ratio_with_se(const MeanEstimate& a, const MeanEstimate& b) {
  if (b.mean == 0) return {0.0, 0.0};
  const double r = a.mean / b.mean;
  const double rel = std::hypot(a.mean ? a.se / a.mean : 0.0, b.se / b.mean);
  return {r, r * rel};
}

}  // namespace

StrategyComparison run_strategy_comparison(std::uint32_t d, double c, std::size_t n, std::size_t trials,
                                           std::uint64_t master_seed, std::size_t jobs,
                                           std::optional<std::size_t> max_steps) {
  StrategyComparison out;
  out.d = d;
  out.c = c;
  out.n = n;
  out.predicted = expected_backtracking_ratio(d);
  for (const StrategyKind kind : {StrategyKind::RandomWalkBacktracking, StrategyKind::RandomWalkNonBacktracking,
                                  StrategyKind::BfsShortestPath}) {
    ExperimentConfig config;
    config.d = d;
    config.c = c;
    config.n_values = {n};
    config.trials = trials;
    config.strategy = kind;
    config.max_steps = max_steps;
    config.master_seed = master_seed;
    config.jobs = jobs;
    out.per_strategy.push_back(summarize(config, run_build_experiment(config)).front());
  }
  std::tie(out.ratio, out.ratio_se) = ratio_with_se(out.per_strategy[0].whole, out.per_strategy[1].whole);
  std::tie(out.last_decile_ratio, out.last_decile_ratio_se) =
      ratio_with_se(out.per_strategy[0].last_decile, out.per_strategy[1].last_decile);
  return out;
}

void write_comparison_csv(std::ostream& out, const StrategyComparison& comparison) {
  out << "schema=1,d,c,n,strategy,trials,failed_trials,mean,mean_se,samples,last_decile_mean,last_decile_se,"
         "last_decile_samples,ratio_rw_over_nb,ratio_se,last_decile_ratio,last_decile_ratio_se,predicted_ratio\n";
  for (const PointSummary& s : comparison.per_strategy) {
    out << ',' << s.d << ',' << format_double(s.c) << ',' << s.n << ',' << strategy_name(s.strategy) << ','
        << s.trials << ',' << s.failed_trials << ',' << format_double(s.whole.mean) << ','
        << format_double(s.whole.se) << ',' << s.whole.samples << ',' << format_double(s.last_decile.mean) << ','
        << format_double(s.last_decile.se) << ',' << s.last_decile.samples << ',' << format_double(comparison.ratio)
        << ',' << format_double(comparison.ratio_se) << ',' << format_double(comparison.last_decile_ratio) << ','
        << format_double(comparison.last_decile_ratio_se) << ',' << format_double(comparison.predicted.value())
        << '\n';
  }
}

}  // namespace cuckoowalk
