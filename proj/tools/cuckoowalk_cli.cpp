// Experiment runner: builds tables, measures walk lengths and runs the
// structural analyses. CSV goes to --out (or stdout).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cuckoowalk/analysis.hpp"
#include "cuckoowalk/error.hpp"
#include "cuckoowalk/experiment.hpp"
#include "cuckoowalk/graph.hpp"
#include "cuckoowalk/report.hpp"

namespace cw = cuckoowalk;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kBudget = 3, kInsufficient = 4 };

struct Common {
  std::uint32_t d = 4;
  double load = 0.9;
  std::vector<std::size_t> n{10'000};
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::string strategy = "rw";
  std::size_t max_steps = 0;
  std::string out;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_strategy = true) {
  cmd->add_option("--d", c.d, "hash functions per element")->capture_default_str();
  cmd->add_option("--load", c.load, "target load factor c")->capture_default_str();
  cmd->add_option("--n", c.n, "element counts (m = ceil(n/c))")->capture_default_str();
  cmd->add_option("--trials", c.trials, "seeds per point")->capture_default_str();
  cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  if (with_strategy) {
    cmd->add_option("--strategy", c.strategy, "rw, rw-nb or bfs")
        ->check(CLI::IsMember({"rw", "rw-nb", "bfs"}))
        ->capture_default_str();
  }
  cmd->add_option("--max-steps", c.max_steps, "reassignment limit per insertion (0: 50 log2(m)^2)");
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--jobs", c.jobs, "worker threads (0: all cores)")->capture_default_str();
}

cw::ExperimentConfig to_config(const Common& c) {
  cw::ExperimentConfig config;
  config.d = c.d;
  config.c = c.load;
  config.n_values = c.n;
  config.trials = c.trials;
  config.strategy = *cw::parse_strategy(c.strategy);
  if (c.max_steps) config.max_steps = c.max_steps;
  config.master_seed = c.seed;
  config.jobs = c.jobs;
  cw::validate(config);
  return config;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw cw::InvalidArgument("cannot open " + path + " for writing");
  write(file);
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:step" or a comma-separated list.
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char a = 0, b = 0;
    std::istringstream in(text);
    if (!(in >> lo >> a >> hi >> b >> step) || a != ':' || b != ':' || !(step > 0) || hi < lo) {
      throw cw::InvalidArgument("grid must look like lo:hi:step");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw cw::InvalidArgument("bad grid value '" + item + "'");
    }
  }
  if (grid.empty()) throw cw::InvalidArgument("empty grid");
  return grid;
}

cw::BipartiteGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cw::InvalidArgument("cannot open graph file " + path);
  return cw::read_graph(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"d-ary cuckoo hashing experiments"};
  app.require_subcommand(1);

  Common build_opts;
  std::string records_path;
  auto* build = app.add_subcommand("build", "fill tables and summarise reassignments per insertion");
  add_common(build, build_opts);
  build->add_option("--records", records_path, "also write one row per insertion here");

  Common tail_opts;
  std::string phase = "all";
  std::size_t max_ell = 0;
  std::uint64_t min_hits = 10;
  auto* tail = app.add_subcommand("tail", "survival function of walk lengths");
  add_common(tail, tail_opts);
  tail->add_option("--phase", phase, "all or last-decile")->check(CLI::IsMember({"all", "last-decile"}));
  tail->add_option("--max-ell", max_ell, "deepest ell to report (0: as deep as the data allows)");
  tail->add_option("--min-hits", min_hits, "minimum survivors for a reported row")->capture_default_str();

  Common threshold_opts;
  threshold_opts.n = {100'000};
  threshold_opts.d = 3;
  threshold_opts.trials = 200;
  std::string grid = "0.90:0.94:0.004";
  auto* threshold = app.add_subcommand("threshold", "probability of a perfect matching across a load grid");
  add_common(threshold, threshold_opts, false);
  threshold->add_option("--grid", grid, "lo:hi:step or comma list of loads")->capture_default_str();

  Common compare_opts;
  compare_opts.load = 0.5;
  auto* compare = app.add_subcommand("compare", "mean walk lengths for rw, rw-nb and bfs");
  add_common(compare, compare_opts, false);

  Common analyze_opts;
  analyze_opts.n = {2000};
  std::string what = "bad-sets";
  std::string graph_path;
  std::size_t i_max = 8;
  double c0 = 10.0;
  double alpha = 0.05;
  std::size_t max_len = 4;
  std::uint64_t budget = cw::kDefaultCycleBudget;
  std::size_t samples = 1000;
  std::vector<std::size_t> sizes;
  std::size_t trial = 0;
  auto* analyze = app.add_subcommand("analyze", "structural analysis of one built table or graph");
  add_common(analyze, analyze_opts);
  analyze->add_option("--what", what, "bad-sets, expansion, failing, cycles, hall or upper")
      ->check(CLI::IsMember({"bad-sets", "expansion", "failing", "cycles", "hall", "upper"}));
  analyze->add_option("--graph", graph_path, "read the graph from a file instead of building a table");
  analyze->add_option("--trial", trial, "trial index whose seed is used")->capture_default_str();
  analyze->add_option("--i-max", i_max)->capture_default_str();
  analyze->add_option("--c0", c0)->capture_default_str();
  analyze->add_option("--alpha", alpha)->capture_default_str();
  analyze->add_option("--max-len", max_len, "longest cycle length counted")->capture_default_str();
  analyze->add_option("--budget", budget, "cycle search expansion budget")->capture_default_str();
  analyze->add_option("--samples", samples, "samples per size in sampled scans")->capture_default_str();
  analyze->add_option("--sizes", sizes, "set sizes for sampled scans");

  Common export_opts;
  export_opts.n = {1000};
  std::size_t export_trial = 0;
  auto* export_graph = app.add_subcommand("export-graph", "write the hash graph of one trial");
  add_common(export_graph, export_opts, false);
  export_graph->add_option("--trial", export_trial)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*build) {
      const auto config = to_config(build_opts);
      const auto trials = cw::run_build_experiment(config);
      emit(build_opts.out, [&](std::ostream& o) { cw::write_summary_csv(o, cw::summarize(config, trials)); });
      if (!records_path.empty()) emit(records_path, [&](std::ostream& o) { cw::write_records_csv(o, trials); });
    } else if (*tail) {
      cw::TailConfig config;
      config.build = to_config(tail_opts);
      config.phase = phase == "all" ? cw::TailPhase::All : cw::TailPhase::LastDecile;
      config.max_ell = max_ell ? max_ell : std::numeric_limits<std::uint32_t>::max();
      config.min_hits = min_hits;
      const auto report = cw::run_tail_experiment(config);
      emit(tail_opts.out, [&](std::ostream& o) { cw::write_tail_csv(o, report); });
      if (report.loglog_slope) std::cerr << "loglog_slope=" << cw::format_double(*report.loglog_slope) << '\n';
      if (max_ell && report.partial) {
        std::cerr << "partial table: fewer than " << min_hits << " walks reach ell = " << report.rows.size() << '\n';
        return kInsufficient;
      }
      if (report.rows.empty()) return kInsufficient;
    } else if (*threshold) {
      if (threshold_opts.n.size() != 1) throw cw::InvalidArgument("threshold takes a single --n");
      const auto scan = cw::run_threshold_scan(threshold_opts.d, threshold_opts.n.front(), parse_grid(grid),
                                               threshold_opts.trials, threshold_opts.seed, threshold_opts.jobs);
      emit(threshold_opts.out, [&](std::ostream& o) { cw::write_threshold_csv(o, scan); });
      if (!scan.crossing) {
        std::cerr << "the grid does not bracket a 1/2 crossing\n";
        return kInsufficient;
      }
      std::cerr << "crossing=" << cw::format_double(*scan.crossing) << '\n';
    } else if (*compare) {
      if (compare_opts.n.size() != 1) throw cw::InvalidArgument("compare takes a single --n");
      const auto result = cw::run_strategy_comparison(
          compare_opts.d, compare_opts.load, compare_opts.n.front(), compare_opts.trials, compare_opts.seed,
          compare_opts.jobs, compare_opts.max_steps ? std::optional(compare_opts.max_steps) : std::nullopt);
      emit(compare_opts.out, [&](std::ostream& o) { cw::write_comparison_csv(o, result); });
    } else if (*analyze) {
      const auto& a = analyze_opts;
      if (a.n.size() != 1) throw cw::InvalidArgument("analyze takes a single --n");
      std::unique_ptr<cw::FilledTable> filled;
      std::unique_ptr<cw::BipartiteGraph> graph;
      if (!graph_path.empty()) {
        if (what == "bad-sets") throw cw::InvalidArgument("bad-sets needs a built table, not --graph");
        graph = std::make_unique<cw::BipartiteGraph>(load_graph(graph_path));
      } else {
        const auto config = to_config(a);
        filled = std::make_unique<cw::FilledTable>(
            cw::fill_table(config.d, config.c, a.n.front(), config.strategy,
                           cw::trial_seed(a.seed, a.n.front(), trial), config.max_steps));
        if (filled->trial.failed()) {
          std::cerr << "build stopped at insertion " << filled->trial.reassignments.size() - 1 << " ("
                    << cw::outcome_name(filled->trial.outcome) << "); analysing the partial table\n";
        }
        graph = std::make_unique<cw::BipartiteGraph>(cw::graph_of(filled->table));
      }

      cw::ExpansionParams params;
      params.samples_per_size = samples;
      params.sizes = sizes;
      params.seed = a.seed;
      const auto mode = [&](std::size_t limit) {
        return graph->n() <= limit && sizes.empty() ? cw::ScanMode::Exhaustive : cw::ScanMode::Sampled;
      };

      std::string text;
      if (what == "bad-sets") {
        cw::BadSetParams bp;
        bp.c0 = c0;
        bp.alpha = alpha;
        bp.i_max = i_max;
        text = cw::to_report(cw::compute_bad_sets(filled->table, bp));
      } else if (what == "expansion") {
        text = cw::to_report(cw::expansion_check(*graph, mode(cw::kExpansionExhaustiveLimit), params));
      } else if (what == "failing") {
        text = cw::to_report(cw::failing_set_scan(*graph, mode(cw::kFailingExhaustiveLimit), params));
      } else if (what == "cycles") {
        text = cw::to_report(cw::count_short_cycles(*graph, max_len, budget));
      } else if (what == "hall") {
        const auto hall_mode = graph->n() <= cw::kHallExhaustiveLimit ? cw::HallMode::Exhaustive : cw::HallMode::Heuristic;
        const auto matching = cw::maximum_matching(*graph);
        const auto witness = cw::hall_violation_search(*graph, hall_mode);
        std::ostringstream o;
        o << "n=" << graph->n() << "\nm=" << graph->m() << "\nmatching=" << matching.size
          << "\nperfect=" << (matching.is_perfect_on_left ? "true" : "false")
          << "\nwitness_size=" << (witness ? witness->size() : 0) << '\n';
        text = o.str();
      } else {
        const auto violations = cw::upper_neighbor_check(*graph, samples, a.seed);
        text = "samples=" + std::to_string(samples) + "\nviolations=" + std::to_string(violations.size()) + '\n';
      }
      emit(a.out, [&](std::ostream& o) { o << text; });
    } else if (*export_graph) {
      const auto config = to_config(export_opts);
      const std::size_t n = export_opts.n.front();
      const std::size_t m = cw::table_size(n, config.c);
      const cw::HashFamily family(config.d, m, cw::trial_seed(export_opts.seed, n, export_trial));
      std::vector<cw::ElementId> ids(cw::fill_count(m, config.c));
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
      const auto g = cw::build_graph(family, ids);
      emit(export_opts.out, [&](std::ostream& o) { cw::write_graph(o, g); });
    }
  } catch (const cw::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const cw::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const cw::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
