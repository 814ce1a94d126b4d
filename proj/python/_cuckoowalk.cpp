#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cuckoowalk/analysis.hpp"
#include "cuckoowalk/error.hpp"
#include "cuckoowalk/experiment.hpp"
#include "cuckoowalk/graph.hpp"
#include "cuckoowalk/report.hpp"
#include "cuckoowalk/stirling.hpp"
#include "cuckoowalk/table.hpp"

namespace py = pybind11;
using namespace cuckoowalk;

namespace {

StrategyKind strategy_from(const std::string& name) {
  const auto kind = parse_strategy(name);
  if (!kind) throw InvalidArgument("unknown strategy: " + name);
  return *kind;
}

template <class Write, class Value>
std::string to_csv(Write write, const Value& value) {
  std::ostringstream out;
  write(out, value);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_cuckoowalk, m) {
  m.doc() = "d-ary cuckoo hashing with random-walk and BFS insertion";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<HashFamily>(m, "HashFamily")
      .def(py::init<std::uint32_t, std::size_t, std::uint64_t>(), py::arg("d"), py::arg("m"), py::arg("seed"))
      .def_property_readonly("d", &HashFamily::d)
      .def_property_readonly("m", &HashFamily::m)
      .def_property_readonly("seed", &HashFamily::seed)
      .def("eval", &HashFamily::eval, py::arg("x"), py::arg("k"))
      .def("hashes", [](const HashFamily& f, ElementId x) {
        std::vector<Slot> out;
        for (HashIndex k = 0; k < f.d(); ++k) out.push_back(f.eval(x, k));
        return out;
      });

  py::class_<InsertionStrategy>(m, "Strategy")
      .def(py::init([](const std::string& name, std::uint64_t seed, bool ban_first_choice) {
             return InsertionStrategy(strategy_from(name), seed, ban_first_choice);
           }),
           py::arg("name"), py::arg("seed") = 0, py::arg("ban_first_choice") = false)
      .def_property_readonly("name", [](const InsertionStrategy& s) { return std::string(strategy_name(s.kind())); });

  py::class_<WalkTrace>(m, "WalkTrace")
      .def_property_readonly("succeeded", &WalkTrace::succeeded)
      .def_readonly("reassignments", &WalkTrace::reassignments)
      .def_property_readonly("homeless", &WalkTrace::homeless);

  py::class_<CuckooTable>(m, "CuckooTable")
      .def(py::init<std::size_t, std::uint32_t, std::uint64_t>(), py::arg("m"), py::arg("d"), py::arg("seed"))
      .def_property_readonly("m", &CuckooTable::m)
      .def_property_readonly("d", &CuckooTable::d)
      .def_property_readonly("occupancy", &CuckooTable::occupancy)
      .def("insert", &CuckooTable::insert, py::arg("x"), py::arg("strategy"), py::arg("max_steps"))
      .def("erase", &CuckooTable::erase)
      .def("lookup", &CuckooTable::lookup)
      .def("__contains__", &CuckooTable::contains)
      .def("occupant", &CuckooTable::occupant)
      .def("elements", &CuckooTable::elements)
      .def("bfs_distance_to_empty", &CuckooTable::bfs_distance_to_empty)
      .def("check_invariants", &CuckooTable::check_invariants);

  m.def(
      "fill_table",
      [](std::uint32_t d, double c, std::size_t n, const std::string& strategy, std::uint64_t seed) {
        auto filled = fill_table(d, c, n, strategy_from(strategy), seed);
        return py::make_tuple(std::move(filled.table), filled.trial.failed(), filled.trial.reassignments);
      },
      py::arg("d"), py::arg("c"), py::arg("n"), py::arg("strategy") = "rw", py::arg("seed") = 1);

  m.def(
      "build_csv",
      [](std::uint32_t d, double c, const std::vector<std::size_t>& n, std::size_t trials, const std::string& strategy,
         std::uint64_t seed, std::size_t jobs) {
        ExperimentConfig config;
        config.d = d;
        config.c = c;
        config.n_values = n;
        config.trials = trials;
        config.strategy = strategy_from(strategy);
        config.master_seed = seed;
        config.jobs = jobs;
        return to_csv(write_summary_csv, summarize(config, run_build_experiment(config)));
      },
      py::arg("d"), py::arg("c"), py::arg("n"), py::arg("trials"), py::arg("strategy") = "rw", py::arg("seed") = 1,
      py::arg("jobs") = 1);

  m.def(
      "threshold_csv",
      [](std::uint32_t d, std::size_t n, const std::vector<double>& grid, std::size_t trials, std::uint64_t seed,
         std::size_t jobs) { return to_csv(write_threshold_csv, run_threshold_scan(d, n, grid, trials, seed, jobs)); },
      py::arg("d"), py::arg("n"), py::arg("grid"), py::arg("trials"), py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def(
      "compare_csv",
      [](std::uint32_t d, double c, std::size_t n, std::size_t trials, std::uint64_t seed, std::size_t jobs) {
        return to_csv(write_comparison_csv, run_strategy_comparison(d, c, n, trials, seed, jobs));
      },
      py::arg("d"), py::arg("c"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def(
      "maximum_matching_size",
      [](const HashFamily& family, const std::vector<ElementId>& ids) {
        return maximum_matching(build_graph(family, ids)).size;
      },
      py::arg("family"), py::arg("ids"));

  m.def(
      "bad_set_report",
      [](const CuckooTable& table, std::size_t i_max, double c0) {
        BadSetParams p;
        p.i_max = i_max;
        p.c0 = c0;
        return to_report(compute_bad_sets(table, p));
      },
      py::arg("table"), py::arg("i_max") = 8, py::arg("c0") = 10.0);

  m.def(
      "cycle_report", [](const CuckooTable& table, std::size_t max_len) {
        return to_report(count_short_cycles(graph_of(table), max_len));
      },
      py::arg("table"), py::arg("max_len") = 6);

  m.def("stirling_exact", [](std::size_t a, std::size_t b) { return stirling_exact(a, b).str(); },
        "b! S(a, b) as a decimal string");
  m.def("stirling_moser_wyman_log", [](std::size_t a, std::size_t b) { return stirling_moser_wyman(a, b).log_value; });
  m.def("saddle_root", &saddle_root);
  m.def("threshold", &threshold);
}
