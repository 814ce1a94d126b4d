#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "cuckoowalk/experiment.hpp"
#include "cuckoowalk/report.hpp"

using namespace cuckoowalk;

namespace {

std::vector<std::string> keys(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    EXPECT_NE(eq, std::string::npos) << line;
    out.push_back(line.substr(0, eq));
  }
  return out;
}

}  // namespace

TEST(Report, BadSetsKeyValue) {
  const auto filled = fill_table(3, 0.8, 200, StrategyKind::BfsShortestPath, 4);
  BadSetParams p;
  p.i_max = 3;
  const auto report = compute_bad_sets(filled.table, p);
  const std::string a = to_report(report);
  EXPECT_EQ(a, to_report(compute_bad_sets(filled.table, p)));
  const auto k = keys(a);
  const std::vector<std::string> head{"d", "m", "n", "c0", "exponent", "alpha", "alpha_satisfied", "radius", "i_max", "g_size"};
  ASSERT_GE(k.size(), head.size());
  EXPECT_TRUE(std::equal(head.begin(), head.end(), k.begin()));
  EXPECT_EQ(k.back(), "b.3.size");
  EXPECT_NE(a.find("c0=10\n"), std::string::npos);
}

TEST(Report, ExpansionKeyValue) {
  std::vector<ElementId> ids(10);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  const auto g = build_graph(HashFamily(3, 8, 2), ids);
  ExpansionParams p;
  p.cutoff = 1e18;
  p.tau = 0.5;
  const auto cert = expansion_check(g, ScanMode::Exhaustive, p);
  const std::string text = to_report(cert);
  const auto k = keys(text);
  const std::vector<std::string> head{"d", "n", "mode", "variant", "a_d", "cutoff", "size_limit", "sets_examined",
                                      "is_proof", "violations"};
  EXPECT_TRUE(std::equal(head.begin(), head.end(), k.begin()));
  EXPECT_EQ(k.size(), head.size() + 3 * cert.violations.size());
  EXPECT_NE(text.find("mode=exhaustive\n"), std::string::npos);
}

TEST(Report, CyclesAndFailingSets) {
  std::vector<ElementId> ids(10);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  const auto g = build_graph(HashFamily(3, 10, 2), ids);
  const auto c = to_report(count_short_cycles(g, 6));
  EXPECT_EQ(keys(c).front(), "total");
  ExpansionParams p;
  p.cutoff = 1e18;
  const auto f = to_report(failing_set_scan(g, ScanMode::Exhaustive, p));
  EXPECT_EQ(keys(f).front(), "mode");
}
