#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "cuckoowalk/error.hpp"
#include "cuckoowalk/table.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cuckoowalk;

namespace {

std::map<Slot, ElementId> snapshot(const CuckooTable& t) {
  std::map<Slot, ElementId> out;
  for (Slot y = 0; y < t.m(); ++y) {
    if (const auto o = t.occupant(y)) out[y] = *o;
  }
  return out;
}

const StrategyKind kAll[] = {StrategyKind::RandomWalkBacktracking, StrategyKind::RandomWalkNonBacktracking,
                             StrategyKind::BfsShortestPath};

}  // namespace

TEST(Table, Construction) {
  const CuckooTable t(10, 3, 1);
  EXPECT_EQ(t.m(), 10U);
  EXPECT_EQ(t.d(), 3U);
  EXPECT_EQ(t.occupancy(), 0U);
  EXPECT_THROW(CuckooTable(0, 3, 1), InvalidArgument);
  EXPECT_THROW(CuckooTable(10, 1, 1), InvalidArgument);
}

TEST(Table, LookupInsertDelete) {
  CuckooTable t(50, 3, 9);
  InsertionStrategy s(StrategyKind::RandomWalkBacktracking, 1);
  EXPECT_FALSE(t.lookup(7));
  ASSERT_TRUE(t.insert(7, s, 100).succeeded());
  const auto y = t.lookup(7);
  ASSERT_TRUE(y);
  EXPECT_TRUE(fixtures::has_slot(t.family(), 7, *y));
  EXPECT_EQ(t.occupancy(), 1U);

  EXPECT_FALSE(t.erase(8));
  EXPECT_EQ(t.occupancy(), 1U);
  const auto before = snapshot(t);
  ASSERT_TRUE(t.insert(8, s, 100).succeeded());
  EXPECT_TRUE(t.erase(8));
  EXPECT_EQ(snapshot(t).size(), before.size());
  EXPECT_FALSE(t.erase(8));
  EXPECT_TRUE(t.erase(7));
  EXPECT_FALSE(t.lookup(7));
  EXPECT_EQ(t.occupancy(), 0U);
}

TEST(Table, DeleteLeavesOtherSlotsAlone) {
  CuckooTable t(40, 3, 2);
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  for (ElementId x = 0; x < 30; ++x) ASSERT_TRUE(t.insert(x, s, 100).succeeded());
  auto before = snapshot(t);
  const Slot y = *t.lookup(11);
  ASSERT_TRUE(t.erase(11));
  before.erase(y);
  EXPECT_EQ(snapshot(t), before);
}

TEST(Table, RejectsDuplicatesAndReservedId) {
  CuckooTable t(10, 3, 1);
  InsertionStrategy s(StrategyKind::RandomWalkBacktracking, 1);
  ASSERT_TRUE(t.insert(1, s, 10).succeeded());
  EXPECT_THROW(t.insert(1, s, 10), InvalidArgument);
  EXPECT_THROW(t.insert(kNoElement, s, 10), InvalidArgument);
}

TEST(Table, InvariantsHoldUnderRandomOperations) {
  for (const StrategyKind kind : kAll) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CuckooTable t(64, 3, seed);
      InsertionStrategy s(kind, seed + 100);
      std::mt19937_64 rng(seed);
      std::set<ElementId> present;
      for (int op = 0; op < 300; ++op) {
        const ElementId x = rng() % 200;
        if (present.contains(x)) {
          EXPECT_TRUE(t.erase(x));
          present.erase(x);
        } else if (t.occupancy() < 50) {
          const auto trace = t.insert(x, s, 500);
          if (trace.succeeded()) {
            present.insert(x);
          } else {
            t.undo(trace);
          }
        }
        ASSERT_NO_THROW(t.check_invariants());
        ASSERT_EQ(t.occupancy(), present.size());
        ASSERT_LE(t.occupancy(), t.m());
      }
    }
  }
}

TEST(Table, TraceReplayReproducesState) {
  for (const StrategyKind kind : kAll) {
    CuckooTable t(200, 3, 5);
    InsertionStrategy s(kind, 6);
    for (ElementId x = 0; x < 180; ++x) {
      auto model = snapshot(t);
      const auto trace = t.insert(x, s, 10'000);
      ASSERT_TRUE(trace.succeeded());
      std::size_t displaced = 0;
      for (const WalkStep& step : trace.steps) {
        const auto it = model.find(step.destination);
        EXPECT_EQ(it != model.end(), step.evicted.has_value());
        if (step.evicted) {
          EXPECT_EQ(it->second, *step.evicted);
          ++displaced;
        }
        EXPECT_EQ(t.family().eval(step.mover, step.hash_index), step.destination);
        model[step.destination] = step.mover;
      }
      EXPECT_EQ(displaced, trace.reassignments);
      ASSERT_EQ(model, snapshot(t));
    }
  }
}

TEST(Table, NonBacktrackingNeverReusesVacatedIndex) {
  CuckooTable t(1000, 4, 3);
  InsertionStrategy s(StrategyKind::RandomWalkNonBacktracking, 4);
  std::size_t checked = 0;
  for (ElementId x = 0; x < 970; ++x) {
    const auto trace = t.insert(x, s, 100'000);
    ASSERT_TRUE(trace.succeeded());
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
      ASSERT_NE(trace.steps[i].hash_index, trace.steps[i - 1].evicted_hash_index);
      ASSERT_LT(trace.steps[i].hash_index, 4U);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000U);
}

TEST(Table, BacktrackingChoosesUniformlyAmongAllIndices) {
  CuckooTable t(1000, 4, 3);
  InsertionStrategy s(StrategyKind::RandomWalkBacktracking, 4);
  std::size_t back = 0;
  std::size_t later = 0;
  for (ElementId x = 0; x < 970; ++x) {
    const auto trace = t.insert(x, s, 100'000);
    ASSERT_TRUE(trace.succeeded());
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
      back += trace.steps[i].hash_index == trace.steps[i - 1].evicted_hash_index;
      ++later;
    }
  }
  ASSERT_GT(later, 2000U);
  const double p = static_cast<double>(back) / static_cast<double>(later);
  const double se = std::sqrt(0.25 * 0.75 / static_cast<double>(later));
  EXPECT_NEAR(p, 0.25, 4 * se);
}

TEST(Table, BanFirstChoiceRestrictsTheFirstStep) {
  CuckooTable t(8, 3, 1);
  InsertionStrategy s(StrategyKind::RandomWalkNonBacktracking, 2, true);
  EXPECT_TRUE(s.ban_first_choice());
  ASSERT_TRUE(t.insert(0, s, 10).succeeded());
}

TEST(Table, DeterministicTraces) {
  for (const StrategyKind kind : kAll) {
    CuckooTable a(300, 3, 77);
    CuckooTable b(300, 3, 77);
    InsertionStrategy sa(kind, 8);
    InsertionStrategy sb(kind, 8);
    for (ElementId x = 0; x < 270; ++x) ASSERT_EQ(a.insert(x, sa, 10'000), b.insert(x, sb, 10'000));
  }
}

TEST(Table, BfsEmptyTableDistanceZero) {
  CuckooTable t(10, 3, 1);
  for (ElementId x = 0; x < 5; ++x) EXPECT_EQ(t.bfs_distance_to_empty(x), 0U);
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  EXPECT_EQ(t.insert(0, s, 10).reassignments, 0U);
}

TEST(Table, FullTableHasNoAugmentingPath) {
  const std::uint64_t seed = fixtures::find_seed(4, 3, [](const HashFamily& f) {
    return fixtures::placed_table(4, 3, f.seed(), 4).has_value();
  });
  auto t = *fixtures::placed_table(4, 3, seed, 4);
  ASSERT_EQ(t.occupancy(), t.m());
  EXPECT_FALSE(t.bfs_distance_to_empty(100));
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  const auto before = snapshot(t);
  const auto trace = t.insert(100, s, 50);
  EXPECT_FALSE(trace.succeeded());
  EXPECT_TRUE(trace.steps.empty());
  EXPECT_EQ(snapshot(t), before);
}

// a, b on slots 0 and 1; c hashes onto all of {0, 1, 2}.
TEST(Table, ThreeSlotInstanceWithFreeHash) {
  const std::uint64_t seed = fixtures::find_seed(3, 3, [](const HashFamily& f) {
    const auto c = f.slots_of(2);
    return fixtures::has_slot(f, 0, 0) && fixtures::has_slot(f, 1, 1) &&
           std::set<Slot>(c.begin(), c.end()).size() == 3;
  });
  CuckooTable t(3, 3, seed);
  t.assign(0, *fixtures::index_to(t.family(), 0, 0));
  t.assign(1, *fixtures::index_to(t.family(), 1, 1));
  EXPECT_EQ(oracle::brute_force_distance(t, 2, 3), 0U);
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  const auto trace = t.insert(2, s, 10);
  ASSERT_TRUE(trace.succeeded());
  EXPECT_LE(trace.reassignments, 1U);
}

// c only reaches slots 0 and 1; a can move on to the free slot 2.
TEST(Table, ThreeSlotInstanceAtDistanceOne) {
  const std::uint64_t seed = fixtures::find_seed(3, 3, [](const HashFamily& f) {
    return fixtures::has_slot(f, 0, 0) && fixtures::has_slot(f, 0, 2) && fixtures::has_slot(f, 1, 1) &&
           !fixtures::has_slot(f, 1, 2) && fixtures::has_slot(f, 2, 0) && !fixtures::has_slot(f, 2, 2);
  });
  CuckooTable t(3, 3, seed);
  t.assign(0, *fixtures::index_to(t.family(), 0, 0));
  t.assign(1, *fixtures::index_to(t.family(), 1, 1));
  EXPECT_EQ(oracle::brute_force_distance(t, 2, 3), 1U);
  EXPECT_EQ(t.bfs_distance_to_empty(2), 1U);
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  const auto trace = t.insert(2, s, 10);
  ASSERT_TRUE(trace.succeeded());
  EXPECT_EQ(trace.reassignments, 1U);
  EXPECT_NO_THROW(t.check_invariants());
}

TEST(Table, BfsIsShortestAgainstExhaustiveSearch) {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const std::size_t m = 6 + seed % 7;
    const std::uint32_t d = 2 + static_cast<std::uint32_t>(seed % 3);
    const std::size_t placed = m - 1 - seed % 3;
    auto t = fixtures::placed_table(m, d, seed, placed);
    if (!t) continue;
    const ElementId x = 1000;
    const auto expected = oracle::brute_force_distance(*t, x, m);
    EXPECT_EQ(t->bfs_distance_to_empty(x), expected) << "seed " << seed;
    InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
    const auto trace = t->insert(x, s, 100);
    EXPECT_EQ(trace.succeeded(), expected.has_value());
    if (expected) EXPECT_EQ(trace.reassignments, *expected);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(Table, BfsTieBreakIsLexicographic) {
  // All hashes of x free: the first hash index wins.
  CuckooTable t(100, 4, 12);
  InsertionStrategy s(StrategyKind::BfsShortestPath, 0);
  const auto trace = t.insert(5, s, 10);
  ASSERT_EQ(trace.steps.size(), 1U);
  EXPECT_EQ(trace.steps[0].hash_index, 0U);
}

TEST(Table, StepLimitLeavesHomelessElementAndUndoRestores) {
  auto t = *fixtures::placed_table(6, 3, fixtures::find_seed(6, 3, [](const HashFamily& f) {
                                     return fixtures::placed_table(6, 3, f.seed(), 6).has_value();
                                   }),
                                   6);
  const auto before = snapshot(t);
  InsertionStrategy s(StrategyKind::RandomWalkBacktracking, 1);
  const auto trace = t.insert(99, s, 7);
  ASSERT_FALSE(trace.succeeded());
  EXPECT_EQ(trace.reassignments, 7U);
  ASSERT_TRUE(trace.homeless());
  EXPECT_FALSE(t.contains(*trace.homeless()));
  t.undo(trace);
  EXPECT_EQ(snapshot(t), before);
  EXPECT_FALSE(t.contains(99));
  EXPECT_NO_THROW(t.check_invariants());
}

TEST(Table, ExpectedBacktrackingRatio) {
  EXPECT_EQ(expected_backtracking_ratio(4), (Ratio{5, 3}));
  EXPECT_EQ(expected_backtracking_ratio(3), (Ratio{2, 1}));
  EXPECT_EQ(expected_backtracking_ratio(2), (Ratio{3, 1}));
  EXPECT_EQ(expected_backtracking_ratio(5), (Ratio{3, 2}));
  EXPECT_THROW(expected_backtracking_ratio(1), InvalidArgument);
}

TEST(Table, RandomWalkMatchesExactChainOnPinnedInstance) {
  // m = 4, n = 3 (two placed, one inserted), d = 3.
  const std::uint64_t seed = fixtures::find_seed(4, 3, [](const HashFamily& f) {
    auto t = fixtures::placed_table(4, 3, f.seed(), 2);
    if (!t) return false;
    try {
      return oracle::markov_expected_reassignments(*t, 2, false) > 0.3;
    } catch (const std::runtime_error&) {
      return false;
    }
  });
  const auto base = *fixtures::placed_table(4, 3, seed, 2);
  for (const bool nb : {false, true}) {
    const double exact = oracle::markov_expected_reassignments(base, 2, nb);
    InsertionStrategy s(nb ? StrategyKind::RandomWalkNonBacktracking : StrategyKind::RandomWalkBacktracking, 11);
    double sum = 0, sq = 0;
    constexpr int kTrials = 20'000;
    for (int i = 0; i < kTrials; ++i) {
      CuckooTable t = base;
      const auto trace = t.insert(2, s, 100'000);
      ASSERT_TRUE(trace.succeeded());
      sum += static_cast<double>(trace.reassignments);
      sq += static_cast<double>(trace.reassignments * trace.reassignments);
    }
    const double mean = sum / kTrials;
    const double se = std::sqrt((sq / kTrials - mean * mean) / kTrials);
    EXPECT_NEAR(mean, exact, 3 * se + 1e-12) << (nb ? "non-backtracking" : "backtracking");
  }
}
