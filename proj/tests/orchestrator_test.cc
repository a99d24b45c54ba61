// Copyright 2026 The SPIRP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spirp/orchestrator.h"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <gtest/gtest.h>

#include "spirp/report.h"
#include "tiny.h"

namespace spirp {
namespace {

RunParams Limited(Variant variant) {
  RunParams params;
  params.variant = variant;
  params.node_limit = 2000;
  params.mip_search_node_limit = 500;
  return params;
}

// Cheapest way to serve `nodes` with routes of capacity q: every set
// partition, each block toured in its best order.
double BestRouting(const std::vector<int>& nodes, const std::vector<double>& load,
                   const Instance& inst) {
  const int k = static_cast<int>(nodes.size());
  if (k == 0) return 0.0;
  std::vector<int> block(k, 0);
  double best = std::numeric_limits<double>::infinity();
  // Restricted growth strings enumerate set partitions.
  std::function<void(int, int)> assign = [&](int pos, int blocks) {
    if (pos == k) {
      double cost = 0.0;
      for (int b = 0; b < blocks; ++b) {
        std::vector<int> members;
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
          if (block[j] == b) {
            members.push_back(nodes[j]);
            total += load[j];
          }
        }
        if (total > inst.capacity + 1e-9) return;
        std::sort(members.begin(), members.end());
        double shortest = std::numeric_limits<double>::infinity();
        do {
          double length = inst.distance(0, members.front()) + inst.distance(members.back(), 0);
          for (size_t m = 1; m < members.size(); ++m) {
            length += inst.distance(members[m - 1], members[m]);
          }
          shortest = std::min(shortest, length);
        } while (std::next_permutation(members.begin(), members.end()));
        cost += inst.traveling_cost * shortest + inst.vehicle_cost;
      }
      best = std::min(best, cost);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      block[pos] = b;
      assign(pos + 1, std::max(blocks, b + 1));
    }
  };
  assign(0, 0);
  return best;
}

// Optimum of the full problem by enumerating visit patterns, routing each
// period exactly and buying just in time at the depot.
std::optional<double> EnumerateExact(const Instance& inst) {
  const int n = inst.n;
  const int tau = inst.tau;
  std::optional<double> best;
  for (int mask = 0; mask < (1 << (n * tau)); ++mask) {
    auto visited = [&](int i, int t) { return ((mask >> ((i - 1) * tau + t)) & 1) != 0; };
    Grid<double> amount(n + 1, tau, 0.0);
    for (int i = 1; i <= n; ++i) {
      for (int t = 0; t < tau; ++t) {
        if (!visited(i, t)) continue;
        int s = t;
        do {
          amount(i, t) += inst.accumulation(i, s);
          s = (s + tau - 1) % tau;
        } while (!visited(i, s));
      }
    }
    double cost = 0.0;
    double total_collected = 0.0;
    double total_required = 0.0;
    std::vector<double> collected(tau, 0.0);
    for (int t = 0; t < tau; ++t) {
      std::vector<int> nodes;
      std::vector<double> load;
      for (int i = 1; i <= n; ++i) {
        if (!visited(i, t)) continue;
        nodes.push_back(i);
        load.push_back(amount(i, t));
        collected[t] += amount(i, t);
      }
      cost += BestRouting(nodes, load, inst);
      total_collected += collected[t];
      total_required += inst.requirements[t];
    }
    if (!std::isfinite(cost) || total_collected > total_required + 1e-9) continue;
    double start = 0.0;
    double bought = 0.0;
    double held = 0.0;
    for (int pass = 0; pass < 10; ++pass) {
      double level = start;
      bought = 0.0;
      held = 0.0;
      for (int t = 0; t < tau; ++t) {
        level += collected[t] - inst.requirements[t];
        if (level < 0.0) {
          bought -= level;
          level = 0.0;
        }
        held += level;
      }
      if (std::abs(level - start) < 1e-9) break;
      start = level;
    }
    cost += inst.purchase_cost * bought + inst.holding_cost * held;
    if (!best || cost < *best) best = cost;
  }
  return best;
}

// Two nodes over two periods, with capacities that sometimes force split routes.
Instance SmallRandom(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
  };
  Instance inst;
  inst.name = "pair";
  inst.n = 2;
  inst.tau = 2;
  inst.capacity = uniform(1, 4) * 100.0;
  inst.traveling_cost = uniform(1, 3);
  inst.vehicle_cost = uniform(0, 30);
  inst.holding_cost = uniform(0, 4) / 10.0;
  inst.purchase_cost = uniform(2, 8);
  inst.accumulation = Grid<double>(3, 2, 0.0);
  for (int i = 1; i <= 2; ++i) {
    for (int t = 0; t < 2; ++t) inst.accumulation(i, t) = uniform(0, 10) * 10.0;
  }
  inst.requirements = {uniform(0, 30) * 10.0, uniform(0, 30) * 10.0};
  std::vector<Point> points;
  for (int i = 0; i <= 2; ++i) {
    points.push_back({static_cast<double>(uniform(0, 40)), static_cast<double>(uniform(0, 40))});
  }
  inst.distance = EuclideanDistances(points);
  inst.coordinates = points;
  return inst;
}

TEST(ExactTest, MatchesEnumeration) {
  int routed = 0;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = SmallRandom(seed);
    const std::optional<double> expected = EnumerateExact(inst);
    ASSERT_TRUE(expected.has_value());
    const IrExactResult exact = SolveIrExact(inst);
    ASSERT_EQ(exact.outcome.status, milp::SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(exact.outcome.objective, *expected, 1e-6 * std::max(1.0, *expected))
        << "seed " << seed;
    ASSERT_TRUE(exact.solution.has_value());
    EXPECT_TRUE(CheckFeasibility(*exact.solution, inst).feasible())
        << CheckFeasibility(*exact.solution, inst).ToString();
    EXPECT_NEAR(EvaluateCost(*exact.solution, inst).total, exact.outcome.objective, 1e-6);
    for (const auto& period : exact.solution->routes) routed += !period.empty();
  }
  EXPECT_GT(routed, 10);
}

TEST(ExactTest, BoundsSandwichOptimum) {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const RunReport report = spirp::Run(inst, Limited(Variant::kMhPlus));
    IrExactParams params;
    params.start = report.best;
    const IrExactResult exact = SolveIrExact(inst, params);
    ASSERT_EQ(exact.outcome.status, milp::SolveStatus::kOptimal);
    EXPECT_LE(report.lower_bound, exact.outcome.objective + 1e-6);
    EXPECT_LE(exact.outcome.objective, report.upper_bound + 1e-6);
  }
}

TEST(ExactTest, RefusesLargeInstances) {
  Recipe recipe;
  recipe.id = "benchmark1-Fio";
  recipe.level = RequirementLevel::kLow;
  recipe.price = 0.25;
  const Instance inst = GenerateInstance(recipe, 1);
  EXPECT_THROW(SolveIrExact(inst), Error);
}

TEST(RunTest, SolutionsAreFeasibleAndPriced) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const RunReport report = spirp::Run(inst, Limited(Variant::kMhPlus));
    EXPECT_TRUE(CheckFeasibility(report.best, inst).feasible());
    EXPECT_DOUBLE_EQ(report.upper_bound, EvaluateCost(report.best, inst).total);
    EXPECT_DOUBLE_EQ(report.cost.total, report.upper_bound);
    EXPECT_LE(report.upper_bound, report.constructed_upper_bound);
    EXPECT_GE(report.gap, 0.0);
    EXPECT_EQ(report.shape, ComputeShapeStats(report.best));
    EXPECT_GE(report.pool.size(), 1u);
    for (const PeriodSearch& period : report.mip_search) EXPECT_LE(period.after, period.before);
  }
}

TEST(RunTest, PlusNeverWorse) {
  for (uint64_t seed = 11; seed <= 20; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const RunReport mh = spirp::Run(inst, Limited(Variant::kMh));
    const RunReport plus = spirp::Run(inst, Limited(Variant::kMhPlus));
    EXPECT_LE(plus.upper_bound, mh.upper_bound);
    EXPECT_EQ(plus.constructed_upper_bound, mh.upper_bound);
    EXPECT_TRUE(mh.mip_search.empty());
  }
}

TEST(RunTest, ZeroAccumulationBuysEverything) {
  Instance inst = testing::Tiny(4);
  inst.accumulation = Grid<double>(inst.n + 1, inst.tau, 0.0);
  const RunReport report = spirp::Run(inst, Limited(Variant::kMhPlus));
  const double expected =
      inst.purchase_cost * std::accumulate(inst.requirements.begin(), inst.requirements.end(), 0.0);
  EXPECT_EQ(report.upper_bound, expected);
  EXPECT_EQ(report.lower_bound, expected);
  EXPECT_EQ(report.gap, 0.0);
}

TEST(RunTest, ZeroRequirementsCostNothing) {
  Instance inst = testing::Tiny(5);
  inst.requirements.assign(inst.tau, 0.0);
  const RunReport report = spirp::Run(inst, Limited(Variant::kMh));
  EXPECT_EQ(report.upper_bound, 0.0);
  EXPECT_EQ(report.gap, 0.0);
}

TEST(RunTest, Deterministic) {
  const Instance inst = testing::Tiny(9);
  RunParams params = Limited(Variant::kMhPlus);
  params.seed = 42;
  params.elite_k = 2;
  const std::string first = ReportToJson(spirp::Run(inst, params), false);
  const std::string second = ReportToJson(spirp::Run(inst, params), false);
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("\"seed\": 42"), std::string::npos);
}

TEST(ShapeTest, CountsVehiclesAndCollections) {
  CompleteSolution sol;
  sol.routes.resize(3);
  sol.routes[0].push_back(Route{0, {0, 1, 2, 0}, 0.0});
  sol.routes[0].push_back(Route{0, {0, 3, 0}, 0.0});
  sol.routes[2].push_back(Route{2, {0, 4, 5, 6, 0}, 0.0});
  const ShapeStats shape = ComputeShapeStats(sol);
  EXPECT_EQ(shape.veh_min, 0);
  EXPECT_DOUBLE_EQ(shape.veh_avg, 1.0);
  EXPECT_EQ(shape.veh_max, 2);
  EXPECT_EQ(shape.col_min, 1);
  EXPECT_DOUBLE_EQ(shape.col_avg, 2.0);
  EXPECT_EQ(shape.col_max, 3);

  CompleteSolution empty;
  empty.routes.resize(2);
  EXPECT_EQ(ComputeShapeStats(empty), ShapeStats{});
}

TEST(VariantTest, Names) {
  EXPECT_EQ(ParseVariant("mh+"), Variant::kMhPlus);
  EXPECT_EQ(ParseVariant("MH"), Variant::kMh);
  EXPECT_STREQ(VariantName(Variant::kMhPlus), "MH+");
  EXPECT_THROW(ParseVariant("mh++"), Error);
}

}  // namespace
}  // namespace spirp
