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

#include "spirp/irr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <gtest/gtest.h>

#include "tiny.h"

namespace spirp {
namespace {

Instance Random(int n, int tau, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
  };
  Instance inst;
  inst.name = "random";
  inst.n = n;
  inst.tau = tau;
  inst.capacity = uniform(2, 6) * 50.0;
  inst.traveling_cost = uniform(1, 3);
  inst.vehicle_cost = uniform(0, 40);
  inst.holding_cost = uniform(0, 10) / 20.0;
  inst.purchase_cost = uniform(1, 6) / 2.0;
  inst.accumulation = Grid<double>(n + 1, tau, 0.0);
  for (int i = 1; i <= n; ++i) {
    for (int t = 0; t < tau; ++t) inst.accumulation(i, t) = uniform(0, 15) * 10.0;
  }
  for (int t = 0; t < tau; ++t) inst.requirements.push_back(uniform(0, 40) * 10.0);
  std::vector<Point> points;
  for (int i = 0; i <= n; ++i) {
    points.push_back({static_cast<double>(uniform(0, 60)), static_cast<double>(uniform(0, 60))});
  }
  inst.distance = EuclideanDistances(points);
  inst.coordinates = points;
  return inst;
}

// Relaxation optimum by enumerating every visit pattern. Collections follow
// from the pattern, the fleet is the smallest that fits, and the depot buys
// just in time with surplus carried forward around the cycle.
std::optional<double> EnumerateRelaxation(const Instance& inst) {
  const int n = inst.n;
  const int tau = inst.tau;
  const double q = inst.capacity;
  double out = std::numeric_limits<double>::infinity();
  double in = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    out = std::min(out, inst.distance(0, i));
    in = std::min(in, inst.distance(i, 0));
  }
  const double slack_price = inst.traveling_cost * (out + in);
  std::optional<double> best;
  for (int mask = 0; mask < (1 << (n * tau)); ++mask) {
    auto visited = [&](int i, int t) { return ((mask >> ((i - 1) * tau + t)) & 1) != 0; };
    std::vector<double> collected(tau, 0.0);
    double cost = 0.0;
    bool ok = true;
    for (int i = 1; i <= n && ok; ++i) {
      int last = -1;
      for (int t = 0; t < tau; ++t) {
        if (visited(i, t)) last = t;
      }
      if (last < 0) continue;
      for (int t = 0; t < tau; ++t) {
        if (!visited(i, t)) continue;
        double amount = 0.0;
        int s = t;
        do {
          amount += inst.accumulation(i, s);
          s = (s + tau - 1) % tau;
        } while (!visited(i, s));
        if (amount > q + 1e-9) ok = false;
        collected[t] += amount;
        cost += inst.traveling_cost * (inst.distance(0, i) + inst.distance(i, 0)) / q * amount;
      }
    }
    if (!ok) continue;
    double total_collected = 0.0;
    double total_required = 0.0;
    for (int t = 0; t < tau; ++t) {
      total_collected += collected[t];
      total_required += inst.requirements[t];
      const double vehicles = std::ceil(collected[t] / q - 1e-12);
      cost += inst.vehicle_cost * vehicles + slack_price * (vehicles - collected[t] / q);
    }
    if (total_collected > total_required + 1e-9) continue;
    double start = 0.0;
    std::vector<double> stock(tau);
    double bought = 0.0;
    for (int pass = 0; pass < 10; ++pass) {
      double level = start;
      bought = 0.0;
      for (int t = 0; t < tau; ++t) {
        level += collected[t] - inst.requirements[t];
        if (level < 0.0) {
          bought -= level;
          level = 0.0;
        }
        stock[t] = level;
      }
      if (std::abs(level - start) < 1e-9) break;
      start = level;
    }
    double held = 0.0;
    for (double s : stock) held += s;
    cost += inst.purchase_cost * bought + inst.holding_cost * held;
    if (!best || cost < *best) best = cost;
  }
  return best;
}

double Tolerance(double value) { return 1e-6 * std::max(1.0, std::abs(value)); }

class IrrOracleTest : public ::testing::TestWithParam<int> {};

TEST_P(IrrOracleTest, MatchesEnumeration) {
  const int tau = GetParam() % 2 == 0 ? 2 : 3;
  const int n = GetParam() % 3 == 0 ? 3 : 2;
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = Random(n, tau, seed * 31 + GetParam());
    const std::optional<double> expected = EnumerateRelaxation(inst);
    ASSERT_TRUE(expected.has_value());
    for (bool valid : {true, false}) {
      const IrrResult result = SolveIrr(inst, {}, 5.0, valid);
      ASSERT_EQ(result.status, milp::SolveStatus::kOptimal);
      ASSERT_FALSE(result.pool.empty());
      EXPECT_NEAR(result.pool.front().objective, *expected, Tolerance(*expected))
          << "seed " << seed;
      EXPECT_LE(result.lower_bound, result.pool.front().objective + 1e-9);
      EXPECT_NEAR(result.lower_bound, *expected, Tolerance(*expected));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, IrrOracleTest, ::testing::Range(0, 6));

TEST(IrrTest, PoolIsSortedFeasibleAndWithinDelta) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const IrrResult result = SolveIrr(inst, {}, 20.0);
    ASSERT_FALSE(result.pool.empty());
    const double best = result.pool.front().objective;
    for (size_t k = 0; k < result.pool.size(); ++k) {
      const PoolEntry& entry = result.pool[k];
      EXPECT_TRUE(CheckPartialFeasibility(entry.partial, inst).feasible());
      EXPECT_NEAR(IrrObjective(entry.partial, inst), entry.objective, Tolerance(entry.objective));
      EXPECT_LE(entry.objective, best * 1.2 + 1e-6);
      if (k > 0) EXPECT_LE(result.pool[k - 1].objective, entry.objective);
      for (size_t j = 0; j < k; ++j) {
        EXPECT_FALSE(result.pool[j].partial.visit == entry.partial.visit &&
                     result.pool[j].partial.collected == entry.partial.collected);
      }
    }
  }
}

TEST(IrrTest, EncodeDecodeRoundTrip) {
  Instance inst;
  std::optional<PartialSolution> plan;
  for (uint64_t seed = 1; !plan; ++seed) {
    inst = testing::Tiny(seed);
    for (int i = 1; i <= inst.n && !plan; ++i) {
      Grid<int> visit(inst.n + 1, inst.tau, 0);
      visit(i, 0) = 1;
      plan = CompleteVisitPattern(visit, inst);
    }
  }
  const IrrModel irr = BuildIrr(inst);
  ASSERT_EQ(plan->VisitedNodes(0).size(), 1u);
  const std::vector<double> x = EncodeIrr(irr, *plan, inst);
  EXPECT_LE(irr.model.MaxViolation(x, true).magnitude, 1e-7);
  EXPECT_NEAR(irr.model.EvaluateObjective(x), IrrObjective(*plan, inst), 1e-7);
  const PartialSolution back = DecodeIrr(irr, x, inst);
  EXPECT_EQ(back.visit, plan->visit);
  EXPECT_EQ(back.collected, plan->collected);
  EXPECT_EQ(back.purchase, plan->purchase);
}

TEST(IrrTest, OverfullPatternIsRejected) {
  Instance inst = Random(2, 2, 5);
  inst.requirements = {0.0, 0.0};
  inst.accumulation(1, 0) = 50.0;
  Grid<int> visit(3, 2, 0);
  visit(1, 1) = 1;
  EXPECT_FALSE(CompleteVisitPattern(visit, inst).has_value());
  visit(1, 1) = 0;
  EXPECT_TRUE(CompleteVisitPattern(visit, inst).has_value());
}

TEST(IrrTest, ImprovementNeverWorsens) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const Grid<int> empty(inst.n + 1, inst.tau, 0);
    const Grid<int> improved = ImproveVisitPattern(empty, inst);
    const std::optional<PartialSolution> before = CompleteVisitPattern(empty, inst);
    const std::optional<PartialSolution> after = CompleteVisitPattern(improved, inst);
    ASSERT_TRUE(before && after);
    EXPECT_LE(IrrObjective(*after, inst), IrrObjective(*before, inst) + 1e-9);
  }
}

TEST(IrrTest, SurrogateOfOnePeriod) {
  Instance inst = Random(2, 1, 3);
  inst.accumulation(1, 0) = inst.capacity * 1.5;
  inst.accumulation(2, 0) = 0.0;
  inst.requirements = {inst.capacity * 2};
  Grid<int> visit(3, 1, 0);
  visit(1, 0) = 1;
  // Collecting 1.5 Q in one visit is over capacity.
  EXPECT_FALSE(CompleteVisitPattern(visit, inst).has_value());
  inst.accumulation(1, 0) = inst.capacity / 2;
  const std::optional<PartialSolution> plan = CompleteVisitPattern(visit, inst);
  ASSERT_TRUE(plan.has_value());
  const double round_trip = inst.distance(0, 1) + inst.distance(1, 0);
  const double shortest = std::min(inst.distance(0, 1), inst.distance(0, 2)) +
                          std::min(inst.distance(1, 0), inst.distance(2, 0));
  const double expected = inst.traveling_cost * round_trip / 2 + inst.vehicle_cost +
                          inst.traveling_cost * shortest / 2;
  EXPECT_NEAR(RoutingSurrogate(*plan, inst, 0), expected, 1e-9);
}

TEST(IrrTest, NodeLimitKeepsWarmStart) {
  const Instance inst = testing::Tiny(3);
  milp::SolveParams params;
  params.node_limit = 0;
  const IrrResult result = SolveIrr(inst, params, 5.0);
  ASSERT_FALSE(result.pool.empty());
  EXPECT_LE(result.lower_bound, result.pool.front().objective + 1e-9);
}

}  // namespace
}  // namespace spirp
