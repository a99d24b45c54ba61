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

// Problem data for the selective and periodic inventory routing problem.
//
// Node 0 is the depot, nodes 1..n are collection points. Periods are indexed
// 0..tau-1 in memory and in files.

#ifndef SPIRP_INSTANCE_H_
#define SPIRP_INSTANCE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spirp/common.h"

namespace spirp {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Instance {
  std::string name;
  int n = 0;
  int tau = 0;
  double capacity = 0.0;        // liters per vehicle
  double traveling_cost = 0.0;  // per distance unit
  double vehicle_cost = 0.0;    // per vehicle per period
  double holding_cost = 0.0;    // per liter per period at the depot
  double purchase_cost = 0.0;   // per liter of virgin oil
  std::vector<double> requirements;  // size tau
  Grid<double> accumulation;         // (n+1) x tau, row 0 is the depot (zero)
  Grid<double> distance;             // (n+1) x (n+1)
  std::optional<std::vector<Point>> coordinates;  // n+1 points when present

  double Accumulation(int node, int period) const {
    return accumulation(node, period);
  }
  double Distance(int from, int to) const { return distance(from, to); }

  bool operator==(const Instance&) const = default;
};

// Checks every structural and numeric invariant; throws Error with a field
// path on the first violation.
void ValidateInstance(const Instance& instance);

// Parses the JSON instance schema. Distances are computed from coordinates
// when no explicit matrix is present.
Instance ParseInstance(std::string_view text);
Instance LoadInstance(const std::string& path);

// Inverse of ParseInstance: ParseInstance(SerializeInstance(x)) == x.
std::string SerializeInstance(const Instance& instance);

// A[i] = sum over periods of a[i][t]; index 0 is the depot.
std::vector<double> TotalAccumulation(const Instance& instance);

// Euclidean distance matrix over the given points.
Grid<double> EuclideanDistances(const std::vector<Point>& points);

enum class RequirementLevel { kLow, kMedium, kHigh };

struct Recipe {
  // One of "benchmark1-Fio", "benchmark1-Dob", "benchmark2", "benchmark3".
  std::string id;
  int n = 0;  // 0 selects the recipe default (25 for benchmark1)
  // Benchmark 1 derives the daily requirement from the level; benchmarks 2
  // and 3 take it literally from `requirement`.
  std::optional<RequirementLevel> level;
  std::optional<double> requirement;
  double price = 0.0;
  double accumulation = 30.0;  // liters per node per day
};

Instance GenerateInstance(const Recipe& recipe, uint64_t seed);

// Name used for generated instances, e.g. "20n-270r-2.5p-s1".
std::string RecipeInstanceName(const Recipe& recipe, uint64_t seed);

RequirementLevel ParseRequirementLevel(std::string_view text);

}  // namespace spirp

#endif  // SPIRP_INSTANCE_H_
