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

#ifndef SPIRP_SOLUTION_H_
#define SPIRP_SOLUTION_H_

#include <string>
#include <vector>

#include "spirp/common.h"
#include "spirp/instance.h"

namespace spirp {

// Equality constraints are checked to this absolute tolerance.
inline constexpr double kFeasibilityTolerance = 1e-6;

// Visit, collection, inventory and purchase plan without routes.
//
// Node-indexed grids have n+1 rows with row 0 reserved for the depot. The
// inventory grid has tau+1 columns; column 0 is the start of the cycle.
struct PartialSolution {
  Grid<int> visit;          // Y, (n+1) x tau
  std::vector<int> ever_visited;  // Z, n+1
  Grid<double> collected;   // W, (n+1) x tau
  Grid<double> inventory;   // I, (n+1) x (tau+1), includes the depot row
  std::vector<double> purchase;  // S, tau
  std::vector<double> vehicles;  // V, tau; empty when not produced by IRR

  static PartialSolution Empty(const Instance& instance);
  // Purchase-only plan: S[t] = r[t], nothing stored or collected.
  static PartialSolution PurchaseOnly(const Instance& instance);

  std::vector<int> VisitedNodes(int period) const;
  double CollectedInPeriod(int period) const;
};

struct Route {
  int period = 0;
  std::vector<int> nodes;  // 0, i1, ..., ik, 0
  double load = 0.0;

  int NumCollections() const {
    return nodes.size() >= 2 ? static_cast<int>(nodes.size()) - 2 : 0;
  }
};

struct CompleteSolution {
  PartialSolution partial;
  std::vector<std::vector<Route>> routes;  // indexed by period
};

struct CostBreakdown {
  double traveling = 0.0;
  double vehicles = 0.0;
  double holding = 0.0;
  double purchase = 0.0;
  double total = 0.0;
};

// Length of the closed tour under the instance's distance matrix.
double RouteLength(const std::vector<int>& nodes, const Instance& instance);

// c * distance + v * routes for a single period.
double PeriodRoutingCost(const std::vector<Route>& routes,
                         const Instance& instance);

// Objective of the full formulation. Throws when a route does not start and
// end at the depot.
CostBreakdown EvaluateCost(const CompleteSolution& solution,
                           const Instance& instance);

struct Violation {
  std::string constraint;  // e.g. "vehicle-capacity"
  std::string location;    // e.g. "period 2 route 1"
  double magnitude = 0.0;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  std::string ToString() const;
};

FeasibilityReport CheckFeasibility(const CompleteSolution& solution,
                                   const Instance& instance,
                                   double tolerance = kFeasibilityTolerance);

// Checks only the routing-free constraints on a partial plan.
FeasibilityReport CheckPartialFeasibility(
    const PartialSolution& partial, const Instance& instance,
    double tolerance = kFeasibilityTolerance);

// 100 * (upper - lower) / upper, clamped to 0 when the bounds coincide.
double OptimalityGap(double upper, double lower);

}  // namespace spirp

#endif  // SPIRP_SOLUTION_H_
