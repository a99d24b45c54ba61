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

// Route improvement by a per-period capacitated VRP.
//
// The visited nodes and their collections stay fixed. Each period is solved as
// a one-commodity flow model where f[i][j] is the oil on board along arc
// (i, j), started from the constructed routes.

#ifndef SPIRP_MIP_SEARCH_H_
#define SPIRP_MIP_SEARCH_H_

#include <span>
#include <string>
#include <vector>

#include "spirp/common.h"
#include "spirp/instance.h"
#include "spirp/milp.h"
#include "spirp/solution.h"

namespace spirp {

struct CvrpInput {
  int period = 0;
  std::vector<int> nodes;     // visited nodes
  std::vector<double> loads;  // collection at each node, parallel to `nodes`
  int vehicle_floor = 0;      // minimum number of routes
};

// Local index 0 is the depot and local k >= 1 is nodes[k - 1].
struct CvrpModel {
  milp::MilpModel model;
  std::vector<int> global;  // local -> instance node
  Grid<int> arc;            // x, -1 on the diagonal
  Grid<int> flow;           // f, -1 on the diagonal
};

CvrpModel BuildCvrp(const CvrpInput& input, const Instance& instance);

// Assignment of x and f that reproduces `routes`.
std::vector<double> EncodeRoutes(const CvrpModel& cvrp, const CvrpInput& input,
                                 const std::vector<Route>& routes);

// Follows arcs out of the depot in increasing node order. Throws when a
// visited node is not reached or an arc is used twice.
std::vector<Route> DecodeRoutes(const CvrpModel& cvrp, const CvrpInput& input,
                                std::span<const double> values);

enum class VehicleFloor {
  kLiteral,  // number of routes in the starting solution
  kCeiling,  // ceil(total collected / Q)
};

struct MipSearchParams {
  milp::SolveParams solve;  // applied to every period
  VehicleFloor floor = VehicleFloor::kLiteral;
};

struct PeriodSearch {
  double before = 0.0;  // routing and vehicle cost
  double after = 0.0;
  bool solved = false;  // false for periods without visits
  milp::SolveStatus status = milp::SolveStatus::kOptimal;
  int64_t nodes = 0;
  std::string failure;  // set when the solve or decoding was abandoned
};

struct MipSearchResult {
  CompleteSolution solution;
  std::vector<PeriodSearch> periods;
};

// Re-optimizes the routes of every period. A period keeps its original routes
// unless the solver returns strictly cheaper ones.
MipSearchResult ImproveRoutes(const CompleteSolution& solution,
                              const Instance& instance,
                              const MipSearchParams& params);

}  // namespace spirp

#endif  // SPIRP_MIP_SEARCH_H_
