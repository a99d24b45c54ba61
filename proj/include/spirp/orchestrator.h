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

// End-to-end heuristic: relaxation pool, route construction, optional route
// improvement, bounds and statistics. Also hosts the exact formulation used
// to check the heuristic on small instances.

#ifndef SPIRP_ORCHESTRATOR_H_
#define SPIRP_ORCHESTRATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spirp/instance.h"
#include "spirp/milp.h"
#include "spirp/mip_search.h"
#include "spirp/routes.h"
#include "spirp/solution.h"

namespace spirp {

enum class Variant { kMh, kMhPlus };

const char* VariantName(Variant variant);  // "MH" or "MH+"
Variant ParseVariant(std::string_view text);  // accepts mh, mh+, MH, MH+

struct RunParams {
  Variant variant = Variant::kMh;
  double delta = 5.0;  // pool width, percent above the best relaxation plan
  int elite_k = 1;     // constructed solutions passed to route improvement
  double time_limit = 60.0;  // relaxation solve
  int64_t node_limit = -1;   // relaxation solve, negative is unlimited
  double mip_search_time_limit = 60.0;  // per period
  int64_t mip_search_node_limit = -1;   // per period
  double bin_packing_time_limit = 60.0;
  VehicleFloor vehicle_floor = VehicleFloor::kLiteral;
  bool valid_inequality = true;
  // Recorded in the report. Every phase is deterministic under node limits,
  // so nothing draws from it.
  uint64_t seed = 0;
};

struct ShapeStats {
  int veh_min = 0;
  double veh_avg = 0.0;
  int veh_max = 0;
  int col_min = 0;
  double col_avg = 0.0;
  int col_max = 0;

  bool operator==(const ShapeStats&) const = default;
};

// Vehicles per period over all periods (empty periods count as 0) and
// collections per route over all routes (all 0 without routes).
ShapeStats ComputeShapeStats(const CompleteSolution& solution);

struct PhaseTimes {
  double irr = 0.0;
  double construction = 0.0;
  double mip_search = 0.0;
  double total = 0.0;
};

// One pool member after route construction.
struct MemberRecord {
  double irr_objective = 0.0;
  double constructed_cost = 0.0;
  std::vector<PeriodConstruction> periods;
};

struct RunReport {
  std::string instance;
  RunParams params;
  CompleteSolution best;
  CostBreakdown cost;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;  // percent
  double constructed_upper_bound = 0.0;  // best cost before route improvement
  milp::SolveStatus irr_status = milp::SolveStatus::kOptimal;
  int64_t irr_nodes = 0;
  std::vector<MemberRecord> pool;
  PartitionStats stats;
  ShapeStats shape;
  std::vector<PeriodSearch> mip_search;  // periods of the returned solution
  PhaseTimes times;
};

RunReport Run(const Instance& instance, const RunParams& params);

struct IrExactParams {
  milp::SolveParams solve;
  // Warm start given as a routed plan; overrides solve.warm_start.
  std::optional<CompleteSolution> start;
  // Refuse instances with more than 8 nodes or 3 periods unless set.
  bool allow_large = false;
};

struct IrExactResult {
  milp::SolveOutcome outcome;
  std::optional<CompleteSolution> solution;  // decoded incumbent
};

// Builds and solves the complete formulation with routing variables.
IrExactResult SolveIrExact(const Instance& instance, const IrExactParams& params = {});

}  // namespace spirp

#endif  // SPIRP_ORCHESTRATOR_H_
