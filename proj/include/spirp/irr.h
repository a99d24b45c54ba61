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

// Relaxation without routing.
//
// Arc and flow variables are dropped and the routing cost of a period is
// replaced by a lower estimate: every liter collected at node i pays for a
// 1/Q share of the round trip depot-i-depot, and the unused part R[t] of the
// last vehicle pays for the shortest depot round trip. V[t] counts vehicles.

#ifndef SPIRP_IRR_H_
#define SPIRP_IRR_H_

#include <optional>
#include <span>
#include <vector>

#include "spirp/common.h"
#include "spirp/instance.h"
#include "spirp/milp.h"
#include "spirp/solution.h"

namespace spirp {

// Column indices of the relaxation variables. Inventory columns are indexed
// by period t = 1..tau (column 0 unused); I[i][0] is the same variable as
// I[i][tau].
struct IrrColumns {
  Grid<int> visit;       // Y, (n+1) x tau, row 0 unused
  std::vector<int> ever_visited;  // Z, n+1, entry 0 unused
  Grid<int> collected;   // W, (n+1) x tau, row 0 unused
  Grid<int> inventory;   // I, (n+1) x (tau+1), includes the depot
  std::vector<int> purchase;  // S
  std::vector<int> vehicles;  // V
  std::vector<int> slack;     // R
};

struct IrrModel {
  milp::MilpModel model;
  IrrColumns columns;
};

IrrModel BuildIrr(const Instance& instance, bool with_valid_inequality = true);

// Rounds binaries and integers and cleans values within 1e-7 of an integer.
PartialSolution DecodeIrr(const IrrModel& irr, std::span<const double> values,
                          const Instance& instance);

// Full assignment for a partial plan; V and R are derived from W.
std::vector<double> EncodeIrr(const IrrModel& irr, const PartialSolution& partial,
                              const Instance& instance);

// Cheapest plan with the given visits (rows 1..n of an (n+1) x tau grid):
// each visit collects everything accumulated since the previous one and the
// depot buys just in time. Returns nullopt when a single collection exceeds
// the vehicle capacity or the visits would collect more oil than the cycle
// requires.
std::optional<PartialSolution> CompleteVisitPattern(const Grid<int>& visit,
                                                    const Instance& instance);

// Relaxation objective of a complete partial plan, with V and R derived.
double IrrObjective(const PartialSolution& partial, const Instance& instance);

// First-improvement descent over visit patterns (toggle one visit, drop a
// node, shift a visit, hand a node's pattern to an unselected node), each
// candidate completed with CompleteVisitPattern.
Grid<int> ImproveVisitPattern(Grid<int> visit, const Instance& instance);

// Routing surrogate of one period for the collections in `partial`.
double RoutingSurrogate(const PartialSolution& partial, const Instance& instance,
                        int period);

struct PoolEntry {
  PartialSolution partial;
  double objective = 0.0;
};

struct IrrResult {
  std::vector<PoolEntry> pool;  // sorted by objective, discovery order on ties
  double lower_bound = 0.0;
  milp::SolveStatus status = milp::SolveStatus::kInfeasible;
  int64_t nodes = 0;
  double seconds = 0.0;
};

// Solves the relaxation and keeps every improving incumbent within delta
// percent of the best one, deduplicated on (Y, W). The purchase-only plan is
// used as warm start unless params carries one.
IrrResult SolveIrr(const Instance& instance, const milp::SolveParams& params,
                   double delta, bool with_valid_inequality = true);

}  // namespace spirp

#endif  // SPIRP_IRR_H_
