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

// Route construction for a partial plan.
//
// Each period's visited nodes are split into vehicle loads by repeatedly
// taking a maximum-volume knapsack of the remaining nodes. If that uses more
// vehicles than ceil(total / Q), an exact bin-packing model warm-started from
// the knapsack split is solved. Every load is then sequenced with nearest
// neighbor and farthest insertion, keeping the shorter tour.

#ifndef SPIRP_ROUTES_H_
#define SPIRP_ROUTES_H_

#include <cstdint>
#include <vector>

#include "spirp/common.h"
#include "spirp/instance.h"
#include "spirp/milp.h"
#include "spirp/solution.h"

namespace spirp {

using Partition = std::vector<std::vector<int>>;

// Maximum-weight subset of `items` with total weight <= capacity. Weights are
// rounded up to whole units (values within 1e-6 of an integer are taken as
// that integer) against floor(capacity). Among optimal subsets the
// lexicographically smallest sorted index list is returned. `weights` is
// parallel to `items`.
std::vector<int> DpKnapsack(const std::vector<int>& items,
                            const std::vector<double>& weights, double capacity);

struct BinPackingResult {
  Partition partition;
  bool improved = false;  // fewer parts than the warm start
  milp::SolveStatus status = milp::SolveStatus::kOptimal;
};

// Minimum number of bins of size `capacity`; the model offers one bin per
// part of `warm` and starts from it.
BinPackingResult SolveBinPacking(const std::vector<int>& items,
                                 const std::vector<double>& weights, double capacity,
                                 const Partition& warm, const milp::SolveParams& params);

// Closed tours 0, ..., 0 over a nonempty subset.
std::vector<int> NearestNeighborTour(const std::vector<int>& subset,
                                     const Grid<double>& distance);
std::vector<int> FarthestInsertionTour(const std::vector<int>& subset,
                                       const Grid<double>& distance);

struct PartitionStats {
  int64_t knpart = 0;
  int64_t bppart = 0;
  int64_t bpimpr = 0;

  PartitionStats& operator+=(const PartitionStats& other) {
    knpart += other.knpart;
    bppart += other.bppart;
    bpimpr += other.bpimpr;
    return *this;
  }
  bool operator==(const PartitionStats&) const = default;
};

// What happened in one period, enough to recompute the statistics.
struct PeriodConstruction {
  int knapsack_parts = 0;
  int final_parts = 0;
  bool bin_packing = false;
};

struct ConstructionOptions {
  milp::SolveParams bin_packing;
};

struct ConstructionResult {
  CompleteSolution solution;
  PartitionStats stats;
  std::vector<int> vehicles;  // routes per period
  std::vector<PeriodConstruction> periods;
};

ConstructionResult ConstructRoutes(const PartialSolution& partial,
                                   const Instance& instance,
                                   const ConstructionOptions& options = {});

// Statistics implied by per-period records: a knapsack split counts when
// more than one part was needed, a bin-packing solve when it was invoked,
// and an improvement when it ended with fewer parts.
PartitionStats StatsFromRecords(const std::vector<PeriodConstruction>& periods);

}  // namespace spirp

#endif  // SPIRP_ROUTES_H_
