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

// Text formats for run results: report and solution JSON, and the benchmark
// CSV table.

#ifndef SPIRP_REPORT_H_
#define SPIRP_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spirp/instance.h"
#include "spirp/orchestrator.h"
#include "spirp/solution.h"

namespace spirp {

// Timings are the only nondeterministic fields; leaving them out makes the
// output byte-identical across repeated runs under node limits.
std::string ReportToJson(const RunReport& report, bool with_timings = true);

// Plan arrays, routes, claimed cost, reported statistics and the
// per-period construction records of every pool member.
std::string SolutionToJson(const RunReport& report);

struct SolutionFile {
  std::string instance;
  CompleteSolution solution;
  std::optional<CostBreakdown> claimed_cost;
  std::vector<MemberRecord> pool;
  std::optional<PartitionStats> stats;
  std::optional<ShapeStats> shape;
};

// Checks array shapes against the instance; throws Error(kParse) otherwise.
SolutionFile ParseSolution(std::string_view text, const Instance& instance);

struct ValidationResult {
  FeasibilityReport feasibility;
  CostBreakdown cost;  // recomputed
  std::vector<std::string> mismatches;  // claimed vs recomputed values
  bool ok() const { return feasibility.feasible() && mismatches.empty(); }
  std::string ToString() const;
};

// Feasibility, cost, and agreement of the claimed cost and statistics with
// values recomputed from the plan and construction records.
ValidationResult ValidateSolution(const SolutionFile& file, const Instance& instance);

// Columns: instance, variant, z, time, gap, lower_bound, knpart, bppart,
// bpimpr, veh_min, veh_avg, veh_max, col_min, col_avg, col_max.
std::string BenchCsvHeader();
std::string BenchCsvRow(const RunReport& report);

// Header, one row per report in the given order, and an "Averages" row. With
// a reference (instance name -> value), a final "<ref(%)" row gives the share
// of listed instances whose z is strictly below the reference.
std::string BenchCsv(const std::vector<const RunReport*>& reports,
                     const std::map<std::string, double>* reference = nullptr);

// Reads "instance,value" lines; a header line is skipped when its second
// field is not numeric.
std::map<std::string, double> ParseReferenceCsv(std::string_view text);

}  // namespace spirp

#endif  // SPIRP_REPORT_H_
