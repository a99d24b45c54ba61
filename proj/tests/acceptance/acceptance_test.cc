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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Oracles below are written against the
// problem definition and share no code with the solver beyond the data types.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "json.hpp"
#include "spirp/instance.h"
#include "spirp/irr.h"
#include "spirp/mip_search.h"
#include "spirp/orchestrator.h"
#include "spirp/report.h"
#include "spirp/routes.h"
#include "spirp/solution.h"
#include "../tiny.h"

namespace {

using namespace spirp;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kTinyCount = 50;
constexpr double kBoundTolerance = 1e-6;
constexpr double kEqualityTolerance = 1e-6;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void Require(bool condition, const std::string& note) {
    if (!condition) {
      pass = false;
      if (notes.size() < 5) notes.push_back(note);
    }
  }
};

// Every run made by the suite, kept for the feasibility and statistics checks.
struct Record {
  Instance instance;
  RunReport report;
};
std::deque<Record> g_records;

const RunReport& Keep(const Instance& inst, RunReport report) {
  g_records.push_back({inst, std::move(report)});
  return g_records.back().report;
}

RunParams NodeLimited(Variant variant) {
  RunParams params;
  params.variant = variant;
  params.node_limit = 2000;
  params.mip_search_node_limit = 500;
  return params;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

void Print(int id, const char* title, const Verdict& verdict, const std::string& summary) {
  std::printf("%s  criterion %d: %s (%s)\n", verdict.pass ? "PASS" : "FAIL", id, title,
              summary.c_str());
  for (const std::string& note : verdict.notes) std::printf("      %s\n", note.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// Brute-force kernels.

std::vector<int> SubsetKnapsack(const std::vector<int>& items, const std::vector<double>& weights,
                                double capacity) {
  const int k = static_cast<int>(items.size());
  double best = -1.0;
  std::vector<int> chosen;
  for (int mask = 0; mask < (1 << k); ++mask) {
    double total = 0.0;
    std::vector<int> subset;
    for (int j = 0; j < k; ++j) {
      if (mask >> j & 1) {
        total += weights[j];
        subset.push_back(items[j]);
      }
    }
    if (total > capacity) continue;
    std::sort(subset.begin(), subset.end());
    if (total > best || (total == best && subset < chosen)) {
      best = total;
      chosen = subset;
    }
  }
  return chosen;
}

// Calls `visit` with a block label per element for every set partition.
void ForEachPartition(int k, const std::function<void(const std::vector<int>&, int)>& visit) {
  std::vector<int> label(k, 0);
  std::function<void(int, int)> assign = [&](int j, int used) {
    if (j == k) {
      visit(label, used);
      return;
    }
    for (int b = 0; b <= used; ++b) {
      label[j] = b;
      assign(j + 1, std::max(used, b + 1));
    }
  };
  assign(0, 0);
}

int PartitionBins(const std::vector<double>& weights, double capacity) {
  int best = std::numeric_limits<int>::max();
  ForEachPartition(static_cast<int>(weights.size()), [&](const std::vector<int>& label, int used) {
    std::vector<double> load(used, 0.0);
    for (size_t j = 0; j < weights.size(); ++j) load[label[j]] += weights[j];
    for (double l : load) {
      if (l > capacity) return;
    }
    best = std::min(best, used);
  });
  return best;
}

double TourLength(std::vector<int> part, const Instance& inst) {
  std::sort(part.begin(), part.end());
  double best = std::numeric_limits<double>::infinity();
  do {
    double length = inst.distance(0, part.front()) + inst.distance(part.back(), 0);
    for (size_t m = 1; m < part.size(); ++m) length += inst.distance(part[m - 1], part[m]);
    best = std::min(best, length);
  } while (std::next_permutation(part.begin(), part.end()));
  return best;
}

double PartitionCvrp(const std::vector<int>& nodes, const std::vector<double>& loads, int floor,
                     const Instance& inst) {
  double best = std::numeric_limits<double>::infinity();
  ForEachPartition(static_cast<int>(nodes.size()), [&](const std::vector<int>& label, int used) {
    if (used < floor) return;
    double cost = 0.0;
    for (int b = 0; b < used; ++b) {
      std::vector<int> part;
      double load = 0.0;
      for (size_t j = 0; j < nodes.size(); ++j) {
        if (label[j] == b) {
          part.push_back(nodes[j]);
          load += loads[j];
        }
      }
      if (load > inst.capacity) return;
      cost += inst.traveling_cost * TourLength(part, inst) + inst.vehicle_cost;
    }
    best = std::min(best, cost);
  });
  return best;
}

// ---------------------------------------------------------------------------
// Instances.

Instance Benchmark(const std::string& id, RequirementLevel level, double price, double acc) {
  Recipe recipe;
  recipe.id = id;
  recipe.level = level;
  recipe.price = price;
  recipe.accumulation = acc;
  return GenerateInstance(recipe, 1);
}

std::vector<Instance> BenchmarkSet() {
  using L = RequirementLevel;
  return {
      Benchmark("benchmark1-Fio", L::kLow, 0.25, 30),
      Benchmark("benchmark1-Fio", L::kMedium, 0.5, 30),
      Benchmark("benchmark1-Fio", L::kHigh, 1.25, 30),
      Benchmark("benchmark1-Dob", L::kLow, 0.25, 30),
      Benchmark("benchmark1-Dob", L::kMedium, 0.5, 30),
      Benchmark("benchmark1-Dob", L::kHigh, 1.25, 30),
      Benchmark("benchmark1-Fio", L::kLow, 0.25, 60),
      Benchmark("benchmark1-Fio", L::kMedium, 0.5, 60),
      Benchmark("benchmark1-Fio", L::kHigh, 1.25, 60),
      Benchmark("benchmark1-Dob", L::kLow, 0.25, 60),
  };
}

// A single-period instance whose plan visits every node once.
Instance OnePeriod(int n, double capacity, std::mt19937_64& rng, PartialSolution* plan) {
  Instance inst;
  inst.name = "cvrp";
  inst.n = n;
  inst.tau = 1;
  inst.capacity = capacity;
  inst.traveling_cost = 1.0 + static_cast<double>(rng() % 3);
  inst.vehicle_cost = static_cast<double>(rng() % 40);
  inst.holding_cost = 0.0;
  inst.purchase_cost = 1.0;
  inst.accumulation = Grid<double>(n + 1, 1, 0.0);
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    inst.accumulation(i, 0) = 10.0 * static_cast<double>(1 + rng() % static_cast<uint64_t>(capacity / 10));
    total += inst.accumulation(i, 0);
  }
  inst.requirements = {total};
  std::vector<Point> points;
  for (int i = 0; i <= n; ++i) {
    points.push_back({static_cast<double>(rng() % 100), static_cast<double>(rng() % 100)});
  }
  inst.distance = EuclideanDistances(points);
  inst.coordinates = points;
  *plan = PartialSolution::Empty(inst);
  for (int i = 1; i <= n; ++i) {
    plan->visit(i, 0) = 1;
    plan->ever_visited[i] = 1;
    plan->collected(i, 0) = inst.accumulation(i, 0);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Criteria.

Verdict LowerBoundValidity(std::string* summary) {
  Verdict v;
  const Clock::time_point start = Clock::now();
  double worst = 0.0;
  for (int seed = 1; seed <= kTinyCount; ++seed) {
    const Instance inst = testing::Tiny(seed);
    RunParams params;
    params.variant = Variant::kMhPlus;
    const RunReport& report = Keep(inst, Run(inst, params));
    IrExactParams exact_params;
    exact_params.start = report.best;
    const IrExactResult exact = SolveIrExact(inst, exact_params);
    v.Require(exact.outcome.status == milp::SolveStatus::kOptimal,
              fmt::format("seed {}: exact solve ended {}", seed,
                          milp::SolveStatusName(exact.outcome.status)));
    const double z = exact.outcome.objective;
    v.Require(report.lower_bound <= z + kBoundTolerance,
              fmt::format("seed {}: lower bound {} above optimum {}", seed, report.lower_bound, z));
    v.Require(z <= report.upper_bound + kBoundTolerance,
              fmt::format("seed {}: optimum {} above heuristic {}", seed, z, report.upper_bound));
    if (report.upper_bound > 0) worst = std::max(worst, (report.upper_bound - z) / report.upper_bound);
  }
  *summary = fmt::format("{} instances, worst heuristic excess {:.2f}%, {:.0f}s", kTinyCount,
                         100.0 * worst, Seconds(start));
  return v;
}

Verdict KernelOracles(std::string* summary) {
  Verdict v;
  std::mt19937_64 rng(2026);
  int knapsacks = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int k = static_cast<int>(rng() % 16);
    const double capacity = static_cast<double>(50 + rng() % 500);
    std::vector<int> items;
    std::vector<double> weights;
    for (int j = 0; j < k; ++j) {
      items.push_back(static_cast<int>(3 * j + rng() % 3));
      weights.push_back(static_cast<double>(1 + rng() % 200));
    }
    std::shuffle(items.begin(), items.end(), rng);
    v.Require(DpKnapsack(items, weights, capacity) == SubsetKnapsack(items, weights, capacity),
              fmt::format("knapsack trial {} differs", trial));
    ++knapsacks;
  }
  int packings = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 8);
    const double capacity = 100.0;
    std::vector<int> items;
    std::vector<double> weights;
    Partition warm;
    double room = 0.0;
    for (int j = 0; j < k; ++j) {
      items.push_back(j + 1);
      weights.push_back(static_cast<double>(10 + rng() % 81));
      if (warm.empty() || weights.back() > room) {
        warm.push_back({});
        room = capacity;
      }
      warm.back().push_back(j + 1);
      room -= weights.back();
    }
    const BinPackingResult result = SolveBinPacking(items, weights, capacity, warm, {});
    const int expected = PartitionBins(weights, capacity);
    v.Require(static_cast<int>(result.partition.size()) == expected,
              fmt::format("bin packing trial {}: {} bins, optimum {}", trial,
                          result.partition.size(), expected));
    std::vector<int> seen;
    for (const std::vector<int>& bin : result.partition) {
      double load = 0.0;
      for (int item : bin) {
        load += weights[item - 1];
        seen.push_back(item);
      }
      v.Require(load <= capacity, fmt::format("bin packing trial {} overfills a bin", trial));
    }
    std::sort(seen.begin(), seen.end());
    v.Require(seen == items, fmt::format("bin packing trial {} loses items", trial));
    ++packings;
  }
  int searches = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    PartialSolution plan;
    const Instance inst = OnePeriod(n, 100.0 * static_cast<double>(2 + rng() % 4), rng, &plan);
    const CompleteSolution warm = ConstructRoutes(plan, inst).solution;
    std::vector<int> nodes;
    std::vector<double> loads;
    for (int i = 1; i <= n; ++i) {
      nodes.push_back(i);
      loads.push_back(plan.collected(i, 0));
    }
    for (VehicleFloor floor : {VehicleFloor::kCeiling, VehicleFloor::kLiteral}) {
      MipSearchParams params;
      params.floor = floor;
      const MipSearchResult result = ImproveRoutes(warm, inst, params);
      const int routes = floor == VehicleFloor::kLiteral ? static_cast<int>(warm.routes[0].size()) : 0;
      const double expected = PartitionCvrp(nodes, loads, routes, inst);
      const double got = PeriodRoutingCost(result.solution.routes[0], inst);
      v.Require(std::abs(got - expected) <= 1e-6 * std::max(1.0, expected),
                fmt::format("route search trial {} ({}): {} vs optimum {}", trial,
                            floor == VehicleFloor::kLiteral ? "literal" : "ceiling", got, expected));
    }
    ++searches;
  }
  *summary = fmt::format("{} knapsacks, {} bin packings, {} route searches", knapsacks, packings,
                         searches);
  return v;
}

// Runs MH and MH+ on tiny instances under node limits.
Verdict Dominance(const std::vector<const RunReport*>& timed, std::string* summary) {
  Verdict v;
  int pairs = 0;
  int periods = 0;
  auto check_periods = [&](const RunReport& report, const std::string& name) {
    for (size_t t = 0; t < report.mip_search.size(); ++t) {
      const PeriodSearch& s = report.mip_search[t];
      v.Require(s.after <= s.before,
                fmt::format("{} period {}: route search raised cost {} -> {}", name, t, s.before,
                            s.after));
      ++periods;
    }
  };
  for (int seed = 1; seed <= kTinyCount; ++seed) {
    const Instance inst = testing::Tiny(seed);
    const RunReport& mh = Keep(inst, Run(inst, NodeLimited(Variant::kMh)));
    const RunReport& plus = Keep(inst, Run(inst, NodeLimited(Variant::kMhPlus)));
    v.Require(plus.upper_bound <= mh.upper_bound,
              fmt::format("{}: MH+ {} above MH {}", inst.name, plus.upper_bound, mh.upper_bound));
    check_periods(plus, inst.name);
    ++pairs;
  }
  // Time-limited runs: MH is the constructed solution of the same run.
  for (const RunReport* report : timed) {
    v.Require(report->upper_bound <= report->constructed_upper_bound,
              fmt::format("{}: MH+ {} above MH {}", report->instance, report->upper_bound,
                          report->constructed_upper_bound));
    check_periods(*report, report->instance);
    ++pairs;
  }
  *summary = fmt::format("{} MH/MH+ pairs, {} improved periods checked", pairs, periods);
  return v;
}

Verdict GapMagnitude(std::vector<const RunReport*>* out, std::string* summary) {
  Verdict v;
  double sum = 0.0;
  double worst_gap = 0.0;
  double worst_time = 0.0;
  const std::vector<Instance> set = BenchmarkSet();
  for (const Instance& inst : set) {
    RunParams params;
    params.variant = Variant::kMhPlus;
    params.time_limit = 30.0;
    params.mip_search_time_limit = 20.0;
    const Clock::time_point start = Clock::now();
    const RunReport& report = Keep(inst, Run(inst, params));
    const double seconds = Seconds(start);
    out->push_back(&report);
    std::printf("      %-24s z=%.2f lower=%.2f gap=%.2f%% %.1fs\n", inst.name.c_str(),
                report.upper_bound, report.lower_bound, report.gap, seconds);
    std::fflush(stdout);
    v.Require(report.gap <= 15.0, fmt::format("{}: gap {:.2f}%", inst.name, report.gap));
    v.Require(seconds <= 300.0, fmt::format("{}: {:.0f}s", inst.name, seconds));
    sum += report.gap;
    worst_gap = std::max(worst_gap, report.gap);
    worst_time = std::max(worst_time, seconds);
  }
  const double average = sum / static_cast<double>(set.size());
  v.Require(average <= 10.0, fmt::format("average gap {:.2f}%", average));
  *summary = fmt::format("average gap {:.2f}%, worst {:.2f}%, slowest run {:.0f}s", average,
                         worst_gap, worst_time);
  return v;
}

// Independent checks of cyclic inventories and full collection on the plan
// as written to the solution file, on top of the library checker.
Verdict Feasibility(std::string* summary) {
  Verdict v;
  for (const Record& record : g_records) {
    const Instance& inst = record.instance;
    const FeasibilityReport report = CheckFeasibility(record.report.best, inst, kEqualityTolerance);
    v.Require(report.feasible(), inst.name + ": " + report.ToString());
    const Json sol = Json::parse(SolutionToJson(record.report));
    const Json& inv = sol["inventory"];
    const Json& visit = sol["visit"];
    const Json& collected = sol["collected"];
    for (int i = 0; i <= inst.n; ++i) {
      v.Require(std::abs(inv[i][0].get<double>() - inv[i][inst.tau].get<double>()) <= kEqualityTolerance,
                fmt::format("{}: node {} inventory is not cyclic", inst.name, i));
      if (i == 0 || sol["ever_visited"][i].get<int>() == 0) continue;
      double since = 0.0;
      // Two passes so the first visit sees what accumulated at the end of the cycle.
      for (int pass = 0; pass < 2; ++pass) {
        for (int t = 0; t < inst.tau; ++t) {
          since += inst.accumulation(i, t);
          if (visit[i][t].get<int>() != 1) continue;
          if (pass == 1) {
            v.Require(std::abs(collected[i][t].get<double>() - since) <= kEqualityTolerance,
                      fmt::format("{}: node {} period {} collects {} of {}", inst.name, i, t,
                                  collected[i][t].get<double>(), since));
            v.Require(inv[i][t + 1].get<double>() <= kEqualityTolerance,
                      fmt::format("{}: node {} not emptied in period {}", inst.name, i, t));
          }
          since = 0.0;
        }
      }
    }
  }
  *summary = fmt::format("{} solutions", g_records.size());
  return v;
}

Verdict StatisticsConsistency(std::string* summary) {
  Verdict v;
  for (const Record& record : g_records) {
    const std::string name = record.instance.name;
    const Json sol = Json::parse(SolutionToJson(record.report));
    const Json rep = Json::parse(ReportToJson(record.report, false));
    int64_t knpart = 0;
    int64_t bppart = 0;
    int64_t bpimpr = 0;
    for (const Json& member : sol["construction"]) {
      for (const Json& period : member["periods"]) {
        const int knapsack = period["knapsack_parts"].get<int>();
        const int final_parts = period["final_parts"].get<int>();
        if (knapsack > 1) ++knpart;
        if (period["bin_packing"].get<bool>()) ++bppart;
        if (final_parts < knapsack) ++bpimpr;
      }
    }
    std::vector<int> vehicles;
    std::vector<int> collections;
    for (const Json& period : sol["routes"]) {
      vehicles.push_back(static_cast<int>(period.size()));
      for (const Json& route : period) {
        collections.push_back(static_cast<int>(route["nodes"].size()) - 2);
      }
    }
    auto average = [](const std::vector<int>& xs) {
      if (xs.empty()) return 0.0;
      double total = 0.0;
      for (int x : xs) total += x;
      return total / static_cast<double>(xs.size());
    };
    auto low = [](const std::vector<int>& xs) {
      return xs.empty() ? 0 : *std::min_element(xs.begin(), xs.end());
    };
    auto high = [](const std::vector<int>& xs) {
      return xs.empty() ? 0 : *std::max_element(xs.begin(), xs.end());
    };
    const Json expected_stats = {{"knpart", knpart}, {"bppart", bppart}, {"bpimpr", bpimpr}};
    const Json expected_shape = {{"veh_min", low(vehicles)},       {"veh_avg", average(vehicles)},
                                 {"veh_max", high(vehicles)},      {"col_min", low(collections)},
                                 {"col_avg", average(collections)}, {"col_max", high(collections)}};
    v.Require(rep["stats"] == expected_stats,
              fmt::format("{}: stats {} recomputed {}", name, rep["stats"].dump(), expected_stats.dump()));
    v.Require(rep["shape"] == expected_shape,
              fmt::format("{}: shape {} recomputed {}", name, rep["shape"].dump(), expected_shape.dump()));
    v.Require(sol["stats"] == rep["stats"] && sol["shape"] == rep["shape"],
              name + ": solution and report disagree");
  }
  *summary = fmt::format("{} runs", g_records.size());
  return v;
}

Verdict ClosedForms(std::string* summary) {
  Verdict v;
  std::vector<Instance> cases;
  for (int seed = 1; seed <= 10; ++seed) cases.push_back(testing::Tiny(seed));
  cases.push_back(Benchmark("benchmark1-Fio", RequirementLevel::kMedium, 0.5, 30));
  cases.push_back(Benchmark("benchmark1-Dob", RequirementLevel::kHigh, 1.25, 60));
  int runs = 0;
  for (const Instance& base : cases) {
    for (Variant variant : {Variant::kMh, Variant::kMhPlus}) {
      Instance dry = base;
      dry.name += "-dry";
      dry.accumulation = Grid<double>(dry.n + 1, dry.tau, 0.0);
      const RunReport& a = Keep(dry, Run(dry, NodeLimited(variant)));
      double required = 0.0;
      for (double r : dry.requirements) required += r;
      const double expected = dry.purchase_cost * required;
      v.Require(a.upper_bound == expected && a.lower_bound == expected && a.gap == 0.0,
                fmt::format("{}: upper {} lower {} gap {} expected {}", dry.name, a.upper_bound,
                            a.lower_bound, a.gap, expected));
      Instance idle = base;
      idle.name += "-idle";
      idle.requirements.assign(idle.tau, 0.0);
      const RunReport& b = Keep(idle, Run(idle, NodeLimited(variant)));
      v.Require(b.upper_bound == 0.0, fmt::format("{}: upper {}", idle.name, b.upper_bound));
      runs += 2;
    }
  }
  *summary = fmt::format("{} runs", runs);
  return v;
}

Verdict Determinism(std::string* summary) {
  Verdict v;
  std::vector<Instance> cases;
  for (int seed = 1; seed <= 10; ++seed) cases.push_back(testing::Tiny(seed));
  cases.push_back(Benchmark("benchmark1-Fio", RequirementLevel::kHigh, 1.25, 30));
  cases.push_back(Benchmark("benchmark1-Dob", RequirementLevel::kMedium, 0.5, 60));
  int pairs = 0;
  for (const Instance& inst : cases) {
    RunParams params = NodeLimited(Variant::kMhPlus);
    params.seed = 7;
    params.elite_k = 2;
    if (inst.n > 5) {
      params.node_limit = 300;
      params.mip_search_node_limit = 100;
    }
    const RunReport& first = Keep(inst, Run(inst, params));
    const RunReport& second = Keep(inst, Run(inst, params));
    v.Require(ReportToJson(first, false) == ReportToJson(second, false),
              inst.name + ": reports differ");
    v.Require(SolutionToJson(first) == SolutionToJson(second), inst.name + ": solutions differ");
    ++pairs;
  }
  *summary = fmt::format("{} repeated runs under node limits", pairs);
  return v;
}

}  // namespace

int main() {
  struct Line {
    const char* title;
    Verdict verdict;
    std::string summary;
  };
  std::vector<Line> lines(8);
  auto evaluate = [&](int id, const char* title, const std::function<Verdict(std::string*)>& check) {
    lines[id - 1].title = title;
    lines[id - 1].verdict = check(&lines[id - 1].summary);
  };
  std::vector<const RunReport*> timed;
  evaluate(1, "lower bound <= exact optimum <= MH+", LowerBoundValidity);
  evaluate(2, "kernels match brute force", KernelOracles);
  evaluate(5, "benchmark gaps within 15% each and 10% on average",
           [&](std::string* summary) { return GapMagnitude(&timed, summary); });
  evaluate(3, "MH+ never worse than MH",
           [&](std::string* summary) { return Dominance(timed, summary); });
  evaluate(7, "closed forms without accumulation or requirements", ClosedForms);
  evaluate(8, "identical reports across repeated runs", Determinism);
  // These two cover every run made above.
  evaluate(4, "every emitted solution is feasible", Feasibility);
  evaluate(6, "reported statistics match the solution file", StatisticsConsistency);

  bool all = true;
  for (int k = 0; k < 8; ++k) {
    Print(k + 1, lines[k].title, lines[k].verdict, lines[k].summary);
    all = all && lines[k].verdict.pass;
  }
  return all ? 0 : 1;
}
