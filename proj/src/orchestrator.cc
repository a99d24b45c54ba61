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
#include <chrono>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "spirp/irr.h"

namespace spirp {
namespace {

using Clock = std::chrono::steady_clock;
using milp::RowSense;
using milp::Term;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int PreviousPeriod(int t, int tau) { return t == 1 ? tau : t - 1; }

double Clean(double value) {
  const double nearest = std::round(value);
  return std::abs(value - nearest) <= 1e-7 ? nearest : value;
}

struct IrColumns {
  std::vector<Grid<int>> arc;   // per period, (n+1) x (n+1)
  std::vector<Grid<int>> flow;  // per period, (n+1) x (n+1)
  Grid<int> visit;              // (n+1) x tau
  std::vector<int> ever_visited;
  Grid<int> collected;          // (n+1) x tau
  Grid<int> inventory;          // (n+1) x (tau+1), column 0 aliases column tau
  std::vector<int> purchase;
};

milp::MilpModel BuildIr(const Instance& inst, IrColumns& col) {
  const int n = inst.n;
  const int tau = inst.tau;
  const double q = inst.capacity;
  const std::vector<double> total = TotalAccumulation(inst);
  milp::MilpModel m(inst.name + "-ir");
  col.visit = Grid<int>(n + 1, tau, -1);
  col.ever_visited.assign(n + 1, -1);
  col.collected = Grid<int>(n + 1, tau, -1);
  col.inventory = Grid<int>(n + 1, tau + 1, -1);

  for (int t = 0; t < tau; ++t) {
    Grid<int> arc(n + 1, n + 1, -1);
    Grid<int> flow(n + 1, n + 1, -1);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i == j) continue;
        double cost = inst.traveling_cost * inst.distance(i, j);
        if (i == 0) cost += inst.vehicle_cost;
        arc(i, j) = m.AddBinary(fmt::format("X_{}_{}_{}", i, j, t + 1), cost);
        flow(i, j) = m.AddContinuous(fmt::format("F_{}_{}_{}", i, j, t + 1), 0.0, q);
      }
    }
    col.arc.push_back(std::move(arc));
    col.flow.push_back(std::move(flow));
  }
  for (int i = 1; i <= n; ++i) {
    col.ever_visited[i] = m.AddBinary(fmt::format("Z_{}", i));
    for (int t = 0; t < tau; ++t) {
      col.visit(i, t) = m.AddBinary(fmt::format("Y_{}_{}", i, t + 1));
      col.collected(i, t) = m.AddContinuous(fmt::format("W_{}_{}", i, t + 1), 0.0, total[i]);
    }
  }
  for (int i = 0; i <= n; ++i) {
    for (int t = 1; t <= tau; ++t) {
      col.inventory(i, t) = m.AddContinuous(
          fmt::format("I_{}_{}", i, t), 0.0, i == 0 ? milp::kInfinity : total[i],
          i == 0 ? inst.holding_cost : 0.0);
    }
    col.inventory(i, 0) = col.inventory(i, tau);
  }
  for (int t = 0; t < tau; ++t) {
    col.purchase.push_back(m.AddContinuous(fmt::format("S_{}", t + 1), 0.0,
                                           milp::kInfinity, inst.purchase_cost));
  }

  for (int t = 0; t < tau; ++t) {
    const Grid<int>& x = col.arc[t];
    const Grid<int>& f = col.flow[t];
    for (int i = 1; i <= n; ++i) {
      std::vector<Term> balance{{col.collected(i, t), -1.0}};
      std::vector<Term> in{{col.visit(i, t), -1.0}};
      std::vector<Term> out{{col.visit(i, t), -1.0}};
      for (int j = 0; j <= n; ++j) {
        if (j == i) continue;
        balance.push_back({f(i, j), 1.0});
        balance.push_back({f(j, i), -1.0});
        in.push_back({x(j, i), 1.0});
        out.push_back({x(i, j), 1.0});
      }
      m.AddConstraint(fmt::format("flow_balance_{}_{}", i, t + 1), std::move(balance),
                      RowSense::kEqual, 0.0);
      m.AddConstraint(fmt::format("enter_if_visited_{}_{}", i, t + 1), std::move(in),
                      RowSense::kEqual, 0.0);
      m.AddConstraint(fmt::format("leave_if_visited_{}_{}", i, t + 1), std::move(out),
                      RowSense::kEqual, 0.0);
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i == j) continue;
        const std::string tag = fmt::format("{}_{}_{}", i, j, t + 1);
        m.AddConstraint("flow_on_arc_" + tag,
                        {{f(i, j), 1.0}, {x(i, j), -(q - inst.accumulation(j, t))}},
                        RowSense::kLessEqual, 0.0);
        if (j != 0) {
          m.AddConstraint("flow_room_" + tag, {{f(i, j), 1.0}, {col.collected(j, t), 1.0}},
                          RowSense::kLessEqual, q);
        }
        if (i != 0) {
          m.AddConstraint("flow_carries_" + tag,
                          {{f(i, j), 1.0}, {col.collected(i, t), -1.0}, {x(i, j), -total[i]}},
                          RowSense::kGreaterEqual, -total[i]);
        }
      }
    }
    std::vector<Term> depot;
    for (int i = 1; i <= n; ++i) {
      depot.push_back({x(i, 0), 1.0});
      depot.push_back({x(0, i), -1.0});
    }
    m.AddConstraint(fmt::format("depot_return_{}", t + 1), std::move(depot),
                    RowSense::kEqual, 0.0);
  }

  for (int i = 1; i <= n; ++i) {
    for (int t = 0; t < tau; ++t) {
      const int y = col.visit(i, t);
      m.AddConstraint(fmt::format("collect_if_visited_{}_{}", i, t + 1),
                      {{col.collected(i, t), 1.0}, {y, -total[i]}}, RowSense::kLessEqual,
                      0.0);
      m.AddConstraint(fmt::format("empty_after_visit_{}_{}", i, t + 1),
                      {{col.inventory(i, t + 1), 1.0}, {y, total[i]}}, RowSense::kLessEqual,
                      total[i]);
      m.AddConstraint(fmt::format("node_balance_{}_{}", i, t + 1),
                      {{col.inventory(i, t + 1), 1.0},
                       {col.inventory(i, PreviousPeriod(t + 1, tau)), -1.0},
                       {col.ever_visited[i], -inst.accumulation(i, t)},
                       {col.collected(i, t), 1.0}},
                      RowSense::kEqual, 0.0);
      m.AddConstraint(fmt::format("visit_implies_selected_{}_{}", i, t + 1),
                      {{y, 1.0}, {col.ever_visited[i], -1.0}}, RowSense::kLessEqual, 0.0);
    }
    std::vector<Term> some_visit{{col.ever_visited[i], 1.0}};
    for (int t = 0; t < tau; ++t) some_visit.push_back({col.visit(i, t), -1.0});
    m.AddConstraint(fmt::format("visited_at_all_{}", i), std::move(some_visit),
                    RowSense::kLessEqual, 0.0);
  }
  for (int t = 0; t < tau; ++t) {
    std::vector<Term> balance{{col.inventory(0, t + 1), 1.0},
                              {col.inventory(0, PreviousPeriod(t + 1, tau)), -1.0},
                              {col.purchase[t], -1.0}};
    for (int i = 1; i <= n; ++i) balance.push_back({col.collected(i, t), -1.0});
    m.AddConstraint(fmt::format("depot_balance_{}", t + 1), std::move(balance),
                    RowSense::kEqual, -inst.requirements[t]);
  }
  return m;
}

std::vector<double> EncodeIr(const milp::MilpModel& m, const IrColumns& col,
                             const CompleteSolution& sol, const Instance& inst) {
  std::vector<double> x(m.num_variables(), 0.0);
  const PartialSolution& s = sol.partial;
  for (int i = 1; i <= inst.n; ++i) {
    x[col.ever_visited[i]] = s.ever_visited[i];
    for (int t = 0; t < inst.tau; ++t) {
      x[col.visit(i, t)] = s.visit(i, t);
      x[col.collected(i, t)] = s.collected(i, t);
    }
  }
  for (int i = 0; i <= inst.n; ++i) {
    for (int t = 1; t <= inst.tau; ++t) x[col.inventory(i, t)] = s.inventory(i, t);
  }
  for (int t = 0; t < inst.tau; ++t) {
    x[col.purchase[t]] = s.purchase[t];
    for (const Route& route : sol.routes[t]) {
      double on_board = 0.0;
      for (size_t k = 1; k < route.nodes.size(); ++k) {
        const int from = route.nodes[k - 1];
        on_board += s.collected(from, t);
        x[col.arc[t](from, route.nodes[k])] = 1.0;
        x[col.flow[t](from, route.nodes[k])] = on_board;
      }
    }
  }
  return x;
}

CompleteSolution DecodeIr(const IrColumns& col, std::span<const double> x,
                          const Instance& inst) {
  CompleteSolution sol;
  PartialSolution& s = sol.partial;
  s = PartialSolution::Empty(inst);
  for (int i = 1; i <= inst.n; ++i) {
    s.ever_visited[i] = static_cast<int>(std::lround(x[col.ever_visited[i]]));
    for (int t = 0; t < inst.tau; ++t) {
      s.visit(i, t) = static_cast<int>(std::lround(x[col.visit(i, t)]));
      s.collected(i, t) = Clean(x[col.collected(i, t)]);
    }
  }
  for (int i = 0; i <= inst.n; ++i) {
    for (int t = 0; t <= inst.tau; ++t) s.inventory(i, t) = Clean(x[col.inventory(i, t)]);
  }
  sol.routes.assign(inst.tau, {});
  for (int t = 0; t < inst.tau; ++t) {
    s.purchase[t] = Clean(x[col.purchase[t]]);
    const Grid<int>& arc = col.arc[t];
    for (int start = 1; start <= inst.n; ++start) {
      if (x[arc(0, start)] <= 0.5) continue;
      Route route;
      route.period = t;
      route.nodes.push_back(0);
      int at = start;
      while (at != 0 && route.nodes.size() <= static_cast<size_t>(inst.n) + 1) {
        route.nodes.push_back(at);
        route.load += s.collected(at, t);
        int next = 0;
        for (int j = 0; j <= inst.n; ++j) {
          if (j != at && x[arc(at, j)] > 0.5) {
            next = j;
            break;
          }
        }
        at = next;
      }
      route.nodes.push_back(0);
      sol.routes[t].push_back(std::move(route));
    }
  }
  return sol;
}

}  // namespace

const char* VariantName(Variant variant) {
  return variant == Variant::kMh ? "MH" : "MH+";
}

Variant ParseVariant(std::string_view text) {
  if (text == "mh" || text == "MH") return Variant::kMh;
  if (text == "mh+" || text == "MH+") return Variant::kMhPlus;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown variant '{}' (expected mh or mh+)", text));
}

ShapeStats ComputeShapeStats(const CompleteSolution& sol) {
  ShapeStats shape;
  if (sol.routes.empty()) return shape;
  std::vector<int> vehicles;
  std::vector<int> collections;
  for (const std::vector<Route>& period : sol.routes) {
    vehicles.push_back(static_cast<int>(period.size()));
    for (const Route& route : period) collections.push_back(route.NumCollections());
  }
  shape.veh_min = *std::min_element(vehicles.begin(), vehicles.end());
  shape.veh_max = *std::max_element(vehicles.begin(), vehicles.end());
  shape.veh_avg = static_cast<double>(std::accumulate(vehicles.begin(), vehicles.end(), 0)) /
                  static_cast<double>(vehicles.size());
  if (!collections.empty()) {
    shape.col_min = *std::min_element(collections.begin(), collections.end());
    shape.col_max = *std::max_element(collections.begin(), collections.end());
    shape.col_avg =
        static_cast<double>(std::accumulate(collections.begin(), collections.end(), 0)) /
        static_cast<double>(collections.size());
  }
  return shape;
}

RunReport Run(const Instance& inst, const RunParams& params) {
  ValidateInstance(inst);
  if (params.elite_k < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("elite_k must be at least 1, got {}", params.elite_k));
  }
  const Clock::time_point started = Clock::now();
  RunReport report;
  report.instance = inst.name;
  report.params = params;

  milp::SolveParams irr_params;
  irr_params.time_limit = params.time_limit;
  irr_params.node_limit = params.node_limit;
  const IrrResult irr = SolveIrr(inst, irr_params, params.delta, params.valid_inequality);
  report.lower_bound = irr.lower_bound;
  report.irr_status = irr.status;
  report.irr_nodes = irr.nodes;
  report.times.irr = Since(started);

  const Clock::time_point construction_started = Clock::now();
  ConstructionOptions options;
  options.bin_packing.time_limit = params.bin_packing_time_limit;
  std::vector<CompleteSolution> built;
  std::vector<double> costs;
  for (const PoolEntry& entry : irr.pool) {
    ConstructionResult c = ConstructRoutes(entry.partial, inst, options);
    const double cost = EvaluateCost(c.solution, inst).total;
    report.stats += c.stats;
    report.pool.push_back({entry.objective, cost, std::move(c.periods)});
    built.push_back(std::move(c.solution));
    costs.push_back(cost);
  }
  std::vector<size_t> order(built.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return costs[a] < costs[b]; });
  order.resize(std::min(order.size(), static_cast<size_t>(params.elite_k)));
  report.times.construction = Since(construction_started);

  report.best = built[order.front()];
  report.constructed_upper_bound = costs[order.front()];
  double best_cost = report.constructed_upper_bound;
  if (params.variant == Variant::kMhPlus) {
    const Clock::time_point search_started = Clock::now();
    MipSearchParams search;
    search.solve.time_limit = params.mip_search_time_limit;
    search.solve.node_limit = params.mip_search_node_limit;
    search.floor = params.vehicle_floor;
    bool first = true;
    for (size_t k : order) {
      MipSearchResult improved = ImproveRoutes(built[k], inst, search);
      const double cost = EvaluateCost(improved.solution, inst).total;
      if (first || cost < best_cost) {
        best_cost = cost;
        report.best = std::move(improved.solution);
        report.mip_search = std::move(improved.periods);
        first = false;
      }
    }
    report.times.mip_search = Since(search_started);
  }

  const FeasibilityReport check = CheckFeasibility(report.best, inst);
  if (!check.feasible()) {
    throw Error(ErrorCode::kInternal,
                fmt::format("heuristic produced an infeasible plan: {}", check.ToString()));
  }
  report.cost = EvaluateCost(report.best, inst);
  report.upper_bound = report.cost.total;
  report.gap = OptimalityGap(report.upper_bound, report.lower_bound);
  report.shape = ComputeShapeStats(report.best);
  report.times.total = Since(started);
  return report;
}

IrExactResult SolveIrExact(const Instance& inst, const IrExactParams& params) {
  ValidateInstance(inst);
  if (!params.allow_large && (inst.n > 8 || inst.tau > 3)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("exact formulation limited to n <= 8 and tau <= 3, got n={} "
                            "tau={}",
                            inst.n, inst.tau));
  }
  IrColumns col;
  const milp::MilpModel model = BuildIr(inst, col);
  milp::SolveParams solve = params.solve;
  if (params.start) solve.warm_start = EncodeIr(model, col, *params.start, inst);
  IrExactResult result;
  result.outcome = milp::SolveMilp(model, solve);
  if (result.outcome.has_solution()) {
    result.solution = DecodeIr(col, result.outcome.solution, inst);
  }
  return result;
}

}  // namespace spirp
