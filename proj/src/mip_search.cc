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

#include "spirp/mip_search.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace spirp {

using milp::RowSense;
using milp::Term;

CvrpModel BuildCvrp(const CvrpInput& input, const Instance& inst) {
  if (input.nodes.size() != input.loads.size()) {
    throw Error(ErrorCode::kInvalidArgument, "CVRP nodes and loads differ in length");
  }
  const int m = static_cast<int>(input.nodes.size()) + 1;
  const double q = inst.capacity;
  CvrpModel cvrp;
  cvrp.model = milp::MilpModel(fmt::format("cvrp-period-{}", input.period));
  cvrp.global.push_back(0);
  cvrp.global.insert(cvrp.global.end(), input.nodes.begin(), input.nodes.end());
  cvrp.arc = Grid<int>(m, m, -1);
  cvrp.flow = Grid<int>(m, m, -1);
  auto load = [&](int k) { return k == 0 ? 0.0 : input.loads[k - 1]; };

  milp::MilpModel& model = cvrp.model;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const int gi = cvrp.global[i];
      const int gj = cvrp.global[j];
      double cost = inst.traveling_cost * inst.distance(gi, gj);
      if (i == 0) cost += inst.vehicle_cost;
      cvrp.arc(i, j) = model.AddBinary(fmt::format("x_{}_{}", gi, gj), cost);
      cvrp.flow(i, j) = model.AddContinuous(fmt::format("f_{}_{}", gi, gj), 0.0, q);
    }
  }
  for (int j = 1; j < m; ++j) {
    std::vector<Term> balance;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      balance.push_back({cvrp.flow(j, i), 1.0});
      balance.push_back({cvrp.flow(i, j), -1.0});
    }
    model.AddConstraint(fmt::format("flow_balance_{}", cvrp.global[j]), std::move(balance),
                        RowSense::kEqual, load(j));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const std::string tag = fmt::format("{}_{}", cvrp.global[i], cvrp.global[j]);
      model.AddConstraint("flow_upper_" + tag,
                          {{cvrp.flow(i, j), 1.0}, {cvrp.arc(i, j), -(q - load(j))}},
                          RowSense::kLessEqual, 0.0);
      if (load(i) > 0.0) {
        model.AddConstraint("flow_lower_" + tag,
                            {{cvrp.flow(i, j), 1.0}, {cvrp.arc(i, j), -load(i)}},
                            RowSense::kGreaterEqual, 0.0);
      }
    }
  }
  for (int i = 1; i < m; ++i) {
    std::vector<Term> out;
    std::vector<Term> in;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      out.push_back({cvrp.arc(i, j), 1.0});
      in.push_back({cvrp.arc(j, i), 1.0});
    }
    model.AddConstraint(fmt::format("leave_once_{}", cvrp.global[i]), std::move(out),
                        RowSense::kEqual, 1.0);
    model.AddConstraint(fmt::format("enter_once_{}", cvrp.global[i]), std::move(in),
                        RowSense::kEqual, 1.0);
  }
  std::vector<Term> depot;
  std::vector<Term> fleet;
  for (int j = 1; j < m; ++j) {
    depot.push_back({cvrp.arc(0, j), 1.0});
    depot.push_back({cvrp.arc(j, 0), -1.0});
    fleet.push_back({cvrp.arc(0, j), 1.0});
  }
  model.AddConstraint("depot_return", std::move(depot), RowSense::kEqual, 0.0);
  model.AddConstraint("vehicle_floor", std::move(fleet), RowSense::kGreaterEqual,
                      input.vehicle_floor);
  return cvrp;
}

namespace {

int LocalIndex(const CvrpModel& cvrp, int node) {
  const auto it = std::find(cvrp.global.begin() + 1, cvrp.global.end(), node);
  if (it == cvrp.global.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("route visits node {} outside the period's visited set", node));
  }
  return static_cast<int>(it - cvrp.global.begin());
}

}  // namespace

std::vector<double> EncodeRoutes(const CvrpModel& cvrp, const CvrpInput& input,
                                 const std::vector<Route>& routes) {
  std::vector<double> x(cvrp.model.num_variables(), 0.0);
  for (const Route& route : routes) {
    double on_board = 0.0;
    for (size_t k = 1; k < route.nodes.size(); ++k) {
      const int from = route.nodes[k - 1] == 0 ? 0 : LocalIndex(cvrp, route.nodes[k - 1]);
      const int to = route.nodes[k] == 0 ? 0 : LocalIndex(cvrp, route.nodes[k]);
      if (from == to) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("route in period {} repeats node {}", input.period,
                                route.nodes[k]));
      }
      if (from != 0) on_board += input.loads[from - 1];
      x[cvrp.arc(from, to)] = 1.0;
      x[cvrp.flow(from, to)] = on_board;
    }
  }
  return x;
}

std::vector<Route> DecodeRoutes(const CvrpModel& cvrp, const CvrpInput& input,
                                std::span<const double> values) {
  const int m = static_cast<int>(cvrp.global.size());
  std::vector<bool> seen(m, false);
  std::vector<Route> routes;
  auto next = [&](int i) {
    for (int j = 0; j < m; ++j) {
      if (j != i && values[cvrp.arc(i, j)] > 0.5) return j;
    }
    throw Error(ErrorCode::kInternal,
                fmt::format("CVRP solution leaves node {} by no arc", cvrp.global[i]));
  };
  for (int start = 1; start < m; ++start) {
    if (values[cvrp.arc(0, start)] <= 0.5) continue;
    Route route;
    route.period = input.period;
    route.nodes.push_back(0);
    int at = start;
    while (at != 0) {
      if (seen[at]) {
        throw Error(ErrorCode::kInternal,
                    fmt::format("CVRP solution reaches node {} twice", cvrp.global[at]));
      }
      seen[at] = true;
      route.nodes.push_back(cvrp.global[at]);
      route.load += input.loads[at - 1];
      at = next(at);
    }
    route.nodes.push_back(0);
    routes.push_back(std::move(route));
  }
  for (int k = 1; k < m; ++k) {
    if (!seen[k]) {
      throw Error(ErrorCode::kInternal,
                  fmt::format("CVRP solution leaves node {} off every route", cvrp.global[k]));
    }
  }
  return routes;
}

MipSearchResult ImproveRoutes(const CompleteSolution& solution, const Instance& inst,
                              const MipSearchParams& params) {
  MipSearchResult result;
  result.solution = solution;
  result.periods.resize(inst.tau);
  for (int t = 0; t < inst.tau; ++t) {
    const std::vector<Route>& routes = solution.routes[t];
    PeriodSearch& record = result.periods[t];
    record.before = record.after = PeriodRoutingCost(routes, inst);
    if (routes.empty()) continue;

    CvrpInput input;
    input.period = t;
    double total = 0.0;
    for (const Route& route : routes) {
      for (size_t k = 1; k + 1 < route.nodes.size(); ++k) {
        input.nodes.push_back(route.nodes[k]);
      }
    }
    std::sort(input.nodes.begin(), input.nodes.end());
    for (int i : input.nodes) {
      input.loads.push_back(solution.partial.collected(i, t));
      total += input.loads.back();
    }
    input.vehicle_floor =
        params.floor == VehicleFloor::kLiteral
            ? static_cast<int>(routes.size())
            : static_cast<int>(std::ceil(total / inst.capacity - 1e-9));

    const CvrpModel cvrp = BuildCvrp(input, inst);
    milp::SolveParams solve = params.solve;
    solve.warm_start = EncodeRoutes(cvrp, input, routes);
    std::vector<Route> improved;
    try {
      const milp::SolveOutcome out = milp::SolveMilp(cvrp.model, solve);
      record.solved = true;
      record.status = out.status;
      record.nodes = out.nodes;
      if (!out.has_solution()) continue;
      improved = DecodeRoutes(cvrp, input, out.solution);
    } catch (const Error& e) {
      record.failure = e.what();
      continue;
    }
    const double cost = PeriodRoutingCost(improved, inst);
    if (cost < record.before) {
      record.after = cost;
      result.solution.routes[t] = std::move(improved);
    }
  }
  return result;
}

}  // namespace spirp
