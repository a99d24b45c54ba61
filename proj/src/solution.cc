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

#include "spirp/solution.h"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

namespace spirp {

PartialSolution PartialSolution::Empty(const Instance& inst) {
  PartialSolution s;
  s.visit = Grid<int>(inst.n + 1, inst.tau, 0);
  s.ever_visited.assign(inst.n + 1, 0);
  s.collected = Grid<double>(inst.n + 1, inst.tau, 0.0);
  s.inventory = Grid<double>(inst.n + 1, inst.tau + 1, 0.0);
  s.purchase.assign(inst.tau, 0.0);
  return s;
}

PartialSolution PartialSolution::PurchaseOnly(const Instance& inst) {
  PartialSolution s = Empty(inst);
  s.purchase = inst.requirements;
  return s;
}

std::vector<int> PartialSolution::VisitedNodes(int period) const {
  std::vector<int> nodes;
  for (int i = 1; i < visit.rows(); ++i) {
    if (visit(i, period) == 1) nodes.push_back(i);
  }
  return nodes;
}

double PartialSolution::CollectedInPeriod(int period) const {
  double total = 0.0;
  for (int i = 1; i < collected.rows(); ++i) total += collected(i, period);
  return total;
}

double RouteLength(const std::vector<int>& nodes, const Instance& inst) {
  double length = 0.0;
  for (size_t k = 1; k < nodes.size(); ++k) {
    length += inst.distance(nodes[k - 1], nodes[k]);
  }
  return length;
}

double PeriodRoutingCost(const std::vector<Route>& routes, const Instance& inst) {
  double cost = 0.0;
  for (const Route& route : routes) {
    cost += inst.traveling_cost * RouteLength(route.nodes, inst) +
            inst.vehicle_cost;
  }
  return cost;
}

CostBreakdown EvaluateCost(const CompleteSolution& sol, const Instance& inst) {
  CostBreakdown cost;
  double distance = 0.0;
  int num_routes = 0;
  for (size_t t = 0; t < sol.routes.size(); ++t) {
    for (size_t k = 0; k < sol.routes[t].size(); ++k) {
      const Route& route = sol.routes[t][k];
      if (route.nodes.size() < 2 || route.nodes.front() != 0 ||
          route.nodes.back() != 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("malformed route {} in period {}: missing depot "
                                "endpoints",
                                k, t));
      }
      for (int node : route.nodes) {
        if (node < 0 || node > inst.n) {
          throw Error(ErrorCode::kInvalidArgument,
                      fmt::format("route {} in period {} references node {}", k,
                                  t, node));
        }
      }
      distance += RouteLength(route.nodes, inst);
      ++num_routes;
    }
  }
  cost.traveling = inst.traveling_cost * distance;
  cost.vehicles = inst.vehicle_cost * num_routes;
  double stock = 0.0;
  for (int t = 1; t <= inst.tau; ++t) stock += sol.partial.inventory(0, t);
  cost.holding = inst.holding_cost * stock;
  double bought = 0.0;
  for (double s : sol.partial.purchase) bought += s;
  cost.purchase = inst.purchase_cost * bought;
  cost.total = cost.traveling + cost.vehicles + cost.holding + cost.purchase;
  return cost;
}

std::string FeasibilityReport::ToString() const {
  if (violations.empty()) return "feasible\n";
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << v.constraint << " at " << v.location << " (magnitude "
        << fmt::format("{:.6g}", v.magnitude) << ")\n";
  }
  return out.str();
}

namespace {

class Checker {
 public:
  Checker(const Instance& inst, double tol) : inst_(inst), tol_(tol) {}

  void Add(std::string constraint, std::string location, double magnitude) {
    report_.violations.push_back(
        {std::move(constraint), std::move(location), magnitude});
  }

  // lhs <= rhs
  void Le(double lhs, double rhs, const char* constraint,
          const std::string& location) {
    if (lhs > rhs + tol_) Add(constraint, location, lhs - rhs);
  }
  void Eq(double lhs, double rhs, const char* constraint,
          const std::string& location) {
    if (std::abs(lhs - rhs) > tol_) Add(constraint, location, std::abs(lhs - rhs));
  }

  bool CheckDimensions(const PartialSolution& s) {
    const int n = inst_.n;
    const int tau = inst_.tau;
    bool ok = true;
    auto expect = [&](bool cond, const char* what) {
      if (!cond) {
        Add("dimension", what, 0.0);
        ok = false;
      }
    };
    expect(s.visit.rows() == n + 1 && s.visit.cols() == tau, "Y");
    expect(static_cast<int>(s.ever_visited.size()) == n + 1, "Z");
    expect(s.collected.rows() == n + 1 && s.collected.cols() == tau, "W");
    expect(s.inventory.rows() == n + 1 && s.inventory.cols() == tau + 1, "I");
    expect(static_cast<int>(s.purchase.size()) == tau, "S");
    return ok;
  }

  void CheckPartial(const PartialSolution& s) {
    if (!CheckDimensions(s)) return;
    const int n = inst_.n;
    const int tau = inst_.tau;
    const std::vector<double> total = TotalAccumulation(inst_);
    for (int i = 1; i <= n; ++i) {
      const std::string node = fmt::format("node {}", i);
      if (s.ever_visited[i] != 0 && s.ever_visited[i] != 1) {
        Add("binary-Z", node, std::abs(s.ever_visited[i]));
      }
      int visits = 0;
      for (int t = 0; t < tau; ++t) {
        const std::string where = fmt::format("node {} period {}", i, t);
        const int y = s.visit(i, t);
        if (y != 0 && y != 1) Add("binary-Y", where, std::abs(y));
        visits += y;
        const double w = s.collected(i, t);
        if (w < -tol_) Add("nonnegative-W", where, -w);
        if (s.inventory(i, t + 1) < -tol_) {
          Add("nonnegative-I", where, -s.inventory(i, t + 1));
        }
        Le(w, total[i] * y, "collect-only-if-visited", where);
        Le(s.inventory(i, t + 1), total[i] * (1 - y), "full-collection",
           where);
        Eq(s.inventory(i, t + 1),
           s.inventory(i, t) + inst_.accumulation(i, t) * s.ever_visited[i] - w,
           "node-inventory-balance", where);
        Le(static_cast<double>(y), static_cast<double>(s.ever_visited[i]),
           "visit-coupling", where);
      }
      Le(static_cast<double>(s.ever_visited[i]), static_cast<double>(visits),
         "visit-coupling", node);
      if (s.inventory(i, 0) < -tol_) Add("nonnegative-I", node, -s.inventory(i, 0));
      Eq(s.inventory(i, 0), s.inventory(i, tau), "cyclic-inventory", node);
    }
    for (int t = 0; t < tau; ++t) {
      const std::string where = fmt::format("depot period {}", t);
      if (s.purchase[t] < -tol_) Add("nonnegative-S", where, -s.purchase[t]);
      if (s.inventory(0, t + 1) < -tol_) {
        Add("nonnegative-I", where, -s.inventory(0, t + 1));
      }
      Eq(s.inventory(0, t + 1),
         s.inventory(0, t) + s.CollectedInPeriod(t) + s.purchase[t] -
             inst_.requirements[t],
         "depot-inventory-balance", where);
    }
    if (s.inventory(0, 0) < -tol_) Add("nonnegative-I", "depot", -s.inventory(0, 0));
    Eq(s.inventory(0, 0), s.inventory(0, tau), "cyclic-inventory", "depot");
  }

  void CheckRoutes(const CompleteSolution& sol) {
    const PartialSolution& s = sol.partial;
    const int tau = inst_.tau;
    if (static_cast<int>(sol.routes.size()) != tau) {
      Add("dimension", "routes", std::abs(static_cast<double>(sol.routes.size()) - tau));
      return;
    }
    for (int t = 0; t < tau; ++t) {
      std::vector<int> seen(inst_.n + 1, 0);
      for (size_t k = 0; k < sol.routes[t].size(); ++k) {
        const Route& route = sol.routes[t][k];
        const std::string where = fmt::format("period {} route {}", t, k);
        if (route.period != t) Add("route-period", where, std::abs(route.period - t));
        if (route.nodes.size() < 3 || route.nodes.front() != 0 ||
            route.nodes.back() != 0) {
          Add("depot-return", where, 1.0);
          continue;
        }
        double load = 0.0;
        for (size_t p = 1; p + 1 < route.nodes.size(); ++p) {
          const int node = route.nodes[p];
          if (node <= 0 || node > inst_.n) {
            Add("route-node", where, static_cast<double>(node));
            continue;
          }
          ++seen[node];
          load += s.collected(node, t);
        }
        Eq(route.load, load, "route-load", where);
        Le(load, inst_.capacity, "vehicle-capacity", where);
      }
      for (int i = 1; i <= inst_.n; ++i) {
        const int expected = s.visit(i, t) == 1 ? 1 : 0;
        if (seen[i] != expected) {
          Add("visit/route mismatch", fmt::format("node {} period {}", i, t),
              std::abs(seen[i] - expected));
        }
      }
    }
  }

  FeasibilityReport Take() { return std::move(report_); }

 private:
  const Instance& inst_;
  double tol_;
  FeasibilityReport report_;
};

}  // namespace

FeasibilityReport CheckPartialFeasibility(const PartialSolution& partial,
                                          const Instance& inst, double tol) {
  Checker checker(inst, tol);
  checker.CheckPartial(partial);
  return checker.Take();
}

FeasibilityReport CheckFeasibility(const CompleteSolution& sol,
                                   const Instance& inst, double tol) {
  Checker checker(inst, tol);
  if (checker.CheckDimensions(sol.partial)) {
    checker.CheckPartial(sol.partial);
    checker.CheckRoutes(sol);
  }
  return checker.Take();
}

double OptimalityGap(double upper, double lower) {
  constexpr double kTol = 1e-9;
  if (std::abs(upper - lower) <= kTol) return 0.0;
  if (!(upper > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("optimality gap needs a positive upper bound, got {}",
                            upper));
  }
  if (lower > upper + kTol) {
    throw Error(ErrorCode::kInternal,
                fmt::format("lower bound {} exceeds upper bound {}", lower, upper));
  }
  return 100.0 * (upper - lower) / upper;
}

}  // namespace spirp
