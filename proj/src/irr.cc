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

#include "spirp/irr.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace spirp {

using milp::RowSense;
using milp::Term;

namespace {

double Clean(double value) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) < 1e-7) return rounded == 0.0 ? 0.0 : rounded;
  return value;
}

double ShortestRoundTrip(const Instance& inst) {
  double out = std::numeric_limits<double>::infinity();
  double in = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= inst.n; ++i) {
    out = std::min(out, inst.distance(0, i));
    in = std::min(in, inst.distance(i, 0));
  }
  return out + in;
}

int PreviousPeriod(int t, int tau) { return t == 1 ? tau : t - 1; }

constexpr int64_t kLocalSearchEvery = 50;

// Rounds the visit decisions of a fractional relaxation solution and
// completes them; nodes with the weakest selection value are dropped while
// the plan would over-collect.
std::optional<PartialSolution> RoundToPlan(const IrrModel& irr, std::span<const double> x,
                                           const Instance& inst) {
  const IrrColumns& col = irr.columns;
  Grid<int> visit(inst.n + 1, inst.tau, 0);
  std::vector<std::pair<double, int>> selected;
  for (int i = 1; i <= inst.n; ++i) {
    const double z = x[col.ever_visited[i]];
    if (z < 0.5) continue;
    int best = 0;
    bool any = false;
    for (int t = 0; t < inst.tau; ++t) {
      const double y = x[col.visit(i, t)];
      if (y >= 0.5) {
        visit(i, t) = 1;
        any = true;
      }
      if (y > x[col.visit(i, best)]) best = t;
    }
    if (!any) visit(i, best) = 1;
    selected.emplace_back(z, i);
  }
  std::sort(selected.begin(), selected.end());
  for (size_t k = 0;; ++k) {
    std::optional<PartialSolution> plan = CompleteVisitPattern(visit, inst);
    if (plan || k == selected.size()) return plan;
    for (int t = 0; t < inst.tau; ++t) visit(selected[k].second, t) = 0;
  }
}

}  // namespace

IrrModel BuildIrr(const Instance& inst, bool with_valid_inequality) {
  const int n = inst.n;
  const int tau = inst.tau;
  const double q = inst.capacity;
  const std::vector<double> total = TotalAccumulation(inst);
  IrrModel irr{milp::MilpModel(inst.name + "-irr"), {}};
  milp::MilpModel& m = irr.model;
  IrrColumns& col = irr.columns;
  col.visit = Grid<int>(n + 1, tau, -1);
  col.ever_visited.assign(n + 1, -1);
  col.collected = Grid<int>(n + 1, tau, -1);
  col.inventory = Grid<int>(n + 1, tau + 1, -1);

  double max_collection = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double cap = std::min(q, total[i]);
    max_collection += cap;
    col.ever_visited[i] = m.AddBinary(fmt::format("Z_{}", i));
    for (int t = 0; t < tau; ++t) {
      col.visit(i, t) = m.AddBinary(fmt::format("Y_{}_{}", i, t + 1));
      col.collected(i, t) = m.AddContinuous(
          fmt::format("W_{}_{}", i, t + 1), 0.0, cap,
          inst.traveling_cost * (inst.distance(0, i) + inst.distance(i, 0)) / q);
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
  const double max_vehicles = std::ceil(max_collection / q) + 1.0;
  const double slack_cost = inst.traveling_cost * ShortestRoundTrip(inst);
  for (int t = 0; t < tau; ++t) {
    col.purchase.push_back(m.AddContinuous(fmt::format("S_{}", t + 1), 0.0,
                                           milp::kInfinity, inst.purchase_cost));
    col.vehicles.push_back(m.AddVariable(fmt::format("V_{}", t + 1), 0.0, max_vehicles,
                                         milp::VarKind::kInteger, inst.vehicle_cost));
    col.slack.push_back(m.AddContinuous(fmt::format("R_{}", t + 1), 0.0, 1.0, slack_cost));
    m.SetBranchPriority(col.vehicles.back(), 1);
  }

  for (int i = 1; i <= n; ++i) {
    for (int t = 0; t < tau; ++t) {
      const int y = col.visit(i, t);
      const int w = col.collected(i, t);
      const int inv = col.inventory(i, t + 1);
      m.AddConstraint(fmt::format("collect_if_visited_{}_{}", i, t + 1),
                      {{w, 1.0}, {y, -total[i]}}, RowSense::kLessEqual, 0.0);
      m.AddConstraint(fmt::format("collect_capacity_{}_{}", i, t + 1),
                      {{w, 1.0}, {y, -q}}, RowSense::kLessEqual, 0.0);
      m.AddConstraint(fmt::format("empty_after_visit_{}_{}", i, t + 1),
                      {{inv, 1.0}, {y, total[i]}}, RowSense::kLessEqual, total[i]);
      m.AddConstraint(fmt::format("node_balance_{}_{}", i, t + 1),
                      {{inv, 1.0},
                       {col.inventory(i, PreviousPeriod(t + 1, tau)), -1.0},
                       {col.ever_visited[i], -inst.accumulation(i, t)},
                       {w, 1.0}},
                      RowSense::kEqual, 0.0);
    }
  }
  for (int t = 0; t < tau; ++t) {
    std::vector<Term> balance{{col.inventory(0, t + 1), 1.0},
                              {col.inventory(0, PreviousPeriod(t + 1, tau)), -1.0},
                              {col.purchase[t], -1.0}};
    for (int i = 1; i <= n; ++i) balance.push_back({col.collected(i, t), -1.0});
    m.AddConstraint(fmt::format("depot_balance_{}", t + 1), std::move(balance),
                    RowSense::kEqual, -inst.requirements[t]);
  }
  for (int i = 1; i <= n; ++i) {
    std::vector<Term> some_visit{{col.ever_visited[i], 1.0}};
    for (int t = 0; t < tau; ++t) some_visit.push_back({col.visit(i, t), -1.0});
    m.AddConstraint(fmt::format("visited_at_all_{}", i), std::move(some_visit),
                    RowSense::kLessEqual, 0.0);
    for (int t = 0; t < tau; ++t) {
      m.AddConstraint(fmt::format("visit_implies_selected_{}_{}", i, t + 1),
                      {{col.visit(i, t), 1.0}, {col.ever_visited[i], -1.0}},
                      RowSense::kLessEqual, 0.0);
    }
  }
  for (int t = 0; t < tau; ++t) {
    std::vector<Term> count{{col.vehicles[t], 1.0}, {col.slack[t], -1.0}};
    for (int i = 1; i <= n; ++i) count.push_back({col.collected(i, t), -1.0 / q});
    m.AddConstraint(fmt::format("vehicle_count_{}", t + 1), std::move(count),
                    RowSense::kEqual, 0.0);
  }
  if (with_valid_inequality) {
    for (int t = 0; t < tau; ++t) {
      std::vector<Term> fleet{{col.vehicles[t], -q}};
      for (int i = 1; i <= n; ++i) fleet.push_back({col.collected(i, t), 1.0});
      m.AddConstraint(fmt::format("fleet_capacity_{}", t + 1), std::move(fleet),
                      RowSense::kLessEqual, 0.0);
    }
  }
  return irr;
}

PartialSolution DecodeIrr(const IrrModel& irr, std::span<const double> x,
                          const Instance& inst) {
  const IrrColumns& col = irr.columns;
  PartialSolution s = PartialSolution::Empty(inst);
  s.vehicles.assign(inst.tau, 0.0);
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
  for (int t = 0; t < inst.tau; ++t) {
    s.purchase[t] = Clean(x[col.purchase[t]]);
    s.vehicles[t] = std::round(x[col.vehicles[t]]);
  }
  return s;
}

std::vector<double> EncodeIrr(const IrrModel& irr, const PartialSolution& s,
                              const Instance& inst) {
  const IrrColumns& col = irr.columns;
  std::vector<double> x(irr.model.num_variables(), 0.0);
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
    const double load = s.CollectedInPeriod(t) / inst.capacity;
    const double vehicles = std::ceil(load - 1e-9);
    x[col.vehicles[t]] = vehicles;
    x[col.slack[t]] = std::clamp(vehicles - load, 0.0, 1.0);
  }
  return x;
}

std::optional<PartialSolution> CompleteVisitPattern(const Grid<int>& visit,
                                                    const Instance& inst) {
  const int tau = inst.tau;
  PartialSolution s = PartialSolution::Empty(inst);
  s.vehicles.assign(tau, 0.0);
  for (int i = 1; i <= inst.n; ++i) {
    int last = -1;
    for (int t = 0; t < tau; ++t) {
      if (visit(i, t) == 1) last = t;
    }
    if (last < 0) continue;
    s.ever_visited[i] = 1;
    double stock = 0.0;
    for (int k = 1; k <= tau; ++k) {
      const int t = (last + k) % tau;
      stock += inst.accumulation(i, t);
      if (visit(i, t) == 1) {
        s.visit(i, t) = 1;
        if (stock > inst.capacity + 1e-9) return std::nullopt;
        s.collected(i, t) = stock;
        stock = 0.0;
      }
      s.inventory(i, t + 1) = stock;
    }
    s.inventory(i, 0) = s.inventory(i, tau);
  }
  double collected = 0.0;
  double required = 0.0;
  for (int t = 0; t < tau; ++t) {
    collected += s.CollectedInPeriod(t);
    required += inst.requirements[t];
  }
  if (collected > required + 1e-9) return std::nullopt;
  // Least cyclic fixed point of the just-in-time depot recursion.
  double start = 0.0;
  for (int round = 0; round <= 2 * tau + 2; ++round) {
    double stock = start;
    for (int t = 0; t < tau; ++t) {
      const double available = stock + s.CollectedInPeriod(t) - inst.requirements[t];
      s.purchase[t] = std::max(0.0, -available);
      stock = std::max(0.0, available);
      s.inventory(0, t + 1) = stock;
    }
    if (stock == start) break;
    start = stock;
  }
  s.inventory(0, 0) = s.inventory(0, tau);
  for (int t = 0; t < tau; ++t) {
    s.vehicles[t] = std::ceil(s.CollectedInPeriod(t) / inst.capacity - 1e-9);
  }
  return s;
}

double RoutingSurrogate(const PartialSolution& s, const Instance& inst, int t) {
  double per_liter = 0.0;
  for (int i = 1; i <= inst.n; ++i) {
    per_liter += (inst.distance(0, i) + inst.distance(i, 0)) * s.collected(i, t);
  }
  const double load = s.CollectedInPeriod(t) / inst.capacity;
  const double vehicles = std::ceil(load - 1e-9);
  const double slack = std::clamp(vehicles - load, 0.0, 1.0);
  return inst.traveling_cost * (per_liter / inst.capacity + ShortestRoundTrip(inst) * slack) +
         inst.vehicle_cost * vehicles;
}

double IrrObjective(const PartialSolution& s, const Instance& inst) {
  double total = 0.0;
  for (int t = 0; t < inst.tau; ++t) {
    total += RoutingSurrogate(s, inst, t) + inst.holding_cost * s.inventory(0, t + 1) +
             inst.purchase_cost * s.purchase[t];
  }
  return total;
}

namespace {

double PatternCost(const Grid<int>& visit, const Instance& inst) {
  std::optional<PartialSolution> plan = CompleteVisitPattern(visit, inst);
  return plan ? IrrObjective(*plan, inst) : std::numeric_limits<double>::infinity();
}

bool Selected(const Grid<int>& visit, int i) {
  for (int t = 0; t < visit.cols(); ++t) {
    if (visit(i, t) == 1) return true;
  }
  return false;
}

}  // namespace

Grid<int> ImproveVisitPattern(Grid<int> visit, const Instance& inst) {
  const int n = inst.n;
  const int tau = inst.tau;
  double cost = PatternCost(visit, inst);
  auto try_move = [&](Grid<int>& candidate) {
    const double c = PatternCost(candidate, inst);
    if (c < cost - 1e-9) {
      cost = c;
      visit = candidate;
      return true;
    }
    candidate = visit;
    return false;
  };
  bool improved = true;
  Grid<int> candidate = visit;
  while (improved) {
    improved = false;
    for (int i = 1; i <= n; ++i) {
      for (int t = 0; t < tau; ++t) {
        candidate(i, t) = 1 - candidate(i, t);
        improved |= try_move(candidate);
      }
    }
    for (int i = 1; i <= n; ++i) {
      if (!Selected(visit, i)) continue;
      for (int t = 0; t < tau; ++t) candidate(i, t) = 0;
      if (try_move(candidate)) {
        improved = true;
        continue;
      }
      for (int from = 0; from < tau; ++from) {
        if (visit(i, from) != 1) continue;
        for (int to = 0; to < tau; ++to) {
          if (visit(i, to) == 1) continue;
          candidate(i, from) = 0;
          candidate(i, to) = 1;
          if (try_move(candidate)) {
            improved = true;
            break;
          }
        }
      }
    }
    for (int i = 1; i <= n; ++i) {
      if (!Selected(visit, i)) continue;
      for (int j = 1; j <= n; ++j) {
        if (j == i || Selected(visit, j)) continue;
        for (int t = 0; t < tau; ++t) {
          candidate(j, t) = visit(i, t);
          candidate(i, t) = 0;
        }
        if (try_move(candidate)) {
          improved = true;
          break;
        }
      }
    }
  }
  return visit;
}

IrrResult SolveIrr(const Instance& inst, const milp::SolveParams& params, double delta,
                   bool with_valid_inequality) {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("delta must be nonnegative, got {}", delta));
  }
  const IrrModel irr = BuildIrr(inst, with_valid_inequality);
  milp::SolveParams p = params;
  if (!p.warm_start) p.warm_start = EncodeIrr(irr, PartialSolution::PurchaseOnly(inst), inst);
  int64_t heuristic_calls = 0;
  if (!p.node_heuristic) {
    p.node_heuristic = [&](std::span<const double> x) -> std::optional<std::vector<double>> {
      std::optional<PartialSolution> plan = RoundToPlan(irr, x, inst);
      if (!plan) return std::nullopt;
      if (heuristic_calls++ % kLocalSearchEvery == 0) {
        plan = CompleteVisitPattern(ImproveVisitPattern(plan->visit, inst), inst);
      }
      return EncodeIrr(irr, *plan, inst);
    };
  }
  std::vector<PoolEntry> seen;
  p.pool_callback = [&](const milp::Incumbent& inc) {
    seen.push_back({DecodeIrr(irr, inc.values, inst), inc.objective});
    if (params.pool_callback) params.pool_callback(inc);
  };
  const milp::SolveOutcome out = milp::SolveMilp(irr.model, p);
  if (!out.has_solution() || seen.empty()) {
    throw Error(ErrorCode::kInfeasible,
                fmt::format("relaxation of '{}' has no solution ({})", inst.name,
                            milp::SolveStatusName(out.status)));
  }

  IrrResult result;
  std::stable_sort(seen.begin(), seen.end(), [](const PoolEntry& a, const PoolEntry& b) {
    return a.objective < b.objective;
  });
  const double best = seen.front().objective;
  const double limit = best + std::abs(best) * delta / 100.0 + 1e-9;
  for (PoolEntry& entry : seen) {
    if (entry.objective > limit) break;
    const bool duplicate = std::any_of(
        result.pool.begin(), result.pool.end(), [&](const PoolEntry& kept) {
          return kept.partial.visit == entry.partial.visit &&
                 kept.partial.collected == entry.partial.collected;
        });
    if (!duplicate) result.pool.push_back(std::move(entry));
  }
  result.lower_bound = std::min(out.dual_bound, best);
  result.status = out.status;
  result.nodes = out.nodes;
  result.seconds = out.seconds;
  return result;
}

}  // namespace spirp
