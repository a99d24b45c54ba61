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

#include "spirp/routes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace spirp {
namespace {

int64_t UnitWeight(double w) {
  return std::max<int64_t>(0, static_cast<int64_t>(std::ceil(w - 1e-6)));
}

// Items sorted by index with their weights.
void SortByIndex(std::vector<int>& items, std::vector<double>& weights) {
  std::vector<size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return items[a] < items[b]; });
  std::vector<int> sorted_items;
  std::vector<double> sorted_weights;
  for (size_t k : order) {
    sorted_items.push_back(items[k]);
    sorted_weights.push_back(weights[k]);
  }
  items = std::move(sorted_items);
  weights = std::move(sorted_weights);
}

double Tour(const std::vector<int>& tour, const Grid<double>& d) {
  double length = 0.0;
  for (size_t k = 1; k < tour.size(); ++k) length += d(tour[k - 1], tour[k]);
  return length;
}

}  // namespace

std::vector<int> DpKnapsack(const std::vector<int>& items_in,
                            const std::vector<double>& weights_in, double capacity) {
  if (items_in.size() != weights_in.size()) {
    throw Error(ErrorCode::kInvalidArgument, "knapsack items and weights differ in length");
  }
  std::vector<int> items = items_in;
  std::vector<double> weights = weights_in;
  SortByIndex(items, weights);
  const int k = static_cast<int>(items.size());
  const int64_t cap = static_cast<int64_t>(std::floor(capacity + 1e-9));
  if (cap < 0) return {};
  const size_t width = static_cast<size_t>(cap) + 1;
  // best[j * width + c]: largest weight from items j..k-1 within c units.
  std::vector<double> best(static_cast<size_t>(k + 1) * width, 0.0);
  for (int j = k - 1; j >= 0; --j) {
    const int64_t wj = UnitWeight(weights[j]);
    for (int64_t c = 0; c <= cap; ++c) {
      double value = best[(j + 1) * width + c];
      if (wj <= c) value = std::max(value, weights[j] + best[(j + 1) * width + (c - wj)]);
      best[j * width + c] = value;
    }
  }
  std::vector<int> chosen;
  int64_t c = cap;
  for (int j = 0; j < k; ++j) {
    const int64_t wj = UnitWeight(weights[j]);
    if (wj > c) continue;
    const double with = weights[j] + best[(j + 1) * width + (c - wj)];
    if (std::abs(with - best[j * width + c]) <= 1e-9 * std::max(1.0, with)) {
      chosen.push_back(items[j]);
      c -= wj;
    }
  }
  return chosen;
}

BinPackingResult SolveBinPacking(const std::vector<int>& items,
                                 const std::vector<double>& weights, double capacity,
                                 const Partition& warm, const milp::SolveParams& params) {
  const int k = static_cast<int>(items.size());
  const int bins = static_cast<int>(warm.size());
  BinPackingResult result{warm, false, milp::SolveStatus::kOptimal};
  if (bins <= 1) return result;

  milp::MilpModel model("bin-packing");
  std::vector<int> used(bins);
  for (int b = 0; b < bins; ++b) used[b] = model.AddBinary(fmt::format("gamma_{}", b), 1.0);
  Grid<int> assign(k, bins, -1);
  for (int i = 0; i < k; ++i) {
    std::vector<milp::Term> once;
    for (int b = 0; b < bins; ++b) {
      assign(i, b) = model.AddBinary(fmt::format("beta_{}_{}", items[i], b));
      once.push_back({assign(i, b), 1.0});
    }
    model.AddConstraint(fmt::format("assign_{}", items[i]), std::move(once),
                        milp::RowSense::kEqual, 1.0);
  }
  for (int b = 0; b < bins; ++b) {
    std::vector<milp::Term> load{{used[b], -capacity}};
    for (int i = 0; i < k; ++i) load.push_back({assign(i, b), weights[i]});
    model.AddConstraint(fmt::format("bin_capacity_{}", b), std::move(load),
                        milp::RowSense::kLessEqual, 0.0);
  }
  for (int b = 0; b + 1 < bins; ++b) {
    model.AddConstraint(fmt::format("bin_order_{}", b), {{used[b], 1.0}, {used[b + 1], -1.0}},
                        milp::RowSense::kGreaterEqual, 0.0);
  }

  std::vector<double> start(model.num_variables(), 0.0);
  for (int b = 0; b < bins; ++b) {
    start[used[b]] = 1.0;
    for (int item : warm[b]) {
      const auto it = std::find(items.begin(), items.end(), item);
      if (it == items.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("warm partition references unknown item {}", item));
      }
      start[assign(static_cast<int>(it - items.begin()), b)] = 1.0;
    }
  }
  milp::SolveParams p = params;
  p.warm_start = std::move(start);
  p.pool_callback = nullptr;
  const milp::SolveOutcome out = milp::SolveMilp(model, p);
  result.status = out.status;
  if (!out.has_solution()) return result;

  Partition partition;
  for (int b = 0; b < bins; ++b) {
    std::vector<int> part;
    for (int i = 0; i < k; ++i) {
      if (out.solution[assign(i, b)] > 0.5) part.push_back(items[i]);
    }
    if (!part.empty()) partition.push_back(std::move(part));
  }
  if (partition.size() < warm.size()) {
    result.partition = std::move(partition);
    result.improved = true;
  }
  return result;
}

std::vector<int> NearestNeighborTour(const std::vector<int>& subset,
                                     const Grid<double>& d) {
  std::vector<int> left = subset;
  std::sort(left.begin(), left.end());
  std::vector<int> tour{0};
  int current = 0;
  while (!left.empty()) {
    size_t pick = 0;
    for (size_t k = 1; k < left.size(); ++k) {
      if (d(current, left[k]) < d(current, left[pick])) pick = k;
    }
    current = left[pick];
    tour.push_back(current);
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  tour.push_back(0);
  return tour;
}

std::vector<int> FarthestInsertionTour(const std::vector<int>& subset,
                                       const Grid<double>& d) {
  std::vector<int> left = subset;
  std::sort(left.begin(), left.end());
  if (left.empty()) return {0, 0};
  auto gap = [&](int a, int b) { return d(a, b) + d(b, a); };
  size_t first = 0;
  for (size_t k = 1; k < left.size(); ++k) {
    if (gap(0, left[k]) > gap(0, left[first])) first = k;
  }
  std::vector<int> tour{0, left[first], 0};
  // Distance from every outside node to the tour.
  std::vector<double> reach(left.size());
  for (size_t k = 0; k < left.size(); ++k) reach[k] = std::min(gap(0, left[k]), gap(left[first], left[k]));
  left.erase(left.begin() + static_cast<std::ptrdiff_t>(first));
  reach.erase(reach.begin() + static_cast<std::ptrdiff_t>(first));
  while (!left.empty()) {
    size_t pick = 0;
    for (size_t k = 1; k < left.size(); ++k) {
      if (reach[k] > reach[pick]) pick = k;
    }
    const int node = left[pick];
    size_t position = 1;
    double cheapest = std::numeric_limits<double>::infinity();
    for (size_t p = 1; p < tour.size(); ++p) {
      const double delta = d(tour[p - 1], node) + d(node, tour[p]) - d(tour[p - 1], tour[p]);
      if (delta < cheapest) {
        cheapest = delta;
        position = p;
      }
    }
    tour.insert(tour.begin() + static_cast<std::ptrdiff_t>(position), node);
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
    reach.erase(reach.begin() + static_cast<std::ptrdiff_t>(pick));
    for (size_t k = 0; k < left.size(); ++k) reach[k] = std::min(reach[k], gap(node, left[k]));
  }
  return tour;
}

ConstructionResult ConstructRoutes(const PartialSolution& partial, const Instance& inst,
                                   const ConstructionOptions& options) {
  ConstructionResult result;
  result.solution.partial = partial;
  result.solution.routes.assign(inst.tau, {});
  result.vehicles.assign(inst.tau, 0);
  result.periods.assign(inst.tau, {});
  for (int t = 0; t < inst.tau; ++t) {
    const std::vector<int> visited = partial.VisitedNodes(t);
    if (visited.empty()) continue;
    std::vector<double> weights;
    double total = 0.0;
    for (int i : visited) {
      weights.push_back(partial.collected(i, t));
      total += partial.collected(i, t);
    }

    Partition parts;
    std::vector<int> left = visited;
    while (!left.empty()) {
      std::vector<double> left_weights;
      for (int i : left) left_weights.push_back(partial.collected(i, t));
      std::vector<int> chosen = DpKnapsack(left, left_weights, inst.capacity);
      if (chosen.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("collection of {} liters at node {} in period {} exceeds "
                                "vehicle capacity {}",
                                left_weights.front(), left.front(), t, inst.capacity));
      }
      std::erase_if(left, [&](int i) {
        return std::find(chosen.begin(), chosen.end(), i) != chosen.end();
      });
      parts.push_back(std::move(chosen));
    }
    PeriodConstruction& record = result.periods[t];
    record.knapsack_parts = static_cast<int>(parts.size());
    const double lower = std::ceil(total / inst.capacity - 1e-9);
    if (static_cast<double>(parts.size()) > lower) {
      record.bin_packing = true;
      parts = SolveBinPacking(visited, weights, inst.capacity, parts, options.bin_packing)
                  .partition;
    }
    record.final_parts = static_cast<int>(parts.size());

    for (const std::vector<int>& part : parts) {
      std::vector<int> tour = NearestNeighborTour(part, inst.distance);
      std::vector<int> alternative = FarthestInsertionTour(part, inst.distance);
      if (Tour(alternative, inst.distance) < Tour(tour, inst.distance)) tour = std::move(alternative);
      Route route;
      route.period = t;
      route.nodes = std::move(tour);
      for (int i : part) route.load += partial.collected(i, t);
      result.solution.routes[t].push_back(std::move(route));
    }
    result.vehicles[t] = record.final_parts;
  }
  result.stats = StatsFromRecords(result.periods);
  return result;
}

PartitionStats StatsFromRecords(const std::vector<PeriodConstruction>& periods) {
  PartitionStats stats;
  for (const PeriodConstruction& p : periods) {
    if (p.knapsack_parts > 1) ++stats.knpart;
    if (p.bin_packing) ++stats.bppart;
    if (p.bin_packing && p.final_parts < p.knapsack_parts) ++stats.bpimpr;
  }
  return stats;
}

}  // namespace spirp
