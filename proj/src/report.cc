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

#include "spirp/report.h"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace spirp {
namespace {

using Json = nlohmann::ordered_json;

Json CostJson(const CostBreakdown& c) {
  return {{"traveling", c.traveling}, {"vehicles", c.vehicles}, {"holding", c.holding},
          {"purchase", c.purchase},   {"total", c.total}};
}

Json StatsJson(const PartitionStats& s) {
  return {{"knpart", s.knpart}, {"bppart", s.bppart}, {"bpimpr", s.bpimpr}};
}

Json ShapeJson(const ShapeStats& s) {
  return {{"veh_min", s.veh_min}, {"veh_avg", s.veh_avg}, {"veh_max", s.veh_max},
          {"col_min", s.col_min}, {"col_avg", s.col_avg}, {"col_max", s.col_max}};
}

template <typename T>
Json GridJson(const Grid<T>& g) {
  Json rows = Json::array();
  for (int r = 0; r < g.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json MemberJson(const MemberRecord& m) {
  Json periods = Json::array();
  for (const PeriodConstruction& p : m.periods) {
    periods.push_back({{"knapsack_parts", p.knapsack_parts},
                       {"final_parts", p.final_parts},
                       {"bin_packing", p.bin_packing}});
  }
  return {{"irr_objective", m.irr_objective},
          {"constructed_cost", m.constructed_cost},
          {"periods", std::move(periods)}};
}

[[noreturn]] void Fail(const std::string& what) {
  throw Error(ErrorCode::kParse, "solution file: " + what);
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) Fail(fmt::format("missing field '{}'", key));
  return j.at(key);
}

template <typename T>
Grid<T> ReadGrid(const Json& j, const char* key, int rows, int cols) {
  const Json& a = Field(j, key);
  if (!a.is_array() || static_cast<int>(a.size()) != rows) {
    Fail(fmt::format("'{}' must have {} rows", key, rows));
  }
  Grid<T> g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!a[r].is_array() || static_cast<int>(a[r].size()) != cols) {
      Fail(fmt::format("'{}' row {} must have {} entries", key, r, cols));
    }
    for (int c = 0; c < cols; ++c) {
      if (!a[r][c].is_number()) Fail(fmt::format("'{}'[{}][{}] is not a number", key, r, c));
      g(r, c) = a[r][c].get<T>();
    }
  }
  return g;
}

template <typename T>
std::vector<T> ReadVector(const Json& j, const char* key, size_t size) {
  const Json& a = Field(j, key);
  if (!a.is_array() || a.size() != size) {
    Fail(fmt::format("'{}' must have {} entries", key, size));
  }
  std::vector<T> v;
  for (const Json& x : a) {
    if (!x.is_number()) Fail(fmt::format("'{}' holds a non-number", key));
    v.push_back(x.get<T>());
  }
  return v;
}

bool Close(double a, double b) {
  return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b));
}

std::string Number(double x) { return fmt::format("{}", x); }

}  // namespace

std::string ReportToJson(const RunReport& r, bool with_timings) {
  const RunParams& p = r.params;
  Json j;
  j["instance"] = r.instance;
  j["variant"] = VariantName(p.variant);
  j["seed"] = p.seed;
  j["params"] = {{"delta", p.delta},
                 {"elite_k", p.elite_k},
                 {"time_limit", p.time_limit},
                 {"node_limit", p.node_limit},
                 {"mip_search_time_limit", p.mip_search_time_limit},
                 {"mip_search_node_limit", p.mip_search_node_limit},
                 {"bin_packing_time_limit", p.bin_packing_time_limit},
                 {"lbt", p.vehicle_floor == VehicleFloor::kLiteral ? "literal" : "ceiling"},
                 {"valid_inequality", p.valid_inequality}};
  j["upper_bound"] = r.upper_bound;
  j["lower_bound"] = r.lower_bound;
  j["gap"] = r.gap;
  j["constructed_upper_bound"] = r.constructed_upper_bound;
  j["cost"] = CostJson(r.cost);
  j["irr"] = {{"status", milp::SolveStatusName(r.irr_status)}, {"nodes", r.irr_nodes}};
  j["pool_size"] = r.pool.size();
  j["stats"] = StatsJson(r.stats);
  j["shape"] = ShapeJson(r.shape);
  Json search = Json::array();
  for (size_t t = 0; t < r.mip_search.size(); ++t) {
    const PeriodSearch& s = r.mip_search[t];
    Json entry = {{"period", t + 1},
                  {"before", s.before},
                  {"after", s.after},
                  {"solved", s.solved},
                  {"status", milp::SolveStatusName(s.status)},
                  {"nodes", s.nodes}};
    if (!s.failure.empty()) entry["failure"] = s.failure;
    search.push_back(std::move(entry));
  }
  j["mip_search"] = std::move(search);
  if (with_timings) {
    j["times"] = {{"irr", r.times.irr},
                  {"construction", r.times.construction},
                  {"mip_search", r.times.mip_search},
                  {"total", r.times.total}};
  }
  return j.dump(2) + "\n";
}

std::string SolutionToJson(const RunReport& r) {
  const PartialSolution& s = r.best.partial;
  Json j;
  j["instance"] = r.instance;
  j["variant"] = VariantName(r.params.variant);
  j["cost"] = CostJson(r.cost);
  j["visit"] = GridJson(s.visit);
  j["ever_visited"] = s.ever_visited;
  j["collected"] = GridJson(s.collected);
  j["inventory"] = GridJson(s.inventory);
  j["purchase"] = s.purchase;
  Json routes = Json::array();
  for (const std::vector<Route>& period : r.best.routes) {
    Json list = Json::array();
    for (const Route& route : period) list.push_back({{"nodes", route.nodes}, {"load", route.load}});
    routes.push_back(std::move(list));
  }
  j["routes"] = std::move(routes);
  j["stats"] = StatsJson(r.stats);
  j["shape"] = ShapeJson(r.shape);
  Json pool = Json::array();
  for (const MemberRecord& m : r.pool) pool.push_back(MemberJson(m));
  j["construction"] = std::move(pool);
  return j.dump(2) + "\n";
}

SolutionFile ParseSolution(std::string_view text, const Instance& inst) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(e.what());
  }
  const int n = inst.n;
  const int tau = inst.tau;
  SolutionFile file;
  if (j.contains("instance") && j["instance"].is_string()) file.instance = j["instance"];
  PartialSolution& s = file.solution.partial;
  s = PartialSolution::Empty(inst);
  s.visit = ReadGrid<int>(j, "visit", n + 1, tau);
  s.ever_visited = ReadVector<int>(j, "ever_visited", n + 1);
  s.collected = ReadGrid<double>(j, "collected", n + 1, tau);
  s.inventory = ReadGrid<double>(j, "inventory", n + 1, tau + 1);
  s.purchase = ReadVector<double>(j, "purchase", tau);

  const Json& routes = Field(j, "routes");
  if (!routes.is_array() || static_cast<int>(routes.size()) != tau) {
    Fail(fmt::format("'routes' must list {} periods", tau));
  }
  file.solution.routes.assign(tau, {});
  for (int t = 0; t < tau; ++t) {
    if (!routes[t].is_array()) Fail(fmt::format("routes of period {} must be a list", t + 1));
    for (const Json& r : routes[t]) {
      Route route;
      route.period = t;
      const Json& nodes = Field(r, "nodes");
      if (!nodes.is_array()) Fail("route 'nodes' must be a list");
      for (const Json& v : nodes) {
        if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > n) {
          Fail(fmt::format("route in period {} names an unknown node", t + 1));
        }
        route.nodes.push_back(v.get<int>());
      }
      const Json& load = Field(r, "load");
      if (!load.is_number()) Fail("route 'load' must be a number");
      route.load = load.get<double>();
      file.solution.routes[t].push_back(std::move(route));
    }
  }

  if (j.contains("cost")) {
    const Json& c = j["cost"];
    file.claimed_cost = CostBreakdown{Field(c, "traveling").get<double>(),
                                      Field(c, "vehicles").get<double>(),
                                      Field(c, "holding").get<double>(),
                                      Field(c, "purchase").get<double>(),
                                      Field(c, "total").get<double>()};
  }
  if (j.contains("stats")) {
    const Json& st = j["stats"];
    file.stats = PartitionStats{Field(st, "knpart").get<int64_t>(),
                                Field(st, "bppart").get<int64_t>(),
                                Field(st, "bpimpr").get<int64_t>()};
  }
  if (j.contains("shape")) {
    const Json& sh = j["shape"];
    file.shape = ShapeStats{Field(sh, "veh_min").get<int>(),   Field(sh, "veh_avg").get<double>(),
                            Field(sh, "veh_max").get<int>(),   Field(sh, "col_min").get<int>(),
                            Field(sh, "col_avg").get<double>(), Field(sh, "col_max").get<int>()};
  }
  if (j.contains("construction")) {
    for (const Json& m : j["construction"]) {
      MemberRecord record;
      record.irr_objective = Field(m, "irr_objective").get<double>();
      record.constructed_cost = Field(m, "constructed_cost").get<double>();
      for (const Json& p : Field(m, "periods")) {
        record.periods.push_back({Field(p, "knapsack_parts").get<int>(),
                                  Field(p, "final_parts").get<int>(),
                                  Field(p, "bin_packing").get<bool>()});
      }
      file.pool.push_back(std::move(record));
    }
  }
  return file;
}

std::string ValidationResult::ToString() const {
  std::ostringstream out;
  out << fmt::format("cost: traveling {} vehicles {} holding {} purchase {} total {}\n",
                     cost.traveling, cost.vehicles, cost.holding, cost.purchase, cost.total);
  if (!feasibility.feasible()) out << feasibility.ToString();
  for (const std::string& m : mismatches) out << m << "\n";
  out << (ok() ? "valid\n" : "invalid\n");
  return out.str();
}

ValidationResult ValidateSolution(const SolutionFile& file, const Instance& inst) {
  ValidationResult result;
  result.feasibility = CheckFeasibility(file.solution, inst);
  try {
    result.cost = EvaluateCost(file.solution, inst);
  } catch (const Error& e) {
    result.mismatches.push_back(e.what());
    return result;
  }
  if (file.claimed_cost) {
    const CostBreakdown& c = *file.claimed_cost;
    const std::pair<const char*, std::pair<double, double>> terms[] = {
        {"traveling", {c.traveling, result.cost.traveling}},
        {"vehicles", {c.vehicles, result.cost.vehicles}},
        {"holding", {c.holding, result.cost.holding}},
        {"purchase", {c.purchase, result.cost.purchase}},
        {"total", {c.total, result.cost.total}}};
    for (const auto& [name, values] : terms) {
      if (!Close(values.first, values.second)) {
        result.mismatches.push_back(fmt::format("cost {} claimed {} but recomputed {}", name,
                                                values.first, values.second));
      }
    }
  }
  if (file.stats) {
    PartitionStats recomputed;
    for (const MemberRecord& m : file.pool) recomputed += StatsFromRecords(m.periods);
    if (!(recomputed == *file.stats)) {
      result.mismatches.push_back(fmt::format(
          "stats claimed {}/{}/{} but construction records give {}/{}/{}", file.stats->knpart,
          file.stats->bppart, file.stats->bpimpr, recomputed.knpart, recomputed.bppart,
          recomputed.bpimpr));
    }
  }
  if (file.shape) {
    const ShapeStats recomputed = ComputeShapeStats(file.solution);
    if (!(recomputed == *file.shape)) {
      result.mismatches.push_back("shape statistics do not match the routes");
    }
  }
  return result;
}

std::string BenchCsvHeader() {
  return "instance,variant,z,time,gap,lower_bound,knpart,bppart,bpimpr,veh_min,veh_avg,"
         "veh_max,col_min,col_avg,col_max";
}

std::string BenchCsvRow(const RunReport& r) {
  const ShapeStats& s = r.shape;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.instance,
                     VariantName(r.params.variant), Number(r.upper_bound),
                     Number(r.times.total), Number(r.gap), Number(r.lower_bound), r.stats.knpart,
                     r.stats.bppart, r.stats.bpimpr, s.veh_min, Number(s.veh_avg), s.veh_max,
                     s.col_min, Number(s.col_avg), s.col_max);
}

std::string BenchCsv(const std::vector<const RunReport*>& reports,
                     const std::map<std::string, double>* reference) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no runs to tabulate");
  std::ostringstream out;
  out << BenchCsvHeader() << "\n";
  std::vector<double> sums(13, 0.0);
  for (const RunReport* r : reports) {
    out << BenchCsvRow(*r) << "\n";
    const ShapeStats& s = r->shape;
    const double values[] = {r->upper_bound,
                             r->times.total,
                             r->gap,
                             r->lower_bound,
                             static_cast<double>(r->stats.knpart),
                             static_cast<double>(r->stats.bppart),
                             static_cast<double>(r->stats.bpimpr),
                             static_cast<double>(s.veh_min),
                             s.veh_avg,
                             static_cast<double>(s.veh_max),
                             static_cast<double>(s.col_min),
                             s.col_avg,
                             static_cast<double>(s.col_max)};
    for (size_t k = 0; k < sums.size(); ++k) sums[k] += values[k];
  }
  const double count = static_cast<double>(reports.size());
  out << "Averages,";
  for (double sum : sums) out << "," << Number(sum / count);
  out << "\n";
  if (reference) {
    int compared = 0;
    int wins = 0;
    for (const RunReport* r : reports) {
      const auto it = reference->find(r->instance);
      if (it == reference->end()) continue;
      ++compared;
      if (r->upper_bound < it->second) ++wins;
    }
    const double share = compared == 0 ? 0.0 : 100.0 * wins / compared;
    out << "<ref(%),," << Number(share) << std::string(12, ',') << "\n";
  }
  return out.str();
}

std::map<std::string, double> ParseReferenceCsv(std::string_view text) {
  std::map<std::string, double> reference;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kParse,
                  fmt::format("reference line {}: expected 'instance,value'", line_no));
    }
    const std::string name = line.substr(0, comma);
    std::string value = line.substr(comma + 1);
    if (const size_t next = value.find(','); next != std::string::npos) value.resize(next);
    try {
      size_t used = 0;
      const double x = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      reference[name] = x;
    } catch (const std::exception&) {
      if (line_no == 1) continue;
      throw Error(ErrorCode::kParse,
                  fmt::format("reference line {}: '{}' is not a number", line_no, value));
    }
  }
  return reference;
}

}  // namespace spirp
