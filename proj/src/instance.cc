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

#include "spirp/instance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace spirp {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kCoordinateTolerance = 1e-9;
constexpr double kSquareSide = 30.0;  // km

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, path + ": " + what);
}

[[noreturn]] void FailParse(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kParse, path + ": " + what);
}

void RequireNonNegative(double value, const std::string& path) {
  if (!std::isfinite(value)) Fail(path, "value is not finite");
  if (value < 0.0) Fail(path, fmt::format("negative value {}", value));
}

const Json& Field(const Json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) FailParse(key, "missing field");
  return *it;
}

double Number(const Json& value, const std::string& path) {
  if (!value.is_number()) FailParse(path, "expected a number");
  return value.get<double>();
}

int Count(const Json& value, const std::string& path) {
  if (!value.is_number_integer()) FailParse(path, "expected an integer");
  return value.get<int>();
}

std::vector<double> NumberArray(const Json& value, const std::string& path,
                                int expected) {
  if (!value.is_array()) FailParse(path, "expected an array");
  if (static_cast<int>(value.size()) != expected) {
    Fail(path, fmt::format("dimension mismatch: expected {} entries, got {}",
                           expected, value.size()));
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (size_t k = 0; k < value.size(); ++k) {
    out.push_back(Number(value[k], fmt::format("{}[{}]", path, k)));
  }
  return out;
}

// Uniform double in [0, 1) from the top 53 bits; unlike
// std::uniform_real_distribution this is identical on every platform.
double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string LevelTag(RequirementLevel level) {
  switch (level) {
    case RequirementLevel::kLow:
      return "LOW";
    case RequirementLevel::kMedium:
      return "MED";
    case RequirementLevel::kHigh:
      return "HIGH";
  }
  return "";
}

bool Near(double a, double b) { return std::abs(a - b) <= 1e-12; }

struct RecipeConstants {
  double capacity;
  double vehicle_cost;
  double traveling_cost;
  int default_n;
};

RecipeConstants ConstantsFor(const std::string& id) {
  if (id == "benchmark1-Fio") return {550.0, 90.0, 0.19, 25};
  if (id == "benchmark1-Dob") return {920.0, 110.0, 0.22, 25};
  if (id == "benchmark2") return {550.0, 90.0, 0.24, 0};
  if (id == "benchmark3") return {550.0, 90.0, 0.24, 0};
  throw Error(ErrorCode::kInvalidArgument, "unknown recipe '" + id + "'");
}

bool IsBenchmark1(const std::string& id) {
  return id == "benchmark1-Fio" || id == "benchmark1-Dob";
}

double Benchmark1Requirement(double accumulation, RequirementLevel level) {
  // The medium level at 30 l/day is the midpoint of low and high.
  if (Near(accumulation, 30.0)) {
    switch (level) {
      case RequirementLevel::kLow:
        return 600.0;
      case RequirementLevel::kMedium:
        return 750.0;
      case RequirementLevel::kHigh:
        return 900.0;
    }
  }
  switch (level) {
    case RequirementLevel::kLow:
      return 1200.0;
    case RequirementLevel::kMedium:
      return 1500.0;
    case RequirementLevel::kHigh:
      return 1800.0;
  }
  return 0.0;
}

// Validated recipe with every default resolved.
struct ResolvedRecipe {
  RecipeConstants constants;
  int n;
  double requirement;
};

ResolvedRecipe Resolve(const Recipe& recipe) {
  const RecipeConstants constants = ConstantsFor(recipe.id);
  auto unsupported = [&](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported parameter combination for " + recipe.id + ": " +
                    what);
  };
  if (!Near(recipe.accumulation, 30.0) && !Near(recipe.accumulation, 60.0)) {
    unsupported(fmt::format("accumulation {} (expected 30 or 60)",
                            recipe.accumulation));
  }
  ResolvedRecipe out{constants, recipe.n, 0.0};
  if (IsBenchmark1(recipe.id)) {
    if (out.n == 0) out.n = constants.default_n;
    if (out.n != 25) unsupported(fmt::format("n={} (expected 25)", out.n));
    if (!recipe.level.has_value()) unsupported("requirement level missing");
    if (recipe.requirement.has_value()) {
      unsupported("explicit requirement (benchmark 1 uses levels)");
    }
    const double p = recipe.price;
    if (!Near(p, 0.25) && !Near(p, 0.5) && !Near(p, 1.25)) {
      unsupported(fmt::format("price {} (expected 0.25, 0.5 or 1.25)", p));
    }
    out.requirement = Benchmark1Requirement(recipe.accumulation, *recipe.level);
    return out;
  }
  static const std::vector<int> kBenchmark2Sizes = {20, 25, 30, 35, 40,
                                                    50, 60, 80, 100};
  static const std::vector<int> kBenchmark3Sizes = {120, 160, 200, 300};
  const auto& sizes =
      recipe.id == "benchmark2" ? kBenchmark2Sizes : kBenchmark3Sizes;
  if (std::find(sizes.begin(), sizes.end(), out.n) == sizes.end()) {
    unsupported(fmt::format("n={}", out.n));
  }
  if (!recipe.requirement.has_value() || !(*recipe.requirement > 0.0)) {
    unsupported("positive daily requirement (--r) missing");
  }
  if (recipe.level.has_value()) {
    unsupported("requirement level (benchmarks 2 and 3 use --r)");
  }
  if (!Near(recipe.price, 2.5) && !Near(recipe.price, 3.5)) {
    unsupported(fmt::format("price {} (expected 2.5 or 3.5)", recipe.price));
  }
  out.requirement = *recipe.requirement;
  return out;
}

}  // namespace

Grid<double> EuclideanDistances(const std::vector<Point>& points) {
  const int size = static_cast<int>(points.size());
  Grid<double> d(size, size, 0.0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      if (i == j) continue;
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      d(i, j) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return d;
}

void ValidateInstance(const Instance& inst) {
  if (inst.n < 1) Fail("n", "must be at least 1");
  if (inst.tau < 1) Fail("tau", "must be at least 1");
  if (!std::isfinite(inst.capacity) || !(inst.capacity > 0.0)) {
    Fail("capacity", "must be positive");
  }
  RequireNonNegative(inst.traveling_cost, "traveling_cost");
  RequireNonNegative(inst.vehicle_cost, "vehicle_cost");
  RequireNonNegative(inst.holding_cost, "holding_cost");
  RequireNonNegative(inst.purchase_cost, "purchase_cost");
  if (static_cast<int>(inst.requirements.size()) != inst.tau) {
    Fail("requirements", "dimension mismatch: expected tau entries");
  }
  for (int t = 0; t < inst.tau; ++t) {
    RequireNonNegative(inst.requirements[t], fmt::format("requirements[{}]", t));
  }
  if (inst.accumulation.rows() != inst.n + 1 ||
      inst.accumulation.cols() != inst.tau) {
    Fail("accumulation", "dimension mismatch");
  }
  for (int t = 0; t < inst.tau; ++t) {
    if (inst.accumulation(0, t) != 0.0) {
      Fail(fmt::format("accumulation[depot][{}]", t), "depot must be zero");
    }
  }
  for (int i = 1; i <= inst.n; ++i) {
    for (int t = 0; t < inst.tau; ++t) {
      RequireNonNegative(inst.accumulation(i, t),
                         fmt::format("accumulation[{}][{}]", i - 1, t));
    }
  }
  if (inst.distance.rows() != inst.n + 1 || inst.distance.cols() != inst.n + 1) {
    Fail("distances", "dimension mismatch");
  }
  for (int i = 0; i <= inst.n; ++i) {
    for (int j = 0; j <= inst.n; ++j) {
      const std::string path = fmt::format("distances[{}][{}]", i, j);
      RequireNonNegative(inst.distance(i, j), path);
      if (i == j && inst.distance(i, j) != 0.0) Fail(path, "diagonal must be 0");
    }
  }
  if (inst.coordinates.has_value()) {
    if (static_cast<int>(inst.coordinates->size()) != inst.n + 1) {
      Fail("coordinates", "dimension mismatch: expected n+1 points");
    }
    const Grid<double> euclid = EuclideanDistances(*inst.coordinates);
    for (int i = 0; i <= inst.n; ++i) {
      for (int j = 0; j <= inst.n; ++j) {
        if (std::abs(euclid(i, j) - inst.distance(i, j)) > kCoordinateTolerance) {
          Fail(fmt::format("distances[{}][{}]", i, j),
               "distance/coordinate mismatch");
        }
      }
    }
  }
}

Instance ParseInstance(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("malformed instance: ") + e.what());
  }
  if (!doc.is_object()) FailParse("$", "expected an object");

  Instance inst;
  const Json& name = Field(doc, "name");
  if (!name.is_string()) FailParse("name", "expected a string");
  inst.name = name.get<std::string>();
  inst.n = Count(Field(doc, "n"), "n");
  inst.tau = Count(Field(doc, "tau"), "tau");
  if (inst.n < 1) Fail("n", "must be at least 1");
  if (inst.tau < 1) Fail("tau", "must be at least 1");
  inst.capacity = Number(Field(doc, "capacity"), "capacity");
  inst.traveling_cost = Number(Field(doc, "traveling_cost"), "traveling_cost");
  inst.vehicle_cost = Number(Field(doc, "vehicle_cost"), "vehicle_cost");
  inst.holding_cost = Number(Field(doc, "holding_cost"), "holding_cost");
  inst.purchase_cost = Number(Field(doc, "purchase_cost"), "purchase_cost");
  inst.requirements =
      NumberArray(Field(doc, "requirements"), "requirements", inst.tau);

  const Json& acc = Field(doc, "accumulation");
  if (!acc.is_array()) FailParse("accumulation", "expected an array");
  if (static_cast<int>(acc.size()) != inst.n) {
    Fail("accumulation", fmt::format("dimension mismatch: expected {} rows, got {}",
                                     inst.n, acc.size()));
  }
  inst.accumulation = Grid<double>(inst.n + 1, inst.tau, 0.0);
  for (int i = 0; i < inst.n; ++i) {
    const auto row =
        NumberArray(acc[i], fmt::format("accumulation[{}]", i), inst.tau);
    for (int t = 0; t < inst.tau; ++t) inst.accumulation(i + 1, t) = row[t];
  }

  const bool has_coords = doc.contains("coordinates");
  const bool has_dist = doc.contains("distances");
  if (!has_coords && !has_dist) {
    FailParse("coordinates", "missing both coordinates and distances");
  }
  if (has_coords) {
    const Json& coords = doc["coordinates"];
    if (!coords.is_array()) FailParse("coordinates", "expected an array");
    if (static_cast<int>(coords.size()) != inst.n + 1) {
      Fail("coordinates", fmt::format("dimension mismatch: expected {} points, got {}",
                                      inst.n + 1, coords.size()));
    }
    std::vector<Point> points;
    for (int i = 0; i <= inst.n; ++i) {
      const auto xy = NumberArray(coords[i], fmt::format("coordinates[{}]", i), 2);
      points.push_back({xy[0], xy[1]});
    }
    inst.coordinates = std::move(points);
  }
  if (has_dist) {
    const Json& dist = doc["distances"];
    if (!dist.is_array()) FailParse("distances", "expected an array");
    if (static_cast<int>(dist.size()) != inst.n + 1) {
      Fail("distances", fmt::format("dimension mismatch: expected {} rows, got {}",
                                    inst.n + 1, dist.size()));
    }
    inst.distance = Grid<double>(inst.n + 1, inst.n + 1, 0.0);
    for (int i = 0; i <= inst.n; ++i) {
      const auto row =
          NumberArray(dist[i], fmt::format("distances[{}]", i), inst.n + 1);
      for (int j = 0; j <= inst.n; ++j) inst.distance(i, j) = row[j];
    }
  } else {
    inst.distance = EuclideanDistances(*inst.coordinates);
  }
  ValidateInstance(inst);
  return inst;
}

Instance LoadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open instance file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseInstance(buffer.str());
}

std::string SerializeInstance(const Instance& inst) {
  Json doc;
  doc["name"] = inst.name;
  doc["n"] = inst.n;
  doc["tau"] = inst.tau;
  doc["capacity"] = inst.capacity;
  doc["traveling_cost"] = inst.traveling_cost;
  doc["vehicle_cost"] = inst.vehicle_cost;
  doc["holding_cost"] = inst.holding_cost;
  doc["purchase_cost"] = inst.purchase_cost;
  doc["requirements"] = inst.requirements;
  Json acc = Json::array();
  for (int i = 1; i <= inst.n; ++i) {
    std::vector<double> row(inst.tau);
    for (int t = 0; t < inst.tau; ++t) row[t] = inst.accumulation(i, t);
    acc.push_back(row);
  }
  doc["accumulation"] = std::move(acc);
  bool write_distances = true;
  if (inst.coordinates.has_value()) {
    Json coords = Json::array();
    for (const Point& p : *inst.coordinates) coords.push_back({p.x, p.y});
    doc["coordinates"] = std::move(coords);
    // Distances are only written when they are not bitwise the Euclidean ones.
    write_distances = !(EuclideanDistances(*inst.coordinates) == inst.distance);
  }
  if (write_distances) {
    Json dist = Json::array();
    for (int i = 0; i <= inst.n; ++i) {
      std::vector<double> row(inst.n + 1);
      for (int j = 0; j <= inst.n; ++j) row[j] = inst.distance(i, j);
      dist.push_back(row);
    }
    doc["distances"] = std::move(dist);
  }
  return doc.dump(2) + "\n";
}

std::vector<double> TotalAccumulation(const Instance& inst) {
  std::vector<double> total(inst.n + 1, 0.0);
  for (int i = 0; i <= inst.n; ++i) {
    for (int t = 0; t < inst.tau; ++t) total[i] += inst.accumulation(i, t);
  }
  return total;
}

RequirementLevel ParseRequirementLevel(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "low") return RequirementLevel::kLow;
  if (lower == "medium" || lower == "med") return RequirementLevel::kMedium;
  if (lower == "high") return RequirementLevel::kHigh;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown requirement level '" + std::string(text) + "'");
}

std::string RecipeInstanceName(const Recipe& recipe, uint64_t seed) {
  const ResolvedRecipe resolved = Resolve(recipe);
  if (IsBenchmark1(recipe.id)) {
    const std::string vehicle = recipe.id == "benchmark1-Fio" ? "Fio" : "Dob";
    const int price_tag = static_cast<int>(std::lround(recipe.price * 100.0));
    return fmt::format("{}-{}acc-{}-{:03d}-s{}", vehicle,
                       static_cast<int>(std::lround(recipe.accumulation)),
                       LevelTag(*recipe.level), price_tag, seed);
  }
  return fmt::format("{}n-{}r-{}p-s{}", resolved.n, resolved.requirement,
                     recipe.price, seed);
}

Instance GenerateInstance(const Recipe& recipe, uint64_t seed) {
  const ResolvedRecipe resolved = Resolve(recipe);
  Instance inst;
  inst.name = RecipeInstanceName(recipe, seed);
  inst.n = resolved.n;
  inst.tau = 7;
  inst.capacity = resolved.constants.capacity;
  inst.traveling_cost = resolved.constants.traveling_cost;
  inst.vehicle_cost = resolved.constants.vehicle_cost;
  inst.holding_cost = 0.02;
  inst.purchase_cost = recipe.price;
  inst.requirements.assign(inst.tau, resolved.requirement);
  inst.accumulation = Grid<double>(inst.n + 1, inst.tau, 0.0);
  for (int i = 1; i <= inst.n; ++i) {
    for (int t = 0; t < inst.tau; ++t) inst.accumulation(i, t) = recipe.accumulation;
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> points;
  points.push_back({kSquareSide / 2.0, kSquareSide / 2.0});
  for (int i = 1; i <= inst.n; ++i) {
    const double x = kSquareSide * UnitUniform(rng);
    const double y = kSquareSide * UnitUniform(rng);
    points.push_back({x, y});
  }
  inst.distance = EuclideanDistances(points);
  inst.coordinates = std::move(points);
  ValidateInstance(inst);
  return inst;
}

}  // namespace spirp
