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

// spirp: generate instances, solve them, check solution files and tabulate
// benchmark runs.
//
//   spirp generate --recipe benchmark2 --n 20 --r 270 --p 2.5 --seed 1 --out data
//   spirp solve data/20n-270r-2.5p-s1.json --variant mh+ --out results
//   spirp validate data/20n-270r-2.5p-s1.json results/20n-270r-2.5p-s1.mh+.solution.json
//   spirp bench data --variant mh+ --reference ref.csv
//
// Exit codes: 0 success, 1 invalid solution or solver failure, 2 bad usage
// or unreadable input.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spirp/spirp.h"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

struct Failure {
  int code;
  std::string message;
};

// Input problems are usage errors; everything else is a run failure.
void Check(spirp_status status) {
  if (status == SPIRP_OK) return;
  const bool input = status == SPIRP_INVALID_ARGUMENT || status == SPIRP_PARSE_ERROR ||
                     status == SPIRP_IO_ERROR;
  throw Failure{input ? kUsage : kInvalid, spirp_last_error()};
}

std::string TakeString(char* text) {
  std::string copy(text);
  spirp_string_free(text);
  return copy;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kInvalid, "cannot write " + path.string()};
}

using InstancePtr = std::unique_ptr<spirp_instance, decltype(&spirp_instance_free)>;
using ReportPtr = std::unique_ptr<spirp_report, decltype(&spirp_report_free)>;

InstancePtr Load(const std::string& path) {
  spirp_instance* instance = nullptr;
  Check(spirp_instance_load(path.c_str(), &instance));
  return InstancePtr(instance, spirp_instance_free);
}

struct SolveOptions {
  std::string variant = "mh";
  std::string lbt = "literal";
  bool no_valid_inequality = false;
  spirp_run_params params{};
};

void AddSolveOptions(CLI::App* app, SolveOptions& o) {
  spirp_run_params_default(&o.params);
  if (const char* env = std::getenv("SPIRP_TIME_LIMIT")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end != env && *end == '\0' && value > 0) o.params.time_limit = value;
  }
  app->add_option("--variant", o.variant, "mh or mh+")
      ->check(CLI::IsMember({"mh", "mh+", "MH", "MH+"}))
      ->capture_default_str();
  app->add_option("--delta", o.params.delta, "pool width in percent")->capture_default_str();
  app->add_option("--elite-k", o.params.elite_k, "constructed solutions to improve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--time-limit", o.params.time_limit,
                  "relaxation time limit in seconds (default from SPIRP_TIME_LIMIT)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--node-limit", o.params.node_limit, "relaxation node limit")
      ->capture_default_str();
  app->add_option("--mip-time-limit", o.params.mip_search_time_limit,
                  "route improvement time limit per period")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--mip-node-limit", o.params.mip_search_node_limit,
                  "route improvement node limit per period")
      ->capture_default_str();
  app->add_option("--bp-time-limit", o.params.bin_packing_time_limit,
                  "bin packing time limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--lbt", o.lbt, "vehicle floor for route improvement")
      ->check(CLI::IsMember({"literal", "ceiling"}))
      ->capture_default_str();
  app->add_flag("--no-valid-inequality", o.no_valid_inequality,
                "drop the fleet capacity inequality from the relaxation");
  app->add_option("--seed", o.params.seed, "recorded in the report")->capture_default_str();
}

spirp_run_params Finish(const SolveOptions& o) {
  spirp_run_params p = o.params;
  p.variant = (o.variant == "mh+" || o.variant == "MH+") ? SPIRP_MH_PLUS : SPIRP_MH;
  p.vehicle_floor = o.lbt == "ceiling" ? SPIRP_LBT_CEILING : SPIRP_LBT_LITERAL;
  p.valid_inequality = o.no_valid_inequality ? 0 : 1;
  return p;
}

ReportPtr Solve(const spirp_instance* instance, const spirp_run_params& params) {
  spirp_report* report = nullptr;
  Check(spirp_solve(instance, &params, &report));
  return ReportPtr(report, spirp_report_free);
}

std::string VariantTag(const spirp_run_params& p) {
  return p.variant == SPIRP_MH_PLUS ? "mh+" : "mh";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective and periodic inventory routing solver"};
  app.require_subcommand(1);

  std::string recipe;
  int n = 0;
  std::string level;
  std::optional<double> requirement;
  double price = 0.0;
  double accumulation = 30.0;
  uint64_t seed = 1;
  std::string out_dir = ".";
  CLI::App* generate = app.add_subcommand("generate", "write a generated instance");
  generate->add_option("--recipe", recipe, "benchmark1-Fio, benchmark1-Dob, benchmark2 or benchmark3")
      ->required();
  generate->add_option("--n", n, "collection nodes (0 for the recipe default)");
  generate->add_option("--level", level, "LOW, MED or HIGH (benchmark 1)");
  generate->add_option("--r", requirement, "requirement per period (benchmarks 2 and 3)");
  generate->add_option("--p", price, "virgin oil price")->required();
  generate->add_option("--acc", accumulation, "liters per node per day")->capture_default_str();
  generate->add_option("--seed", seed)->capture_default_str();
  generate->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string instance_path;
  std::string solution_path;
  std::string solve_out;
  bool no_timings = false;
  std::string mps_path;
  SolveOptions solve_options;
  CLI::App* solve = app.add_subcommand("solve", "run the heuristic on one instance");
  solve->add_option("instance", instance_path, "instance JSON")->required();
  AddSolveOptions(solve, solve_options);
  solve->add_option("--out", solve_out, "directory for report and solution files");
  solve->add_flag("--no-timings", no_timings, "leave timings out of the report file");
  solve->add_option("--dump-mps", mps_path, "also write the relaxation model in MPS");

  CLI::App* validate = app.add_subcommand("validate", "check a solution file");
  validate->add_option("instance", instance_path, "instance JSON")->required();
  validate->add_option("solution", solution_path, "solution JSON")->required();

  std::string bench_dir;
  std::string reference_path;
  std::string csv_path;
  SolveOptions bench_options;
  CLI::App* bench = app.add_subcommand("bench", "solve every instance in a directory");
  bench->add_option("dir", bench_dir, "directory of instance JSON files")->required();
  AddSolveOptions(bench, bench_options);
  bench->add_option("--reference", reference_path, "CSV of instance,value to compare with");
  bench->add_option("--csv", csv_path, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) {
      spirp_recipe r;
      spirp_recipe_default(&r);
      r.id = recipe.c_str();
      r.n = n;
      r.level = level.empty() ? nullptr : level.c_str();
      r.has_requirement = requirement.has_value() ? 1 : 0;
      r.requirement = requirement.value_or(0.0);
      r.price = price;
      r.accumulation = accumulation;
      spirp_instance* raw = nullptr;
      Check(spirp_instance_generate(&r, seed, &raw));
      const InstancePtr instance(raw, spirp_instance_free);
      char* json = nullptr;
      Check(spirp_instance_to_json(instance.get(), &json));
      const fs::path path =
          fs::path(out_dir) / (std::string(spirp_instance_name(instance.get())) + ".json");
      WriteFile(path, TakeString(json));
      std::cout << path.string() << "\n";
      return kOk;
    }

    if (*solve) {
      const InstancePtr instance = Load(instance_path);
      const spirp_run_params params = Finish(solve_options);
      if (!mps_path.empty()) Check(spirp_instance_write_mps(instance.get(), mps_path.c_str()));
      const ReportPtr report = Solve(instance.get(), params);
      char* text = nullptr;
      Check(spirp_report_json(report.get(), no_timings ? 0 : 1, &text));
      const std::string report_json = TakeString(text);
      Check(spirp_report_solution_json(report.get(), &text));
      const std::string solution_json = TakeString(text);
      if (solve_out.empty()) {
        std::cout << report_json;
      } else {
        const std::string stem =
            std::string(spirp_instance_name(instance.get())) + "." + VariantTag(params);
        WriteFile(fs::path(solve_out) / (stem + ".report.json"), report_json);
        WriteFile(fs::path(solve_out) / (stem + ".solution.json"), solution_json);
        std::printf("%s z=%.6f lower=%.6f gap=%.4f%%\n", spirp_instance_name(instance.get()),
                    spirp_report_upper_bound(report.get()),
                    spirp_report_lower_bound(report.get()), spirp_report_gap(report.get()));
      }
      return kOk;
    }

    if (*validate) {
      const InstancePtr instance = Load(instance_path);
      const std::string text = ReadFile(solution_path);
      int valid = 0;
      char* summary = nullptr;
      Check(spirp_validate(instance.get(), text.c_str(), &valid, &summary));
      std::cout << TakeString(summary);
      return valid ? kOk : kInvalid;
    }

    if (*bench) {
      std::vector<fs::path> files;
      if (!fs::is_directory(bench_dir)) throw Failure{kUsage, bench_dir + " is not a directory"};
      for (const fs::directory_entry& entry : fs::directory_iterator(bench_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          files.push_back(entry.path());
        }
      }
      if (files.empty()) throw Failure{kUsage, "no instance files in " + bench_dir};
      std::sort(files.begin(), files.end());
      const spirp_run_params params = Finish(bench_options);
      std::vector<ReportPtr> reports;
      std::vector<const spirp_report*> raw;
      for (const fs::path& file : files) {
        const InstancePtr instance = Load(file.string());
        reports.push_back(Solve(instance.get(), params));
        raw.push_back(reports.back().get());
        std::fprintf(stderr, "%s z=%.6f gap=%.4f%%\n", spirp_instance_name(instance.get()),
                     spirp_report_upper_bound(raw.back()), spirp_report_gap(raw.back()));
      }
      std::string reference;
      if (!reference_path.empty()) reference = ReadFile(reference_path);
      char* csv = nullptr;
      Check(spirp_bench_csv(raw.data(), raw.size(),
                            reference_path.empty() ? nullptr : reference.c_str(), &csv));
      const std::string table = TakeString(csv);
      if (csv_path.empty()) {
        std::cout << table;
      } else {
        WriteFile(csv_path, table);
      }
      return kOk;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "spirp: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spirp: %s\n", e.what());
    return kInvalid;
  }
  return kUsage;
}
