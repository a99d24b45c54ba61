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

#include "spirp/spirp.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "spirp/instance.h"
#include "spirp/irr.h"
#include "spirp/orchestrator.h"
#include "spirp/report.h"

struct spirp_instance {
  spirp::Instance value;
};

struct spirp_report {
  spirp::RunReport value;
};

namespace {

thread_local std::string last_error;

spirp_status ToStatus(spirp::ErrorCode code) {
  switch (code) {
    case spirp::ErrorCode::kInvalidArgument: return SPIRP_INVALID_ARGUMENT;
    case spirp::ErrorCode::kParse: return SPIRP_PARSE_ERROR;
    case spirp::ErrorCode::kIo: return SPIRP_IO_ERROR;
    case spirp::ErrorCode::kInfeasible: return SPIRP_INFEASIBLE;
    case spirp::ErrorCode::kNumerical: return SPIRP_NUMERICAL;
    case spirp::ErrorCode::kInternal: return SPIRP_INTERNAL;
  }
  return SPIRP_INTERNAL;
}

template <typename F>
spirp_status Guard(F&& body) {
  try {
    body();
    last_error.clear();
    return SPIRP_OK;
  } catch (const spirp::Error& e) {
    last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SPIRP_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SPIRP_INTERNAL;
  }
}

void Require(bool condition, const char* what) {
  if (!condition) throw spirp::Error(spirp::ErrorCode::kInvalidArgument, what);
}

char* Copy(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

spirp::RunParams ToParams(const spirp_run_params& p) {
  spirp::RunParams params;
  params.variant = p.variant == SPIRP_MH_PLUS ? spirp::Variant::kMhPlus : spirp::Variant::kMh;
  params.delta = p.delta;
  params.elite_k = p.elite_k;
  params.time_limit = p.time_limit;
  params.node_limit = p.node_limit;
  params.mip_search_time_limit = p.mip_search_time_limit;
  params.mip_search_node_limit = p.mip_search_node_limit;
  params.bin_packing_time_limit = p.bin_packing_time_limit;
  params.vehicle_floor = p.vehicle_floor == SPIRP_LBT_CEILING ? spirp::VehicleFloor::kCeiling
                                                              : spirp::VehicleFloor::kLiteral;
  params.valid_inequality = p.valid_inequality != 0;
  params.seed = p.seed;
  return params;
}

}  // namespace

extern "C" {

const char* spirp_last_error(void) { return last_error.c_str(); }

void spirp_string_free(char* text) { std::free(text); }

spirp_status spirp_instance_load(const char* path, spirp_instance** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new spirp_instance{spirp::LoadInstance(path)};
  });
}

spirp_status spirp_instance_parse(const char* json, spirp_instance** out) {
  return Guard([&] {
    Require(json != nullptr && out != nullptr, "null argument");
    *out = new spirp_instance{spirp::ParseInstance(json)};
  });
}

void spirp_recipe_default(spirp_recipe* recipe) {
  if (recipe == nullptr) return;
  *recipe = spirp_recipe{};
  recipe->accumulation = 30.0;
}

spirp_status spirp_instance_generate(const spirp_recipe* recipe, uint64_t seed,
                                     spirp_instance** out) {
  return Guard([&] {
    Require(recipe != nullptr && recipe->id != nullptr && out != nullptr, "null argument");
    spirp::Recipe r;
    r.id = recipe->id;
    r.n = recipe->n;
    if (recipe->level != nullptr) r.level = spirp::ParseRequirementLevel(recipe->level);
    if (recipe->has_requirement) r.requirement = recipe->requirement;
    r.price = recipe->price;
    r.accumulation = recipe->accumulation;
    *out = new spirp_instance{spirp::GenerateInstance(r, seed)};
  });
}

spirp_status spirp_instance_to_json(const spirp_instance* instance, char** out) {
  return Guard([&] {
    Require(instance != nullptr && out != nullptr, "null argument");
    *out = Copy(spirp::SerializeInstance(instance->value));
  });
}

const char* spirp_instance_name(const spirp_instance* instance) {
  return instance == nullptr ? "" : instance->value.name.c_str();
}

spirp_status spirp_instance_write_mps(const spirp_instance* instance, const char* path) {
  return Guard([&] {
    Require(instance != nullptr && path != nullptr, "null argument");
    std::ofstream file(path);
    if (!file) throw spirp::Error(spirp::ErrorCode::kIo, std::string("cannot write ") + path);
    spirp::milp::WriteMps(spirp::BuildIrr(instance->value).model, file);
  });
}

void spirp_instance_free(spirp_instance* instance) { delete instance; }

void spirp_run_params_default(spirp_run_params* params) {
  if (params == nullptr) return;
  const spirp::RunParams d;
  params->variant = SPIRP_MH;
  params->delta = d.delta;
  params->elite_k = d.elite_k;
  params->time_limit = d.time_limit;
  params->node_limit = d.node_limit;
  params->mip_search_time_limit = d.mip_search_time_limit;
  params->mip_search_node_limit = d.mip_search_node_limit;
  params->bin_packing_time_limit = d.bin_packing_time_limit;
  params->vehicle_floor = SPIRP_LBT_LITERAL;
  params->valid_inequality = d.valid_inequality ? 1 : 0;
  params->seed = d.seed;
}

spirp_status spirp_solve(const spirp_instance* instance, const spirp_run_params* params,
                         spirp_report** out) {
  return Guard([&] {
    Require(instance != nullptr && params != nullptr && out != nullptr, "null argument");
    *out = new spirp_report{spirp::Run(instance->value, ToParams(*params))};
  });
}

double spirp_report_upper_bound(const spirp_report* report) {
  return report == nullptr ? 0.0 : report->value.upper_bound;
}

double spirp_report_lower_bound(const spirp_report* report) {
  return report == nullptr ? 0.0 : report->value.lower_bound;
}

double spirp_report_gap(const spirp_report* report) {
  return report == nullptr ? 0.0 : report->value.gap;
}

spirp_status spirp_report_json(const spirp_report* report, int with_timings, char** out) {
  return Guard([&] {
    Require(report != nullptr && out != nullptr, "null argument");
    *out = Copy(spirp::ReportToJson(report->value, with_timings != 0));
  });
}

spirp_status spirp_report_solution_json(const spirp_report* report, char** out) {
  return Guard([&] {
    Require(report != nullptr && out != nullptr, "null argument");
    *out = Copy(spirp::SolutionToJson(report->value));
  });
}

void spirp_report_free(spirp_report* report) { delete report; }

spirp_status spirp_bench_csv(const spirp_report* const* reports, size_t count,
                             const char* reference_csv, char** out) {
  return Guard([&] {
    Require(out != nullptr && (reports != nullptr || count == 0), "null argument");
    std::vector<const spirp::RunReport*> runs;
    for (size_t k = 0; k < count; ++k) {
      Require(reports[k] != nullptr, "null report");
      runs.push_back(&reports[k]->value);
    }
    if (reference_csv != nullptr) {
      const std::map<std::string, double> reference = spirp::ParseReferenceCsv(reference_csv);
      *out = Copy(spirp::BenchCsv(runs, &reference));
    } else {
      *out = Copy(spirp::BenchCsv(runs));
    }
  });
}

spirp_status spirp_validate(const spirp_instance* instance, const char* solution_json,
                            int* valid, char** summary) {
  return Guard([&] {
    Require(instance != nullptr && solution_json != nullptr && valid != nullptr &&
                summary != nullptr,
            "null argument");
    const spirp::SolutionFile file = spirp::ParseSolution(solution_json, instance->value);
    const spirp::ValidationResult result = spirp::ValidateSolution(file, instance->value);
    *valid = result.ok() ? 1 : 0;
    *summary = Copy(result.ToString());
  });
}

}  // extern "C"
