/* Copyright 2026 The SPIRP Authors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the SPIRP solver.
 *
 * Functions return a status code; on failure a message is available from
 * spirp_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with spirp_string_free().
 */

#ifndef SPIRP_SPIRP_H_
#define SPIRP_SPIRP_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#pragma GCC visibility push(default)
#endif

typedef enum {
  SPIRP_OK = 0,
  SPIRP_INVALID_ARGUMENT = 1,
  SPIRP_PARSE_ERROR = 2,
  SPIRP_IO_ERROR = 3,
  SPIRP_INFEASIBLE = 4,
  SPIRP_NUMERICAL = 5,
  SPIRP_INTERNAL = 6,
} spirp_status;

typedef struct spirp_instance spirp_instance;
typedef struct spirp_report spirp_report;

const char* spirp_last_error(void);
void spirp_string_free(char* text);

/* Instances. */
spirp_status spirp_instance_load(const char* path, spirp_instance** out);
spirp_status spirp_instance_parse(const char* json, spirp_instance** out);

typedef struct {
  const char* id;     /* benchmark1-Fio, benchmark1-Dob, benchmark2, benchmark3 */
  int n;              /* 0 selects the recipe default */
  const char* level;  /* LOW, MED or HIGH; NULL when not used */
  int has_requirement;
  double requirement; /* liters per period, benchmarks 2 and 3 */
  double price;
  double accumulation; /* liters per node per day */
} spirp_recipe;

void spirp_recipe_default(spirp_recipe* recipe);
spirp_status spirp_instance_generate(const spirp_recipe* recipe, uint64_t seed,
                                     spirp_instance** out);
spirp_status spirp_instance_to_json(const spirp_instance* instance, char** out);
const char* spirp_instance_name(const spirp_instance* instance);
/* Relaxation model in free MPS, for cross-checking with other solvers. */
spirp_status spirp_instance_write_mps(const spirp_instance* instance, const char* path);
void spirp_instance_free(spirp_instance* instance);

/* Solving. */
typedef enum { SPIRP_MH = 0, SPIRP_MH_PLUS = 1 } spirp_variant;
typedef enum { SPIRP_LBT_LITERAL = 0, SPIRP_LBT_CEILING = 1 } spirp_vehicle_floor;

typedef struct {
  spirp_variant variant;
  double delta;
  int elite_k;
  double time_limit;
  int64_t node_limit; /* negative: unlimited */
  double mip_search_time_limit;
  int64_t mip_search_node_limit;
  double bin_packing_time_limit;
  spirp_vehicle_floor vehicle_floor;
  int valid_inequality;
  uint64_t seed;
} spirp_run_params;

void spirp_run_params_default(spirp_run_params* params);
spirp_status spirp_solve(const spirp_instance* instance, const spirp_run_params* params,
                         spirp_report** out);

double spirp_report_upper_bound(const spirp_report* report);
double spirp_report_lower_bound(const spirp_report* report);
double spirp_report_gap(const spirp_report* report);
spirp_status spirp_report_json(const spirp_report* report, int with_timings, char** out);
spirp_status spirp_report_solution_json(const spirp_report* report, char** out);
void spirp_report_free(spirp_report* report);

/* Benchmark table over `count` reports; reference_csv may be NULL. */
spirp_status spirp_bench_csv(const spirp_report* const* reports, size_t count,
                             const char* reference_csv, char** out);

/* Checks a solution file. *valid is 1 when the plan is feasible and its
 * claimed cost and statistics match; *summary lists cost and findings. */
spirp_status spirp_validate(const spirp_instance* instance, const char* solution_json,
                            int* valid, char** summary);

#if defined(__GNUC__)
#pragma GCC visibility pop
#endif

#ifdef __cplusplus
}
#endif

#endif /* SPIRP_SPIRP_H_ */
