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

// Mixed-integer linear models and the reference solver.
//
// The reference backend is a branch-and-bound over a bounded-variable revised
// simplex (see simplex.h). Nodes are selected by best bound with depth-first
// plunging below the node just solved; the branching variable is the most
// fractional one within the highest branch_priority class, ties going to the
// smallest index.

#ifndef SPIRP_MILP_H_
#define SPIRP_MILP_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spirp::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kIntegralityTolerance = 1e-6;
inline constexpr double kWarmStartTolerance = 1e-6;

enum class VarKind { kContinuous, kBinary, kInteger };
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjectiveSense { kMinimize, kMaximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarKind kind = VarKind::kContinuous;
  double objective = 0.0;
  // Fractional variables of the highest priority class are branched on first.
  int branch_priority = 0;

  bool is_integer() const { return kind != VarKind::kContinuous; }
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
};

class MilpModel {
 public:
  MilpModel() = default;
  explicit MilpModel(std::string name) : name_(std::move(name)) {}

  int AddVariable(std::string name, double lower, double upper, VarKind kind,
                  double objective = 0.0);
  int AddBinary(std::string name, double objective = 0.0) {
    return AddVariable(std::move(name), 0.0, 1.0, VarKind::kBinary, objective);
  }
  int AddContinuous(std::string name, double lower, double upper,
                    double objective = 0.0) {
    return AddVariable(std::move(name), lower, upper, VarKind::kContinuous,
                       objective);
  }

  // Repeated variables are merged and zero coefficients dropped.
  int AddConstraint(std::string name, std::vector<Term> terms, RowSense sense,
                    double rhs);

  void SetObjectiveSense(ObjectiveSense sense) { sense_ = sense; }
  void SetObjectiveCoefficient(int var, double coef);
  void SetBranchPriority(int var, int priority);
  void AddObjectiveCoefficient(int var, double coef);
  void SetObjectiveOffset(double offset) { offset_ = offset; }

  const std::string& name() const { return name_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Variable& variable(int j) const { return variables_[j]; }
  const Constraint& constraint(int i) const { return constraints_[i]; }
  ObjectiveSense objective_sense() const { return sense_; }
  double objective_offset() const { return offset_; }

  // Throws Error when a term references an unknown variable, a bound is
  // inconsistent, or an integer variable has an infinite bound.
  void Validate() const;

  double EvaluateObjective(std::span<const double> x) const;
  double RowActivity(int row, std::span<const double> x) const;

  struct WorstViolation {
    int row = -1;       // -1 when the worst violation is a bound or integrality
    int var = -1;
    double magnitude = 0.0;
    std::string description;
  };
  // Largest violation of bounds, rows and (optionally) integrality.
  WorstViolation MaxViolation(std::span<const double> x,
                              bool check_integrality) const;

 private:
  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  ObjectiveSense sense_ = ObjectiveSense::kMinimize;
  double offset_ = 0.0;
};

enum class SolveStatus {
  kOptimal,
  kFeasibleTimeLimit,
  kInfeasible,
  kUnbounded,
  kNoSolutionTimeLimit,
};

const char* SolveStatusName(SolveStatus status);

struct Incumbent {
  std::span<const double> values;
  double objective = 0.0;
  int64_t node = 0;  // number of nodes processed when it was found
};

struct SolveParams {
  double time_limit = 60.0;  // wall-clock seconds
  double relative_gap_tolerance = 1e-6;
  // Deterministic budget on branch-and-bound nodes; negative is unlimited.
  int64_t node_limit = -1;
  std::optional<std::vector<double>> warm_start;
  // Called with every strictly improving incumbent, the warm start included.
  std::function<void(const Incumbent&)> pool_callback;
  // Optional primal heuristic run on fractional node solutions. A returned
  // vector is checked against the model and kept if it improves the incumbent.
  std::function<std::optional<std::vector<double>>(std::span<const double>)>
      node_heuristic;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> solution;  // empty unless an incumbent exists
  double objective = 0.0;
  // Best proven bound on the optimum, in the model's own sense.
  double dual_bound = 0.0;
  int64_t nodes = 0;
  int64_t simplex_iterations = 0;
  double seconds = 0.0;

  bool has_solution() const { return !solution.empty(); }
};

// Solves the linear relaxation (integrality dropped).
SolveOutcome SolveLp(const MilpModel& model);

SolveOutcome SolveMilp(const MilpModel& model, const SolveParams& params = {});

// Free-format MPS, for cross-checking against external solvers.
void WriteMps(const MilpModel& model, std::ostream& out);

}  // namespace spirp::milp

#endif  // SPIRP_MILP_H_
