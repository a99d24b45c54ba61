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

#include "spirp/milp.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>

#include <fmt/format.h>

#include "spirp/common.h"
#include "spirp/simplex.h"

namespace spirp::milp {

int MilpModel::AddVariable(std::string name, double lower, double upper,
                           VarKind kind, double objective) {
  variables_.push_back({std::move(name), lower, upper, kind, objective, 0});
  return num_variables() - 1;
}

int MilpModel::AddConstraint(std::string name, std::vector<Term> terms,
                             RowSense sense, double rhs) {
  std::map<int, double> merged;
  for (const Term& term : terms) merged[term.var] += term.coef;
  Constraint row{std::move(name), {}, sense, rhs};
  for (const auto& [var, coef] : merged) {
    if (coef != 0.0) row.terms.push_back({var, coef});
  }
  constraints_.push_back(std::move(row));
  return num_constraints() - 1;
}

void MilpModel::SetObjectiveCoefficient(int var, double coef) {
  variables_.at(var).objective = coef;
}

void MilpModel::SetBranchPriority(int var, int priority) {
  variables_.at(var).branch_priority = priority;
}

void MilpModel::AddObjectiveCoefficient(int var, double coef) {
  variables_.at(var).objective += coef;
}

void MilpModel::Validate() const {
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("variable {}: inconsistent bounds [{}, {}]", v.name,
                              v.lower, v.upper));
    }
    if (v.is_integer() && (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("variable {}: integer variables need finite bounds",
                              v.name));
    }
    if (!std::isfinite(v.objective)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("variable {}: non-finite objective", v.name));
    }
  }
  for (const Constraint& row : constraints_) {
    if (!std::isfinite(row.rhs)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("constraint {}: non-finite right-hand side", row.name));
    }
    for (const Term& term : row.terms) {
      if (term.var < 0 || term.var >= num_variables()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("constraint {}: unknown variable {}", row.name,
                                term.var));
      }
      if (!std::isfinite(term.coef)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("constraint {}: non-finite coefficient", row.name));
      }
    }
  }
}

double MilpModel::EvaluateObjective(std::span<const double> x) const {
  double value = offset_;
  for (int j = 0; j < num_variables(); ++j) value += variables_[j].objective * x[j];
  return value;
}

double MilpModel::RowActivity(int row, std::span<const double> x) const {
  double activity = 0.0;
  for (const Term& term : constraints_[row].terms) activity += term.coef * x[term.var];
  return activity;
}

MilpModel::WorstViolation MilpModel::MaxViolation(std::span<const double> x,
                                                  bool check_integrality) const {
  WorstViolation worst;
  if (static_cast<int>(x.size()) != num_variables()) {
    worst.magnitude = kInfinity;
    worst.description = fmt::format("expected {} values, got {}", num_variables(),
                                    x.size());
    return worst;
  }
  auto consider = [&](double magnitude, int row, int var, auto describe) {
    if (magnitude > worst.magnitude) {
      worst = {row, var, magnitude, describe()};
    }
  };
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    consider(v.lower - x[j], -1, j, [&] {
      return fmt::format("variable {} = {} below lower bound {}", v.name, x[j], v.lower);
    });
    consider(x[j] - v.upper, -1, j, [&] {
      return fmt::format("variable {} = {} above upper bound {}", v.name, x[j], v.upper);
    });
    if (check_integrality && v.is_integer()) {
      consider(std::abs(x[j] - std::round(x[j])), -1, j, [&] {
        return fmt::format("variable {} = {} is not integral", v.name, x[j]);
      });
    }
  }
  for (int i = 0; i < num_constraints(); ++i) {
    const Constraint& row = constraints_[i];
    const double activity = RowActivity(i, x);
    double excess = 0.0;
    if (row.sense != RowSense::kGreaterEqual) excess = std::max(excess, activity - row.rhs);
    if (row.sense != RowSense::kLessEqual) excess = std::max(excess, row.rhs - activity);
    consider(excess, i, -1, [&] {
      return fmt::format("constraint {} violated: activity {} vs rhs {}", row.name,
                         activity, row.rhs);
    });
  }
  return worst;
}

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleTimeLimit:
      return "feasible_time_limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kNoSolutionTimeLimit:
      return "no_solution_time_limit";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Internal form is always a minimization of sign * objective.
double InternalSign(const MilpModel& model) {
  return model.objective_sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
}

std::unique_ptr<BoundedSimplex> BuildLp(const MilpModel& model) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  const double sign = InternalSign(model);
  std::vector<int> count(n + 1, 0);
  for (const Constraint& row : model.constraints()) {
    for (const Term& term : row.terms) ++count[term.var + 1];
  }
  SparseColumns a;
  a.rows = m;
  a.cols = n;
  a.start.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) a.start[j + 1] = a.start[j] + count[j + 1];
  a.index.resize(a.start[n]);
  a.value.resize(a.start[n]);
  std::vector<int> fill(a.start.begin(), a.start.end() - 1);
  std::vector<double> row_lower(m), row_upper(m);
  for (int i = 0; i < m; ++i) {
    const Constraint& row = model.constraint(i);
    for (const Term& term : row.terms) {
      a.index[fill[term.var]] = i;
      a.value[fill[term.var]++] = term.coef;
    }
    row_lower[i] = row.sense == RowSense::kLessEqual ? -kInfinity : row.rhs;
    row_upper[i] = row.sense == RowSense::kGreaterEqual ? kInfinity : row.rhs;
  }
  std::vector<double> cost(n), lower(n), upper(n);
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    cost[j] = sign * v.objective;
    lower[j] = v.lower;
    upper[j] = v.upper;
    if (v.is_integer()) {
      lower[j] = std::ceil(v.lower - kIntegralityTolerance);
      upper[j] = std::floor(v.upper + kIntegralityTolerance);
    }
  }
  return std::make_unique<BoundedSimplex>(std::move(a), std::move(cost),
                                          std::move(lower), std::move(upper),
                                          std::move(row_lower), std::move(row_upper));
}

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  double bound = -kInfinity;  // internal (minimization) bound of the parent
  int64_t seq = 0;
  std::vector<BoundChange> changes;  // path from the root
  BoundedSimplex::Basis basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

constexpr size_t kMaxStoredBases = 200000;

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolveParams& params)
      : model_(model), params_(params), sign_(InternalSign(model)),
        start_(Clock::now()) {
    const double limit = std::max(0.0, params.time_limit);
    deadline_ = limit >= 1e9 ? Clock::time_point::max()
                             : start_ + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(limit));
    integral_objective_ = true;
    for (const Variable& v : model.variables()) {
      if (v.is_integer()) {
        if (v.objective != std::round(v.objective)) integral_objective_ = false;
      } else if (v.objective != 0.0) {
        integral_objective_ = false;
      }
    }
  }

  SolveOutcome Run() {
    lp_ = BuildLp(model_);
    const int n = model_.num_variables();
    for (int j = 0; j < n; ++j) {
      root_lower_.push_back(lp_->column_lower(j));
      root_upper_.push_back(lp_->column_upper(j));
      if (model_.variable(j).is_integer()) integer_vars_.push_back(j);
    }
    if (params_.warm_start) InstallWarmStart(*params_.warm_start);

    Node root;
    root.seq = next_seq_++;
    std::optional<Node> current = std::move(root);
    bool limited = false;
    bool unbounded = false;
    bool dive = false;
    while (true) {
      if (!current) {
        if (open_.empty()) break;
        current = open_.top();
        open_.pop();
        dive = false;
        if (Prunable(current->bound)) {
          min_pruned_ = std::min(min_pruned_, current->bound);
          current.reset();
          continue;
        }
      }
      if (Clock::now() > deadline_ ||
          (params_.node_limit >= 0 && nodes_ >= params_.node_limit)) {
        limited = true;
        break;
      }
      Node node = std::move(*current);
      current.reset();
      ApplyBounds(node.changes);
      if (!dive) lp_->SetBasis(node.basis);
      LpStatus status = lp_->Solve(deadline_);
      if (status == LpStatus::kNumericalFailure) {
        lp_->SetBasis({});
        status = lp_->Solve(deadline_);
      }
      ++nodes_;
      if (status == LpStatus::kTimeLimit) {
        open_.push(std::move(node));
        limited = true;
        break;
      }
      if (status == LpStatus::kInfeasible) {
        dive = false;
        continue;
      }
      if (status == LpStatus::kUnbounded) {
        if (node.changes.empty()) {
          unbounded = true;
          break;
        }
        min_pruned_ = -kInfinity;
        dive = false;
        continue;
      }
      if (status == LpStatus::kNumericalFailure) {
        min_pruned_ = std::min(min_pruned_, node.bound);
        dive = false;
        continue;
      }
      double bound = lp_->objective();
      if (integral_objective_) bound = std::ceil(bound - 1e-6);
      bound = std::max(bound, node.bound);
      if (Prunable(bound)) {
        min_pruned_ = std::min(min_pruned_, bound);
        dive = false;
        continue;
      }
      const std::span<const double> x = lp_->primal();
      int branch_var = -1;
      double best_frac = 0.0;
      int best_priority = std::numeric_limits<int>::min();
      for (int j : integer_vars_) {
        const double frac = std::abs(x[j] - std::round(x[j]));
        if (frac <= kIntegralityTolerance) continue;
        const int priority = model_.variable(j).branch_priority;
        if (priority > best_priority ||
            (priority == best_priority && frac > best_frac + 1e-12)) {
          best_priority = priority;
          best_frac = frac;
          branch_var = j;
        }
      }
      if (branch_var >= 0 && params_.node_heuristic) {
        if (std::optional<std::vector<double>> candidate = params_.node_heuristic(x)) {
          OfferHeuristic(std::move(*candidate));
          if (Prunable(bound)) {
            min_pruned_ = std::min(min_pruned_, bound);
            dive = false;
            continue;
          }
        }
      }
      if (branch_var < 0) {
        OfferSolution(x);
        min_pruned_ = std::min(min_pruned_, bound);
        dive = false;
        continue;
      }
      const double value = x[branch_var];
      const double down_upper = std::floor(value);
      const double up_lower = std::ceil(value);
      const bool prefer_up = value - down_upper >= 0.5;
      Node down, up;
      down.bound = up.bound = bound;
      down.changes = node.changes;
      down.changes.push_back({branch_var, CurrentLower(node.changes, branch_var),
                              down_upper});
      up.changes = std::move(node.changes);
      up.changes.push_back({branch_var, up_lower,
                            CurrentUpper(up.changes, branch_var)});
      Node& deferred = prefer_up ? down : up;
      deferred.seq = next_seq_++;
      if (open_.size() < kMaxStoredBases) deferred.basis = lp_->basis();
      open_.push(std::move(deferred));
      current = std::move(prefer_up ? up : down);
      current->seq = next_seq_++;
      dive = true;
    }

    SolveOutcome out;
    out.nodes = nodes_;
    out.simplex_iterations = lp_->iterations();
    if (unbounded) {
      out.status = SolveStatus::kUnbounded;
      out.dual_bound = sign_ * -kInfinity;
      out.seconds = Seconds(start_);
      return out;
    }
    double bound = std::min(min_pruned_, incumbent_);
    if (limited) {
      if (current) bound = std::min(bound, current->bound);
      if (!open_.empty()) bound = std::min(bound, open_.top().bound);
    }
    if (has_incumbent_) {
      out.solution = best_;
      out.objective = model_.EvaluateObjective(best_);
      out.status = limited ? SolveStatus::kFeasibleTimeLimit : SolveStatus::kOptimal;
    } else {
      out.status = limited ? SolveStatus::kNoSolutionTimeLimit : SolveStatus::kInfeasible;
    }
    out.dual_bound = std::isfinite(bound) ? sign_ * bound + model_.objective_offset()
                                          : sign_ * bound;
    if (out.status == SolveStatus::kOptimal) {
      // Snap to the incumbent when the residual gap is within tolerance.
      out.dual_bound = sign_ > 0 ? std::min(out.dual_bound, out.objective)
                                 : std::max(out.dual_bound, out.objective);
    }
    out.seconds = Seconds(start_);
    return out;
  }

 private:
  double InternalObjective(std::span<const double> x) const {
    return sign_ * (model_.EvaluateObjective(x) - model_.objective_offset());
  }

  bool Prunable(double bound) const {
    if (!has_incumbent_) return false;
    const double rel = params_.relative_gap_tolerance * std::max(1.0, std::abs(incumbent_));
    const double abs = integral_objective_ ? 0.5 : 1e-9;
    return bound >= incumbent_ - std::max(abs, rel);
  }

  double CurrentLower(const std::vector<BoundChange>& changes, int var) const {
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
      if (it->var == var) return it->lower;
    }
    return root_lower_[var];
  }

  double CurrentUpper(const std::vector<BoundChange>& changes, int var) const {
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
      if (it->var == var) return it->upper;
    }
    return root_upper_[var];
  }

  void ApplyBounds(const std::vector<BoundChange>& changes) {
    for (int j : touched_) lp_->SetColumnBounds(j, root_lower_[j], root_upper_[j]);
    touched_.clear();
    for (const BoundChange& c : changes) {
      lp_->SetColumnBounds(c.var, c.lower, c.upper);
      touched_.push_back(c.var);
    }
  }

  void InstallWarmStart(const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != model_.num_variables()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("warm start has {} values, model has {} variables",
                              values.size(), model_.num_variables()));
    }
    const MilpModel::WorstViolation worst = model_.MaxViolation(values, true);
    if (worst.magnitude > kWarmStartTolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("infeasible warm start: {}", worst.description));
    }
    std::vector<double> snapped = values;
    for (int j : integer_vars_) snapped[j] = std::round(snapped[j]);
    if (model_.MaxViolation(snapped, true).magnitude > kWarmStartTolerance) {
      snapped = values;
    }
    Accept(std::move(snapped));
  }

  void OfferSolution(std::span<const double> x) {
    std::vector<double> candidate(x.begin(), x.end());
    for (int j : integer_vars_) candidate[j] = std::round(candidate[j]);
    if (model_.MaxViolation(candidate, false).magnitude > kWarmStartTolerance) {
      candidate.assign(x.begin(), x.end());
    }
    if (has_incumbent_ && InternalObjective(candidate) >= incumbent_ - 1e-12) return;
    Accept(std::move(candidate));
  }

  void OfferHeuristic(std::vector<double> candidate) {
    if (static_cast<int>(candidate.size()) != model_.num_variables()) return;
    if (model_.MaxViolation(candidate, true).magnitude > kWarmStartTolerance) return;
    if (has_incumbent_ && InternalObjective(candidate) >= incumbent_ - 1e-9) return;
    Accept(std::move(candidate));
  }

  void Accept(std::vector<double> candidate) {
    best_ = std::move(candidate);
    incumbent_ = InternalObjective(best_);
    has_incumbent_ = true;
    if (params_.pool_callback) {
      params_.pool_callback({best_, model_.EvaluateObjective(best_), nodes_});
    }
  }

  const MilpModel& model_;
  const SolveParams& params_;
  const double sign_;
  const Clock::time_point start_;
  Clock::time_point deadline_;
  bool integral_objective_ = false;

  std::unique_ptr<BoundedSimplex> lp_;
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  std::vector<int> integer_vars_;
  std::vector<int> touched_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  int64_t next_seq_ = 0;
  int64_t nodes_ = 0;

  bool has_incumbent_ = false;
  double incumbent_ = kInfinity;
  std::vector<double> best_;
  double min_pruned_ = kInfinity;
};

void RequireNonEmpty(const MilpModel& model) {
  if (model.num_variables() == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("model '{}' has no variables", model.name()));
  }
}

}  // namespace

SolveOutcome SolveLp(const MilpModel& model) {
  RequireNonEmpty(model);
  model.Validate();
  const auto start = Clock::now();
  std::unique_ptr<BoundedSimplex> lp = BuildLp(model);
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    lp->SetColumnBounds(j, v.lower, v.upper);
  }
  LpStatus status = lp->Solve();
  if (status == LpStatus::kNumericalFailure) {
    lp->SetBasis({});
    status = lp->Solve();
  }
  SolveOutcome out;
  out.simplex_iterations = lp->iterations();
  const double sign = InternalSign(model);
  switch (status) {
    case LpStatus::kOptimal:
      out.status = SolveStatus::kOptimal;
      out.solution.assign(lp->primal().begin(), lp->primal().end());
      out.objective = model.EvaluateObjective(out.solution);
      out.dual_bound = out.objective;
      break;
    case LpStatus::kUnbounded:
      out.status = SolveStatus::kUnbounded;
      out.dual_bound = -sign * kInfinity;
      break;
    case LpStatus::kInfeasible:
      out.status = SolveStatus::kInfeasible;
      break;
    default:
      throw Error(ErrorCode::kNumerical,
                  fmt::format("simplex failed on model '{}'", model.name()));
  }
  out.seconds = Seconds(start);
  return out;
}

SolveOutcome SolveMilp(const MilpModel& model, const SolveParams& params) {
  RequireNonEmpty(model);
  model.Validate();
  BranchAndBound search(model, params);
  return search.Run();
}

namespace {

std::string MpsName(const std::string& name, char prefix, int index) {
  if (name.empty()) return fmt::format("{}{}", prefix, index);
  std::string out = name;
  for (char& c : out) {
    if (c == ' ' || c == '\t') c = '_';
  }
  return out;
}

}  // namespace

void WriteMps(const MilpModel& model, std::ostream& out) {
  const int n = model.num_variables();
  const int m = model.num_constraints();
  std::vector<std::vector<std::pair<int, double>>> columns(n);
  for (int i = 0; i < m; ++i) {
    for (const Term& term : model.constraint(i).terms) {
      columns[term.var].emplace_back(i, term.coef);
    }
  }
  out << "NAME " << MpsName(model.name(), 'M', 0) << "\n";
  if (model.objective_sense() == ObjectiveSense::kMaximize) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  obj\n";
  for (int i = 0; i < m; ++i) {
    const Constraint& row = model.constraint(i);
    const char* type = row.sense == RowSense::kLessEqual  ? "L"
                       : row.sense == RowSense::kEqual ? "E"
                                                        : "G";
    out << " " << type << "  " << MpsName(row.name, 'R', i) << "\n";
  }
  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    if (v.is_integer() != in_integer_block) {
      out << fmt::format("    MARKER{} 'MARKER' '{}'\n", marker++,
                         v.is_integer() ? "INTORG" : "INTEND");
      in_integer_block = v.is_integer();
    }
    const std::string name = MpsName(v.name, 'C', j);
    if (v.objective != 0.0) out << fmt::format("    {} obj {}\n", name, v.objective);
    for (const auto& [row, coef] : columns[j]) {
      out << fmt::format("    {} {} {}\n", name,
                         MpsName(model.constraint(row).name, 'R', row), coef);
    }
    if (v.objective == 0.0 && columns[j].empty()) out << fmt::format("    {} obj 0\n", name);
  }
  if (in_integer_block) out << fmt::format("    MARKER{} 'MARKER' 'INTEND'\n", marker);
  out << "RHS\n";
  if (model.objective_offset() != 0.0) {
    out << fmt::format("    rhs obj {}\n", -model.objective_offset());
  }
  for (int i = 0; i < m; ++i) {
    const Constraint& row = model.constraint(i);
    if (row.rhs != 0.0) {
      out << fmt::format("    rhs {} {}\n", MpsName(row.name, 'R', i), row.rhs);
    }
  }
  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    const std::string name = MpsName(v.name, 'C', j);
    if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
      out << " FR bnd " << name << "\n";
      continue;
    }
    if (v.lower == v.upper) {
      out << fmt::format(" FX bnd {} {}\n", name, v.lower);
      continue;
    }
    if (!std::isfinite(v.lower)) {
      out << " MI bnd " << name << "\n";
    } else if (v.lower != 0.0) {
      out << fmt::format(" LO bnd {} {}\n", name, v.lower);
    }
    if (std::isfinite(v.upper)) out << fmt::format(" UP bnd {} {}\n", name, v.upper);
  }
  out << "ENDATA\n";
}

}  // namespace spirp::milp
