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

#include "spirp/simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace spirp::milp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr double kDropTol = 1e-14;
constexpr size_t kRefactorInterval = 100;
constexpr int kDegenerateLimit = 50;

double ScaledTol(double bound) { return kPrimalTol * std::max(1.0, std::abs(bound)); }

}  // namespace

struct BoundedSimplex::Eta {
  int row = 0;
  double pivot = 1.0;
  std::vector<int> index;  // excludes `row`
  std::vector<double> value;
};

struct BoundedSimplex::Factor {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

BoundedSimplex::BoundedSimplex(SparseColumns matrix, std::vector<double> cost,
                               std::vector<double> col_lower,
                               std::vector<double> col_upper,
                               std::vector<double> row_lower,
                               std::vector<double> row_upper)
    : m_(matrix.rows), n_(matrix.cols), a_(std::move(matrix)),
      factor_(std::make_unique<Factor>()) {
  const int total = n_ + m_;
  cost_ = std::move(cost);
  cost_.resize(total, 0.0);
  lower_ = std::move(col_lower);
  upper_ = std::move(col_upper);
  lower_.insert(lower_.end(), row_lower.begin(), row_lower.end());
  upper_.insert(upper_.end(), row_upper.begin(), row_upper.end());
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  status_.assign(total, kBasic);
  head_.assign(m_, 0);
  ResetToSlackBasis();
}

BoundedSimplex::~BoundedSimplex() = default;

bool BoundedSimplex::IsBoxed(int j) const {
  return std::isfinite(lower_[j]) && std::isfinite(upper_[j]);
}

double BoundedSimplex::NonbasicValue(int j) const {
  switch (status_[j]) {
    case kAtLower:
      return lower_[j];
    case kAtUpper:
      return upper_[j];
    default:
      return 0.0;
  }
}

namespace {
uint8_t DefaultNonbasicStatus(double lower, double upper) {
  if (std::isfinite(lower)) return BoundedSimplex::kAtLower;
  if (std::isfinite(upper)) return BoundedSimplex::kAtUpper;
  return BoundedSimplex::kFree;
}
}  // namespace

void BoundedSimplex::ResetToSlackBasis() {
  for (int j = 0; j < n_; ++j) status_[j] = DefaultNonbasicStatus(lower_[j], upper_[j]);
  for (int i = 0; i < m_; ++i) {
    status_[n_ + i] = kBasic;
    head_[i] = n_ + i;
  }
  factored_ = false;
  etas_.clear();
}

void BoundedSimplex::SetColumnBounds(int col, double lower, double upper) {
  lower_[col] = lower;
  upper_[col] = upper;
  uint8_t& st = status_[col];
  if (st == kBasic) return;
  if ((st == kAtLower && !std::isfinite(lower)) ||
      (st == kAtUpper && !std::isfinite(upper)) ||
      (st == kFree && (std::isfinite(lower) || std::isfinite(upper)))) {
    st = DefaultNonbasicStatus(lower, upper);
  }
}

void BoundedSimplex::SetBasis(const Basis& basis) {
  if (static_cast<int>(basis.size()) != n_ + m_) {
    ResetToSlackBasis();
    return;
  }
  int count = 0;
  for (uint8_t s : basis) count += s == kBasic ? 1 : 0;
  if (count != m_) {
    ResetToSlackBasis();
    return;
  }
  status_ = basis;
  int pos = 0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic) {
      head_[pos++] = j;
    } else {
      SetColumnBounds(j, lower_[j], upper_[j]);  // repairs stale statuses
    }
  }
  factored_ = false;
  etas_.clear();
}

double BoundedSimplex::ColumnDot(int j, const std::vector<double>& y) const {
  if (j >= n_) return -y[j - n_];
  double sum = 0.0;
  for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) sum += a_.value[k] * y[a_.index[k]];
  return sum;
}

void BoundedSimplex::ScatterColumn(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= n_) {
    out[j - n_] = -1.0;
    return;
  }
  for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) out[a_.index[k]] = a_.value[k];
}

bool BoundedSimplex::Refactor() {
  etas_.clear();
  if (m_ == 0) {
    factored_ = true;
    return true;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (int pos = 0; pos < m_; ++pos) {
    const int j = head_[pos];
    if (j >= n_) {
      triplets.emplace_back(j - n_, pos, -1.0);
    } else {
      for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) {
        triplets.emplace_back(a_.index[k], pos, a_.value[k]);
      }
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  factor_->lu.analyzePattern(basis);
  factor_->lu.factorize(basis);
  factored_ = factor_->lu.info() == Eigen::Success;
  return factored_;
}

void BoundedSimplex::Ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
  Eigen::VectorXd solved = factor_->lu.solve(vec);
  vec = solved;
  for (const Eta& eta : etas_) {
    const double pivot_value = v[eta.row] / eta.pivot;
    v[eta.row] = pivot_value;
    if (pivot_value == 0.0) continue;
    for (size_t k = 0; k < eta.index.size(); ++k) {
      v[eta.index[k]] -= eta.value[k] * pivot_value;
    }
  }
}

void BoundedSimplex::Btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double sum = v[it->row];
    for (size_t k = 0; k < it->index.size(); ++k) sum -= it->value[k] * v[it->index[k]];
    v[it->row] = sum / it->pivot;
  }
  Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
  Eigen::VectorXd solved = factor_->lu.transpose().solve(vec);
  vec = solved;
}

void BoundedSimplex::PushEta(int row, const std::vector<double>& column) {
  Eta eta;
  eta.row = row;
  eta.pivot = column[row];
  for (int i = 0; i < m_; ++i) {
    if (i != row && std::abs(column[i]) > kDropTol) {
      eta.index.push_back(i);
      eta.value.push_back(column[i]);
    }
  }
  etas_.push_back(std::move(eta));
}

void BoundedSimplex::ComputePrimal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic) continue;
    x_[j] = NonbasicValue(j);
    if (x_[j] == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] += x_[j];  // -(-1) * x
    } else {
      for (int k = a_.start[j]; k < a_.start[j + 1]; ++k) {
        rhs[a_.index[k]] -= a_.value[k] * x_[j];
      }
    }
  }
  Ftran(rhs);
  for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] = rhs[pos];
}

void BoundedSimplex::ComputeDuals() {
  std::vector<double> y(m_);
  for (int pos = 0; pos < m_; ++pos) y[pos] = cost_[head_[pos]];
  Btran(y);
  for (int j = 0; j < n_ + m_; ++j) {
    d_[j] = status_[j] == kBasic ? 0.0 : cost_[j] - ColumnDot(j, y);
  }
}

bool BoundedSimplex::DualFeasible() const {
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic || IsFixed(j)) continue;
    if (status_[j] == kAtLower && d_[j] < -kDualTol) return false;
    if (status_[j] == kAtUpper && d_[j] > kDualTol) return false;
    if (status_[j] == kFree && std::abs(d_[j]) > kDualTol) return false;
  }
  return true;
}

bool BoundedSimplex::FlipToDualFeasibility() {
  bool flipped = false;
  bool feasible = true;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == kBasic || IsFixed(j)) continue;
    if (status_[j] == kAtLower && d_[j] < -kDualTol) {
      if (std::isfinite(upper_[j])) {
        status_[j] = kAtUpper;
        flipped = true;
      } else {
        feasible = false;
      }
    } else if (status_[j] == kAtUpper && d_[j] > kDualTol) {
      if (std::isfinite(lower_[j])) {
        status_[j] = kAtLower;
        flipped = true;
      } else {
        feasible = false;
      }
    } else if (status_[j] == kFree && std::abs(d_[j]) > kDualTol) {
      feasible = false;
    }
  }
  if (flipped) ComputePrimal();
  return feasible;
}

double BoundedSimplex::Infeasibility(int pos) const {
  const int j = head_[pos];
  const double x = x_[j];
  if (x < lower_[j] - ScaledTol(lower_[j])) return lower_[j] - x;
  if (x > upper_[j] + ScaledTol(upper_[j])) return x - upper_[j];
  return 0.0;
}

void BoundedSimplex::Pivot(int pos, int entering, const std::vector<double>& column,
                           uint8_t leaving_status) {
  const int leaving = head_[pos];
  status_[leaving] = leaving_status;
  status_[entering] = kBasic;
  head_[pos] = entering;
  d_[entering] = 0.0;
  PushEta(pos, column);
  ++iterations_;
}

double BoundedSimplex::objective() const {
  double value = 0.0;
  for (int j = 0; j < n_; ++j) value += cost_[j] * x_[j];
  return value;
}

LpStatus BoundedSimplex::Solve(Clock::time_point deadline) {
  if (!factored_ && !Refactor()) {
    ResetToSlackBasis();
    Refactor();
  }
  ComputePrimal();
  ComputeDuals();
  if (FlipToDualFeasibility()) {
    LoopResult result = LoopResult::kDone;
    const LpStatus status = DualLoop(deadline, &result);
    if (result == LoopResult::kDone) return status;
  }
  const LpStatus status = PrimalLoop(deadline);
  if (status == LpStatus::kOptimal) ComputeDuals();
  return status;
}

LpStatus BoundedSimplex::DualLoop(Clock::time_point deadline, LoopResult* result) {
  *result = LoopResult::kDone;
  const int total = n_ + m_;
  const int64_t max_iterations = iterations_ + 50LL * total + 10000;
  std::vector<double> rho(m_);
  std::vector<double> row(total, 0.0);
  std::vector<double> column(m_);
  bool bland = false;
  int degenerate = 0;
  for (int64_t step = 0;; ++step) {
    if ((step & 63) == 63 && Clock::now() > deadline) return LpStatus::kTimeLimit;
    if (iterations_ > max_iterations) return LpStatus::kNumericalFailure;
    if (etas_.size() >= kRefactorInterval) {
      if (!Refactor()) {
        ResetToSlackBasis();
        Refactor();
        *result = LoopResult::kRestartPrimal;
        return LpStatus::kNumericalFailure;
      }
      ComputePrimal();
      ComputeDuals();
      if (!DualFeasible()) {
        *result = LoopResult::kRestartPrimal;
        return LpStatus::kNumericalFailure;
      }
    }

    int r = -1;
    double worst = 0.0;
    for (int pos = 0; pos < m_; ++pos) {
      const double inf = Infeasibility(pos);
      if (inf <= 0.0) continue;
      if (bland) {
        if (r < 0 || head_[pos] < head_[r]) r = pos;
      } else if (inf > worst) {
        worst = inf;
        r = pos;
      }
    }
    if (r < 0) return LpStatus::kOptimal;

    const int leaving = head_[r];
    const double sign = x_[leaving] > upper_[leaving] ? 1.0 : -1.0;
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    Btran(rho);

    double theta_max = kInf;
    for (int j = 0; j < total; ++j) {
      if (status_[j] == kBasic || IsFixed(j)) continue;
      const double alpha = ColumnDot(j, rho);
      row[j] = alpha;
      const double at = sign * alpha;
      if (status_[j] == kAtLower && at > kPivotTol) {
        theta_max = std::min(theta_max, (d_[j] + kDualTol) / at);
      } else if (status_[j] == kAtUpper && at < -kPivotTol) {
        theta_max = std::min(theta_max, (d_[j] - kDualTol) / at);
      } else if (status_[j] == kFree && std::abs(at) > kPivotTol) {
        theta_max = std::min(theta_max, (std::abs(d_[j]) + kDualTol) / std::abs(at));
      }
    }
    if (theta_max == kInf) return LpStatus::kInfeasible;

    int q = -1;
    double best_ratio = kInf;
    double best_alpha = 0.0;
    for (int j = 0; j < total; ++j) {
      if (status_[j] == kBasic || IsFixed(j)) continue;
      const double at = sign * row[j];
      double ratio;
      if (status_[j] == kAtLower && at > kPivotTol) {
        ratio = d_[j] / at;
      } else if (status_[j] == kAtUpper && at < -kPivotTol) {
        ratio = d_[j] / at;
      } else if (status_[j] == kFree && std::abs(at) > kPivotTol) {
        ratio = std::abs(d_[j]) / std::abs(at);
      } else {
        continue;
      }
      ratio = std::max(ratio, 0.0);
      if (bland) {
        if (ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          q = j;
        }
      } else if (ratio <= theta_max && std::abs(at) > best_alpha) {
        best_alpha = std::abs(at);
        best_ratio = ratio;
        q = j;
      }
    }
    if (q < 0) return LpStatus::kInfeasible;

    ScatterColumn(q, column);
    Ftran(column);
    const double pivot = column[r];
    if (std::abs(pivot - row[q]) > 1e-6 * (1.0 + std::abs(pivot)) && !etas_.empty()) {
      // Drifted eta file; rebuild and retry the iteration.
      if (!Refactor()) {
        ResetToSlackBasis();
        Refactor();
        *result = LoopResult::kRestartPrimal;
        return LpStatus::kNumericalFailure;
      }
      ComputePrimal();
      ComputeDuals();
      if (!DualFeasible()) {
        *result = LoopResult::kRestartPrimal;
        return LpStatus::kNumericalFailure;
      }
      continue;
    }
    if (std::abs(pivot) < kPivotTol * 1e-2) {
      *result = LoopResult::kRestartPrimal;
      return LpStatus::kNumericalFailure;
    }

    // Dual step.
    const double aq = sign * row[q];
    double t = d_[q] / aq;
    if (status_[q] != kFree) t = std::max(t, 0.0);
    if (t != 0.0) {
      for (int j = 0; j < total; ++j) {
        if (status_[j] == kBasic || IsFixed(j)) continue;
        d_[j] -= t * sign * row[j];
      }
    }
    d_[leaving] = -t * sign;

    // Primal step.
    const double bound = sign > 0 ? upper_[leaving] : lower_[leaving];
    const double delta = (x_[leaving] - bound) / pivot;
    for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= column[pos] * delta;
    x_[q] += delta;
    x_[leaving] = bound;

    if (t < 1e-12) {
      if (++degenerate > kDegenerateLimit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
    Pivot(r, q, column, sign > 0 ? kAtUpper : kAtLower);
  }
}

LpStatus BoundedSimplex::PrimalLoop(Clock::time_point deadline) {
  const int total = n_ + m_;
  const int64_t max_iterations = iterations_ + 50LL * total + 10000;
  std::vector<double> y(m_);
  std::vector<double> column(m_);
  bool bland = false;
  int degenerate = 0;
  for (int64_t step = 0;; ++step) {
    if ((step & 63) == 63 && Clock::now() > deadline) return LpStatus::kTimeLimit;
    if (iterations_ > max_iterations) return LpStatus::kNumericalFailure;
    if (etas_.size() >= kRefactorInterval || !factored_) {
      if (!Refactor()) {
        ResetToSlackBasis();
        Refactor();
      }
      ComputePrimal();
    }

    bool phase1 = false;
    for (int pos = 0; pos < m_; ++pos) {
      if (Infeasibility(pos) > 0.0) {
        phase1 = true;
        break;
      }
    }
    for (int pos = 0; pos < m_; ++pos) {
      const int j = head_[pos];
      if (!phase1) {
        y[pos] = cost_[j];
      } else if (x_[j] < lower_[j] - ScaledTol(lower_[j])) {
        y[pos] = -1.0;
      } else if (x_[j] > upper_[j] + ScaledTol(upper_[j])) {
        y[pos] = 1.0;
      } else {
        y[pos] = 0.0;
      }
    }
    Btran(y);

    int q = -1;
    double best = 0.0;
    double direction = 0.0;
    for (int j = 0; j < total; ++j) {
      if (status_[j] == kBasic || IsFixed(j)) continue;
      const double dj = (phase1 ? 0.0 : cost_[j]) - ColumnDot(j, y);
      const bool can_increase = status_[j] == kAtLower || status_[j] == kFree;
      const bool can_decrease = status_[j] == kAtUpper || status_[j] == kFree;
      double score = 0.0;
      double dir = 0.0;
      if (can_increase && dj < -kDualTol) {
        score = -dj;
        dir = 1.0;
      } else if (can_decrease && dj > kDualTol) {
        score = dj;
        dir = -1.0;
      } else {
        continue;
      }
      if (bland) {
        q = j;
        direction = dir;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        direction = dir;
      }
    }
    if (q < 0) return phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;

    ScatterColumn(q, column);
    Ftran(column);

    // Harris pass 1.
    double theta_max = kInf;
    for (int pos = 0; pos < m_; ++pos) {
      if (std::abs(column[pos]) <= kPivotTol) continue;
      const int j = head_[pos];
      const double g = -direction * column[pos];
      const double x = x_[j];
      double bound;
      if (g < 0.0) {
        if (x > upper_[j] + ScaledTol(upper_[j])) {
          bound = upper_[j];
        } else if (x >= lower_[j] - ScaledTol(lower_[j]) && std::isfinite(lower_[j])) {
          bound = lower_[j];
        } else {
          continue;
        }
        theta_max = std::min(theta_max, (x - bound + ScaledTol(bound)) / -g);
      } else {
        if (x < lower_[j] - ScaledTol(lower_[j])) {
          bound = lower_[j];
        } else if (x <= upper_[j] + ScaledTol(upper_[j]) && std::isfinite(upper_[j])) {
          bound = upper_[j];
        } else {
          continue;
        }
        theta_max = std::min(theta_max, (bound - x + ScaledTol(bound)) / g);
      }
    }
    const double flip = upper_[q] - lower_[q];  // inf unless boxed
    if (theta_max == kInf && !std::isfinite(flip)) {
      return phase1 ? LpStatus::kNumericalFailure : LpStatus::kUnbounded;
    }

    // Pass 2.
    int r = -1;
    double theta = kInf;
    double best_alpha = 0.0;
    double leave_bound = 0.0;
    for (int pos = 0; pos < m_; ++pos) {
      if (std::abs(column[pos]) <= kPivotTol) continue;
      const int j = head_[pos];
      const double g = -direction * column[pos];
      const double x = x_[j];
      double bound;
      double dist;
      if (g < 0.0) {
        if (x > upper_[j] + ScaledTol(upper_[j])) {
          bound = upper_[j];
        } else if (x >= lower_[j] - ScaledTol(lower_[j]) && std::isfinite(lower_[j])) {
          bound = lower_[j];
        } else {
          continue;
        }
        dist = x - bound;
      } else {
        if (x < lower_[j] - ScaledTol(lower_[j])) {
          bound = lower_[j];
        } else if (x <= upper_[j] + ScaledTol(upper_[j]) && std::isfinite(upper_[j])) {
          bound = upper_[j];
        } else {
          continue;
        }
        dist = bound - x;
      }
      const double ratio = std::max(dist, 0.0) / std::abs(g);
      if (bland) {
        if (ratio < theta - 1e-12 ||
            (ratio <= theta + 1e-12 && r >= 0 && j < head_[r])) {
          theta = ratio;
          r = pos;
          leave_bound = bound;
        }
      } else if (ratio <= theta_max && std::abs(g) > best_alpha) {
        best_alpha = std::abs(g);
        theta = ratio;
        r = pos;
        leave_bound = bound;
      }
    }
    if (std::isfinite(flip) && flip <= theta) {
      theta = flip;
      r = -1;
    }
    if (!std::isfinite(theta)) {
      return phase1 ? LpStatus::kNumericalFailure : LpStatus::kUnbounded;
    }

    for (int pos = 0; pos < m_; ++pos) x_[head_[pos]] -= direction * column[pos] * theta;
    x_[q] += direction * theta;
    if (r < 0) {
      status_[q] = status_[q] == kAtLower ? kAtUpper : kAtLower;
      x_[q] = NonbasicValue(q);
      ++iterations_;
    } else {
      const int leaving = head_[r];
      x_[leaving] = leave_bound;
      const uint8_t leaving_status =
          leave_bound == lower_[leaving] ? kAtLower : kAtUpper;
      Pivot(r, q, column, leaving_status);
    }
    if (theta < 1e-12) {
      if (++degenerate > kDegenerateLimit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

}  // namespace spirp::milp
