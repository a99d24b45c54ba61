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

// Bounded-variable revised simplex.
//
// The problem is stored as
//
//   min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper
//
// and solved in the equivalent form [A -I](x, s) = 0 where every row owns a
// logical variable s carrying the row bounds. The basis is kept as a sparse LU
// factorization (Eigen::SparseLU) followed by a product-form eta file that is
// folded back into a fresh factorization every kRefactorInterval updates.
//
// Both a primal method (composite phase 1 then phase 2) and a dual method are
// available. Solve() picks dual whenever the current basis is dual feasible,
// possibly after flipping boxed nonbasic variables, which is the common case
// when re-solving after a bound change inside branch-and-bound. Ratio tests
// follow Harris' two-pass scheme; after a run of degenerate pivots both
// methods fall back to Bland's smallest-index rule until progress resumes.

#ifndef SPIRP_SIMPLEX_H_
#define SPIRP_SIMPLEX_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace spirp::milp {

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kTimeLimit,
  kNumericalFailure,
};

// Compressed sparse column storage.
struct SparseColumns {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;  // size cols + 1
  std::vector<int> index;
  std::vector<double> value;
};

class BoundedSimplex {
 public:
  using Clock = std::chrono::steady_clock;

  enum VarStatus : uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };
  // One status per structural column followed by one per row.
  using Basis = std::vector<uint8_t>;

  BoundedSimplex(SparseColumns matrix, std::vector<double> cost,
                 std::vector<double> col_lower, std::vector<double> col_upper,
                 std::vector<double> row_lower, std::vector<double> row_upper);
  ~BoundedSimplex();

  BoundedSimplex(const BoundedSimplex&) = delete;
  BoundedSimplex& operator=(const BoundedSimplex&) = delete;

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

  void SetColumnBounds(int col, double lower, double upper);
  double column_lower(int col) const { return lower_[col]; }
  double column_upper(int col) const { return upper_[col]; }

  LpStatus Solve(Clock::time_point deadline = Clock::time_point::max());

  // Valid after kOptimal.
  double objective() const;
  std::span<const double> primal() const { return {x_.data(), static_cast<size_t>(n_)}; }

  Basis basis() const { return status_; }
  // Installs a basis from a previous solve; falls back to the slack basis if
  // it does not have exactly num_rows() basic entries.
  void SetBasis(const Basis& basis);

  int64_t iterations() const { return iterations_; }

 private:
  struct Eta;
  struct Factor;

  bool IsBoxed(int j) const;
  bool IsFixed(int j) const { return lower_[j] == upper_[j]; }
  double NonbasicValue(int j) const;

  double ColumnDot(int j, const std::vector<double>& y) const;
  void ScatterColumn(int j, std::vector<double>& out) const;

  bool Refactor();
  void ResetToSlackBasis();
  void Ftran(std::vector<double>& v) const;
  void Btran(std::vector<double>& v) const;
  void PushEta(int row, const std::vector<double>& column);

  void ComputePrimal();
  void ComputeDuals();
  bool FlipToDualFeasibility();
  bool DualFeasible() const;
  double Infeasibility(int pos) const;

  enum class LoopResult { kDone, kRestartPrimal };
  LpStatus PrimalLoop(Clock::time_point deadline);
  LpStatus DualLoop(Clock::time_point deadline, LoopResult* result);
  void Pivot(int pos, int entering, const std::vector<double>& column,
             uint8_t leaving_status);

  int m_ = 0;
  int n_ = 0;
  SparseColumns a_;
  std::vector<double> cost_;   // n_ + m_
  std::vector<double> lower_;  // n_ + m_
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<double> d_;  // reduced costs
  Basis status_;
  std::vector<int> head_;  // basic variable at each basis position

  std::unique_ptr<Factor> factor_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  int64_t iterations_ = 0;
};

}  // namespace spirp::milp

#endif  // SPIRP_SIMPLEX_H_
