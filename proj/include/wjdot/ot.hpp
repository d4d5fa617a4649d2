// Copyright 2026 The wjdot Authors. All Rights Reserved.
//
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

#ifndef WJDOT_OT_HPP_
#define WJDOT_OT_HPP_

#include <span>

#include "wjdot/linalg.hpp"
#include "wjdot/measure.hpp"

namespace wjdot {

/// Dense n x m ground cost; entries are finite and nonnegative.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }

 private:
  Matrix entries_;
};

/// Optimal plan with its value and a complementary pair of dual potentials.
///
/// The duals satisfy dual_source[i] + dual_target[j] <= cost(i, j) and
///   value = <dual_source, a> + <dual_target, b> = <plan, cost>.
/// They are reported with mean(dual_source) == 0.
struct TransportSolution {
  Matrix plan;
  double value = 0.0;
  Vector dual_source;
  Vector dual_target;
};

struct OtStats {
  long pivots = 0;
  int components = 0;
};

/// Weight sums must match 1 to this tolerance on entry to the solver.
inline constexpr double kOtWeightTolerance = 1e-9;

/// Exact discrete optimal transport between weights `a` (rows) and `b`
/// (columns) under `cost`.
///
/// Solved with a primal network simplex on the complete bipartite graph,
/// block pricing and strongly feasible trees. Rows or columns of zero weight
/// are kept out of the simplex; their potentials are the c-transform of the
/// other side, the largest values that keep the duals feasible.
///
/// When the optimal basis is degenerate the duals are not unique. The basis
/// forest is then split into its connected pieces and each piece is shifted
/// to the midpoint of its feasible range relative to the pieces already
/// placed, which keeps the potentials on the scale of the cost.
///
/// Throws InputError on shape mismatch or invalid weights.
TransportSolution solve_exact_ot(std::span<const double> a,
                                 std::span<const double> b,
                                 const CostMatrix& cost,
                                 OtStats* stats = nullptr);

/// Squared Euclidean distances between the atoms of two measures.
CostMatrix squared_euclidean_cost(const Matrix& x, const Matrix& y);

/// W(p, q) under the squared Euclidean ground cost.
double wasserstein2_squared(const DiscreteMeasure& p, const DiscreteMeasure& q);

}  // namespace wjdot

#endif  // WJDOT_OT_HPP_
