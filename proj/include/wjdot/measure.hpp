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

#ifndef WJDOT_MEASURE_HPP_
#define WJDOT_MEASURE_HPP_

#include <span>
#include <vector>

#include "wjdot/linalg.hpp"
#include "wjdot/simplex.hpp"

namespace wjdot {

/// Weighted atoms in R^d. Weights are nonnegative and sum to one.
class DiscreteMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  DiscreteMeasure(Matrix atoms, Vector weights);

  /// Equal weights 1/N on the rows of `atoms`.
  static DiscreteMeasure uniform(Matrix atoms);

  const Matrix& atoms() const { return atoms_; }
  const Vector& weights() const { return weights_; }
  Eigen::Index size() const { return atoms_.rows(); }
  Eigen::Index dim() const { return atoms_.cols(); }

 private:
  Matrix atoms_;
  Vector weights_;
};

/// sum_j alpha_j * components[j]. Atoms are concatenated in component order;
/// atoms of zero-weight components are kept (with weight zero) so that
/// indices line up with the inputs.
DiscreteMeasure mix_measures(std::span<const DiscreteMeasure> components,
                             const SimplexWeights& alpha);

/// Total variation distance between two discrete measures, matching atoms by
/// exact equality of their coordinates.
double tv_distance_discrete(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Check a weight vector: finite, nonnegative, sum within `tolerance` of 1.
/// Throws InputError naming `what`.
void validate_probability_vector(std::span<const double> weights,
                                 double tolerance, const char* what);

}  // namespace wjdot

#endif  // WJDOT_MEASURE_HPP_
