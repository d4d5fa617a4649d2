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

#ifndef WJDOT_SIMPLEX_HPP_
#define WJDOT_SIMPLEX_HPP_

#include <span>

#include "wjdot/linalg.hpp"

namespace wjdot {

/// A point of the probability simplex: nonnegative entries summing to one.
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates; throws InputError if an entry is negative, non-finite, or the
  /// sum is off by more than kSumTolerance.
  explicit SimplexWeights(Vector values);

  /// (1/J, ..., 1/J).
  static SimplexWeights uniform(Eigen::Index size);
  /// Indicator of `index`.
  static SimplexWeights vertex(Eigen::Index size, Eigen::Index index);

  const Vector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index j) const { return values_[j]; }

  bool operator==(const SimplexWeights&) const = default;

 private:
  Vector values_;
};

/// Euclidean projection of `w` onto the probability simplex by the
/// sort-and-threshold method. Throws InputError on empty or non-finite input.
SimplexWeights project_to_simplex(std::span<const double> w);
SimplexWeights project_to_simplex(const Vector& w);

}  // namespace wjdot

#endif  // WJDOT_SIMPLEX_HPP_
