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

#ifndef WJDOT_GAUSSIAN_HPP_
#define WJDOT_GAUSSIAN_HPP_

#include "wjdot/linalg.hpp"

namespace wjdot {

/// First and second moments of a distribution.
struct GaussianSummary {
  Vector mean;
  Eigen::MatrixXd covariance;

  /// Throws InputError unless covariance is square, matches the mean, is
  /// symmetric within 1e-10 and has no eigenvalue below -1e-10.
  void validate() const;
};

/// Empirical mean and (biased, 1/N) covariance of the rows of `samples`.
GaussianSummary summarize(const Matrix& samples);

/// Principal square root of a symmetric positive semidefinite matrix.
/// Eigenvalues in [-1e-10, 0) are clamped to zero.
Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& a);

/// Bures-Wasserstein distance between the Gaussians with the given moments.
double bures_wasserstein(const GaussianSummary& p, const GaussianSummary& q);

}  // namespace wjdot

#endif  // WJDOT_GAUSSIAN_HPP_
