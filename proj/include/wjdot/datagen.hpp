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

#ifndef WJDOT_DATAGEN_HPP_
#define WJDOT_DATAGEN_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "wjdot/dataset.hpp"
#include "wjdot/linalg.hpp"

namespace wjdot {

inline constexpr double kRotationRange = 4.71238898038468985769;  // 3*pi/2

/// Default 3-class base distribution: cluster centers (rows) in 3D. Classes
/// 0 and 1 sit on opposite sides of the rotation axis and class 2 on it, so
/// the classes stay linearly separable in every rotated domain while the
/// rotations mix classes 0 and 1 when domains are pooled.
Matrix default_rotation_centers();

struct RotationShiftSpec {
  int num_sources = 4;
  int n_source = 300;
  int n_target = 300;
  double sigma = 0.8;
  double angle_range = kRotationRange;
  std::optional<double> target_angle;  // empty: drawn uniformly from the range
  std::uint64_t seed = 0;
  Matrix centers = default_rotation_centers();

  void validate() const;
};

struct RotationDomains {
  std::vector<LabeledDataset> sources;  // domain ids 0..J-1
  LabeledDataset target;                // domain id J; labels for evaluation only
  std::vector<double> source_angles;
  double target_angle = 0.0;
  Matrix base;                          // X_0
};

/// Row-vector rotation about the first axis: x' = x * R.
Matrix rotation_about_x(double angle);

/// J equispaced angles over [0, range]; a single source sits at 0.
std::vector<double> equispaced_angles(int count, double range);

/// One base sample X_0 of max(n_source, n_target) rows, labels assigned
/// round-robin over the clusters; every domain is a prefix of X_0 rotated by
/// its angle.
RotationDomains generate_rotation_domains(const RotationShiftSpec& spec);

/// Default class-conditional means (rows) for the target-shift data.
Matrix default_target_shift_means();

/// Two fixed 2D class-conditional Gaussians; only class proportions vary.
struct TargetShiftSpec {
  std::vector<double> source_proportions;  // share of class 1 per source
  double target_proportion = 0.5;
  int n_source = 100;
  int n_target = 300;
  Matrix means = default_target_shift_means();
  double sigma = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TargetShiftDomains {
  std::vector<LabeledDataset> sources;
  LabeledDataset target;
};

/// Domain k draws round(P * N) samples of class 1 and the rest of class 0.
TargetShiftDomains generate_target_shift(const TargetShiftSpec& spec);

/// `count` proportions uniform in [lo, hi], sorted ascending.
std::vector<double> random_proportions(int count, double lo, double hi,
                                       std::uint64_t seed);

}  // namespace wjdot

#endif  // WJDOT_DATAGEN_HPP_
