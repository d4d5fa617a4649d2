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

#include "wjdot/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "wjdot/error.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {

Matrix default_rotation_centers() {
  Matrix c(3, 3);
  c << 0.0, 4.4, 0.0,  //
      0.0, 0.8, 0.0,  //
      0.0, -2.8, 0.0;
  return c;
}

Matrix default_target_shift_means() {
  Matrix m(2, 2);
  m << -1.0, 0.0,  //
      1.0, 0.0;
  return m;
}

void RotationShiftSpec::validate() const {
  if (num_sources < 1) throw InputError("rotation data: need at least one source");
  if (centers.rows() < 1 || centers.cols() != 3 || !centers.allFinite())
    throw InputError("rotation data: centers must be finite rows in 3D");
  const auto k = static_cast<int>(centers.rows());
  if (n_source < k || n_target < k)
    throw InputError("rotation data: each domain needs at least one sample per cluster");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InputError("rotation data: sigma must be positive");
  if (!(angle_range >= 0.0) || angle_range > kRotationRange + 1e-12)
    throw InputError("rotation data: angle range must lie in [0, 3pi/2]");
  if (target_angle && !(*target_angle >= 0.0 && *target_angle <= angle_range))
    throw InputError("rotation data: target angle outside the angle range");
}

Matrix rotation_about_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Matrix r(3, 3);
  r << 1, 0, 0,  //
      0, c, -s,  //
      0, s, c;
  return r;
}

std::vector<double> equispaced_angles(int count, double range) {
  std::vector<double> a(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j)
    a[static_cast<std::size_t>(j)] = count == 1 ? 0.0 : range * j / (count - 1);
  return a;
}

namespace {

LabeledDataset rotated(const Matrix& base, const std::vector<int>& labels,
                       int n, double angle, int classes, int domain) {
  LabeledDataset d;
  d.num_classes = classes;
  d.domain_id = domain;
  d.labels.assign(labels.begin(), labels.begin() + n);
  if (angle == 0.0)
    d.features = base.topRows(n);
  else
    d.features = base.topRows(n) * rotation_about_x(angle);
  return d;
}

}  // namespace

RotationDomains generate_rotation_domains(const RotationShiftSpec& spec) {
  spec.validate();
  const int k = static_cast<int>(spec.centers.rows());
  const int n = std::max(spec.n_source, spec.n_target);
  Rng rng(derive_seed(spec.seed, 0));
  RotationDomains out;
  out.base.resize(n, 3);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = i % k;
    labels[static_cast<std::size_t>(i)] = c;
    for (int a = 0; a < 3; ++a)
      out.base(i, a) = spec.centers(c, a) + spec.sigma * standard_normal(rng);
  }
  out.source_angles = equispaced_angles(spec.num_sources, spec.angle_range);
  if (spec.target_angle) {
    out.target_angle = *spec.target_angle;
  } else {
    Rng angle_rng(derive_seed(spec.seed, 1));
    out.target_angle = spec.angle_range * uniform01(angle_rng);
  }
  for (int j = 0; j < spec.num_sources; ++j)
    out.sources.push_back(rotated(out.base, labels, spec.n_source,
                                  out.source_angles[static_cast<std::size_t>(j)], k, j));
  out.target = rotated(out.base, labels, spec.n_target, out.target_angle, k,
                       spec.num_sources);
  return out;
}

void TargetShiftSpec::validate() const {
  if (source_proportions.empty())
    throw InputError("target shift: need at least one source");
  auto check = [](double p) {
    if (!(p >= 0.1 - 1e-12 && p <= 0.9 + 1e-12))
      throw InputError("target shift: class proportions must lie in [0.1, 0.9]");
  };
  for (double p : source_proportions) check(p);
  check(target_proportion);
  if (n_source < 2 || n_target < 2)
    throw InputError("target shift: each domain needs at least two samples");
  if (means.rows() != 2 || means.cols() != 2 || !means.allFinite())
    throw InputError("target shift: means must be two finite 2D rows");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InputError("target shift: sigma must be positive");
}

namespace {

LabeledDataset shifted_domain(const TargetShiftSpec& spec, double p, int n,
                              int domain) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(domain)));
  const auto n1 = static_cast<int>(std::lround(p * n));
  LabeledDataset d;
  d.num_classes = 2;
  d.domain_id = domain;
  d.features.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const int c = i < n - n1 ? 0 : 1;
    d.labels.push_back(c);
    for (int a = 0; a < 2; ++a)
      d.features(i, a) = spec.means(c, a) + spec.sigma * standard_normal(rng);
  }
  return d;
}

}  // namespace

TargetShiftDomains generate_target_shift(const TargetShiftSpec& spec) {
  spec.validate();
  TargetShiftDomains out;
  const auto J = static_cast<int>(spec.source_proportions.size());
  for (int j = 0; j < J; ++j)
    out.sources.push_back(shifted_domain(
        spec, spec.source_proportions[static_cast<std::size_t>(j)], spec.n_source, j));
  out.target = shifted_domain(spec, spec.target_proportion, spec.n_target, J);
  return out;
}

std::vector<double> random_proportions(int count, double lo, double hi,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(static_cast<std::size_t>(std::max(count, 0)));
  for (double& x : p) x = lo + (hi - lo) * uniform01(rng);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace wjdot
