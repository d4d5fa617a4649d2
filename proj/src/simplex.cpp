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

#include "wjdot/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wjdot/error.hpp"

namespace wjdot {

SimplexWeights::SimplexWeights(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw InputError("simplex weights: empty vector");
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("simplex weights: entries must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InputError("simplex weights: entries must sum to 1");
}

SimplexWeights SimplexWeights::uniform(Eigen::Index size) {
  return SimplexWeights(Vector::Constant(size, 1.0 / double(size)));
}

SimplexWeights SimplexWeights::vertex(Eigen::Index size, Eigen::Index index) {
  Vector v = Vector::Zero(size);
  v[index] = 1.0;
  return SimplexWeights(std::move(v));
}

SimplexWeights project_to_simplex(std::span<const double> w) {
  if (w.empty()) throw InputError("project_to_simplex: empty input");
  double sum = 0.0;
  bool nonnegative = true;
  for (double v : w) {
    if (!std::isfinite(v))
      throw InputError("project_to_simplex: non-finite input");
    nonnegative = nonnegative && v >= 0.0;
    sum += v;
  }
  if (w.size() == 1) return SimplexWeights(Vector::Ones(1));
  // Points already on the simplex are returned verbatim so the projection is
  // idempotent bit for bit.
  if (nonnegative && std::abs(sum - 1.0) <= SimplexWeights::kSumTolerance)
    return SimplexWeights(Eigen::Map<const Vector>(w.data(), Eigen::Index(w.size())));

  const std::size_t n = w.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Descending; equal values keep their original index order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return w[l] > w[r]; });

  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = w[order[k]];
    cumsum += u;
    const double t = (cumsum - 1.0) / double(k + 1);
    if (t < u) tau = t;  // largest k satisfying the condition wins
  }

  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) out[Eigen::Index(j)] = std::max(w[j] - tau, 0.0);
  return SimplexWeights(std::move(out));
}

SimplexWeights project_to_simplex(const Vector& w) {
  return project_to_simplex(std::span<const double>(w.data(), std::size_t(w.size())));
}

}  // namespace wjdot
