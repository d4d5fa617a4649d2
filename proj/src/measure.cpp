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

#include "wjdot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wjdot/error.hpp"

namespace wjdot {

void validate_probability_vector(std::span<const double> weights,
                                 double tolerance, const char* what) {
  if (weights.empty()) throw InputError(std::string(what) + ": empty weights");
  double sum = 0.0;
  for (double v : weights) {
    if (!std::isfinite(v) || v < 0.0)
      throw InputError(std::string(what) +
                       ": weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw InputError(std::string(what) + ": weights must sum to 1 (got " +
                     std::to_string(sum) + ")");
}

DiscreteMeasure::DiscreteMeasure(Matrix atoms, Vector weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() == 0) throw InputError("measure: no atoms");
  if (atoms_.rows() != weights_.size())
    throw InputError("measure: atom and weight counts differ");
  if (!atoms_.allFinite()) throw InputError("measure: non-finite atom");
  validate_probability_vector({weights_.data(), std::size_t(weights_.size())},
                              kSumTolerance, "measure");
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix atoms) {
  const Eigen::Index n = atoms.rows();
  if (n == 0) throw InputError("measure: no atoms");
  return DiscreteMeasure(std::move(atoms), Vector::Constant(n, 1.0 / double(n)));
}

DiscreteMeasure mix_measures(std::span<const DiscreteMeasure> components,
                             const SimplexWeights& alpha) {
  if (components.empty()) throw InputError("mix_measures: no components");
  if (alpha.size() != Eigen::Index(components.size()))
    throw InputError("mix_measures: alpha length differs from component count");
  const Eigen::Index d = components.front().dim();
  Eigen::Index total = 0;
  for (const auto& c : components) {
    if (c.dim() != d) throw InputError("mix_measures: dimension mismatch");
    total += c.size();
  }
  Matrix atoms(total, d);
  Vector weights(total);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto& c = components[j];
    atoms.middleRows(row, c.size()) = c.atoms();
    weights.segment(row, c.size()) = alpha[Eigen::Index(j)] * c.weights();
    row += c.size();
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

double tv_distance_discrete(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.dim() != q.dim())
    throw InputError("tv_distance_discrete: atoms must share one dimension");
  const Eigen::Index d = p.dim();
  const Eigen::Index n = p.size() + q.size();
  auto row = [&](Eigen::Index k) -> const double* {
    return k < p.size() ? &p.atoms()(k, 0) : &q.atoms()(k - p.size(), 0);
  };
  auto signed_weight = [&](Eigen::Index k) {
    return k < p.size() ? p.weights()[k] : -q.weights()[k - p.size()];
  };
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index l, Eigen::Index r) {
    return std::lexicographical_compare(row(l), row(l) + d, row(r), row(r) + d);
  };
  std::stable_sort(order.begin(), order.end(), less);

  double total = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    double diff = 0.0;
    std::size_t e = k;
    while (e < order.size() && std::equal(row(order[k]), row(order[k]) + d,
                                          row(order[e]))) {
      diff += signed_weight(order[e]);
      ++e;
    }
    total += std::abs(diff);
    k = e;
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

}  // namespace wjdot
