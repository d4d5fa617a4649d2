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

#include "wjdot/baselines.hpp"

#include "adaptation.hpp"
#include "wjdot/error.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {

FeedForwardModel train_erm(const std::vector<LabeledDataset>& datasets,
                           const ArchConfig& arch, const TrainConfig& train,
                           std::uint64_t seed, const LabeledDataset* validation) {
  if (datasets.empty()) throw InputError("train_erm: no datasets");
  const LabeledDataset pooled = concatenate(datasets);
  pooled.validate();
  FeedForwardModel model = FeedForwardModel::initialize(arch, derive_seed(seed, 0));
  if (!validation) {
    gradient_descent(model, pooled, train);
    return model;
  }
  TrainConfig one = train;
  one.steps = 1;
  FeedForwardModel best = model;
  double best_acc = accuracy(model, *validation);
  for (int step = 0; step < train.steps; ++step) {
    gradient_descent(model, pooled, one);
    const double acc = accuracy(model, *validation);
    if (acc > best_acc) {
      best_acc = acc;
      best = model;
    }
  }
  return best;
}

WjdotState run_cjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config) {
  return detail::run_adaptation(detail::Coupling::kPooled, sources, x_target, g, config);
}

WjdotState run_mjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config) {
  return detail::run_adaptation(detail::Coupling::kPerSource, sources, x_target, g, config);
}

}  // namespace wjdot
