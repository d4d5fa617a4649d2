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

#ifndef WJDOT_BASELINES_HPP_
#define WJDOT_BASELINES_HPP_

#include <cstdint>
#include <vector>

#include "wjdot/dataset.hpp"
#include "wjdot/model.hpp"
#include "wjdot/wjdot.hpp"

namespace wjdot {

/// Full-batch ERM on the pooled datasets. With a validation set the
/// returned model is the step with the best validation accuracy (earliest
/// on ties); otherwise the final step.
FeedForwardModel train_erm(const std::vector<LabeledDataset>& datasets,
                           const ArchConfig& arch, const TrainConfig& train,
                           std::uint64_t seed,
                           const LabeledDataset* validation = nullptr);

/// All sources pooled into one uniformly weighted source; alpha is not
/// learned and is reported as N_j / sum N.
WjdotState run_cjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config);

/// Sum over sources of single-source objectives, one transport problem per
/// source; alpha is not learned and is reported as uniform.
WjdotState run_mjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config);

}  // namespace wjdot

#endif  // WJDOT_BASELINES_HPP_
