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

#ifndef WJDOT_SRC_ADAPTATION_HPP_
#define WJDOT_SRC_ADAPTATION_HPP_

// Shared alternating loop behind run_wjdot, run_cjdot and run_mjdot.

#include <vector>

#include "wjdot/wjdot.hpp"

namespace wjdot::detail {

enum class Coupling {
  kMixture,    // one problem, source j weighted alpha_j, alpha learned
  kPooled,     // one problem, every source atom weighted 1 / sum N
  kPerSource,  // one problem per source, objectives summed
};

WjdotState run_adaptation(Coupling coupling,
                          const std::vector<LabeledDataset>& sources,
                          const Matrix& x_target, const FeedForwardModel& g,
                          const WjdotConfig& config);

}  // namespace wjdot::detail

#endif  // WJDOT_SRC_ADAPTATION_HPP_
