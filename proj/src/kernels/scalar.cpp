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

#include "wjdot/kernels.hpp"

namespace wjdot::kernels::scalar {

void pairwise_sq_dist(const double* a, const double* bt, std::size_t n,
                      std::size_t m, std::size_t d, double scale, double* out,
                      bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * d;
    double* oi = out + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = ai[k] - bt[k * m + j];
        acc = acc + diff * diff;
      }
      oi[j] = accumulate ? oi[j] + scale * acc : scale * acc;
    }
  }
}

void pairwise_dot(const double* a, const double* bt, std::size_t n,
                  std::size_t m, std::size_t d, double scale, double* out,
                  bool accumulate) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * d;
    double* oi = out + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc = acc + ai[k] * bt[k * m + j];
      oi[j] = accumulate ? oi[j] + scale * acc : scale * acc;
    }
  }
}

ArgMin shifted_argmin(const double* row, const double* shift, std::size_t m) {
  ArgMin best{row[0] - shift[0], 0};
  for (std::size_t j = 1; j < m; ++j) {
    const double v = row[j] - shift[j];
    if (v < best.value) best = {v, j};
  }
  return best;
}

}  // namespace wjdot::kernels::scalar
