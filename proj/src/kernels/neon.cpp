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

#if defined(__aarch64__)

#include <arm_neon.h>

#include <algorithm>

namespace wjdot::kernels::neon {

namespace {

template <bool kSquared>
void pairwise(const double* a, const double* bt, std::size_t n, std::size_t m,
              std::size_t d, double scale, double* out, bool accumulate) {
  const float64x2_t vscale = vdupq_n_f64(scale);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * d;
    double* oi = out + i * m;
    std::size_t j = 0;
    for (; j + 2 <= m; j += 2) {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (std::size_t k = 0; k < d; ++k) {
        const float64x2_t b = vld1q_f64(bt + k * m + j);
        const float64x2_t x = vdupq_n_f64(ai[k]);
        if constexpr (kSquared) {
          const float64x2_t diff = vsubq_f64(x, b);
          acc = vaddq_f64(acc, vmulq_f64(diff, diff));
        } else {
          acc = vaddq_f64(acc, vmulq_f64(x, b));
        }
      }
      float64x2_t r = vmulq_f64(vscale, acc);
      if (accumulate) r = vaddq_f64(vld1q_f64(oi + j), r);
      vst1q_f64(oi + j, r);
    }
    for (; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        if constexpr (kSquared) {
          const double diff = ai[k] - bt[k * m + j];
          acc = acc + diff * diff;
        } else {
          acc = acc + ai[k] * bt[k * m + j];
        }
      }
      oi[j] = accumulate ? oi[j] + scale * acc : scale * acc;
    }
  }
}

}  // namespace

void pairwise_sq_dist(const double* a, const double* bt, std::size_t n,
                      std::size_t m, std::size_t d, double scale, double* out,
                      bool accumulate) {
  pairwise<true>(a, bt, n, m, d, scale, out, accumulate);
}

void pairwise_dot(const double* a, const double* bt, std::size_t n,
                  std::size_t m, std::size_t d, double scale, double* out,
                  bool accumulate) {
  pairwise<false>(a, bt, n, m, d, scale, out, accumulate);
}

ArgMin shifted_argmin(const double* row, const double* shift, std::size_t m) {
  double best = row[0] - shift[0];
  std::size_t j = 0;
  if (m >= 2) {
    float64x2_t v = vsubq_f64(vld1q_f64(row), vld1q_f64(shift));
    for (j = 2; j + 2 <= m; j += 2)
      v = vminq_f64(v, vsubq_f64(vld1q_f64(row + j), vld1q_f64(shift + j)));
    best = vminvq_f64(v);
  }
  for (; j < m; ++j) best = std::min(best, row[j] - shift[j]);
  for (std::size_t k = 0; k < m; ++k) {
    if (row[k] - shift[k] == best) return {best, k};
  }
  return {best, 0};
}

}  // namespace wjdot::kernels::neon

#endif
