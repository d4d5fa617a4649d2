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

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

// Compiled with a function-level target so the rest of the library stays
// baseline x86-64. Only mul/add/sub/min are used: no FMA, which keeps every
// lane bitwise equal to the scalar reference.
#define WJDOT_AVX2 __attribute__((target("avx2")))

namespace wjdot::kernels::avx2 {

namespace {

template <bool kSquared>
WJDOT_AVX2 void pairwise(const double* a, const double* bt, std::size_t n,
                         std::size_t m, std::size_t d, double scale,
                         double* out, bool accumulate) {
  const __m256d vscale = _mm256_set1_pd(scale);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a + i * d;
    double* oi = out + i * m;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < d; ++k) {
        const __m256d b = _mm256_loadu_pd(bt + k * m + j);
        const __m256d x = _mm256_set1_pd(ai[k]);
        if constexpr (kSquared) {
          const __m256d diff = _mm256_sub_pd(x, b);
          acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        } else {
          acc = _mm256_add_pd(acc, _mm256_mul_pd(x, b));
        }
      }
      __m256d r = _mm256_mul_pd(vscale, acc);
      if (accumulate) r = _mm256_add_pd(_mm256_loadu_pd(oi + j), r);
      _mm256_storeu_pd(oi + j, r);
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

WJDOT_AVX2 ArgMin shifted_argmin(const double* row, const double* shift,
                                 std::size_t m) {
  double best = row[0] - shift[0];
  std::size_t j = 0;
  if (m >= 8) {
    __m256d v0 = _mm256_sub_pd(_mm256_loadu_pd(row), _mm256_loadu_pd(shift));
    __m256d v1 =
        _mm256_sub_pd(_mm256_loadu_pd(row + 4), _mm256_loadu_pd(shift + 4));
    for (j = 8; j + 8 <= m; j += 8) {
      v0 = _mm256_min_pd(v0, _mm256_sub_pd(_mm256_loadu_pd(row + j),
                                           _mm256_loadu_pd(shift + j)));
      v1 = _mm256_min_pd(v1, _mm256_sub_pd(_mm256_loadu_pd(row + j + 4),
                                           _mm256_loadu_pd(shift + j + 4)));
    }
    v0 = _mm256_min_pd(v0, v1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v0);
    best = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  }
  for (; j < m; ++j) best = std::min(best, row[j] - shift[j]);
  // Second pass recovers the first index attaining the minimum; the
  // differences are recomputed with identical arithmetic.
  for (std::size_t k = 0; k < m; ++k) {
    if (row[k] - shift[k] == best) return {best, k};
  }
  return {best, 0};
}

}  // namespace wjdot::kernels::avx2

#endif
