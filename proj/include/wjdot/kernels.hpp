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

#ifndef WJDOT_KERNELS_HPP_
#define WJDOT_KERNELS_HPP_

// Data-parallel inner loops used by the OT solver and the joint cost.
//
// Every kernel has a scalar reference implementation and SIMD variants
// (AVX2 on x86-64, NEON on AArch64). The variant is picked once at startup
// from the CPU features; all variants evaluate the same arithmetic in the
// same order (no FMA contraction), so their results are bitwise identical
// to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace wjdot::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

struct ArgMin {
  double value;
  std::size_t index;
};

// out[i*m + j] (+)= scale * sum_k (a[i*d + k] - bt[k*m + j])^2
//
// `a` is n x d row-major, `bt` is the *transposed* second operand (d x m
// row-major) so that the inner loop runs over contiguous j.
using PairwiseFn = void (*)(const double* a, const double* bt, std::size_t n,
                            std::size_t m, std::size_t d, double scale,
                            double* out, bool accumulate);

// Minimum over j of row[j] - shift[j]; ties go to the lowest j.
using ShiftedArgMinFn = ArgMin (*)(const double* row, const double* shift,
                                   std::size_t m);

struct KernelTable {
  Isa isa;
  PairwiseFn pairwise_sq_dist;
  // out[i*m + j] (+)= scale * sum_k a[i*d + k] * bt[k*m + j]
  PairwiseFn pairwise_dot;
  ShiftedArgMinFn shifted_argmin;
};

/// Table for a specific ISA; nullptr if it was not compiled in or the CPU
/// lacks the features.
const KernelTable* table_for(Isa isa);

/// Best table available on this machine.
const KernelTable& active();

std::string_view isa_name(Isa isa);

// Convenience wrappers over active().
void pairwise_sq_dist(std::span<const double> a, std::span<const double> bt,
                      std::size_t n, std::size_t m, std::size_t d,
                      double scale, std::span<double> out, bool accumulate);
void pairwise_dot(std::span<const double> a, std::span<const double> bt,
                  std::size_t n, std::size_t m, std::size_t d, double scale,
                  std::span<double> out, bool accumulate);
ArgMin shifted_argmin(std::span<const double> row,
                      std::span<const double> shift);

namespace scalar {
void pairwise_sq_dist(const double* a, const double* bt, std::size_t n,
                      std::size_t m, std::size_t d, double scale, double* out,
                      bool accumulate);
void pairwise_dot(const double* a, const double* bt, std::size_t n,
                  std::size_t m, std::size_t d, double scale, double* out,
                  bool accumulate);
ArgMin shifted_argmin(const double* row, const double* shift, std::size_t m);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void pairwise_sq_dist(const double* a, const double* bt, std::size_t n,
                      std::size_t m, std::size_t d, double scale, double* out,
                      bool accumulate);
void pairwise_dot(const double* a, const double* bt, std::size_t n,
                  std::size_t m, std::size_t d, double scale, double* out,
                  bool accumulate);
ArgMin shifted_argmin(const double* row, const double* shift, std::size_t m);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void pairwise_sq_dist(const double* a, const double* bt, std::size_t n,
                      std::size_t m, std::size_t d, double scale, double* out,
                      bool accumulate);
void pairwise_dot(const double* a, const double* bt, std::size_t n,
                  std::size_t m, std::size_t d, double scale, double* out,
                  bool accumulate);
ArgMin shifted_argmin(const double* row, const double* shift, std::size_t m);
}  // namespace neon
#endif

}  // namespace wjdot::kernels

#endif  // WJDOT_KERNELS_HPP_
