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

#include <cassert>

#include "wjdot/kernels.hpp"

namespace wjdot::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::pairwise_sq_dist,
                                   &scalar::pairwise_dot,
                                   &scalar::shifted_argmin};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::pairwise_sq_dist,
                                 &avx2::pairwise_dot, &avx2::shifted_argmin};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::pairwise_sq_dist,
                                 &neon::pairwise_dot, &neon::shifted_argmin};
#endif

const KernelTable& detect() {
  if (const KernelTable* t = table_for(Isa::kAvx2)) return *t;
  if (const KernelTable* t = table_for(Isa::kNeon)) return *t;
  return kScalarTable;
}

}  // namespace

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (__builtin_cpu_supports("avx2")) return &kAvx2Table;
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(__aarch64__)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = detect();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

void pairwise_sq_dist(std::span<const double> a, std::span<const double> bt,
                      std::size_t n, std::size_t m, std::size_t d,
                      double scale, std::span<double> out, bool accumulate) {
  assert(a.size() >= n * d && bt.size() >= d * m && out.size() >= n * m);
  active().pairwise_sq_dist(a.data(), bt.data(), n, m, d, scale, out.data(),
                            accumulate);
}

void pairwise_dot(std::span<const double> a, std::span<const double> bt,
                  std::size_t n, std::size_t m, std::size_t d, double scale,
                  std::span<double> out, bool accumulate) {
  assert(a.size() >= n * d && bt.size() >= d * m && out.size() >= n * m);
  active().pairwise_dot(a.data(), bt.data(), n, m, d, scale, out.data(),
                        accumulate);
}

ArgMin shifted_argmin(std::span<const double> row,
                      std::span<const double> shift) {
  assert(!row.empty() && row.size() == shift.size());
  return active().shifted_argmin(row.data(), shift.data(), row.size());
}

}  // namespace wjdot::kernels
