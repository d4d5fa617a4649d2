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

#ifndef WJDOT_DATASET_HPP_
#define WJDOT_DATASET_HPP_

#include <filesystem>
#include <vector>

#include "wjdot/linalg.hpp"

namespace wjdot {

/// Feature rows with class labels in {0, ..., num_classes - 1} and a domain
/// tag.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;
  int domain_id = 0;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Throws InputError when empty, non-finite, or a label is out of range.
  void validate() const;

  /// Rows at `indices`, in that order.
  LabeledDataset subset(const std::vector<Eigen::Index>& indices) const;

  bool operator==(const LabeledDataset& other) const;
};

/// Rows of all datasets stacked in order. The domain tag of the first wins.
LabeledDataset concatenate(const std::vector<LabeledDataset>& parts);

/// Train / validation / test split.
struct DatasetSplit {
  LabeledDataset train, validation, test;
};

/// Seeded 70/20/10 split. Sizes are floor(0.7 N) and floor(0.2 N), the
/// remainder goes to test. Needs N >= 10.
DatasetSplit split_dataset(const LabeledDataset& data, std::uint64_t seed);

/// Index permutation used by split_dataset (exposed for testing).
std::vector<Eigen::Index> split_permutation(Eigen::Index n, std::uint64_t seed);

/// CSV with header f0,...,f{d-1},label,domain. Doubles are written with 17
/// significant digits so that reading back is exact.
void write_dataset_csv(const std::filesystem::path& path,
                       const LabeledDataset& data);

/// Reads the CSV format above. `num_classes` <= 0 infers max(label) + 1.
/// Throws ParseError (with line number) on malformed rows, InputError when
/// a label is outside [0, num_classes).
LabeledDataset read_dataset_csv(const std::filesystem::path& path,
                                int num_classes = 0);

}  // namespace wjdot

#endif  // WJDOT_DATASET_HPP_
