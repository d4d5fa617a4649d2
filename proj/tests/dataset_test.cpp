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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "wjdot/dataset.hpp"
#include "wjdot/error.hpp"
#include "wjdot/rng.hpp"

using namespace wjdot;

namespace {

LabeledDataset sample(Eigen::Index n, int d, std::uint64_t seed) {
  Rng rng(seed);
  LabeledDataset data;
  data.num_classes = 3;
  data.domain_id = 7;
  data.features.resize(n, d);
  for (Eigen::Index i = 0; i < data.features.size(); ++i)
    data.features.data()[i] = 1e3 * standard_normal(rng) / 7.0;
  for (Eigen::Index i = 0; i < n; ++i) data.labels.push_back(int(i % 3));
  return data;
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("split sizes and disjointness") {
  const auto data = sample(100, 2, 1);
  const auto s = split_dataset(data, 5);
  CHECK(s.train.size() == 70);
  CHECK(s.validation.size() == 20);
  CHECK(s.test.size() == 10);

  const auto odd = split_dataset(sample(37, 2, 1), 5);
  CHECK(odd.train.size() == 25);
  CHECK(odd.validation.size() == 7);
  CHECK(odd.test.size() == 5);

  const auto perm = split_permutation(100, 5);
  std::set<Eigen::Index> all(perm.begin(), perm.end());
  CHECK(all.size() == 100);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 99);
  CHECK(split_permutation(100, 5) == perm);
  CHECK(split_permutation(100, 6) != perm);

  // Rows of the parts are the original rows in permutation order.
  for (Eigen::Index r = 0; r < 70; ++r)
    CHECK(s.train.features.row(r) == data.features.row(perm[std::size_t(r)]));
  for (Eigen::Index r = 0; r < 10; ++r)
    CHECK(s.test.features.row(r) == data.features.row(perm[std::size_t(90 + r)]));
  CHECK(split_dataset(data, 5).train == s.train);
  CHECK_THROWS_AS(split_dataset(sample(9, 2, 1), 5), InputError);
}

TEST_CASE("csv round trip") {
  const auto data = sample(50, 4, 2);
  const auto p = temp("wjdot_ds.csv");
  write_dataset_csv(p, data);
  CHECK(read_dataset_csv(p, 3) == data);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "f0,f1,f2,f3,label,domain");
  std::filesystem::remove(p);
}

TEST_CASE("csv errors") {
  const auto p = temp("wjdot_bad.csv");
  write_text(p, "f0,f1,label,domain\n1,2,0,0\n1,abc,1,0\n");
  try {
    read_dataset_csv(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  write_text(p, "f0,f1,label,domain\n1,2,0,0\n1,2,0\n");
  CHECK_THROWS_AS(read_dataset_csv(p), ParseError);
  write_text(p, "x0,f1,label,domain\n1,2,0,0\n");
  CHECK_THROWS_AS(read_dataset_csv(p), ParseError);
  write_text(p, "f0,label,domain\n1,5,0\n");
  CHECK_THROWS_AS(read_dataset_csv(p, 3), InputError);
  write_text(p, "f0,label,domain\n1,-1,0\n");
  CHECK_THROWS_AS(read_dataset_csv(p), InputError);
  write_text(p, "f0,label,domain\n1,0,0\n2,1,4\n");
  CHECK_THROWS_AS(read_dataset_csv(p), ParseError);
  write_text(p, "f0,label,domain\n");
  CHECK_THROWS_AS(read_dataset_csv(p), ParseError);

  // Pre-embedded feature files with the same schema load as plain datasets.
  write_text(p, "f0,f1,f2,label,domain\n0.5,1e-3,-2,1,3\r\n0,0,0,0,3\n");
  const auto ok = read_dataset_csv(p);
  CHECK(ok.size() == 2);
  CHECK(ok.num_classes == 2);
  CHECK(ok.domain_id == 3);
  CHECK(ok.features(0, 1) == 1e-3);
  std::filesystem::remove(p);
  CHECK_THROWS_AS(read_dataset_csv(temp("wjdot_missing_file.csv")), IoError);
}

TEST_CASE("validation and concatenation") {
  auto d = sample(6, 2, 3);
  d.labels[2] = 3;
  CHECK_THROWS_AS(d.validate(), InputError);
  d.labels[2] = 0;
  d.features(1, 1) = NAN;
  CHECK_THROWS_AS(d.validate(), InputError);

  const auto a = sample(4, 2, 4), b = sample(3, 2, 5);
  const auto c = concatenate({a, b});
  CHECK(c.size() == 7);
  CHECK(c.features.bottomRows(3) == b.features);
  CHECK_THROWS_AS(concatenate({a, sample(3, 3, 5)}), InputError);
}
