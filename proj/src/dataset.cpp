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

#include "wjdot/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wjdot/error.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {

void LabeledDataset::validate() const {
  if (features.rows() < 1) throw InputError("dataset is empty");
  if (features.cols() < 1) throw InputError("dataset has no features");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw InputError("dataset: label count differs from row count");
  if (num_classes < 1) throw InputError("dataset: num_classes must be >= 1");
  if (!features.allFinite()) throw InputError("dataset: non-finite feature");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw InputError("dataset: label " + std::to_string(y) +
                       " outside [0, " + std::to_string(num_classes) + ")");
}

LabeledDataset LabeledDataset::subset(
    const std::vector<Eigen::Index>& indices) const {
  LabeledDataset out;
  out.num_classes = num_classes;
  out.domain_id = domain_id;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), dim());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Eigen::Index i = indices[r];
    if (i < 0 || i >= size()) throw InputError("subset index out of range");
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(i);
    out.labels.push_back(labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

bool LabeledDataset::operator==(const LabeledDataset& other) const {
  return num_classes == other.num_classes && domain_id == other.domain_id &&
         labels == other.labels && features.rows() == other.features.rows() &&
         features.cols() == other.features.cols() &&
         features == other.features;
}

LabeledDataset concatenate(const std::vector<LabeledDataset>& parts) {
  if (parts.empty()) throw InputError("concatenate: no datasets");
  LabeledDataset out;
  out.domain_id = parts[0].domain_id;
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.dim() != parts[0].dim())
      throw InputError("concatenate: feature dimensions differ");
    rows += p.size();
    out.num_classes = std::max(out.num_classes, p.num_classes);
  }
  out.features.resize(rows, parts[0].dim());
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.features.middleRows(r, p.size()) = p.features;
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    r += p.size();
  }
  return out;
}

std::vector<Eigen::Index> split_permutation(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  // Fisher-Yates with our own bounded draw so the permutation does not
  // depend on the standard library's distribution implementation.
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto bound = static_cast<std::uint64_t>(i + 1);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(x % bound)]);
  }
  return perm;
}

DatasetSplit split_dataset(const LabeledDataset& data, std::uint64_t seed) {
  const Eigen::Index n = data.size();
  if (n < 10) throw InputError("split_dataset needs at least 10 samples");
  const auto perm = split_permutation(n, seed);
  const Eigen::Index n_train = (7 * n) / 10;
  const Eigen::Index n_val = (2 * n) / 10;
  auto take = [&](Eigen::Index from, Eigen::Index to) {
    return data.subset(std::vector<Eigen::Index>(perm.begin() + from,
                                                 perm.begin() + to));
  };
  return {take(0, n_train), take(n_train, n_train + n_val),
          take(n_train + n_val, n)};
}

void write_dataset_csv(const std::filesystem::path& path,
                       const LabeledDataset& data) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (Eigen::Index k = 0; k < data.dim(); ++k) out << 'f' << k << ',';
  out << "label,domain\n";
  char buf[64];
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index k = 0; k < data.dim(); ++k) {
      auto res = std::to_chars(buf, buf + sizeof buf, data.features(i, k));
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << data.labels[static_cast<std::size_t>(i)] << ',' << data.domain_id
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_field(std::string s, std::size_t line, const char* what) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = s.find_first_not_of(' ');
  if (start == std::string::npos) start = s.size();
  T v{};
  const char* b = s.data() + start;
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e)
    throw ParseError(std::string("bad ") + what + " `" + s + "`", line);
  return v;
}

}  // namespace

LabeledDataset read_dataset_csv(const std::filesystem::path& path,
                                int num_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  const auto width = header.size();
  if (width < 3 || header[width - 2] != "label" || header[width - 1] != "domain")
    throw ParseError("header must be f0,...,label,domain", 1);
  const auto d = static_cast<Eigen::Index>(width - 2);
  for (Eigen::Index k = 0; k < d; ++k)
    if (header[static_cast<std::size_t>(k)] != "f" + std::to_string(k))
      throw ParseError("header column " + std::to_string(k) + " must be f" +
                           std::to_string(k),
                       1);

  std::vector<double> values;
  LabeledDataset out;
  std::size_t lineno = 1;
  bool have_domain = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double v =
          parse_field<double>(fields[static_cast<std::size_t>(k)], lineno, "feature");
      if (!std::isfinite(v)) throw ParseError("non-finite feature", lineno);
      values.push_back(v);
    }
    out.labels.push_back(parse_field<int>(fields[width - 2], lineno, "label"));
    const int domain = parse_field<int>(fields[width - 1], lineno, "domain");
    if (have_domain && domain != out.domain_id)
      throw ParseError("mixed domain ids in one file", lineno);
    out.domain_id = domain;
    have_domain = true;
  }
  const auto n = static_cast<Eigen::Index>(out.labels.size());
  if (n == 0) throw ParseError("no data rows", lineno);
  out.features = Eigen::Map<const Matrix>(values.data(), n, d);
  if (num_classes <= 0) {
    num_classes = 1 + *std::max_element(out.labels.begin(), out.labels.end());
    if (num_classes < 1) num_classes = 1;
  }
  out.num_classes = num_classes;
  out.validate();
  return out;
}

}  // namespace wjdot
