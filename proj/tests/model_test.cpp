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

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wjdot/error.hpp"
#include "wjdot/model.hpp"
#include "wjdot/rng.hpp"

using namespace wjdot;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

// Two well separated Gaussian blobs per class along the first axis.
LabeledDataset blobs(std::uint64_t seed, int n_per_class, int classes, double gap) {
  Rng rng(seed);
  LabeledDataset d;
  d.num_classes = classes;
  d.features.resize(n_per_class * classes, 2);
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < n_per_class; ++i) {
      const int r = c * n_per_class + i;
      d.features(r, 0) = gap * c + 0.3 * standard_normal(rng);
      d.features(r, 1) = (c % 2 ? 1.0 : -1.0) + 0.3 * standard_normal(rng);
      d.labels.push_back(c);
    }
  return d;
}

ArchConfig arch(int in, std::vector<int> hidden, Activation act, int out,
                OutputKind kind) {
  ArchConfig a;
  a.input_dim = in;
  a.hidden = std::move(hidden);
  a.hidden_activation = act;
  a.output_dim = out;
  a.output = kind;
  return a;
}

}  // namespace

TEST_CASE("forward basics") {
  FeedForwardModel zero = FeedForwardModel::initialize(
      arch(4, {}, Activation::kTanh, 3, OutputKind::kSoftmax), 1);
  zero.assign(Vector::Zero(static_cast<Eigen::Index>(zero.parameter_count())));
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(rng, 5, 4);
  const Matrix p = zero.forward(x);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p.data()[i] == doctest::Approx(1.0 / 3));

  const auto id = FeedForwardModel::identity(4);
  CHECK(id.forward(x) == x);
  CHECK(id.output_dim() == 4);

  for (Activation act : {Activation::kTanh, Activation::kRelu, Activation::kIdentity}) {
    const auto m = FeedForwardModel::initialize(
        arch(4, {6, 5}, act, 3, OutputKind::kSoftmax), 9);
    const Matrix big = 30.0 * random_matrix(rng, 50, 4);
    const Matrix q = m.forward(big);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      CHECK(std::abs(q.row(i).sum() - 1.0) <= 1e-10);
      CHECK(q.row(i).minCoeff() >= 0.0);
    }
  }
  CHECK_THROWS_AS(id.forward(Matrix::Zero(2, 3)), InputError);
}

TEST_CASE("initialization range and determinism") {
  const auto a = arch(9, {4}, Activation::kTanh, 3, OutputKind::kSoftmax);
  const auto m1 = FeedForwardModel::initialize(a, 77);
  const auto m2 = FeedForwardModel::initialize(a, 77);
  const auto m3 = FeedForwardModel::initialize(a, 78);
  CHECK(m1 == m2);
  CHECK_FALSE(m1 == m3);
  CHECK(m1.layers()[0].weight.cwiseAbs().maxCoeff() <= 1.0 / 3.0);
  CHECK(m1.layers()[1].weight.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(m1.layers()[0].bias.isZero(0.0));
}

TEST_CASE("backward by hand") {
  FeedForwardModel m = FeedForwardModel::initialize(
      arch(3, {}, Activation::kIdentity, 2, OutputKind::kRaw), 4);
  Matrix x(1, 3);
  x << 0.5, -1.0, 2.0;
  Matrix up(1, 2);
  up << 3.0, -0.25;
  const auto g = m.backward(x, up);
  const Matrix want = up.transpose() * x;
  CHECK(g.weight[0] == want);
  CHECK(g.bias[0] == up.row(0).transpose());

  const auto zero = m.backward(x, Matrix::Zero(1, 2));
  CHECK(zero.flatten().isZero(0.0));
  CHECK_THROWS_AS(m.backward(x, Matrix::Zero(2, 2)), InputError);
}

TEST_CASE("backward matches finite differences") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (Activation act : {Activation::kTanh, Activation::kRelu, Activation::kIdentity})
    for (OutputKind kind : {OutputKind::kSoftmax, OutputKind::kRaw})
      for (int rep = 0; rep < 5; ++rep) {
        const auto a = arch(3, {4, 3}, act, 3, kind);
        FeedForwardModel m = FeedForwardModel::initialize(a, 100 + rep);
        // Nonzero biases so relu kinks are not hit exactly.
        Vector theta = m.flatten() + 0.1 * random_matrix(rng, m.flatten().size(), 1);
        m.assign(theta);
        const Matrix x = random_matrix(rng, 6, 3);
        const Matrix up = random_matrix(rng, 6, 3);
        const Vector analytic = m.backward(x, up).flatten();
        auto fn = [&](const Vector& t) {
          FeedForwardModel c = m;
          c.assign(t);
          return (c.forward(x).array() * up.array()).sum();
        };
        const Vector numeric = oracle::numeric_gradient(fn, theta, 1e-5);
        CHECK(oracle::relative_error(analytic, numeric) <= 1e-5);

        Matrix dx;
        m.backward(x, up, &dx);
        Vector xv = Eigen::Map<const Vector>(x.data(), x.size());
        auto fx = [&](const Vector& v) {
          const Matrix xx = Eigen::Map<const Matrix>(v.data(), x.rows(), x.cols());
          return (m.forward(xx).array() * up.array()).sum();
        };
        const Vector dx_num = oracle::numeric_gradient(fx, xv, 1e-5);
        CHECK(oracle::relative_error(Vector(Eigen::Map<const Vector>(dx.data(), dx.size())),
                                     dx_num) <= 1e-5);
        ++checked;
      }
  CHECK(checked == 30);
}

TEST_CASE("label losses and their gradients") {
  std::mt19937_64 rng(6);
  const auto m = FeedForwardModel::initialize(
      arch(2, {}, Activation::kIdentity, 3, OutputKind::kSoftmax), 3);
  const Matrix p = m.forward(random_matrix(rng, 4, 2));
  const std::vector<int> labels{0, 2, 1, 2};
  const Matrix y = one_hot(labels, 3);
  double sq = 0, ce = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 3; ++k) {
      sq += (y(i, k) - p(i, k)) * (y(i, k) - p(i, k));
      if (y(i, k) == 1) ce -= std::log(p(i, k));
    }
  CHECK(label_loss_sum(LabelLoss::kSquared, y, p) == doctest::Approx(sq).epsilon(1e-14));
  CHECK(label_loss_sum(LabelLoss::kCrossEntropy, y, p) == doctest::Approx(ce).epsilon(1e-14));

  for (LabelLoss loss : {LabelLoss::kSquared, LabelLoss::kCrossEntropy}) {
    const Matrix g = label_loss_grad(loss, y, p);
    Vector pv = Eigen::Map<const Vector>(p.data(), p.size());
    auto fn = [&](const Vector& v) {
      return label_loss_sum(loss, y, Eigen::Map<const Matrix>(v.data(), 4, 3));
    };
    const Vector num = oracle::numeric_gradient(fn, pv, 1e-6);
    CHECK(oracle::relative_error(Vector(Eigen::Map<const Vector>(g.data(), g.size())), num) <= 1e-6);
  }
}

TEST_CASE("predict_labels") {
  Matrix s(4, 3);
  s << 0, 1, 0,  //
      1.0 / 3, 1.0 / 3, 1.0 / 3,  //
      0.2, 0.5, 0.5,  //
      -1, -3, -0.5;
  CHECK(argmax_rows(s) == std::vector<int>{1, 0, 1, 2});

  std::mt19937_64 rng(7);
  const Matrix r = random_matrix(rng, 200, 5);
  const auto got = argmax_rows(r);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    int best = 0;
    for (int k = 0; k < 5; ++k)
      if (r(i, k) > r(i, best)) best = k;
    CHECK(got[std::size_t(i)] == best);
  }
}

TEST_CASE("gradient descent") {
  const auto data = blobs(1, 40, 3, 3.0);
  auto m = FeedForwardModel::initialize(
      arch(2, {}, Activation::kIdentity, 3, OutputKind::kSoftmax), 2);
  const auto before = m;
  TrainConfig cfg;
  cfg.rate = 0.0;
  cfg.steps = 5;
  gradient_descent(m, data, cfg);
  CHECK(m == before);

  cfg.rate = 1.0;
  cfg.steps = 2000;
  const auto hist = gradient_descent(m, data, cfg);
  CHECK(hist.back() < hist.front());
  CHECK(accuracy(m, data) >= 0.99);
}

TEST_CASE("multi-task embedding") {
  std::vector<LabeledDataset> sources{blobs(1, 30, 2, 2.5), blobs(2, 20, 2, 2.5),
                                      blobs(3, 25, 2, 2.5)};
  for (int j = 0; j < 3; ++j) sources[std::size_t(j)].domain_id = j;
  // Source 2 flips the label geometry so that heads must differ.
  for (auto& y : sources[2].labels) y = 1 - y;

  MtlConfig cfg;
  cfg.embedding = arch(2, {}, Activation::kTanh, 4, OutputKind::kRaw);
  cfg.embedding.output_activation = Activation::kTanh;
  cfg.head = arch(4, {}, Activation::kIdentity, 2, OutputKind::kSoftmax);
  cfg.train.steps = 1500;
  cfg.train.rate = 1.0;
  cfg.seed = 12;

  int calls = 0;
  const FeedForwardModel* shared = nullptr;
  auto res = train_mtl_embedding(
      sources, cfg, [&](int, const FeedForwardModel& g, std::span<const FeedForwardModel> heads) {
        if (!shared) shared = &g;
        CHECK(&g == shared);
        CHECK(heads.size() == 3);
        ++calls;
      });
  CHECK(calls == 1500);
  CHECK(res.loss_history.back() < res.loss_history.front());
  for (std::size_t j = 0; j < 3; ++j) {
    const auto f = FeedForwardModel::compose(res.embedding, res.heads[j]);
    CHECK(accuracy(f, sources[j]) >= 0.95);
  }

  const auto again = train_mtl_embedding(sources, cfg);
  CHECK(again.embedding == res.embedding);
  for (std::size_t j = 0; j < 3; ++j) CHECK(again.heads[j] == res.heads[j]);

  cfg.train.rate = 0.0;
  cfg.train.steps = 3;
  const auto frozen = train_mtl_embedding(sources, cfg);
  const auto init = train_mtl_embedding(sources, MtlConfig{cfg.embedding, cfg.head, {0, 0.0, {}}, 12});
  CHECK(frozen.embedding == init.embedding);

  CHECK_THROWS_AS(train_mtl_embedding({}, cfg), InputError);
  LabeledDataset empty;
  empty.num_classes = 2;
  empty.features.resize(0, 2);
  CHECK_THROWS_AS(train_mtl_embedding({empty}, cfg), InputError);
}

TEST_CASE("single-task reduction of multi-task training") {
  const auto data = blobs(4, 30, 3, 2.0);
  MtlConfig cfg;
  cfg.embedding = arch(2, {}, Activation::kTanh, 5, OutputKind::kRaw);
  cfg.embedding.output_activation = Activation::kTanh;
  cfg.head = arch(5, {}, Activation::kIdentity, 3, OutputKind::kSoftmax);
  cfg.train.steps = 0;
  cfg.seed = 3;
  const auto init = train_mtl_embedding({data}, cfg);
  FeedForwardModel merged = FeedForwardModel::compose(init.embedding, init.heads[0]);

  cfg.train.steps = 200;
  const auto mtl = train_mtl_embedding({data}, cfg);
  const auto hist = gradient_descent(merged, data, cfg.train);
  REQUIRE(hist.size() == mtl.loss_history.size());
  for (std::size_t s = 0; s < hist.size(); ++s)
    CHECK(hist[s] == doctest::Approx(mtl.loss_history[s]).epsilon(1e-12));
  const auto composed = FeedForwardModel::compose(mtl.embedding, mtl.heads[0]);
  CHECK(oracle::relative_error(composed.flatten(), merged.flatten()) <= 1e-12);
}

TEST_CASE("checkpoint round trip") {
  auto m = FeedForwardModel::initialize(
      arch(3, {5, 4}, Activation::kRelu, 2, OutputKind::kSoftmax), 21);
  std::mt19937_64 rng(8);
  m.assign(m.flatten() + 1e-7 * random_matrix(rng, m.flatten().size(), 1));
  const auto path = std::filesystem::temp_directory_path() / "wjdot_model_test.ckpt";
  save_model(path, m);
  const auto back = load_model(path);
  CHECK(back == m);
  std::filesystem::remove(path);

  const auto id = FeedForwardModel::identity(6);
  CHECK(deserialize_model(serialize_model(id)) == id);

  std::string text = serialize_model(m);
  CHECK_THROWS_AS(deserialize_model(text + "extra = 1\n"), ParseError);
  CHECK_THROWS_AS(deserialize_model("format = \"other\"\n"), ParseError);
  CHECK_THROWS_AS(deserialize_model("format = \n"), ParseError);
  const auto pos = text.find("layer0.bias = [");
  std::string bad = text;
  bad.replace(pos, 15, "layer0.bias = [\"x\",");
  CHECK_THROWS_AS(deserialize_model(bad), ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/dir/model.ckpt"), IoError);
}
