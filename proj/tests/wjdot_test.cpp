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
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wjdot/baselines.hpp"
#include "wjdot/datagen.hpp"
#include "wjdot/error.hpp"
#include "wjdot/rng.hpp"
#include "wjdot/wjdot.hpp"

using namespace wjdot;

namespace {

Matrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> v) {
  Matrix m(r, c);
  Eigen::Index k = 0;
  for (double x : v) m.data()[k++] = x;
  return m;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Matrix random_softmax(std::mt19937_64& rng, Eigen::Index r, Eigen::Index k) {
  Matrix m = random_matrix(rng, r, k).array().exp();
  for (Eigen::Index i = 0; i < r; ++i) m.row(i) /= m.row(i).sum();
  return m;
}

JointAtoms random_source(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, int k) {
  JointAtoms a;
  a.embedded = random_matrix(rng, n, p);
  a.labels = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) a.labels(i, static_cast<Eigen::Index>(rng() % k)) = 1.0;
  a.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return a;
}

JointAtoms random_target(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, int k) {
  JointAtoms a;
  a.embedded = random_matrix(rng, n, p);
  a.labels = random_softmax(rng, n, k);
  a.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return a;
}

// Cost written out entry by entry, independent of the kernels.
Matrix cost_by_hand(const JointAtoms& s, const JointAtoms& t, double beta, LabelLoss loss) {
  Matrix c(s.size(), t.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      double feat = 0.0, lab = 0.0;
      for (Eigen::Index a = 0; a < s.embedded.cols(); ++a) {
        const double d = s.embedded(i, a) - t.embedded(j, a);
        feat += d * d;
      }
      for (Eigen::Index k = 0; k < s.labels.cols(); ++k) {
        if (loss == LabelLoss::kSquared) {
          const double d = s.labels(i, k) - t.labels(j, k);
          lab += d * d;
        } else {
          lab -= s.labels(i, k) * std::log(t.labels(j, k));
        }
      }
      c(i, j) = beta * feat + lab;
    }
  return c;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector random_interior_alpha(std::mt19937_64& rng, int J) {
  const auto p = oracle::random_probability(rng, J);
  return Eigen::Map<const Vector>(p.data(), J);
}

}  // namespace

TEST_CASE("joint cost") {
  JointAtoms s, t;
  s.embedded = mat(2, 2, {0, 0, 1, 0});
  s.labels = mat(2, 2, {1, 0, 0, 1});
  s.weights = Vector::Constant(2, 0.5);
  t.embedded = mat(2, 2, {0, 1, 2, 0});
  t.labels = mat(2, 2, {0.5, 0.5, 1, 0});
  t.weights = Vector::Constant(2, 0.5);
  const auto c = build_joint_cost(s, t, 2.0, LabelLoss::kSquared);
  CHECK(c.entries() == mat(2, 2, {2.5, 8.0, 4.5, 4.0}));
  const auto ce = build_joint_cost(s, t, 2.0, LabelLoss::kCrossEntropy);
  CHECK(ce(0, 0) == doctest::Approx(2.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(ce(0, 1) == doctest::Approx(8.0).epsilon(1e-15));

  std::mt19937_64 rng(1);
  const auto a = random_source(rng, 5, 3, 4);
  const auto b = random_target(rng, 7, 3, 4);
  const auto label_only = build_joint_cost(a, b, 0.0, LabelLoss::kSquared);
  CHECK((label_only.entries() - cost_by_hand(a, b, 0.0, LabelLoss::kSquared)).cwiseAbs().maxCoeff() <= 1e-14);

  JointAtoms same_labels = b;
  same_labels.labels = Matrix::Constant(7, 4, 0.25);
  JointAtoms src = a;
  src.labels = Matrix::Constant(5, 4, 0.25);
  const auto feat = build_joint_cost(src, same_labels, 3.0, LabelLoss::kSquared);
  CHECK((feat.entries() - cost_by_hand(src, same_labels, 3.0, LabelLoss::kSquared)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((feat.entries() - 3.0 * squared_euclidean_cost(src.embedded, b.embedded).entries())
            .cwiseAbs().maxCoeff() <= 1e-12);

  for (LabelLoss loss : {LabelLoss::kSquared, LabelLoss::kCrossEntropy}) {
    const auto c2 = build_joint_cost(a, b, 0.7, loss);
    CHECK((c2.entries() - cost_by_hand(a, b, 0.7, loss)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  JointAtoms narrow = b;
  narrow.embedded = random_matrix(rng, 7, 2);
  CHECK_THROWS_AS(build_joint_cost(a, narrow, 1.0, LabelLoss::kSquared), InputError);
  JointAtoms fewer = b;
  fewer.labels = random_softmax(rng, 7, 3);
  CHECK_THROWS_AS(build_joint_cost(a, fewer, 1.0, LabelLoss::kSquared), InputError);
}

TEST_CASE("proxy target") {
  std::mt19937_64 rng(2);
  ArchConfig arch;
  arch.input_dim = 3;
  arch.output_dim = 4;
  const auto f = FeedForwardModel::initialize(arch, 5);
  const auto g = FeedForwardModel::identity(3);
  const Matrix x = random_matrix(rng, 9, 3);
  const auto t = proxy_target(f, g, x);
  for (Eigen::Index i = 0; i < 9; ++i) CHECK(t.weights[i] == 1.0 / 9.0);
  CHECK(t.labels == f.forward(x));
  CHECK(t.embedded == x);
  t.validate();
  const auto one = proxy_target(f, g, x.topRows(1));
  CHECK(one.size() == 1);
  CHECK(one.weights[0] == 1.0);
  CHECK_THROWS_AS(proxy_target(f, g, Matrix(0, 3)), InputError);
}

TEST_CASE("objective examples") {
  std::mt19937_64 rng(3);
  const auto s = random_source(rng, 6, 2, 3);
  const SimplexWeights one = SimplexWeights::uniform(1);
  CHECK(std::abs(wjdot_objective({s}, one, s, 1.0, LabelLoss::kSquared).value) <= 1e-12);

  // J = 1 is the single-source objective.
  const auto t = random_target(rng, 5, 2, 3);
  const auto direct = solve_exact_ot(to_std(s.weights), to_std(t.weights),
                                     build_joint_cost(s, t, 0.5, LabelLoss::kSquared));
  CHECK(wjdot_objective({s}, one, t, 0.5, LabelLoss::kSquared).value == doctest::Approx(direct.value).epsilon(1e-13));

  // Two small sources against exhaustive vertex enumeration.
  for (int trial = 0; trial < 100; ++trial) {
    const auto s1 = random_source(rng, 1 + Eigen::Index(rng() % 2), 2, 2);
    const auto s2 = random_source(rng, 1 + Eigen::Index(rng() % 2), 2, 2);
    const auto tt = random_target(rng, 1 + Eigen::Index(rng() % 4), 2, 2);
    const SimplexWeights alpha(random_interior_alpha(rng, 2));
    const double beta = 0.3 + (trial % 3);
    const auto got = wjdot_objective({s1, s2}, alpha, tt, beta, LabelLoss::kSquared);
    const JointAtoms mix = mix_atoms({s1, s2}, alpha);
    const double want = oracle::brute_force_ot(to_std(mix.weights), to_std(tt.weights),
                                               cost_by_hand(mix, tt, beta, LabelLoss::kSquared));
    CHECK(std::abs(got.value - want) <= 1e-9);
    CHECK(got.solution.dual_source.size() == s1.size() + s2.size());
  }

  CHECK_THROWS_AS(wjdot_objective({s, s}, one, t, 1.0, LabelLoss::kSquared), InputError);
}

TEST_CASE("objective with beta zero sees only label marginals") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_source(rng, 6, 2, 3);
    auto t = random_source(rng, 4, 2, 3);  // one-hot on both sides
    const double v = wjdot_objective({s}, SimplexWeights::uniform(1), t, 0.0, LabelLoss::kSquared).value;
    s.embedded = random_matrix(rng, 6, 2);
    t.embedded = 50.0 * random_matrix(rng, 4, 2);
    const double moved = wjdot_objective({s}, SimplexWeights::uniform(1), t, 0.0, LabelLoss::kSquared).value;
    CHECK(std::abs(v - moved) <= 1e-12);
    // With one-hot rows the squared loss is twice the 0-1 loss, so the value
    // is twice the total variation between the label histograms.
    Vector hs = s.labels.colwise().sum().transpose() / 6.0;
    Vector ht = t.labels.colwise().sum().transpose() / 4.0;
    CHECK(std::abs(v - (hs - ht).cwiseAbs().sum()) <= 1e-12);
  }
}

TEST_CASE("alpha gradient") {
  TransportSolution sol;
  sol.dual_source = (Vector(5) << 1, 2, 3, 10, 20).finished();
  const Vector g = alpha_gradient(sol, {3, 2});
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(15.0));
  CHECK_THROWS_AS(alpha_gradient(sol, {3, 3}), InternalError);

  // J = 1: the simplex is a point.
  TransportSolution single;
  single.dual_source = Vector::Constant(4, -123.0);
  const Vector g1 = alpha_gradient(single, {4});
  CHECK(project_to_simplex(Vector(Vector::Ones(1) - 0.7 * g1)).values() == Vector::Ones(1));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int J = 2 + int(rng() % 3);
    std::vector<JointAtoms> sources;
    std::vector<Eigen::Index> sizes;
    for (int j = 0; j < J; ++j) {
      sources.push_back(random_source(rng, 2 + Eigen::Index(rng() % 4), 2, 3));
      sizes.push_back(sources.back().size());
    }
    const auto target = random_target(rng, 3 + Eigen::Index(rng() % 4), 2, 3);
    const Vector alpha = random_interior_alpha(rng, J);
    const auto res = wjdot_objective(sources, SimplexWeights(alpha), target, 1.0, LabelLoss::kSquared);
    const Vector grad = alpha_gradient(res.solution, sizes);

    // Invariance of the projected step to a constant shift of the duals.
    TransportSolution shifted = res.solution;
    shifted.dual_source.array() += 3.75;
    const Vector gs = alpha_gradient(shifted, sizes);
    CHECK(((gs - grad).array() - 3.75).abs().maxCoeff() <= 1e-12);
    const Vector step = project_to_simplex(Vector(alpha - 0.05 * grad)).values();
    const Vector step_s = project_to_simplex(Vector(alpha - 0.05 * gs)).values();
    CHECK((step - step_s).cwiseAbs().maxCoeff() <= 1e-12);

    // Directional derivative along the projected step.
    const Vector dir = step - alpha;
    if (dir.norm() < 1e-8) continue;
    auto objective = [&](const Vector& a) {
      return wjdot_objective(sources, SimplexWeights(project_to_simplex(a)), target, 1.0,
                             LabelLoss::kSquared).value;
    };
    const double h = 1e-6 * std::min(1.0, alpha.minCoeff() / dir.cwiseAbs().maxCoeff());
    const double numeric = oracle::central_difference(objective, alpha, dir, h);
    CHECK(oracle::relative_error(grad.dot(dir), numeric) <= 1e-4);
  }
}

TEST_CASE("theta gradient") {
  std::mt19937_64 rng(6);
  ArchConfig arch;
  arch.input_dim = 3;
  arch.hidden = {4};
  arch.output_dim = 3;
  const auto f = FeedForwardModel::initialize(arch, 8);
  const Matrix zt = random_matrix(rng, 5, 3);
  const auto src = random_source(rng, 6, 3, 3);

  CHECK(theta_gradient(Matrix::Zero(6, 5), src.labels, f, zt, LabelLoss::kSquared)
            .flatten().isZero(0.0));

  // Diagonal plan: weighted supervised gradient on the matched pairs.
  const auto s5 = random_source(rng, 5, 3, 3);
  Matrix diag = Matrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) diag(i, i) = 0.1 + 0.05 * i;
  const Matrix p = f.forward(zt);
  Matrix up(5, 3);
  for (int i = 0; i < 5; ++i) up.row(i) = diag(i, i) * 2.0 * (p.row(i) - s5.labels.row(i));
  CHECK(oracle::relative_error(theta_gradient(diag, s5.labels, f, zt, LabelLoss::kSquared).flatten(),
                               f.backward(zt, up).flatten()) <= 1e-14);

  for (int trial = 0; trial < 50; ++trial) {
    ArchConfig a;
    a.input_dim = 2;
    a.hidden = {int(2 + rng() % 3)};
    a.hidden_activation = trial % 2 ? Activation::kTanh : Activation::kIdentity;
    a.output_dim = 3;
    FeedForwardModel model = FeedForwardModel::initialize(a, 100 + trial);
    const Vector theta = model.flatten();
    const auto s = random_source(rng, 4, 2, 3);
    const auto t = random_target(rng, 5, 2, 3);
    const LabelLoss loss = trial % 3 ? LabelLoss::kSquared : LabelLoss::kCrossEntropy;
    const auto sol = solve_exact_ot(to_std(s.weights), to_std(t.weights),
                                    build_joint_cost(s, t, 1.0, loss));
    const Vector analytic = theta_gradient(sol.plan, s.labels, model, t.embedded, loss).flatten();
    auto frozen = [&](const Vector& th) {
      FeedForwardModel m = model;
      m.assign(th);
      const Matrix pr = m.forward(t.embedded);
      double v = 0.0;
      for (Eigen::Index i = 0; i < sol.plan.rows(); ++i)
        for (Eigen::Index j = 0; j < sol.plan.cols(); ++j)
          for (Eigen::Index k = 0; k < 3; ++k) {
            if (loss == LabelLoss::kSquared) {
              const double d = s.labels(i, k) - pr(j, k);
              v += sol.plan(i, j) * d * d;
            } else {
              v -= sol.plan(i, j) * s.labels(i, k) * std::log(pr(j, k));
            }
          }
      return v;
    };
    CHECK(oracle::relative_error(analytic, oracle::numeric_gradient(frozen, theta, 1e-5)) <= 1e-5);
  }
}

TEST_CASE("validation scores") {
  ArchConfig arch;
  arch.input_dim = 2;
  arch.output_dim = 2;
  FeedForwardModel f = FeedForwardModel::initialize(arch, 1);
  // Class 1 iff first coordinate > 0.
  f.mutable_layers()[0].weight = mat(2, 2, {-1, 0, 1, 0});
  const auto g = FeedForwardModel::identity(2);
  const Matrix xt = mat(4, 2, {-1, 5, -1, 5, 2, 3, 2, 3});
  const auto alpha2 = SimplexWeights::uniform(2);
  CHECK(validation_score(ValidationKind::kSse, alpha2, f, {}, xt, g) == 0.0);
  const Matrix spread = mat(3, 2, {-1, 0, -3, 0, 2, 0});
  CHECK(validation_score(ValidationKind::kSse, alpha2, f, {}, spread, g) == doctest::Approx(2.0));
  // Everything in one predicted class: a single centroid at (-2, 1).
  const Matrix left = mat(3, 2, {-1, 0, -3, 0, -2, 3});
  CHECK(validation_score(ValidationKind::kSse, alpha2, f, {}, left, g) == doctest::Approx(2 + 2 + 4));

  LabeledDataset good, half;
  good.num_classes = half.num_classes = 2;
  good.features = mat(2, 2, {-1, 0, 1, 0});
  good.labels = {0, 1};
  half.features = good.features;
  half.labels = {0, 0};
  CHECK(validation_score(ValidationKind::kWeightedAccuracy, SimplexWeights::vertex(2, 1), f,
                         {good, half}, xt, g) == 0.5);
  CHECK(validation_score(ValidationKind::kWeightedAccuracy, SimplexWeights::vertex(2, 0), f,
                         {good, half}, xt, g) == 1.0);
  CHECK(validation_score(ValidationKind::kWeightedAccuracy,
                         SimplexWeights((Vector(2) << 0.3, 0.7).finished()), f, {good, good}, xt,
                         g) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(validation_improves(ValidationKind::kSse, 1.0, 2.0));
  CHECK_FALSE(validation_improves(ValidationKind::kWeightedAccuracy, 0.5, 0.5));
}

namespace {

struct RotationTask {
  std::vector<LabeledDataset> sources;
  LabeledDataset target_train, target_test;
};

RotationTask rotation_task(int J, int n, std::optional<double> angle, std::uint64_t seed) {
  RotationShiftSpec spec;
  spec.num_sources = J;
  spec.n_source = spec.n_target = n;
  spec.target_angle = angle;
  spec.seed = seed;
  const auto dom = generate_rotation_domains(spec);
  RotationTask t;
  for (int j = 0; j < J; ++j)
    t.sources.push_back(split_dataset(dom.sources[std::size_t(j)], derive_seed(seed, 100 + j)).train);
  const auto split = split_dataset(dom.target, derive_seed(seed, 99));
  t.target_train = split.train;
  t.target_test = split.test;
  return t;
}

WjdotConfig quick_config(std::uint64_t seed) {
  WjdotConfig c;
  c.beta = 1.0;
  c.step_alpha = 0.05;
  c.step_theta = 1.0;
  c.max_iters = 120;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("run_wjdot on four rotated sources") {
  const auto task = rotation_task(4, 150, 0.75 * M_PI, 3);
  const auto g = FeedForwardModel::identity(3);
  const auto state = run_wjdot(task.sources, task.target_train.features, g, quick_config(3));
  CHECK(state.alpha[1] + state.alpha[2] > 0.9);
  CHECK(state.alpha[0] + state.alpha[3] < 0.1);
  CHECK(state.loss_history.back() < state.loss_history.front());
  CHECK(accuracy(state.classifier, task.target_test) >= 0.9);
  for (const auto& a : state.alpha_history) {
    CHECK(a.minCoeff() >= 0.0);
    CHECK(std::abs(a.sum() - 1.0) <= 1e-12);
  }
  CHECK(state.loss_history.size() == state.validation_history.size());
  CHECK(state.best_iteration >= 0);
  CHECK(state.alpha.values() == state.alpha_history[std::size_t(state.best_iteration)]);

  const auto again = run_wjdot(task.sources, task.target_train.features, g, quick_config(3));
  CHECK(again.loss_history == state.loss_history);
  CHECK(again.classifier == state.classifier);
}

TEST_CASE("run_wjdot picks the source drawn like the target") {
  // Four heavily rotated sources and one at the target angle.
  RotationShiftSpec spec;
  spec.num_sources = 5;
  spec.n_source = spec.n_target = 150;
  spec.seed = 21;
  const auto base = generate_rotation_domains(spec);
  std::vector<LabeledDataset> sources;
  const double angles[] = {2.6, 3.4, 0.0, 4.2, 1.8};
  for (int j = 0; j < 5; ++j) {
    LabeledDataset d = base.sources[0];
    d.features = base.base.topRows(150) * rotation_about_x(angles[j]);
    d.domain_id = j;
    sources.push_back(split_dataset(d, derive_seed(21, j)).train);
  }
  RotationShiftSpec tspec = spec;
  tspec.seed = 22;  // fresh draw from the distribution of source 2
  tspec.num_sources = 1;
  tspec.target_angle = 0.0;
  const auto tdom = generate_rotation_domains(tspec);
  const auto g = FeedForwardModel::identity(3);
  const auto state = run_wjdot(sources, tdom.target.features, g, quick_config(4));
  CHECK(state.alpha[2] >= 0.8);
}

TEST_CASE("single source runs agree across methods") {
  const auto task = rotation_task(1, 60, 0.3, 5);
  const auto g = FeedForwardModel::identity(3);
  auto c = quick_config(6);
  c.max_iters = 15;
  c.validation = ValidationKind::kNone;
  const auto w = run_wjdot(task.sources, task.target_train.features, g, c);
  const auto cj = run_cjdot(task.sources, task.target_train.features, g, c);
  const auto mj = run_mjdot(task.sources, task.target_train.features, g, c);
  REQUIRE(w.loss_history.size() == 15);
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(w.loss_history[i] == doctest::Approx(cj.loss_history[i]).epsilon(1e-12));
    CHECK(w.loss_history[i] == doctest::Approx(mj.loss_history[i]).epsilon(1e-12));
  }
  CHECK(w.alpha.values() == Vector::Ones(1));
  CHECK(oracle::relative_error(w.classifier.flatten(), cj.classifier.flatten()) <= 1e-12);

  // The first objective is the single-source objective at the initial classifier.
  const auto f0 = initial_classifier(c, 3, 3);
  const auto src = source_atoms(task.sources[0], g);
  const auto tgt = proxy_target(f0, g, task.target_train.features);
  CHECK(w.loss_history[0] ==
        doctest::Approx(wjdot_objective({src}, SimplexWeights::uniform(1), tgt, 1.0,
                                        LabelLoss::kSquared).value).epsilon(1e-12));
}

TEST_CASE("run_wjdot configuration and failure modes") {
  const auto task = rotation_task(2, 30, 0.5, 7);
  const auto g = FeedForwardModel::identity(3);
  auto c = quick_config(1);
  c.max_iters = 0;
  CHECK_THROWS_AS(run_wjdot(task.sources, task.target_train.features, g, c), InputError);
  c = quick_config(1);
  c.step_alpha = 0.0;
  CHECK_THROWS_AS(run_wjdot(task.sources, task.target_train.features, g, c), InputError);
  c = quick_config(1);
  c.beta = -1.0;
  CHECK_THROWS_AS(run_wjdot(task.sources, task.target_train.features, g, c), InputError);
  c = quick_config(1);
  c.beta.reset();
  c.validation = ValidationKind::kNone;
  CHECK_THROWS_AS(run_wjdot(task.sources, task.target_train.features, g, c), InputError);
  CHECK_THROWS_AS(run_wjdot({}, task.target_train.features, g, quick_config(1)), InputError);
  CHECK_THROWS_AS(run_wjdot(task.sources, Matrix::Zero(5, 2), g, quick_config(1)), InputError);

  c = quick_config(1);
  c.step_theta = 1e308;
  try {
    run_wjdot(task.sources, task.target_train.features, g, c);
    FAIL("expected DivergedError");
  } catch (const DivergedError& e) {
    CHECK(e.iteration() >= 0);
  }

  // Early stopping returns the best snapshot; patience bounds the tail.
  c = quick_config(1);
  c.max_iters = 300;
  c.patience = 5;
  const auto st = run_wjdot(task.sources, task.target_train.features, g, c);
  if (st.stopped_early) CHECK(st.iteration == st.best_iteration + 6);
  for (std::size_t i = 0; i < st.validation_history.size(); ++i)
    CHECK(st.validation_history[i] >= st.validation_history[std::size_t(st.best_iteration)]);

  // Beta picked from the grid by validation.
  c = quick_config(1);
  c.max_iters = 10;
  c.beta.reset();
  c.beta_grid = {0.01, 1.0};
  const auto grid = run_wjdot(task.sources, task.target_train.features, g, c);
  CHECK((grid.beta == 0.01 || grid.beta == 1.0));
  auto fixed = c;
  fixed.beta = grid.beta;
  CHECK(run_wjdot(task.sources, task.target_train.features, g, fixed).loss_history == grid.loss_history);
}

TEST_CASE("global optimum has vanishing gradients") {
  // Target equal to the mixture: proxy labels are one-hot-like outputs of a
  // classifier that matches the source labels exactly.
  std::mt19937_64 rng(9);
  auto s1 = random_source(rng, 4, 2, 2);
  auto s2 = s1;
  const SimplexWeights alpha = SimplexWeights::uniform(2);
  JointAtoms target = s1;
  const auto res = wjdot_objective({s1, s2}, alpha, target, 1.0, LabelLoss::kSquared);
  CHECK(std::abs(res.value) <= 1e-12);
  const Vector g = alpha_gradient(res.solution, {4, 4});
  const Vector step = project_to_simplex(Vector(alpha.values() - 0.1 * g)).values();
  CHECK((step - alpha.values()).cwiseAbs().maxCoeff() <= 1e-12);
  // Plan matches each target atom to identical labels, so the squared-loss
  // upstream is zero whatever the classifier outputs equal the labels.
  const Matrix up = plan_label_upstream(res.solution.plan, mix_atoms({s1, s2}, alpha).labels,
                                        target.labels, LabelLoss::kSquared);
  CHECK(up.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("trajectory log") {
  const auto task = rotation_task(3, 30, 1.0, 8);
  auto c = quick_config(2);
  c.max_iters = 4;
  c.validation = ValidationKind::kNone;
  const auto st = run_wjdot(task.sources, task.target_train.features, FeedForwardModel::identity(3), c);
  const auto path = std::filesystem::temp_directory_path() / "wjdot_traj.csv";
  write_trajectory_csv(path, st);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,objective,validation_score,alpha_1,alpha_2,alpha_3");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  std::filesystem::remove(path);
}
