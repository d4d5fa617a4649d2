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

#include "wjdot/wjdot.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "adaptation.hpp"
#include "wjdot/error.hpp"
#include "wjdot/kernels.hpp"
#include "wjdot/measure.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {
namespace {

constexpr double kAtomWeightTolerance = 1e-10;
constexpr double kLabelRowTolerance = 1e-10;
constexpr double kLogFloor = 1e-300;

std::span<const double> view(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

// out (+)= beta * |z_i - z'_j|^2
void add_feature_cost(const Matrix& zs, const Matrix& zt, double beta, Matrix& out) {
  const Matrix zt_t = zt.transpose();
  kernels::pairwise_sq_dist(view(zs), view(zt_t), static_cast<std::size_t>(zs.rows()),
                            static_cast<std::size_t>(zt.rows()),
                            static_cast<std::size_t>(zs.cols()), beta,
                            {out.data(), static_cast<std::size_t>(out.size())}, true);
}

// out += L(y_i, p_j)
void add_label_cost(const Matrix& ys, const Matrix& pt, LabelLoss loss, Matrix& out) {
  const auto n = static_cast<std::size_t>(ys.rows());
  const auto m = static_cast<std::size_t>(pt.rows());
  const auto k = static_cast<std::size_t>(ys.cols());
  std::span<double> o{out.data(), static_cast<std::size_t>(out.size())};
  if (loss == LabelLoss::kSquared) {
    const Matrix pt_t = pt.transpose();
    kernels::pairwise_sq_dist(view(ys), view(pt_t), n, m, k, 1.0, o, true);
  } else {
    const Matrix neg_log_t = -(pt.array().max(kLogFloor).log()).matrix().transpose();
    kernels::pairwise_dot(view(ys), view(neg_log_t), n, m, k, 1.0, o, true);
  }
}

}  // namespace

void JointAtoms::validate() const {
  const Eigen::Index n = embedded.rows();
  if (n < 1) throw InputError("joint atoms: empty");
  if (labels.rows() != n || weights.size() != n)
    throw InputError("joint atoms: embedded, labels and weights differ in length");
  if (!embedded.allFinite() || !labels.allFinite())
    throw InputError("joint atoms: non-finite entry");
  validate_probability_vector({weights.data(), static_cast<std::size_t>(n)},
                              kAtomWeightTolerance, "joint atom weights");
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = labels.row(i);
    if (row.minCoeff() < 0.0) throw InputError("joint atoms: negative label entry");
    if (std::abs(row.sum() - 1.0) > kLabelRowTolerance)
      throw InputError("joint atoms: label row does not sum to one");
  }
}

JointAtoms source_atoms(const LabeledDataset& data, const FeedForwardModel& g) {
  data.validate();
  JointAtoms a;
  a.embedded = g.forward(data.features);
  a.labels = one_hot(data.labels, data.num_classes);
  a.weights = Vector::Constant(data.size(), 1.0 / static_cast<double>(data.size()));
  return a;
}

JointAtoms proxy_target(const FeedForwardModel& f, const FeedForwardModel& g,
                        const Matrix& x_target) {
  if (x_target.rows() < 1) throw InputError("proxy_target: no target samples");
  JointAtoms a;
  a.embedded = g.forward(x_target);
  a.labels = f.forward(a.embedded);
  a.weights = Vector::Constant(x_target.rows(), 1.0 / static_cast<double>(x_target.rows()));
  return a;
}

CostMatrix build_joint_cost(const JointAtoms& source, const JointAtoms& target,
                            double beta, LabelLoss loss) {
  if (source.embedded.cols() != target.embedded.cols())
    throw InputError("joint cost: embedding dimensions differ");
  if (source.labels.cols() != target.labels.cols())
    throw InputError("joint cost: label dimensions differ");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InputError("joint cost: beta must be finite and >= 0");
  Matrix c = Matrix::Zero(source.size(), target.size());
  add_feature_cost(source.embedded, target.embedded, beta, c);
  add_label_cost(source.labels, target.labels, loss, c);
  return CostMatrix(std::move(c));
}

JointAtoms mix_atoms(const std::vector<JointAtoms>& sources,
                     const SimplexWeights& alpha) {
  if (sources.empty()) throw InputError("mix_atoms: no sources");
  if (alpha.size() != static_cast<Eigen::Index>(sources.size()))
    throw InputError("mix_atoms: alpha length differs from source count");
  Eigen::Index n = 0;
  for (const auto& s : sources) {
    if (s.embedded.cols() != sources[0].embedded.cols() ||
        s.labels.cols() != sources[0].labels.cols())
      throw InputError("mix_atoms: sources differ in shape");
    n += s.size();
  }
  JointAtoms out;
  out.embedded.resize(n, sources[0].embedded.cols());
  out.labels.resize(n, sources[0].labels.cols());
  out.weights.resize(n);
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const auto& s = sources[j];
    out.embedded.middleRows(r, s.size()) = s.embedded;
    out.labels.middleRows(r, s.size()) = s.labels;
    out.weights.segment(r, s.size()) = alpha[static_cast<Eigen::Index>(j)] * s.weights;
    r += s.size();
  }
  return out;
}

ObjectiveResult wjdot_objective(const std::vector<JointAtoms>& sources,
                                const SimplexWeights& alpha,
                                const JointAtoms& target, double beta,
                                LabelLoss loss) {
  for (const auto& s : sources) s.validate();
  target.validate();
  const JointAtoms mix = mix_atoms(sources, alpha);
  const CostMatrix cost = build_joint_cost(mix, target, beta, loss);
  ObjectiveResult r;
  r.solution = solve_exact_ot({mix.weights.data(), static_cast<std::size_t>(mix.size())},
                              {target.weights.data(), static_cast<std::size_t>(target.size())},
                              cost);
  r.value = r.solution.value;
  return r;
}

Vector alpha_gradient(const TransportSolution& solution,
                      const std::vector<Eigen::Index>& source_sizes) {
  Eigen::Index total = 0;
  for (Eigen::Index n : source_sizes) {
    if (n < 1) throw InternalError("alpha_gradient: empty source block");
    total += n;
  }
  if (total != solution.dual_source.size())
    throw InternalError("alpha_gradient: source sizes do not cover the mixture duals");
  Vector g(static_cast<Eigen::Index>(source_sizes.size()));
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < source_sizes.size(); ++j) {
    const Eigen::Index n = source_sizes[j];
    g[static_cast<Eigen::Index>(j)] =
        solution.dual_source.segment(r, n).sum() / static_cast<double>(n);
    r += n;
  }
  return g;
}

Matrix plan_label_upstream(const Matrix& plan, const Matrix& source_labels,
                           const Matrix& predictions, LabelLoss loss) {
  if (plan.rows() != source_labels.rows() || plan.cols() != predictions.rows() ||
      source_labels.cols() != predictions.cols())
    throw InputError("plan_label_upstream: shape mismatch");
  const Matrix matched = plan.transpose() * source_labels;  // N_T x K
  if (loss == LabelLoss::kSquared) {
    const Vector mass = plan.colwise().sum().transpose();
    return 2.0 * (predictions.array().colwise() * mass.array() - matched.array()).matrix();
  }
  return -(matched.array() / predictions.array().max(kLogFloor)).matrix();
}

ModelGradient theta_gradient(const Matrix& plan, const Matrix& source_labels,
                             const FeedForwardModel& f, const Matrix& target_embedded,
                             LabelLoss loss) {
  const Matrix p = f.forward(target_embedded);
  return f.backward(target_embedded,
                    plan_label_upstream(plan, source_labels, p, loss));
}

std::string to_string(ValidationKind v) {
  switch (v) {
    case ValidationKind::kSse: return "sse";
    case ValidationKind::kWeightedAccuracy: return "weighted_accuracy";
    case ValidationKind::kNone: return "none";
  }
  return "?";
}

ValidationKind parse_validation_kind(const std::string& s) {
  if (s == "sse") return ValidationKind::kSse;
  if (s == "weighted_accuracy") return ValidationKind::kWeightedAccuracy;
  if (s == "none") return ValidationKind::kNone;
  throw InputError("unknown validation kind: " + s);
}

void WjdotConfig::validate() const {
  if (beta && (!(*beta >= 0.0) || !std::isfinite(*beta)))
    throw InputError("beta must be finite and >= 0");
  if (!beta) {
    if (beta_grid.empty()) throw InputError("beta grid is empty");
    if (validation == ValidationKind::kNone)
      throw InputError("beta must be given when validation is none");
    for (double b : beta_grid)
      if (!(b >= 0.0) || !std::isfinite(b))
        throw InputError("beta grid values must be finite and >= 0");
  }
  if (!(step_alpha > 0.0) || !std::isfinite(step_alpha))
    throw InputError("step_alpha must be positive");
  if (!(step_theta > 0.0) || !std::isfinite(step_theta))
    throw InputError("step_theta must be positive");
  if (max_iters < 1) throw InputError("max_iters must be >= 1");
  if (patience < 1) throw InputError("patience must be >= 1");
  for (int w : classifier_hidden)
    if (w < 1) throw InputError("classifier hidden widths must be >= 1");
}

bool validation_improves(ValidationKind kind, double candidate, double incumbent) {
  switch (kind) {
    case ValidationKind::kSse: return candidate < incumbent;
    case ValidationKind::kWeightedAccuracy: return candidate > incumbent;
    case ValidationKind::kNone: return true;
  }
  return false;
}

double validation_score(ValidationKind kind, const SimplexWeights& alpha,
                        const FeedForwardModel& f,
                        const std::vector<LabeledDataset>& sources,
                        const Matrix& x_target, const FeedForwardModel& g) {
  if (kind == ValidationKind::kNone) return 0.0;
  if (kind == ValidationKind::kWeightedAccuracy) {
    if (alpha.size() != static_cast<Eigen::Index>(sources.size()))
      throw InputError("validation: alpha length differs from source count");
    double score = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double w = alpha[static_cast<Eigen::Index>(j)];
      if (w == 0.0) continue;
      const auto pred = predict_labels(f, g.forward(sources[j].features));
      std::size_t hit = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == sources[j].labels[i];
      score += w * static_cast<double>(hit) / static_cast<double>(pred.size());
    }
    return score;
  }
  const Matrix z = g.forward(x_target);
  const auto pred = predict_labels(f, z);
  const int k = f.output_dim();
  Matrix centroid = Matrix::Zero(k, z.cols());
  Vector count = Vector::Zero(k);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    centroid.row(pred[static_cast<std::size_t>(i)]) += z.row(i);
    count[pred[static_cast<std::size_t>(i)]] += 1.0;
  }
  for (int c = 0; c < k; ++c)
    if (count[c] > 0) centroid.row(c) /= count[c];
  double sse = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    sse += (z.row(i) - centroid.row(pred[static_cast<std::size_t>(i)])).squaredNorm();
  return sse;
}

ArchConfig classifier_arch(const WjdotConfig& config, int input_dim, int classes) {
  ArchConfig a;
  a.input_dim = input_dim;
  a.hidden = config.classifier_hidden;
  a.hidden_activation = config.classifier_activation;
  a.output_dim = classes;
  a.output_activation = Activation::kIdentity;
  a.output = OutputKind::kSoftmax;
  return a;
}

FeedForwardModel initial_classifier(const WjdotConfig& config, int input_dim,
                                    int classes) {
  return FeedForwardModel::initialize(classifier_arch(config, input_dim, classes),
                                      derive_seed(config.seed, 0));
}

namespace detail {
namespace {

// Everything about the data that stays fixed while the classifier and alpha
// move: embeddings, stacked one-hot labels, and the feature part of the cost.
struct Problem {
  Coupling coupling;
  std::vector<Eigen::Index> sizes;
  std::vector<Eigen::Index> offsets;
  Matrix source_labels;    // N x K, sources stacked
  Matrix target_embedded;  // N_T x p
  Matrix feature_cost;     // N x N_T, beta * squared distances
  Vector target_weights;
  LabelLoss loss;
};

struct Evaluation {
  double value = 0.0;
  Matrix plan;  // N x N_T; per-source plans stacked for kPerSource
  Vector dual_source;
};

Evaluation evaluate(const Problem& pb, const Matrix& predictions, const Vector& alpha) {
  Matrix cost = pb.feature_cost;
  add_label_cost(pb.source_labels, predictions, pb.loss, cost);
  const std::span<const double> b{pb.target_weights.data(),
                                  static_cast<std::size_t>(pb.target_weights.size())};
  Evaluation ev;
  if (pb.coupling == Coupling::kPerSource) {
    ev.plan.resize(cost.rows(), cost.cols());
    ev.dual_source.resize(cost.rows());
    for (std::size_t j = 0; j < pb.sizes.size(); ++j) {
      const Eigen::Index r = pb.offsets[j], n = pb.sizes[j];
      const std::vector<double> a(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
      const auto sol = solve_exact_ot(a, b, CostMatrix(cost.middleRows(r, n)));
      ev.value += sol.value;
      ev.plan.middleRows(r, n) = sol.plan;
      ev.dual_source.segment(r, n) = sol.dual_source;
    }
    return ev;
  }
  Vector a(cost.rows());
  const auto total = static_cast<double>(cost.rows());
  for (std::size_t j = 0; j < pb.sizes.size(); ++j) {
    const double w = pb.coupling == Coupling::kMixture
                         ? alpha[static_cast<Eigen::Index>(j)] / static_cast<double>(pb.sizes[j])
                         : 1.0 / total;
    a.segment(pb.offsets[j], pb.sizes[j]).setConstant(w);
  }
  auto sol = solve_exact_ot({a.data(), static_cast<std::size_t>(a.size())}, b,
                            CostMatrix(std::move(cost)));
  ev.value = sol.value;
  ev.plan = std::move(sol.plan);
  ev.dual_source = std::move(sol.dual_source);
  return ev;
}

Vector reported_alpha(Coupling coupling, const std::vector<Eigen::Index>& sizes) {
  const auto J = static_cast<Eigen::Index>(sizes.size());
  if (coupling != Coupling::kPooled) return SimplexWeights::uniform(J).values();
  Vector a(J);
  double total = 0.0;
  for (auto n : sizes) total += static_cast<double>(n);
  for (Eigen::Index j = 0; j < J; ++j)
    a[j] = static_cast<double>(sizes[static_cast<std::size_t>(j)]) / total;
  return project_to_simplex(a).values();
}

WjdotState run_fixed_beta(const Problem& pb, const std::vector<LabeledDataset>& sources,
                          const Matrix& x_target, const FeedForwardModel& g,
                          const WjdotConfig& config, double beta) {
  FeedForwardModel f = initial_classifier(
      config, static_cast<int>(pb.target_embedded.cols()), sources[0].num_classes);
  SimplexWeights alpha(reported_alpha(pb.coupling, pb.sizes));

  WjdotState state;
  state.beta = beta;
  FeedForwardModel best_f = f;
  SimplexWeights best_alpha = alpha;
  double best_score = 0.0;

  for (int it = 0; it < config.max_iters; ++it) {
    Matrix p = f.forward(pb.target_embedded);
    if (!p.allFinite()) throw DivergedError("classifier output is not finite", it);
    Evaluation ev = evaluate(pb, p, alpha.values());
    if (!std::isfinite(ev.value)) throw DivergedError("objective is not finite", it);
    state.loss_history.push_back(ev.value);

    f.apply_step(f.backward(pb.target_embedded,
                            plan_label_upstream(ev.plan, pb.source_labels, p, pb.loss)),
                 config.step_theta);
    if (!f.flatten().allFinite()) throw DivergedError("classifier parameters are not finite", it);

    if (pb.coupling == Coupling::kMixture && config.learn_alpha) {
      if (config.refresh_between_updates) {
        p = f.forward(pb.target_embedded);
        if (!p.allFinite()) throw DivergedError("classifier output is not finite", it);
        ev = evaluate(pb, p, alpha.values());
      }
      TransportSolution duals_only;
      duals_only.dual_source = std::move(ev.dual_source);
      const Vector grad = alpha_gradient(duals_only, pb.sizes);
      if (!grad.allFinite()) throw DivergedError("alpha gradient is not finite", it);
      alpha = project_to_simplex(Vector(alpha.values() - config.step_alpha * grad));
    }

    const double score =
        validation_score(config.validation, alpha, f, sources, x_target, g);
    state.validation_history.push_back(score);
    state.alpha_history.push_back(alpha.values());
    state.iteration = it + 1;
    if (state.best_iteration < 0 ||
        validation_improves(config.validation, score, best_score)) {
      state.best_iteration = it;
      best_score = score;
      best_f = f;
      best_alpha = alpha;
    } else if (it - state.best_iteration >= config.patience) {
      state.stopped_early = true;
      break;
    }
  }
  state.classifier = std::move(best_f);
  state.alpha = best_alpha;
  return state;
}

}  // namespace

WjdotState run_adaptation(Coupling coupling, const std::vector<LabeledDataset>& sources,
                          const Matrix& x_target, const FeedForwardModel& g,
                          const WjdotConfig& config) {
  config.validate();
  if (sources.empty()) throw InputError("adaptation: need at least one source");
  if (x_target.rows() < 1) throw InputError("adaptation: no target samples");
  for (const auto& s : sources) {
    s.validate();
    if (s.dim() != sources[0].dim() || s.num_classes != sources[0].num_classes)
      throw InputError("adaptation: sources differ in feature dimension or classes");
  }
  if (x_target.cols() != sources[0].dim())
    throw InputError("adaptation: target feature dimension differs from sources");
  if (g.input_dim() != sources[0].dim())
    throw InputError("adaptation: embedding input width differs from features");

  Problem pb;
  pb.coupling = coupling;
  pb.loss = config.label_loss;
  Eigen::Index n = 0;
  for (const auto& s : sources) {
    pb.offsets.push_back(n);
    pb.sizes.push_back(s.size());
    n += s.size();
  }
  pb.target_embedded = g.forward(x_target);
  Matrix source_embedded(n, pb.target_embedded.cols());
  pb.source_labels.resize(n, sources[0].num_classes);
  for (std::size_t j = 0; j < sources.size(); ++j) {
    source_embedded.middleRows(pb.offsets[j], pb.sizes[j]) = g.forward(sources[j].features);
    pb.source_labels.middleRows(pb.offsets[j], pb.sizes[j]) =
        one_hot(sources[j].labels, sources[j].num_classes);
  }
  pb.target_weights = Vector::Constant(x_target.rows(),
                                       1.0 / static_cast<double>(x_target.rows()));

  const std::vector<double> betas =
      config.beta ? std::vector<double>{*config.beta} : config.beta_grid;
  WjdotState best;
  double best_score = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    pb.feature_cost = Matrix::Zero(n, x_target.rows());
    add_feature_cost(source_embedded, pb.target_embedded, betas[k], pb.feature_cost);
    WjdotState s = run_fixed_beta(pb, sources, x_target, g, config, betas[k]);
    const double score = s.validation_history[static_cast<std::size_t>(s.best_iteration)];
    if (k == 0 || validation_improves(config.validation, score, best_score)) {
      best = std::move(s);
      best_score = score;
    }
  }
  return best;
}

}  // namespace detail

WjdotState run_wjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config) {
  return detail::run_adaptation(detail::Coupling::kMixture, sources, x_target, g, config);
}

void write_trajectory_csv(const std::filesystem::path& path, const WjdotState& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const Eigen::Index J = state.alpha.size();
  out << "iteration,objective,validation_score";
  for (Eigen::Index j = 0; j < J; ++j) out << ",alpha_" << (j + 1);
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out << ',';
    out.write(buf, r.ptr - buf);
  };
  for (std::size_t i = 0; i < state.loss_history.size(); ++i) {
    out << (i + 1);
    put(state.loss_history[i]);
    put(state.validation_history[i]);
    for (Eigen::Index j = 0; j < J; ++j) put(state.alpha_history[i][j]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

BoundDiagnostics bound_diagnostics(const FeedForwardModel& f,
                                   const FeedForwardModel& g,
                                   const std::vector<LabeledDataset>& sources,
                                   const SimplexWeights& alpha,
                                   const LabeledDataset& target,
                                   double loss_bound) {
  if (sources.empty()) throw InputError("bound diagnostics: no sources");
  if (alpha.size() != static_cast<Eigen::Index>(sources.size()))
    throw InputError("bound diagnostics: alpha length differs from source count");
  if (!(loss_bound >= 0.0)) throw InputError("bound diagnostics: loss bound must be >= 0");
  target.validate();
  for (const auto& s : sources) {
    s.validate();
    if (s.dim() != target.dim() || s.num_classes != target.num_classes)
      throw InputError(
          "bound diagnostics: the total-variation term needs sources and target "
          "on one joint support (same feature space and label set)");
  }
  auto error_rate = [&](const LabeledDataset& d) {
    const auto pred = predict_labels(f, g.forward(d.features));
    std::size_t miss = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) miss += pred[i] != d.labels[i];
    return static_cast<double>(miss) / static_cast<double>(pred.size());
  };
  auto joint = [&](const LabeledDataset& d) {
    const Matrix z = g.forward(d.features);
    Matrix atoms(z.rows(), z.cols() + 1);
    atoms.leftCols(z.cols()) = z;
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      atoms(i, z.cols()) = d.labels[static_cast<std::size_t>(i)];
    return DiscreteMeasure::uniform(std::move(atoms));
  };

  BoundDiagnostics out;
  std::vector<DiscreteMeasure> parts;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    out.eps_alpha += alpha[static_cast<Eigen::Index>(j)] * error_rate(sources[j]);
    parts.push_back(joint(sources[j]));
  }
  out.eps_target = error_rate(target);
  out.tv = tv_distance_discrete(mix_measures(parts, alpha), joint(target));
  out.risk_bound = out.eps_alpha + loss_bound * out.tv;
  out.lambda_upper = out.eps_alpha + out.eps_target;
  return out;
}

}  // namespace wjdot
