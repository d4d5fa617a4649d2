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

#ifndef WJDOT_WJDOT_HPP_
#define WJDOT_WJDOT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "wjdot/dataset.hpp"
#include "wjdot/linalg.hpp"
#include "wjdot/model.hpp"
#include "wjdot/ot.hpp"
#include "wjdot/simplex.hpp"

namespace wjdot {

/// Weighted (embedding, label representation) pairs. Sources carry one-hot
/// label rows, the self-labeled target carries classifier outputs.
struct JointAtoms {
  Matrix embedded;  // N x p
  Matrix labels;    // N x K
  Vector weights;   // N

  Eigen::Index size() const { return embedded.rows(); }
  /// Shapes, weights on the simplex, and label rows either one-hot or summing
  /// to one.
  void validate() const;
};

/// (g(x), onehot(y)) with weights 1/N.
JointAtoms source_atoms(const LabeledDataset& data, const FeedForwardModel& g);

/// (g(x), f(g(x))) with weights 1/N.
JointAtoms proxy_target(const FeedForwardModel& f, const FeedForwardModel& g,
                        const Matrix& x_target);

/// D[i, j] = beta * |z_i - z'_j|^2 + L(y_i, y'_j), rows from `source`.
CostMatrix build_joint_cost(const JointAtoms& source, const JointAtoms& target,
                            double beta, LabelLoss loss);

/// Atoms of all sources stacked in order, source j weighted by alpha_j.
JointAtoms mix_atoms(const std::vector<JointAtoms>& sources,
                     const SimplexWeights& alpha);

struct ObjectiveResult {
  double value = 0.0;
  TransportSolution solution;  // rows: mixture atoms, columns: target atoms
};

/// W_D between the alpha-mixture of the sources and the proxy target.
ObjectiveResult wjdot_objective(const std::vector<JointAtoms>& sources,
                                const SimplexWeights& alpha,
                                const JointAtoms& target, double beta,
                                LabelLoss loss);

/// Mean of the mixture-side potentials over each source's atoms.
Vector alpha_gradient(const TransportSolution& solution,
                      const std::vector<Eigen::Index>& source_sizes);

/// dL(y_i, p_j)/dp_j summed with plan weights: upstream for backward().
Matrix plan_label_upstream(const Matrix& plan, const Matrix& source_labels,
                           const Matrix& predictions, LabelLoss loss);

/// Gradient of sum_ij plan_ij L(y_i, f(g(x_T^j))) in the parameters of f,
/// with the plan held fixed. `source_labels` stacks the label rows of every
/// source in mixture order.
ModelGradient theta_gradient(const Matrix& plan, const Matrix& source_labels,
                             const FeedForwardModel& f, const Matrix& target_embedded,
                             LabelLoss loss);

enum class ValidationKind { kSse, kWeightedAccuracy, kNone };
std::string to_string(ValidationKind v);
ValidationKind parse_validation_kind(const std::string& s);

struct WjdotConfig {
  std::optional<double> beta;  // empty: pick from beta_grid by validation
  std::vector<double> beta_grid{0.01, 0.1, 1.0, 10.0};
  double step_alpha = 0.1;
  double step_theta = 0.1;
  int max_iters = 200;
  ValidationKind validation = ValidationKind::kSse;
  int patience = 20;
  std::uint64_t seed = 0;
  LabelLoss label_loss = LabelLoss::kSquared;
  bool refresh_between_updates = true;
  bool learn_alpha = true;  // false keeps alpha at its initial value
  // Classifier on top of the embedding; input and output widths are filled
  // in from the data.
  std::vector<int> classifier_hidden;
  Activation classifier_activation = Activation::kTanh;

  void validate() const;
};

struct WjdotState {
  SimplexWeights alpha = SimplexWeights::uniform(1);
  FeedForwardModel classifier;
  int iteration = 0;  // iterations performed
  std::vector<double> loss_history;
  std::vector<double> validation_history;
  std::vector<Vector> alpha_history;  // alpha after each iteration
  int best_iteration = -1;            // 0-based index of the returned snapshot
  double beta = 0.0;
  bool stopped_early = false;
};

/// Higher is better for weighted accuracy, lower for SSE.
bool validation_improves(ValidationKind kind, double candidate, double incumbent);

/// SSE: sum of squared distances from each g(x_T) to the centroid of its
/// predicted class. Weighted accuracy: sum_j alpha_j * accuracy on source j.
/// kNone returns 0.
double validation_score(ValidationKind kind, const SimplexWeights& alpha,
                        const FeedForwardModel& f,
                        const std::vector<LabeledDataset>& sources,
                        const Matrix& x_target, const FeedForwardModel& g);

/// Alternating projected descent on the classifier and alpha.
WjdotState run_wjdot(const std::vector<LabeledDataset>& sources,
                     const Matrix& x_target, const FeedForwardModel& g,
                     const WjdotConfig& config);

/// Classifier architecture used by the adaptation loops for a given
/// embedding width and class count.
ArchConfig classifier_arch(const WjdotConfig& config, int input_dim, int classes);

/// The classifier every adaptation run starts from.
FeedForwardModel initial_classifier(const WjdotConfig& config, int input_dim,
                                    int classes);

/// Writes iteration, objective, validation_score, alpha_1..alpha_J.
void write_trajectory_csv(const std::filesystem::path& path, const WjdotState& state);

struct BoundDiagnostics {
  double eps_alpha = 0.0;
  double eps_target = 0.0;
  double tv = 0.0;
  double risk_bound = 0.0;
  double lambda_upper = 0.0;
};

/// Risks of `f o g` under the 0-1 loss on the alpha-weighted sources and on
/// the labeled target, the total variation between the joint empirical
/// distributions (atoms (g(x), y)), and the bounds built from them.
BoundDiagnostics bound_diagnostics(const FeedForwardModel& f,
                                   const FeedForwardModel& g,
                                   const std::vector<LabeledDataset>& sources,
                                   const SimplexWeights& alpha,
                                   const LabeledDataset& target,
                                   double loss_bound);

}  // namespace wjdot

#endif  // WJDOT_WJDOT_HPP_
