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

#ifndef WJDOT_MODEL_HPP_
#define WJDOT_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wjdot/dataset.hpp"
#include "wjdot/linalg.hpp"

namespace wjdot {

enum class Activation { kIdentity, kTanh, kRelu };
enum class OutputKind { kSoftmax, kRaw };
/// Classification loss between a label distribution y and a prediction p.
///   squared:        |y - p|^2
///   cross-entropy:  -sum_k y_k log p_k
enum class LabelLoss { kSquared, kCrossEntropy };

std::string to_string(Activation a);
std::string to_string(OutputKind k);
std::string to_string(LabelLoss l);
Activation parse_activation(const std::string& s);
OutputKind parse_output_kind(const std::string& s);
LabelLoss parse_label_loss(const std::string& s);

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::kIdentity;
};

/// Architecture of a fully connected network.
struct ArchConfig {
  int input_dim = 0;
  std::vector<int> hidden;  // widths of hidden layers
  Activation hidden_activation = Activation::kTanh;
  int output_dim = 0;
  Activation output_activation = Activation::kIdentity;
  OutputKind output = OutputKind::kSoftmax;
};

/// Per-layer parameter gradient, laid out like FeedForwardModel::layers().
struct ModelGradient {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  Vector flatten() const;
  ModelGradient& operator+=(const ModelGradient& other);
};

/// Stack of affine layers with elementwise activations and an optional
/// softmax on top. With no layers and raw output it is the identity map.
class FeedForwardModel {
 public:
  FeedForwardModel() = default;
  FeedForwardModel(int input_dim, std::vector<Layer> layers, OutputKind output);

  static FeedForwardModel identity(int dim);

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
  static FeedForwardModel initialize(const ArchConfig& arch, std::uint64_t seed);

  /// Layers of `first` followed by layers of `second`; output kind of second.
  static FeedForwardModel compose(const FeedForwardModel& first,
                                  const FeedForwardModel& second);

  int input_dim() const { return input_dim_; }
  int output_dim() const;
  OutputKind output() const { return output_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  /// N x input_dim -> N x output_dim.
  Matrix forward(const Matrix& x) const;

  /// Gradient of sum_n <upstream_n, output_n> with respect to the parameters.
  /// If `input_grad` is given it receives the gradient with respect to x.
  ModelGradient backward(const Matrix& x, const Matrix& upstream,
                         Matrix* input_grad = nullptr) const;

  ModelGradient zero_gradient() const;

  /// theta <- theta - rate * grad
  void apply_step(const ModelGradient& grad, double rate);

  std::size_t parameter_count() const;
  Vector flatten() const;
  void assign(const Vector& params);

  bool operator==(const FeedForwardModel& other) const;

 private:
  int input_dim_ = 0;
  std::vector<Layer> layers_;
  OutputKind output_ = OutputKind::kRaw;
};

/// argmax per row; ties resolve to the lowest class index.
std::vector<int> predict_labels(const FeedForwardModel& model, const Matrix& x);
std::vector<int> argmax_rows(const Matrix& scores);

/// Fraction of rows whose predicted label equals the true label.
double accuracy(const FeedForwardModel& model, const LabeledDataset& data);

/// Rows one-hot encoded into `num_classes` columns.
Matrix one_hot(std::span<const int> labels, int num_classes);

/// L(y_n, p_n) summed over rows.
double label_loss_sum(LabelLoss loss, const Matrix& y, const Matrix& p);
/// dL(y_n, p_n)/dp_n for every row.
Matrix label_loss_grad(LabelLoss loss, const Matrix& y, const Matrix& p);

/// Plain full-batch gradient descent settings.
struct TrainConfig {
  int steps = 500;
  double rate = 0.5;
  LabelLoss loss = LabelLoss::kSquared;
};

/// One pass of full-batch descent on mean_n L(onehot(y_n), model(x_n)) over
/// the pooled rows. Returns the loss before each step.
std::vector<double> gradient_descent(FeedForwardModel& model,
                                     const LabeledDataset& data,
                                     const TrainConfig& config);

struct MtlResult {
  FeedForwardModel embedding;
  std::vector<FeedForwardModel> heads;
  std::vector<double> loss_history;
};

struct MtlConfig {
  ArchConfig embedding;  // raw output
  ArchConfig head;       // input_dim is overwritten with the embedding width
  TrainConfig train;
  std::uint64_t seed = 0;
};

/// Observer called after every update with the shared embedding and heads.
using MtlObserver = std::function<void(int step, const FeedForwardModel& g,
                                       std::span<const FeedForwardModel> heads)>;

/// Multi-task pretraining of a shared embedding g with one head per source:
///   min sum_j (1/N_j) sum_i L(f_j(g(x_j^i)), y_j^i)
/// by full-batch gradient descent.
MtlResult train_mtl_embedding(const std::vector<LabeledDataset>& sources,
                              const MtlConfig& config,
                              const MtlObserver& observer = {});

/// Checkpoint as `key = value` lines with JSON values.
void save_model(const std::filesystem::path& path, const FeedForwardModel& model);
FeedForwardModel load_model(const std::filesystem::path& path);
std::string serialize_model(const FeedForwardModel& model);
FeedForwardModel deserialize_model(const std::string& text);

}  // namespace wjdot

#endif  // WJDOT_MODEL_HPP_
