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

#include "wjdot/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wjdot/error.hpp"
#include "wjdot/kvfile.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "?";
}
std::string to_string(OutputKind k) {
  return k == OutputKind::kSoftmax ? "softmax" : "raw";
}
std::string to_string(LabelLoss l) {
  return l == LabelLoss::kSquared ? "squared" : "cross_entropy";
}
Activation parse_activation(const std::string& s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw InputError("unknown activation: " + s);
}
OutputKind parse_output_kind(const std::string& s) {
  if (s == "softmax") return OutputKind::kSoftmax;
  if (s == "raw") return OutputKind::kRaw;
  throw InputError("unknown output kind: " + s);
}
LabelLoss parse_label_loss(const std::string& s) {
  if (s == "squared") return LabelLoss::kSquared;
  if (s == "cross_entropy") return LabelLoss::kCrossEntropy;
  throw InputError("unknown label loss: " + s);
}

Vector ModelGradient::flatten() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weight.size(); ++l)
    n += weight[l].size() + bias[l].size();
  Vector out(n);
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    for (Eigen::Index i = 0; i < weight[l].rows(); ++i)
      for (Eigen::Index j = 0; j < weight[l].cols(); ++j) out[k++] = weight[l](i, j);
    for (Eigen::Index i = 0; i < bias[l].size(); ++i) out[k++] = bias[l][i];
  }
  return out;
}

ModelGradient& ModelGradient::operator+=(const ModelGradient& other) {
  if (other.weight.size() != weight.size())
    throw InputError("gradient layouts differ");
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] += other.weight[l];
    bias[l] += other.bias[l];
  }
  return *this;
}

FeedForwardModel::FeedForwardModel(int input_dim, std::vector<Layer> layers,
                                   OutputKind output)
    : input_dim_(input_dim), layers_(std::move(layers)), output_(output) {
  if (input_dim_ < 1) throw InputError("model input dimension must be >= 1");
  Eigen::Index width = input_dim_;
  for (const auto& layer : layers_) {
    if (layer.weight.cols() != width)
      throw InputError("model: layer input width mismatch");
    if (layer.bias.size() != layer.weight.rows())
      throw InputError("model: bias length mismatch");
    if (layer.weight.rows() < 1) throw InputError("model: empty layer");
    width = layer.weight.rows();
  }
}

FeedForwardModel FeedForwardModel::identity(int dim) {
  return FeedForwardModel(dim, {}, OutputKind::kRaw);
}

FeedForwardModel FeedForwardModel::initialize(const ArchConfig& arch,
                                              std::uint64_t seed) {
  if (arch.input_dim < 1 || arch.output_dim < 1)
    throw InputError("architecture dimensions must be >= 1");
  Rng rng(seed);
  std::vector<Layer> layers;
  int fan_in = arch.input_dim;
  auto add = [&](int out, Activation act) {
    if (out < 1) throw InputError("layer width must be >= 1");
    Layer layer;
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.weight.resize(out, fan_in);
    for (Eigen::Index i = 0; i < out; ++i)
      for (Eigen::Index j = 0; j < fan_in; ++j)
        layer.weight(i, j) = s * (2.0 * uniform01(rng) - 1.0);
    layer.bias = Vector::Zero(out);
    layer.activation = act;
    layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (int w : arch.hidden) add(w, arch.hidden_activation);
  add(arch.output_dim, arch.output_activation);
  return FeedForwardModel(arch.input_dim, std::move(layers), arch.output);
}

FeedForwardModel FeedForwardModel::compose(const FeedForwardModel& first,
                                           const FeedForwardModel& second) {
  if (first.output_ == OutputKind::kSoftmax)
    throw InputError("compose: inner model must have raw output");
  if (second.input_dim() != first.output_dim())
    throw InputError("compose: widths do not match");
  std::vector<Layer> layers = first.layers_;
  layers.insert(layers.end(), second.layers_.begin(), second.layers_.end());
  return FeedForwardModel(first.input_dim_, std::move(layers), second.output_);
}

int FeedForwardModel::output_dim() const {
  return layers_.empty() ? input_dim_
                         : static_cast<int>(layers_.back().weight.rows());
}

namespace {

void activate(Activation a, Matrix& z) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kTanh: z = z.array().tanh(); break;
    case Activation::kRelu: z = z.array().max(0.0); break;
  }
}

// Multiplies `g` in place by the activation derivative, given the
// pre-activation z and post-activation h.
void activation_backward(Activation a, const Matrix& z, const Matrix& h,
                         Matrix& g) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kTanh: g.array() *= 1.0 - h.array().square(); break;
    case Activation::kRelu:
      g.array() *= (z.array() > 0.0).cast<double>();
      break;
  }
}

void softmax_rows(Matrix& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    auto row = z.row(i);
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    row /= row.sum();
  }
}

Matrix affine(const Matrix& h, const Layer& layer) {
  Matrix z = h * layer.weight.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

}  // namespace

Matrix FeedForwardModel::forward(const Matrix& x) const {
  if (x.cols() != input_dim_)
    throw InputError("forward: input has " + std::to_string(x.cols()) +
                     " columns, model expects " + std::to_string(input_dim_));
  Matrix h = x;
  for (const auto& layer : layers_) {
    h = affine(h, layer);
    activate(layer.activation, h);
  }
  if (output_ == OutputKind::kSoftmax) softmax_rows(h);
  return h;
}

ModelGradient FeedForwardModel::zero_gradient() const {
  ModelGradient g;
  for (const auto& layer : layers_) {
    g.weight.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  return g;
}

ModelGradient FeedForwardModel::backward(const Matrix& x, const Matrix& upstream,
                                         Matrix* input_grad) const {
  if (x.cols() != input_dim_) throw InputError("backward: input width mismatch");
  if (upstream.rows() != x.rows() || upstream.cols() != output_dim())
    throw InputError("backward: upstream shape mismatch");
  const std::size_t L = layers_.size();
  std::vector<Matrix> pre(L), post(L + 1);
  post[0] = x;
  for (std::size_t l = 0; l < L; ++l) {
    pre[l] = affine(post[l], layers_[l]);
    post[l + 1] = pre[l];
    activate(layers_[l].activation, post[l + 1]);
  }
  Matrix g = upstream;
  if (output_ == OutputKind::kSoftmax) {
    Matrix p = post[L];
    softmax_rows(p);
    const Vector inner = (g.array() * p.array()).rowwise().sum();
    g = p.array() * (g.colwise() - inner).array();
  }
  ModelGradient grad = zero_gradient();
  for (std::size_t l = L; l-- > 0;) {
    activation_backward(layers_[l].activation, pre[l], post[l + 1], g);
    grad.weight[l] = g.transpose() * post[l];
    grad.bias[l] = g.colwise().sum().transpose();
    g = g * layers_[l].weight;
  }
  if (input_grad) *input_grad = std::move(g);
  return grad;
}

void FeedForwardModel::apply_step(const ModelGradient& grad, double rate) {
  if (grad.weight.size() != layers_.size())
    throw InputError("apply_step: gradient layout mismatch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight -= rate * grad.weight[l];
    layers_[l].bias -= rate * grad.bias[l];
  }
}

std::size_t FeedForwardModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_)
    n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

Vector FeedForwardModel::flatten() const {
  ModelGradient g;
  for (const auto& layer : layers_) {
    g.weight.push_back(layer.weight);
    g.bias.push_back(layer.bias);
  }
  return g.flatten();
}

void FeedForwardModel::assign(const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count())
    throw InputError("assign: parameter count mismatch");
  Eigen::Index k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        layer.weight(i, j) = params[k++];
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = params[k++];
  }
}

bool FeedForwardModel::operator==(const FeedForwardModel& other) const {
  if (input_dim_ != other.input_dim_ || output_ != other.output_ ||
      layers_.size() != other.layers_.size())
    return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l];
    const auto& b = other.layers_[l];
    if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
        a.weight.cols() != b.weight.cols() || a.weight != b.weight ||
        a.bias != b.bias)
      return false;
  }
  return true;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < scores.cols(); ++k)
      if (scores(i, k) > scores(i, best)) best = k;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> predict_labels(const FeedForwardModel& model, const Matrix& x) {
  return argmax_rows(model.forward(x));
}

double accuracy(const FeedForwardModel& model, const LabeledDataset& data) {
  const auto pred = predict_labels(model, data.features);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == data.labels[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

Matrix one_hot(std::span<const int> labels, int num_classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw InputError("one_hot: label out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

namespace {
// Keeps log finite when a softmax output underflows to zero.
constexpr double kLogFloor = 1e-300;
}

double label_loss_sum(LabelLoss loss, const Matrix& y, const Matrix& p) {
  if (y.rows() != p.rows() || y.cols() != p.cols())
    throw InputError("label loss: shape mismatch");
  if (loss == LabelLoss::kSquared) return (y - p).squaredNorm();
  return -(y.array() * p.array().max(kLogFloor).log()).sum();
}

Matrix label_loss_grad(LabelLoss loss, const Matrix& y, const Matrix& p) {
  if (y.rows() != p.rows() || y.cols() != p.cols())
    throw InputError("label loss: shape mismatch");
  if (loss == LabelLoss::kSquared) return 2.0 * (p - y);
  return -(y.array() / p.array().max(kLogFloor));
}

std::vector<double> gradient_descent(FeedForwardModel& model,
                                     const LabeledDataset& data,
                                     const TrainConfig& config) {
  data.validate();
  if (model.output_dim() != data.num_classes)
    throw InputError("model output width differs from class count");
  const Matrix y = one_hot(data.labels, data.num_classes);
  const double scale = 1.0 / static_cast<double>(data.size());
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    const Matrix p = model.forward(data.features);
    history.push_back(scale * label_loss_sum(config.loss, y, p));
    const Matrix up = scale * label_loss_grad(config.loss, y, p);
    model.apply_step(model.backward(data.features, up), config.rate);
  }
  return history;
}

MtlResult train_mtl_embedding(const std::vector<LabeledDataset>& sources,
                              const MtlConfig& config,
                              const MtlObserver& observer) {
  if (sources.empty()) throw InputError("train_mtl_embedding: no sources");
  for (const auto& s : sources) {
    s.validate();
    if (s.dim() != sources[0].dim())
      throw InputError("train_mtl_embedding: feature dimensions differ");
  }
  ArchConfig g_arch = config.embedding;
  g_arch.input_dim = static_cast<int>(sources[0].dim());
  g_arch.output = OutputKind::kRaw;
  ArchConfig f_arch = config.head;
  f_arch.input_dim = g_arch.output_dim;

  MtlResult res;
  res.embedding = FeedForwardModel::initialize(g_arch, derive_seed(config.seed, 0));
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (f_arch.output_dim != sources[j].num_classes)
      throw InputError("head width differs from class count");
    res.heads.push_back(
        FeedForwardModel::initialize(f_arch, derive_seed(config.seed, j + 1)));
  }
  std::vector<Matrix> targets;
  for (const auto& s : sources) targets.push_back(one_hot(s.labels, s.num_classes));

  for (int step = 0; step < config.train.steps; ++step) {
    ModelGradient g_grad = res.embedding.zero_gradient();
    std::vector<ModelGradient> head_grads;
    double loss = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double scale = 1.0 / static_cast<double>(sources[j].size());
      const Matrix z = res.embedding.forward(sources[j].features);
      const Matrix p = res.heads[j].forward(z);
      loss += scale * label_loss_sum(config.train.loss, targets[j], p);
      const Matrix up = scale * label_loss_grad(config.train.loss, targets[j], p);
      Matrix dz;
      head_grads.push_back(res.heads[j].backward(z, up, &dz));
      g_grad += res.embedding.backward(sources[j].features, dz);
    }
    res.loss_history.push_back(loss);
    res.embedding.apply_step(g_grad, config.train.rate);
    for (std::size_t j = 0; j < sources.size(); ++j)
      res.heads[j].apply_step(head_grads[j], config.train.rate);
    if (observer) observer(step, res.embedding, res.heads);
  }
  return res;
}

std::string serialize_model(const FeedForwardModel& model) {
  std::ostringstream out;
  out << "# feed-forward model checkpoint\n";
  out << "format = \"wjdot-ffn-1\"\n";
  out << "input_dim = " << model.input_dim() << "\n";
  out << "output = \"" << to_string(model.output()) << "\"\n";
  out << "layers = " << model.layers().size() << "\n";
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const auto& layer = model.layers()[l];
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        row.push_back(layer.weight(i, j));
      w.push_back(std::move(row));
    }
    nlohmann::json b = nlohmann::json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) b.push_back(layer.bias[i]);
    const std::string p = "layer" + std::to_string(l) + ".";
    out << p << "activation = \"" << to_string(layer.activation) << "\"\n";
    out << p << "weight = " << render_value(w) << "\n";
    out << p << "bias = " << render_value(b) << "\n";
  }
  return out.str();
}

FeedForwardModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  const auto entries = parse_key_values(in);
  std::map<std::string, const KeyValue*> by_key;
  for (const auto& kv : entries) by_key[kv.key] = &kv;
  auto get = [&](const std::string& key) -> const KeyValue& {
    auto it = by_key.find(key);
    if (it == by_key.end()) throw ParseError("missing key: " + key, 0);
    return *it->second;
  };
  auto fail = [](const KeyValue& kv, const std::string& what) {
    throw ParseError(kv.key + ": " + what, kv.line);
  };
  try {
    const auto& fmt = get("format");
    if (fmt.value != "wjdot-ffn-1") fail(fmt, "unsupported format");
    const int input_dim = get("input_dim").value.get<int>();
    const auto output = parse_output_kind(get("output").value.get<std::string>());
    const auto n_layers = get("layers").value.get<std::size_t>();
    std::vector<Layer> layers(n_layers);
    std::size_t expected_keys = 4;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      layers[l].activation =
          parse_activation(get(p + "activation").value.get<std::string>());
      const auto& w = get(p + "weight");
      const auto rows = w.value.get<std::vector<std::vector<double>>>();
      if (rows.empty() || rows[0].empty()) fail(w, "empty weight");
      layers[l].weight.resize(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(rows[0].size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) fail(w, "ragged weight rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
          layers[l].weight(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(j)) = rows[i][j];
      }
      const auto bias = get(p + "bias").value.get<std::vector<double>>();
      layers[l].bias = Eigen::Map<const Vector>(bias.data(),
                                                static_cast<Eigen::Index>(bias.size()));
      expected_keys += 3;
    }
    if (entries.size() != expected_keys)
      for (const auto& kv : entries) {
        const bool known = kv.key == "format" || kv.key == "input_dim" ||
                           kv.key == "output" || kv.key == "layers";
        bool in_range = false;
        for (std::size_t l = 0; l < n_layers && !known; ++l) {
          const std::string p = "layer" + std::to_string(l) + ".";
          in_range = in_range || kv.key == p + "activation" ||
                     kv.key == p + "weight" || kv.key == p + "bias";
        }
        if (!known && !in_range) fail(kv, "unknown key");
      }
    return FeedForwardModel(input_dim, std::move(layers), output);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint value has wrong type: ") + e.what(), 0);
  }
}

void save_model(const std::filesystem::path& path, const FeedForwardModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw IoError("write failed: " + path.string());
}

FeedForwardModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace wjdot
