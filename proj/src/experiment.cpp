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

#include "wjdot/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "wjdot/error.hpp"
#include "wjdot/kvfile.hpp"
#include "wjdot/rng.hpp"

namespace wjdot {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kRotationSweep: return "rotation_sweep";
    case ExperimentKind::kTargetShift: return "target_shift";
    case ExperimentKind::kFourSources: return "four_sources";
    case ExperimentKind::kCustom: return "custom";
  }
  return "?";
}

namespace {

ExperimentKind parse_kind(const std::string& s) {
  if (s == "rotation_sweep") return ExperimentKind::kRotationSweep;
  if (s == "target_shift") return ExperimentKind::kTargetShift;
  if (s == "four_sources") return ExperimentKind::kFourSources;
  if (s == "custom") return ExperimentKind::kCustom;
  throw InputError("unknown experiment kind: " + s);
}

bool is_adaptation(const std::string& m) {
  return m == "wjdot" || m == "cjdot" || m == "mjdot";
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

// Presets for the simulated studies pin beta and the step sizes that were
// tuned for them; the custom kind keeps the generic WjdotConfig defaults.
ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind != ExperimentKind::kCustom) {
    c.wjdot.beta = 1.0;
    c.wjdot.step_theta = 1.0;
    c.wjdot.step_alpha = 0.05;
    c.wjdot.max_iters = 150;
  }
  switch (kind) {
    case ExperimentKind::kFourSources:
      c.num_sources = 4;
      c.target_angle = 0.75 * M_PI;
      c.methods = {"wjdot", "baseline"};
      break;
    case ExperimentKind::kRotationSweep:
      c.num_sources = 30;
      c.target_angle.reset();
      c.methods = {"wjdot", "cjdot", "mjdot", "baseline", "target", "baseline_target"};
      break;
    case ExperimentKind::kTargetShift:
      c.num_sources = 20;
      c.n_source = 100;
      c.n_target = 300;
      c.wjdot.step_alpha = 0.01;
      c.wjdot.max_iters = 100;
      c.methods = {"wjdot", "cjdot"};
      break;
    case ExperimentKind::kCustom:
      c.methods = {"wjdot", "baseline"};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw InputError("replications must be >= 1");
  if (jobs < 1) throw InputError("jobs must be >= 1");
  if (methods.empty()) throw InputError("methods must not be empty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (std::find(kMethodNames.begin(), kMethodNames.end(), m) == kMethodNames.end())
      throw InputError("unknown method: " + m);
    if (!seen.insert(m).second) throw InputError("method listed twice: " + m);
  }
  if (num_sources < 1) throw InputError("num_sources must be >= 1");
  if (n_source < 10 || n_target < 10)
    throw InputError("n_source and n_target must be >= 10 (70/20/10 split)");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (target_angle && !(*target_angle >= 0.0 && *target_angle <= kRotationRange))
    throw InputError("target_angle must lie in [0, 3pi/2]");
  if (kind == ExperimentKind::kTargetShift) {
    if (target_proportions.empty()) throw InputError("target_proportions must not be empty");
    for (double p : target_proportions)
      if (!(p >= 0.1 - 1e-12 && p <= 0.9 + 1e-12))
        throw InputError("target_proportions must lie in [0.1, 0.9]");
  }
  if (kind == ExperimentKind::kCustom) {
    if (source_files.empty()) throw InputError("source_files must not be empty");
    for (const auto& f : source_files)
      if (!std::filesystem::exists(f)) throw InputError("source file not found: " + f.string());
    if (!std::filesystem::exists(target_file))
      throw InputError("target file not found: " + target_file.string());
  }
  if (embedding != "identity" && embedding != "mtl")
    throw InputError("embedding must be identity or mtl");
  if (mtl_width < 1 || mtl_steps < 0 || !(mtl_rate >= 0.0))
    throw InputError("mtl settings out of range");
  if (erm_steps < 0 || !(erm_rate >= 0.0)) throw InputError("erm settings out of range");
  wjdot.validate();
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return serialize_config(*this) == serialize_config(o);
}

namespace {

using nlohmann::json;

// One setter per key; each throws ParseError naming the key and the expected
// type when the value does not fit.
class ConfigReader {
 public:
  explicit ConfigReader(const KeyValue& kv) : kv_(kv) {}

  [[noreturn]] void mismatch(const char* expected) const {
    throw ParseError(kv_.key + ": expected " + expected, kv_.line);
  }
  [[noreturn]] void invalid(const std::string& what) const {
    throw ParseError(kv_.key + ": " + what, kv_.line);
  }
  long long integer() const {
    if (!kv_.value.is_number_integer()) mismatch("integer");
    return kv_.value.get<long long>();
  }
  int int32() const {
    const long long v = integer();
    if (v < INT32_MIN || v > INT32_MAX) invalid("out of range");
    return static_cast<int>(v);
  }
  double real() const {
    if (!kv_.value.is_number()) mismatch("number");
    return kv_.value.get<double>();
  }
  bool boolean() const {
    if (!kv_.value.is_boolean()) mismatch("boolean");
    return kv_.value.get<bool>();
  }
  std::string string() const {
    if (!kv_.value.is_string()) mismatch("string");
    return kv_.value.get<std::string>();
  }
  std::vector<double> reals() const {
    if (!kv_.value.is_array()) mismatch("array of numbers");
    std::vector<double> out;
    for (const auto& v : kv_.value) {
      if (!v.is_number()) mismatch("array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::vector<int> ints() const {
    if (!kv_.value.is_array()) mismatch("array of integers");
    std::vector<int> out;
    for (const auto& v : kv_.value) {
      if (!v.is_number_integer()) mismatch("array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  }
  std::vector<std::string> strings() const {
    if (!kv_.value.is_array()) mismatch("array of strings");
    std::vector<std::string> out;
    for (const auto& v : kv_.value) {
      if (!v.is_string()) mismatch("array of strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }
  const json& raw() const { return kv_.value; }

 private:
  const KeyValue& kv_;
};

template <typename Fn>
auto wrap(const ConfigReader& r, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    r.invalid(e.what());
  }
}

void apply(ExperimentConfig& c, const KeyValue& kv) {
  const ConfigReader r(kv);
  const std::string& k = kv.key;
  WjdotConfig& w = c.wjdot;
  if (k == "kind") return;  // handled first
  if (k == "methods") c.methods = r.strings();
  else if (k == "replications") c.replications = r.int32();
  else if (k == "seed") {
    const long long v = r.integer();
    if (v < 0) r.invalid("must be >= 0");
    c.seed = static_cast<std::uint64_t>(v);
  }
  else if (k == "out") c.out = r.string();
  else if (k == "jobs") c.jobs = r.int32();
  else if (k == "num_sources") c.num_sources = r.int32();
  else if (k == "n_source") c.n_source = r.int32();
  else if (k == "n_target") c.n_target = r.int32();
  else if (k == "sigma") c.sigma = r.real();
  else if (k == "target_angle") {
    if (r.raw().is_string()) {
      if (r.string() != "random") r.invalid("expected number or \"random\"");
      c.target_angle.reset();
    } else {
      c.target_angle = r.real();
    }
  }
  else if (k == "target_proportions") c.target_proportions = r.reals();
  else if (k == "source_files") {
    c.source_files.clear();
    for (const auto& s : r.strings()) c.source_files.emplace_back(s);
  }
  else if (k == "target_file") c.target_file = r.string();
  else if (k == "embedding") c.embedding = r.string();
  else if (k == "mtl_width") c.mtl_width = r.int32();
  else if (k == "mtl_steps") c.mtl_steps = r.int32();
  else if (k == "mtl_rate") c.mtl_rate = r.real();
  else if (k == "erm_steps") c.erm_steps = r.int32();
  else if (k == "erm_rate") c.erm_rate = r.real();
  else if (k == "beta") {
    if (r.raw().is_string()) {
      if (r.string() != "grid") r.invalid("expected number or \"grid\"");
      w.beta.reset();
    } else {
      w.beta = r.real();
    }
  }
  else if (k == "beta_grid") w.beta_grid = r.reals();
  else if (k == "step_alpha") w.step_alpha = r.real();
  else if (k == "step_theta") w.step_theta = r.real();
  else if (k == "max_iters") w.max_iters = r.int32();
  else if (k == "validation") w.validation = wrap(r, [&] { return parse_validation_kind(r.string()); });
  else if (k == "patience") w.patience = r.int32();
  else if (k == "label_loss") w.label_loss = wrap(r, [&] { return parse_label_loss(r.string()); });
  else if (k == "refresh_between_updates") w.refresh_between_updates = r.boolean();
  else if (k == "learn_alpha") w.learn_alpha = r.boolean();
  else if (k == "classifier_hidden") w.classifier_hidden = r.ints();
  else if (k == "classifier_activation")
    w.classifier_activation = wrap(r, [&] { return parse_activation(r.string()); });
  else throw ParseError("unknown key: " + k, kv.line);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  const auto entries = parse_key_values(in);
  ExperimentKind kind = ExperimentKind::kFourSources;
  for (const auto& kv : entries)
    if (kv.key == "kind") {
      const ConfigReader r(kv);
      kind = wrap(r, [&] { return parse_kind(r.string()); });
    }
  ExperimentConfig c = default_config(kind);
  for (const auto& kv : entries) apply(c, kv);
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
  const WjdotConfig& w = c.wjdot;
  std::ostringstream o;
  auto put = [&](const char* key, const json& v) { o << key << " = " << render_value(v) << '\n'; };
  put("kind", to_string(c.kind));
  put("methods", c.methods);
  put("replications", c.replications);
  put("seed", c.seed);
  put("out", c.out.string());
  put("jobs", c.jobs);
  put("num_sources", c.num_sources);
  put("n_source", c.n_source);
  put("n_target", c.n_target);
  put("sigma", c.sigma);
  put("target_angle", c.target_angle ? json(*c.target_angle) : json("random"));
  put("target_proportions", c.target_proportions);
  json files = json::array();
  for (const auto& f : c.source_files) files.push_back(f.string());
  put("source_files", files);
  put("target_file", c.target_file.string());
  put("embedding", c.embedding);
  put("mtl_width", c.mtl_width);
  put("mtl_steps", c.mtl_steps);
  put("mtl_rate", c.mtl_rate);
  put("erm_steps", c.erm_steps);
  put("erm_rate", c.erm_rate);
  put("beta", w.beta ? json(*w.beta) : json("grid"));
  put("beta_grid", w.beta_grid);
  put("step_alpha", w.step_alpha);
  put("step_theta", w.step_theta);
  put("max_iters", w.max_iters);
  put("validation", to_string(w.validation));
  put("patience", w.patience);
  put("label_loss", to_string(w.label_loss));
  put("refresh_between_updates", w.refresh_between_updates);
  put("learn_alpha", w.learn_alpha);
  put("classifier_hidden", w.classifier_hidden);
  put("classifier_activation", to_string(w.classifier_activation));
  return o.str();
}

int target_parameter_count(const ExperimentConfig& config) {
  return config.kind == ExperimentKind::kTargetShift
             ? static_cast<int>(config.target_proportions.size())
             : 1;
}

ReplicationData make_replication_data(const ExperimentConfig& config, int r, int k) {
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
  ReplicationData out;
  std::vector<LabeledDataset> sources;
  LabeledDataset target;
  switch (config.kind) {
    case ExperimentKind::kFourSources:
    case ExperimentKind::kRotationSweep: {
      RotationShiftSpec spec;
      spec.num_sources = config.num_sources;
      spec.n_source = config.n_source;
      spec.n_target = config.n_target;
      spec.sigma = config.sigma;
      spec.target_angle = config.target_angle;
      spec.seed = seed;
      auto dom = generate_rotation_domains(spec);
      sources = std::move(dom.sources);
      target = std::move(dom.target);
      out.source_parameters = dom.source_angles;
      out.target_parameter = dom.target_angle;
      break;
    }
    case ExperimentKind::kTargetShift: {
      TargetShiftSpec spec;
      spec.source_proportions =
          random_proportions(config.num_sources, 0.1, 0.9, derive_seed(seed, 7));
      spec.target_proportion = config.target_proportions.at(static_cast<std::size_t>(k));
      spec.n_source = config.n_source;
      spec.n_target = config.n_target;
      spec.sigma = config.sigma;
      spec.seed = seed;
      auto dom = generate_target_shift(spec);
      sources = std::move(dom.sources);
      target = std::move(dom.target);
      out.source_parameters = spec.source_proportions;
      out.target_parameter = spec.target_proportion;
      break;
    }
    case ExperimentKind::kCustom: {
      int classes = 0;
      for (const auto& f : config.source_files) {
        sources.push_back(read_dataset_csv(f));
        classes = std::max(classes, sources.back().num_classes);
      }
      target = read_dataset_csv(config.target_file);
      classes = std::max(classes, target.num_classes);
      for (auto& s : sources) s.num_classes = classes;
      target.num_classes = classes;
      for (std::size_t j = 0; j < sources.size(); ++j)
        out.source_parameters.push_back(static_cast<double>(j));
      break;
    }
  }
  for (std::size_t j = 0; j < sources.size(); ++j) {
    auto split = split_dataset(sources[j], derive_seed(seed, 100 + j));
    out.sources.push_back(std::move(split.train));
    out.source_tests.push_back(std::move(split.test));
  }
  auto split = split_dataset(target, derive_seed(seed, 99));
  out.target_train = std::move(split.train);
  out.target_validation = std::move(split.validation);
  out.target_test = std::move(split.test);
  return out;
}

namespace {

FeedForwardModel make_embedding(const ExperimentConfig& config, const ReplicationData& data,
                                std::uint64_t seed) {
  const int d = static_cast<int>(data.sources[0].dim());
  if (config.embedding == "identity") return FeedForwardModel::identity(d);
  MtlConfig mtl;
  mtl.embedding.input_dim = d;
  mtl.embedding.output_dim = config.mtl_width;
  mtl.embedding.output_activation = Activation::kTanh;
  mtl.embedding.output = OutputKind::kRaw;
  mtl.head.output_dim = data.sources[0].num_classes;
  mtl.train.steps = config.mtl_steps;
  mtl.train.rate = config.mtl_rate;
  mtl.train.loss = config.wjdot.label_loss;
  mtl.seed = derive_seed(seed, 5);
  return train_mtl_embedding(data.sources, mtl).embedding;
}

LabeledDataset embed(const FeedForwardModel& g, const LabeledDataset& d) {
  LabeledDataset out = d;
  out.features = g.forward(d.features);
  return out;
}

MethodRun run_method(const ExperimentConfig& config, const std::string& method,
                     const ReplicationData& data, const FeedForwardModel& g,
                     std::uint64_t seed) {
  MethodRun run;
  run.method = method;
  run.target_parameter = data.target_parameter;
  try {
    if (is_adaptation(method)) {
      WjdotConfig w = config.wjdot;
      w.seed = seed;
      const Matrix& xt = data.target_train.features;
      WjdotState st = method == "wjdot"   ? run_wjdot(data.sources, xt, g, w)
                      : method == "cjdot" ? run_cjdot(data.sources, xt, g, w)
                                          : run_mjdot(data.sources, xt, g, w);
      run.accuracy = accuracy(FeedForwardModel::compose(g, st.classifier), data.target_test);
      run.state = std::move(st);
    } else {
      const int classes = data.sources[0].num_classes;
      const ArchConfig arch = classifier_arch(config.wjdot, g.output_dim(), classes);
      TrainConfig t;
      t.steps = config.erm_steps;
      t.rate = config.erm_rate;
      t.loss = config.wjdot.label_loss;
      std::vector<LabeledDataset> pool;
      if (method != "target")
        for (const auto& s : data.sources) pool.push_back(embed(g, s));
      if (method != "baseline") pool.push_back(embed(g, data.target_train));
      const LabeledDataset val = embed(g, data.target_validation);
      const FeedForwardModel f =
          train_erm(pool, arch, t, seed, method == "baseline" ? nullptr : &val);
      run.accuracy = accuracy(f, embed(g, data.target_test));
    }
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
    run.accuracy = std::nan("");
  }
  return run;
}

ReplicationResult run_replication(const ExperimentConfig& config, int r) {
  ReplicationResult res;
  res.replication = r;
  res.seed = config.seed + static_cast<std::uint64_t>(r);
  for (int k = 0; k < target_parameter_count(config); ++k) {
    ReplicationData data;
    FeedForwardModel g;
    try {
      data = make_replication_data(config, r, k);
      g = make_embedding(config, data, res.seed);
    } catch (const std::exception& e) {
      for (const auto& m : config.methods) {
        MethodRun run;
        run.method = m;
        run.ok = false;
        run.error = std::string("data: ") + e.what();
        run.accuracy = std::nan("");
        res.runs.push_back(std::move(run));
      }
      continue;
    }
    res.source_parameters = data.source_parameters;
    for (const auto& m : config.methods)
      res.runs.push_back(run_method(config, m, data, g, res.seed));
  }
  return res;
}

// Runs fn(r) for r in [0, n) on up to `jobs` threads; results land in slot r.
template <typename T, typename Fn>
std::vector<T> parallel_map(int n, int jobs, Fn fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  std::mutex mu;
  int next = 0;
  auto worker = [&] {
    for (;;) {
      int r;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n) return;
        r = next++;
      }
      out[static_cast<std::size_t>(r)] = fn(r);
    }
  };
  const int threads = std::max(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace

bool ExperimentResults::any_failed() const {
  for (const auto& r : replications)
    for (const auto& m : r.runs)
      if (!m.ok) return true;
  return false;
}

ExperimentResults run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResults res;
  res.config = config;
  res.replications = parallel_map<ReplicationResult>(
      config.replications, config.jobs, [&](int r) { return run_replication(config, r); });
  return res;
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "trajectories", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_test";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("cannot write into " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

void emit_results(const ExperimentResults& results, const std::filesystem::path& dir) {
  prepare_output_dir(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };
  const bool random_angle = results.config.kind == ExperimentKind::kRotationSweep &&
                            !results.config.target_angle;

  {
    auto out = open("config.txt");
    out << serialize_config(results.config);
  }
  {
    auto out = open("run.log");
    out << "# effective configuration\n" << serialize_config(results.config);
    out << "# runs\n";
    for (const auto& r : results.replications)
      for (const auto& m : r.runs)
        out << "replication " << r.replication << " seed " << r.seed << ' ' << m.method
            << " target " << fmt(m.target_parameter) << ": "
            << (m.ok ? "accuracy " + fmt(m.accuracy) : "FAILED " + m.error) << '\n';
  }
  {
    auto out = open("replications.csv");
    out << "replication,seed,method,target_parameter,accuracy,status,error\n";
    for (const auto& r : results.replications)
      for (const auto& m : r.runs) {
        std::string err = m.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.replication << ',' << r.seed << ',' << m.method << ','
            << fmt(m.target_parameter) << ',' << (m.ok ? fmt(m.accuracy) : "") << ','
            << (m.ok ? "ok" : "failed") << ",\"" << err << "\"\n";
      }
  }
  {
    // Groups keyed by method order in the config, then target parameter.
    auto out = open("summary.csv");
    out << "method,target_parameter,mean_accuracy,std_accuracy,n_replications\n";
    for (const auto& method : results.config.methods) {
      std::map<double, std::vector<double>> groups;
      for (const auto& r : results.replications)
        for (const auto& m : r.runs)
          if (m.method == method && m.ok)
            groups[random_angle ? 0.0 : m.target_parameter].push_back(m.accuracy);
      for (const auto& [param, accs] : groups) {
        const double n = static_cast<double>(accs.size());
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= n;
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        const double sd = accs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        out << method << ',' << (random_angle ? std::string("random") : fmt(param)) << ','
            << fmt(mean) << ',' << fmt(sd) << ',' << accs.size() << '\n';
      }
    }
  }
  {
    auto out = open("alpha.csv");
    out << "replication,target_parameter,source_index,source_parameter,alpha\n";
    for (const auto& r : results.replications)
      for (const auto& m : r.runs) {
        if (m.method != "wjdot" || !m.ok || !m.state) continue;
        for (Eigen::Index j = 0; j < m.state->alpha.size(); ++j)
          out << r.replication << ',' << fmt(m.target_parameter) << ',' << (j + 1) << ','
              << fmt(r.source_parameters.at(static_cast<std::size_t>(j))) << ','
              << fmt(m.state->alpha[j]) << '\n';
      }
  }
  for (const auto& r : results.replications) {
    for (const auto& m : r.runs) {
      if (!m.ok || !m.state) continue;
      std::ostringstream name;
      name << m.method << "_r" << r.replication << "_t" << fmt(m.target_parameter) << ".csv";
      write_trajectory_csv(dir / "trajectories" / name.str(), *m.state);
    }
  }
}

std::vector<DiagnosticsRow> run_diagnostics(const ExperimentConfig& config) {
  config.validate();
  auto per_rep = parallel_map<std::vector<DiagnosticsRow>>(
      config.replications, config.jobs, [&](int r) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
        const ReplicationData data = make_replication_data(config, r, 0);
        const FeedForwardModel g = make_embedding(config, data, seed);
        WjdotConfig w = config.wjdot;
        w.seed = seed;
        const WjdotState st = run_wjdot(data.sources, data.target_train.features, g, w);
        std::vector<DiagnosticsRow> rows;
        const auto J = static_cast<Eigen::Index>(data.sources.size());
        for (const char* kind : {"optimized", "uniform"}) {
          const SimplexWeights alpha =
              std::string(kind) == "optimized" ? st.alpha : SimplexWeights::uniform(J);
          rows.push_back({r, kind,
                          bound_diagnostics(st.classifier, g, data.source_tests, alpha,
                                            data.target_test, 1.0)});
        }
        return rows;
      });
  std::vector<DiagnosticsRow> out;
  for (auto& rows : per_rep) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "replication,alpha,eps_alpha,eps_target,tv,risk_bound,lambda_upper\n";
  for (const auto& r : rows)
    out << r.replication << ',' << r.alpha_kind << ',' << fmt(r.values.eps_alpha) << ','
        << fmt(r.values.eps_target) << ',' << fmt(r.values.tv) << ','
        << fmt(r.values.risk_bound) << ',' << fmt(r.values.lambda_upper) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace wjdot
