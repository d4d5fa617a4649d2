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

// Command-line front end: generate, train, experiment, diagnose.
//
// Exit codes: 0 success, 1 invalid input (config, flags, data files),
// 2 runtime failure (I/O, divergence, any failed replication).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wjdot/error.hpp"
#include "wjdot/experiment.hpp"

namespace fs = std::filesystem;
using namespace wjdot;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides `out`)");
  cmd->add_option("--seed", f.seed, "base seed (overrides `seed`)");
  cmd->add_option("--jobs", f.jobs, "worker threads (overrides `jobs`)");
}

ExperimentConfig load(const CommonFlags& f, ExperimentKind fallback) {
  ExperimentConfig c = f.config.empty() ? default_config(fallback) : parse_config(fs::path(f.config));
  if (!f.out.empty()) c.out = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.jobs) c.jobs = *f.jobs;
  c.validate();
  return c;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out || !(out << text)) throw IoError("cannot write " + p.string());
}

int cmd_generate(const ExperimentConfig& c) {
  prepare_output_dir(c.out);
  write_text(c.out / "config.txt", serialize_config(c));
  for (int r = 0; r < c.replications; ++r) {
    for (int k = 0; k < target_parameter_count(c); ++k) {
      const auto data = make_replication_data(c, r, k);
      const fs::path dir = c.out / ("r" + std::to_string(r) + "_t" + std::to_string(k));
      fs::create_directories(dir);
      for (std::size_t j = 0; j < data.sources.size(); ++j) {
        const auto stem = "source_" + std::to_string(j + 1);
        write_dataset_csv(dir / (stem + "_train.csv"), data.sources[j]);
        write_dataset_csv(dir / (stem + "_test.csv"), data.source_tests[j]);
      }
      write_dataset_csv(dir / "target_train.csv", data.target_train);
      write_dataset_csv(dir / "target_validation.csv", data.target_validation);
      write_dataset_csv(dir / "target_test.csv", data.target_test);
      std::cout << dir.string() << ": " << data.sources.size() << " sources, target parameter "
                << data.target_parameter << '\n';
    }
  }
  return 0;
}

int cmd_train(ExperimentConfig c, const std::string& method) {
  c.methods = {method};
  c.replications = 1;
  const fs::path out = c.out;
  prepare_output_dir(out);
  const auto res = run_experiment(c);
  emit_results(res, out);
  bool ok = true;
  for (const auto& run : res.replications[0].runs) {
    if (!run.ok) {
      std::cerr << method << " failed: " << run.error << '\n';
      ok = false;
      continue;
    }
    std::cout << method << " target " << run.target_parameter << " accuracy " << run.accuracy
              << '\n';
    if (run.state) {
      std::cout << "alpha";
      for (Eigen::Index j = 0; j < run.state->alpha.size(); ++j)
        std::cout << ' ' << run.state->alpha[j];
      std::cout << "\nbeta " << run.state->beta << ", best iteration "
                << run.state->best_iteration << '\n';
      save_model(out / ("classifier_t" + std::to_string(run.target_parameter) + ".txt"),
                 run.state->classifier);
    }
  }
  return ok ? 0 : 2;
}

int cmd_experiment(const ExperimentConfig& c) {
  prepare_output_dir(c.out);
  const auto res = run_experiment(c);
  emit_results(res, c.out);
  std::cout << std::ifstream(c.out / "summary.csv").rdbuf();
  if (res.any_failed()) {
    std::cerr << "some runs failed; see " << (c.out / "replications.csv").string() << '\n';
    return 2;
  }
  return 0;
}

int cmd_diagnose(const ExperimentConfig& c) {
  if (c.kind == ExperimentKind::kTargetShift || c.kind == ExperimentKind::kCustom)
    throw InputError("diagnose needs a rotation experiment (four_sources or rotation_sweep)");
  prepare_output_dir(c.out);
  const auto rows = run_diagnostics(c);
  write_diagnostics_csv(c.out / "diagnostics.csv", rows);
  std::cout << std::ifstream(c.out / "diagnostics.csv").rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source domain adaptation by weighted joint distribution optimal transport"};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, exp_flags, diag_flags;
  auto* gen = app.add_subcommand("generate", "write the synthetic datasets of a configuration");
  add_common(gen, gen_flags);
  std::string method = "wjdot";
  auto* train = app.add_subcommand("train", "run one method on the first replication");
  add_common(train, train_flags);
  train->add_option("--method", method, "wjdot|cjdot|mjdot|baseline|target|baseline_target")
      ->check(CLI::IsMember(kMethodNames));
  auto* exp = app.add_subcommand("experiment", "seeded replication sweep");
  add_common(exp, exp_flags);
  auto* diag = app.add_subcommand("diagnose", "bound diagnostics on labeled synthetic targets");
  add_common(diag, diag_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_generate(load(gen_flags, ExperimentKind::kFourSources));
    if (*train) return cmd_train(load(train_flags, ExperimentKind::kFourSources), method);
    if (*exp) return cmd_experiment(load(exp_flags, ExperimentKind::kFourSources));
    if (*diag) return cmd_diagnose(load(diag_flags, ExperimentKind::kRotationSweep));
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
