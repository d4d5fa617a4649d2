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

#ifndef WJDOT_EXPERIMENT_HPP_
#define WJDOT_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wjdot/baselines.hpp"
#include "wjdot/datagen.hpp"
#include "wjdot/wjdot.hpp"

namespace wjdot {

enum class ExperimentKind { kRotationSweep, kTargetShift, kFourSources, kCustom };
std::string to_string(ExperimentKind k);

/// Method names accepted in `methods`.
inline const std::vector<std::string> kMethodNames = {
    "wjdot", "cjdot", "mjdot", "baseline", "target", "baseline_target"};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kFourSources;
  std::vector<std::string> methods{"wjdot"};
  int replications = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  int jobs = 1;

  // rotation-sweep / four_sources
  int num_sources = 4;
  int n_source = 300;
  int n_target = 300;
  double sigma = 0.8;
  std::optional<double> target_angle;  // empty: random per replication

  // target-shift
  std::vector<double> target_proportions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  // custom
  std::vector<std::filesystem::path> source_files;
  std::filesystem::path target_file;

  // embedding
  std::string embedding = "identity";  // identity | mtl
  int mtl_width = 8;
  int mtl_steps = 500;
  double mtl_rate = 0.5;

  // supervised baselines
  int erm_steps = 500;
  double erm_rate = 1.0;

  WjdotConfig wjdot;

  /// Throws InputError naming the offending field.
  void validate() const;
  bool operator==(const ExperimentConfig& other) const;
};

/// Defaults for a kind: four_sources is 4 sources with the target at 3pi/4,
/// rotation-sweep 30 sources with a random target angle, target-shift 20
/// sources of 100 samples.
ExperimentConfig default_config(ExperimentKind kind);

/// `key = value` text with JSON values, see docs/config.md. Throws ParseError
/// for unknown keys ("unknown key: <key>") and type mismatches.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

struct MethodRun {
  std::string method;
  double target_parameter = 0.0;
  double accuracy = 0.0;
  bool ok = true;
  std::string error;
  std::optional<WjdotState> state;  // adaptation methods only
};

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<double> source_parameters;  // angles or class-1 proportions
  std::vector<MethodRun> runs;
};

struct ExperimentResults {
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;

  bool any_failed() const;
};

/// Data for one replication, already split.
struct ReplicationData {
  std::vector<LabeledDataset> sources;       // training splits
  std::vector<LabeledDataset> source_tests;  // held-out splits
  LabeledDataset target_train, target_validation, target_test;
  std::vector<double> source_parameters;
  double target_parameter = 0.0;
};

/// Data of replication `r` for the `k`-th target parameter (target-shift
/// proportions; always 0 for the other kinds).
ReplicationData make_replication_data(const ExperimentConfig& config, int r, int k = 0);

/// Number of target parameters per replication.
int target_parameter_count(const ExperimentConfig& config);

/// Runs every method on every replication. Replication r uses seed + r.
/// Method failures are recorded, not thrown.
ExperimentResults run_experiment(const ExperimentConfig& config);

/// Creates the directory and checks that files can be written there.
void prepare_output_dir(const std::filesystem::path& dir);

/// summary.csv, replications.csv, alpha.csv, config.txt and trajectories/.
void emit_results(const ExperimentResults& results, const std::filesystem::path& dir);

struct DiagnosticsRow {
  int replication = 0;
  std::string alpha_kind;  // optimized | uniform
  BoundDiagnostics values;
};

/// Runs WJDOT per replication and evaluates the bound diagnostics of the
/// learned classifier under the learned and the uniform alpha (0-1 loss,
/// B = 1) on the held-out splits.
std::vector<DiagnosticsRow> run_diagnostics(const ExperimentConfig& config);
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRow>& rows);

}  // namespace wjdot

#endif  // WJDOT_EXPERIMENT_HPP_
