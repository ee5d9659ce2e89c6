// Copyright 2026 The CQFS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cqfs/config.hpp"
#include "cqfs/error.hpp"

namespace cqfs::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kInfeasible = 4 };

int exit_code_for(ErrorCode code);

/// Flags shared by every subcommand.
struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> workers;
  std::optional<std::string> solver;
  std::optional<std::size_t> samples;
};

/// Loads --config (or the defaults) and applies the flag overrides.
ExperimentConfig resolve_config(const CommonOptions& opts);

struct SynthOptions {
  std::optional<std::size_t> users, items, features, relevant, interactions;
  std::optional<double> noise, extra_features;
  std::optional<std::uint64_t> seed;
};

struct QuboOptions {
  std::optional<double> alpha, beta, s, p;
};

void run_synth(const ExperimentConfig& cfg, const SynthOptions& opts);
void run_prepare(const ExperimentConfig& cfg);
void run_train_cf(const ExperimentConfig& cfg);
void run_build_qubo(const ExperimentConfig& cfg, const QuboOptions& opts);
void run_select(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& qubo);
void run_train_cbf(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& selection);
void run_evaluate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& model);
void run_full_pipeline(const ExperimentConfig& cfg);
void run_stats(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& selections);

}  // namespace cqfs::cli
