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
#include <fstream>
#include <sstream>
#include <string>

#include "cqfs/config.hpp"

namespace cqfs::fixture {

/// A pipeline config small enough to run in a few seconds.
inline const char* kSmallConfig = R"({
  "dataset": {"synth": {"n_users": 80, "n_items": 60, "n_features": 12, "n_relevant": 3,
                        "interactions_per_user": 15, "noise_rate": 0.1, "extra_features_mean": 1.5, "seed": 5}},
  "collaborative": {"kind": "itemknn_cf", "n_cases": 4},
  "content_teacher": {"topK": 30},
  "cqfs": {"beta": [0.01], "s": [1, 100], "p": [0.25, 0.5]},
  "solver": {"num_samples": 20},
  "final_cbf": {"n_cases": 4},
  "baselines": {"tfidf_quotas": [0.5]},
  "cutoff": 10,
  "seed": 7
})";

inline ExperimentConfig small_config(const std::filesystem::path& out) {
  ExperimentConfig cfg = parse_config(kSmallConfig);
  cfg.output_dir = out;
  cfg.workers = 2;
  return cfg;
}

inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cqfs_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace cqfs::fixture
