// Copyright 2026 The netevo Authors.
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netevo/netevo.h"

namespace cli {

/// Configuration failure; `key` names the offending entry.
struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string k, const std::string& message)
        : std::runtime_error(k + ": " + message), key(std::move(k)) {}
};

struct SourceSpec {
    bool synthetic = false;
    std::string manifest;  // resolved against the config file directory
    // Synthetic-generator settings (shared with every target case).
    int classes = 4;
    int dim = 20;
    int samples_per_class = 300;
    double noise_std = 1.0;
};

struct TargetSpec {
    std::string name;
    bool synthetic = false;
    std::string manifest;
    int samples_per_class = 120;
    double shift = 8.0;
    double rotation_deg = 120.0;
};

/// One parsed run configuration. Numeric fields arrive pre-validated; paths
/// are resolved relative to the config file location.
struct RunConfig {
    std::string output_dir;
    uint64_t seed = 0;
    int worker_count = 1;
    double split_train = 0.64;
    double split_val = 0.16;
    double split_test = 0.20;
    std::optional<std::vector<double>> baseline_ca;

    std::vector<int32_t> teacher_hidden{80, 40, 20};
    int32_t teacher_activation = NETEVO_ACTIVATION_RECTIFIER;
    std::string teacher_model;  // when set, load instead of training
    netevo_train_config train{};

    netevo_evo_config evo{};  // adapt + optimizer nested inside

    SourceSpec source;
    std::vector<TargetSpec> targets;
};

/// Parses and validates a config file. Throws ConfigError with the offending
/// key on any structural or range violation.
RunConfig load_config(const std::string& path);

/// Same, from an in-memory string; `base_dir` anchors relative paths.
RunConfig parse_config(const std::string& text, const std::string& base_dir);

}  // namespace cli
