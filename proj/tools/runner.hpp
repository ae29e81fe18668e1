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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace cli {

/// Dataset-stage failure -> exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training/search-stage failure -> exit code 4.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// mean(ca) - mean(baseline); the transfer improvement over a baseline method.
double compute_ti(const std::vector<double>& ca, const std::vector<double>& baseline_ca);

/// Arithmetic mean and population standard deviation.
std::pair<double, double> aggregate(const std::vector<double>& ca);

/// Plot-ready per-generation curve derived from a reports JSON array:
/// generation, best_ca, best_so_far_ca, front_size. One header row, '.'
/// decimal separator.
std::string emit_curve(const std::string& reports_json);

/// ca,params,widths rows for the rank-1 front of the last generation.
std::string emit_pareto_front(const std::string& reports_json);

/// Executes a full run: teacher, one evolution per target case, artifacts
/// (generations.json, pareto_final.csv, curve.csv, best_model.json per case,
/// summary.json at the output root). All files are written atomically.
void run(const RunConfig& cfg);

/// Writes the calibrated synthetic benchmark into `out_dir`: per-class signal
/// files, source/target manifests, and a ready-to-run benchmark.conf.
void write_synth_benchmark(const std::string& out_dir);

}  // namespace cli
