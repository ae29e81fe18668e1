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

#include <functional>
#include <vector>

#include "core/common.hpp"

namespace netevo::nn {

/// Full-batch optimizer budget plus greedy-pretraining knobs.
struct TrainConfig {
    int max_iterations = 50;
    double gradient_tolerance = 1e-6;
    int history_size = 10;        // quasi-Newton memory
    int pretrain_epochs = 20;     // optimizer iterations per autoencoder layer
    double pretrain_noise = 0.0;  // denoising corruption fraction in [0, 1)
};

void validate(const TrainConfig& cfg);

/// Evaluates the objective at x and fills grad; returns the value.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct MinimizeResult {
    Vector params;
    std::vector<double> loss_history;  // value at the start, then one per accepted step
    bool converged = false;            // gradient norm fell below the tolerance
    bool line_search_failed = false;   // returned the best iterate found so far
    int iterations = 0;
};

/// Limited-memory BFGS with a backtracking line search enforcing the Armijo
/// sufficient-decrease condition; loss_history is strictly decreasing. Throws
/// NumericError when the objective or gradient is non-finite at the start.
MinimizeResult quasi_newton_minimize(const Objective& objective, const Vector& init_params,
                                     const TrainConfig& cfg);

}  // namespace netevo::nn
