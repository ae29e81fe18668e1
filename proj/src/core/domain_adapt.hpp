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

#include "core/dataset.hpp"
#include "core/lbfgs.hpp"
#include "core/model.hpp"

namespace netevo::adapt {

/// Which samples enter the classification term of the combined cost.
enum class Scope { kSourceOnly, kTargetOnly, kBoth };

struct AdaptConfig {
    double gamma = 0.5;  // trade-off weight of the discrepancy term; 0 disables it
    Scope classification_scope = Scope::kBoth;
    int finetune_iters = 50;
};

void validate(const AdaptConfig& cfg);

/// Class-conditional maximum mean discrepancy with a linear kernel: the sum
/// over classes of the squared distance between per-class feature means.
/// Classes absent from either side contribute 0.
double classwise_mmd(const Matrix& src_features, const std::vector<int>& src_labels,
                     const Matrix& tgt_features, const std::vector<int>& tgt_labels,
                     int num_classes);

struct CostEval {
    double value = 0.0;
    Vector gradient;
};

/// Classification loss over the configured scope plus gamma times the
/// class-conditional discrepancy between deepest-hidden-layer features of the
/// two domains. The discrepancy term reaches parameters only through the
/// feature extractor; the softmax head sees the classification term alone.
CostEval combined_cost(const nn::DnnModel& model, const data::LabeledDataset& source,
                       const data::LabeledDataset& target_train, const AdaptConfig& cfg);

/// Same cost evaluated at an explicit flat parameter vector (model provides
/// the architecture and activation).
CostEval combined_cost_at(const nn::DnnModel& like, const Vector& theta,
                          const data::LabeledDataset& source,
                          const data::LabeledDataset& target_train, const AdaptConfig& cfg);

struct FinetuneResult {
    nn::DnnModel model;
    std::vector<double> loss_history;
    bool converged = false;
    bool line_search_failed = false;
};

/// Quasi-Newton minimization of the combined cost for cfg.finetune_iters
/// iterations; remaining optimizer knobs come from `optimizer`.
FinetuneResult finetune(const nn::DnnModel& model, const data::LabeledDataset& source,
                        const data::LabeledDataset& target_train, const AdaptConfig& cfg,
                        const nn::TrainConfig& optimizer = {});

}  // namespace netevo::adapt
