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

namespace netevo::nn {

struct PretrainTrace {
    // One reconstruction-loss history per hidden layer, in stacking order.
    std::vector<std::vector<double>> layer_loss_history;
};

/// Greedy layer-wise pretraining: each hidden layer is fit as a tied-weight
/// autoencoder (mean-squared reconstruction loss, optional denoising
/// corruption) on the codes of the layer below. The softmax head keeps its
/// random initialization. pretrain_epochs = 0 returns the seeded random model
/// untouched.
DnnModel pretrain_stack(const Matrix& X, const Architecture& arch, const TrainConfig& cfg,
                        Rng& rng, Activation activation = Activation::kRectifier,
                        PretrainTrace* trace = nullptr);

/// Teacher training: pretrain_stack followed by full-batch supervised
/// fine-tuning of the cross-entropy loss.
DnnModel train_source_model(const data::LabeledDataset& source, const Architecture& arch,
                            const TrainConfig& cfg, Rng& rng,
                            Activation activation = Activation::kRectifier,
                            std::vector<double>* loss_history = nullptr);

}  // namespace netevo::nn
