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

#include <string>
#include <vector>

#include "core/architecture.hpp"
#include "core/common.hpp"
#include "core/rng.hpp"

namespace netevo::nn {

enum class Activation { kRectifier, kSigmoid };

/// Dense feed-forward classifier. weights[l] has shape (fan_in_l, fan_out_l);
/// the last layer is always the softmax head over num_classes. Instances are
/// treated as immutable values: every operation returns a new model.
struct DnnModel {
    Architecture arch;
    Activation hidden_activation = Activation::kRectifier;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    int depth() const { return arch.depth(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
};

/// Throws if layer shapes do not chain input_dim -> hidden_widths -> num_classes
/// or any entry is non-finite.
void validate(const DnnModel& model);

DnnModel make_model(Architecture arch, Activation activation, std::vector<Matrix> weights,
                    std::vector<Vector> biases);

/// Fresh model with weights uniform in +-sqrt(6/(fan_in+fan_out)) and zero biases.
DnnModel init_model(const Architecture& arch, Activation activation, Rng& rng);

Matrix softmax_rows(const Matrix& logits);

struct ForwardResult {
    Matrix hidden_features;  // activations of the deepest hidden layer (input itself at depth 0)
    Matrix class_probs;      // one softmax row per sample
};

ForwardResult forward(const DnnModel& model, const Matrix& X);

/// Activations and pre-activations of every layer, kept for backpropagation.
struct ForwardCache {
    std::vector<Matrix> activations;  // activations[0] = X, activations[depth] = deepest hidden
    std::vector<Matrix> preactivations;  // one per hidden layer
    Matrix logits;
    Matrix probs;
};

ForwardCache forward_cached(const DnnModel& model, const Matrix& X);

/// Backpropagates dloss/dlogits (and an optional extra dloss/dfeatures injected
/// at the deepest hidden layer) into a flattened parameter gradient.
Vector backward(const DnnModel& model, const ForwardCache& cache, const Matrix& dlogits,
                const Matrix& dfeatures);

/// Mean negative log-likelihood of the true class, probabilities clamped at 1e-12.
double cross_entropy(const Matrix& class_probs, const std::vector<int>& labels);

/// (probs - onehot(labels)) * scale; the softmax cross-entropy delta.
Matrix cross_entropy_delta(const Matrix& probs, const std::vector<int>& labels, double scale);

std::vector<int> predict(const DnnModel& model, const Matrix& X);

/// Percentage of argmax-correct rows in [0, 100]; argmax ties go to the lowest
/// class index. Throws on an empty dataset.
double classification_accuracy(const DnnModel& model, const Matrix& X,
                               const std::vector<int>& labels);

// Flat parameter vector layout: layers in order, per layer the weight matrix
// row-major followed by the bias. Fixed so serialized runs are reproducible.
Vector flatten_params(const DnnModel& model);
DnnModel with_params(const DnnModel& like, const Vector& theta);

std::string to_json(const DnnModel& model);
DnnModel model_from_json(const std::string& text);
void save_json_file(const DnnModel& model, const std::string& path);
DnnModel load_json_file(const std::string& path);

}  // namespace netevo::nn
