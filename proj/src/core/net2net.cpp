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

#include "core/net2net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netevo::net2net {

using nn::DnnModel;

namespace {

void check_layer_index(const DnnModel& model, int layer) {
    if (layer < 0 || layer >= model.depth()) {
        throw ValueError("net2net: hidden layer index " + std::to_string(layer) +
                         " outside [0, " + std::to_string(model.depth()) + ")");
    }
}

DnnModel shrink_layer(const DnnModel& model, int layer, int new_width, Rng& rng) {
    const int old_width = model.arch.hidden_widths[static_cast<std::size_t>(layer)];
    // Uniform unit subset, kept in ascending order.
    std::vector<int> perm = rng.permutation(old_width);
    perm.resize(static_cast<std::size_t>(new_width));
    std::sort(perm.begin(), perm.end());

    DnnModel out = model;
    out.arch.hidden_widths[static_cast<std::size_t>(layer)] = new_width;

    Matrix w_in(model.weights[layer].rows(), new_width);
    Vector b(new_width);
    Matrix w_out(new_width, model.weights[layer + 1].cols());
    for (int j = 0; j < new_width; ++j) {
        w_in.col(j) = model.weights[layer].col(perm[static_cast<std::size_t>(j)]);
        b(j) = model.biases[layer](perm[static_cast<std::size_t>(j)]);
        w_out.row(j) = model.weights[layer + 1].row(perm[static_cast<std::size_t>(j)]);
    }
    out.weights[layer] = std::move(w_in);
    out.biases[layer] = std::move(b);
    out.weights[layer + 1] = std::move(w_out);
    nn::validate(out);
    return out;
}

}  // namespace

DnnModel widen_layer_with_map(const DnnModel& model, int layer,
                              const std::vector<int>& replication_map, Rng& rng,
                              const WidenOptions& options) {
    check_layer_index(model, layer);
    const int old_width = model.arch.hidden_widths[static_cast<std::size_t>(layer)];
    const int new_width = static_cast<int>(replication_map.size());
    if (new_width < old_width) {
        throw ValueError("net2net: replication map shorter than current width");
    }
    for (int j = 0; j < new_width; ++j) {
        const int src = replication_map[static_cast<std::size_t>(j)];
        if (j < old_width && src != j) {
            throw ValueError("net2net: replication map must keep original units in place");
        }
        if (src < 0 || src >= old_width) {
            throw ValueError("net2net: replication source out of range");
        }
    }

    std::vector<int> class_size(static_cast<std::size_t>(old_width), 0);
    for (int src : replication_map) ++class_size[static_cast<std::size_t>(src)];

    DnnModel out = model;
    out.arch.hidden_widths[static_cast<std::size_t>(layer)] = new_width;

    Matrix w_in(model.weights[layer].rows(), new_width);
    Vector b(new_width);
    Matrix w_out(new_width, model.weights[layer + 1].cols());
    for (int j = 0; j < new_width; ++j) {
        const int src = replication_map[static_cast<std::size_t>(j)];
        w_in.col(j) = model.weights[layer].col(src);
        b(j) = model.biases[layer](src);
        // Splitting each outgoing row across its replication class preserves
        // every downstream pre-activation sum exactly.
        w_out.row(j) = model.weights[layer + 1].row(src) /
                       static_cast<double>(class_size[static_cast<std::size_t>(src)]);
    }
    if (options.noise_std > 0.0) {
        for (int j = old_width; j < new_width; ++j) {
            for (Eigen::Index r = 0; r < w_in.rows(); ++r) {
                w_in(r, j) += rng.normal(0.0, options.noise_std);
            }
        }
    }
    out.weights[layer] = std::move(w_in);
    out.biases[layer] = std::move(b);
    out.weights[layer + 1] = std::move(w_out);
    nn::validate(out);
    return out;
}

DnnModel widen_layer(const DnnModel& model, int layer, int new_width, Rng& rng,
                     const WidenOptions& options) {
    check_layer_index(model, layer);
    if (new_width < 1) throw ValueError("net2net: new width must be >= 1");
    const int old_width = model.arch.hidden_widths[static_cast<std::size_t>(layer)];
    if (new_width == old_width) return model;
    if (new_width < old_width) return shrink_layer(model, layer, new_width, rng);

    std::vector<int> replication_map(static_cast<std::size_t>(new_width));
    std::iota(replication_map.begin(), replication_map.begin() + old_width, 0);
    for (int j = old_width; j < new_width; ++j) {
        replication_map[static_cast<std::size_t>(j)] = rng.uniform_int(0, old_width - 1);
    }
    return widen_layer_with_map(model, layer, replication_map, rng, options);
}

TransformResult deepen(const DnnModel& model, int position) {
    check_layer_index(model, position);
    const int width = model.arch.hidden_widths[static_cast<std::size_t>(position)];

    DnnModel out = model;
    out.arch.hidden_widths.insert(out.arch.hidden_widths.begin() + position + 1, width);
    out.weights.insert(out.weights.begin() + position + 1, Matrix::Identity(width, width));
    out.biases.insert(out.biases.begin() + position + 1, Vector::Zero(width));
    nn::validate(out);
    return TransformResult{std::move(out),
                           model.hidden_activation != nn::Activation::kRectifier};
}

TransformResult transform_to_architecture(const DnnModel& teacher,
                                          const nn::Architecture& target, Rng& rng,
                                          const WidenOptions& options) {
    nn::validate(target);
    if (teacher.arch.input_dim != target.input_dim) {
        throw ShapeError("transform: teacher input_dim " +
                         std::to_string(teacher.arch.input_dim) + " vs target " +
                         std::to_string(target.input_dim));
    }
    if (teacher.arch.num_classes != target.num_classes) {
        throw ShapeError("transform: teacher num_classes " +
                         std::to_string(teacher.arch.num_classes) + " vs target " +
                         std::to_string(target.num_classes));
    }

    DnnModel model = teacher;
    bool approximate = false;

    if (target.depth() > model.depth()) {
        if (model.depth() == 0) {
            // No hidden stack to copy from: seed one square layer over the raw
            // input. Inputs are not guaranteed nonnegative, so this is only an
            // approximate identity under the rectifier.
            const int width = model.arch.input_dim;
            model.arch.hidden_widths.push_back(width);
            model.weights.insert(model.weights.begin(), Matrix::Identity(width, width));
            model.biases.insert(model.biases.begin(), Vector::Zero(width));
            approximate = true;
        }
        while (model.depth() < target.depth()) {
            TransformResult deeper = deepen(model, model.depth() - 1);
            approximate |= deeper.approximate;
            model = std::move(deeper.model);
        }
    } else if (target.depth() < model.depth()) {
        // Keep the leading hidden layers; the softmax head must be rebuilt
        // against the new deepest width.
        model.arch.hidden_widths.resize(static_cast<std::size_t>(target.depth()));
        model.weights.resize(static_cast<std::size_t>(target.depth()) + 1);
        model.biases.resize(static_cast<std::size_t>(target.depth()) + 1);
        const int fan_in = target.depth() > 0
                               ? model.arch.hidden_widths.back()
                               : model.arch.input_dim;
        const int fan_out = model.arch.num_classes;
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix head(fan_in, fan_out);
        for (int r = 0; r < fan_in; ++r) {
            for (int c = 0; c < fan_out; ++c) head(r, c) = rng.uniform(-bound, bound);
        }
        model.weights.back() = std::move(head);
        model.biases.back() = Vector::Zero(fan_out);
        approximate = true;
    }

    for (int layer = 0; layer < target.depth(); ++layer) {
        const int want = target.hidden_widths[static_cast<std::size_t>(layer)];
        const int have = model.arch.hidden_widths[static_cast<std::size_t>(layer)];
        if (want == have) continue;
        approximate |= want < have;
        model = widen_layer(model, layer, want, rng, options);
    }

    nn::validate(model);
    return TransformResult{std::move(model), approximate};
}

}  // namespace netevo::net2net
