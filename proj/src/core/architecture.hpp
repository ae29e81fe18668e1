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
#include <utility>
#include <vector>

#include "core/common.hpp"

namespace netevo::nn {

/// Shape of a fully-connected classifier: input width, hidden-layer widths
/// (possibly empty), and the class count of the softmax head.
struct Architecture {
    int input_dim = 0;
    std::vector<int> hidden_widths;
    int num_classes = 0;

    int depth() const { return static_cast<int>(hidden_widths.size()); }

    bool operator==(const Architecture& other) const = default;
};

inline void validate(const Architecture& arch) {
    if (arch.input_dim < 1) throw ValueError("architecture: input_dim must be >= 1");
    if (arch.num_classes < 2) throw ValueError("architecture: num_classes must be >= 2");
    for (int w : arch.hidden_widths) {
        if (w < 1) throw ValueError("architecture: every hidden width must be >= 1");
    }
}

/// (fan_in, fan_out) per affine layer, softmax head included.
inline std::vector<std::pair<int, int>> layer_shapes(const Architecture& arch) {
    std::vector<std::pair<int, int>> shapes;
    int fan_in = arch.input_dim;
    for (int w : arch.hidden_widths) {
        shapes.emplace_back(fan_in, w);
        fan_in = w;
    }
    shapes.emplace_back(fan_in, arch.num_classes);
    return shapes;
}

/// Trainable scalar count: sum of fan_in*fan_out + fan_out over all layers.
inline long long param_count(const Architecture& arch) {
    long long total = 0;
    for (const auto& [fan_in, fan_out] : layer_shapes(arch)) {
        total += static_cast<long long>(fan_in) * fan_out + fan_out;
    }
    return total;
}

inline std::string describe(const Architecture& arch) {
    std::string out = std::to_string(arch.input_dim) + " -> [";
    for (std::size_t i = 0; i < arch.hidden_widths.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(arch.hidden_widths[i]);
    }
    out += "] -> " + std::to_string(arch.num_classes);
    return out;
}

}  // namespace netevo::nn
