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

#include "core/model.hpp"

namespace netevo::net2net {

struct WidenOptions {
    // Std of the symmetry-breaking noise added to the incoming weights of
    // replicated units. 0 keeps widening an exact function-preserving map.
    double noise_std = 0.0;
};

/// A transformed model plus whether any step lost the exact input-output map
/// (shrinking, depth reduction, or identity insertion under a non-rectifier
/// activation).
struct TransformResult {
    nn::DnnModel model;
    bool approximate = false;
};

/// Grows hidden layer `layer` to new_width by unit replication: incoming
/// columns are copied from their replication source and outgoing rows are
/// split evenly across each replication class, so the network function is
/// unchanged. new_width below the current width keeps a uniformly sampled
/// unit subset instead (not function-preserving).
nn::DnnModel widen_layer(const nn::DnnModel& model, int layer, int new_width, Rng& rng,
                         const WidenOptions& options = {});

/// Same, with an explicit replication map: replication_map[j] is the source
/// unit of new unit j and must equal j for j below the current width.
nn::DnnModel widen_layer_with_map(const nn::DnnModel& model, int layer,
                                  const std::vector<int>& replication_map, Rng& rng,
                                  const WidenOptions& options = {});

/// Inserts an identity layer (unit weight matrix, zero bias) after hidden
/// layer `position`. Exact for the rectifier, whose activations are
/// nonnegative; flagged approximate for the sigmoid.
TransformResult deepen(const nn::DnnModel& model, int position);

/// Maps a teacher onto an arbitrary target architecture: identity layers are
/// appended at the end of the hidden stack while the target is deeper, depth
/// reduction keeps the leading hidden layers and reattaches a freshly
/// initialized softmax head, and per-layer widths are then matched by
/// widening/shrinking. The student always has exactly the target shape.
TransformResult transform_to_architecture(const nn::DnnModel& teacher,
                                          const nn::Architecture& target, Rng& rng,
                                          const WidenOptions& options = {});

}  // namespace netevo::net2net
