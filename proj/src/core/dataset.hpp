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

#include <map>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace netevo::data {

enum class DomainTag { kSource, kTarget };

struct LabeledDataset {
    Matrix features;  // rows = samples
    std::vector<int> labels;
    int num_classes = 0;
    DomainTag domain_tag = DomainTag::kSource;
    std::map<int, std::string> class_names;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

/// Validating constructor; num_classes < 0 means "infer as max label + 1".
LabeledDataset make_dataset(Matrix features, std::vector<int> labels, int num_classes = -1,
                            DomainTag tag = DomainTag::kSource);

/// Reshapes a 1-D signal into floor(len/seg_len) rows of seg_len consecutive
/// points; the trailing remainder is discarded. Errors when the signal is
/// shorter than one segment.
Matrix segment_signal(const std::vector<double>& signal, int seg_len);

/// Per-column (x - mean) / std with population std. Zero-variance columns are
/// set to 0 and reported as a warning.
Matrix zscore(const Matrix& X, std::vector<std::string>* warnings = nullptr);

/// Per-column (x - min) / (max - min) into [0, 1]. Constant columns map to 0.5
/// and are reported as a warning.
Matrix minmax(const Matrix& X, std::vector<std::string>* warnings = nullptr);

struct SplitResult {
    LabeledDataset train;
    LabeledDataset val;
    LabeledDataset test;
};

/// Stratified random split: per class, counts track the exact fractions to
/// within one sample. All three fractions must be positive and sum to 1;
/// every class needs at least 3 samples.
SplitResult split(const LabeledDataset& ds, double train_fraction, double val_fraction,
                  double test_fraction, Rng& rng);

enum class Normalization { kZscore, kMinmax, kNone };

struct ManifestClass {
    int label = 0;
    std::string name;
    std::vector<std::string> files;  // relative to the manifest directory
};

struct Manifest {
    int segment_length = 0;
    Normalization normalization = Normalization::kNone;
    std::vector<ManifestClass> classes;
};

Manifest parse_manifest(const std::string& path);

/// One numeric value per line; '#' starts a comment, blank lines are skipped.
std::vector<double> read_signal_file(const std::string& path);

/// Assembles a dataset from a manifest: per class the signal files are
/// concatenated, segmented, and stacked; the manifest normalization is then
/// applied over the full assembled matrix.
LabeledDataset load_manifest(const std::string& path, DomainTag tag = DomainTag::kSource);

/// Parameters of the synthetic domain-shift benchmark. The defaults are the
/// calibrated desk-scale benchmark: a source-only classifier loses at least
/// five accuracy points on the target while an adapted search can still reach
/// high accuracy.
struct SynthConfig {
    int num_classes = 4;
    int dim = 20;
    int source_per_class = 300;
    int target_per_class = 120;
    double shift_magnitude = 8.0;
    double rotation_deg = 120.0;
    double noise_std = 1.0;
};

/// Gaussian class blobs for the source; the target draws from the same blobs
/// then rotates them in a random coordinate plane and translates them along a
/// random direction. Class centers are scaled so that the minimum pairwise
/// separation is at least 4 * noise_std.
std::pair<LabeledDataset, LabeledDataset> synth_domain_shift(const SynthConfig& cfg, Rng& rng);

}  // namespace netevo::data
