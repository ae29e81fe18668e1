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

#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "core/log.hpp"

namespace netevo::data {

LabeledDataset make_dataset(Matrix features, std::vector<int> labels, int num_classes,
                            DomainTag tag) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw ShapeError("dataset: " + std::to_string(features.rows()) + " feature rows vs " +
                         std::to_string(labels.size()) + " labels");
    }
    int max_label = -1;
    for (int y : labels) {
        if (y < 0) throw ValueError("dataset: negative label");
        max_label = std::max(max_label, y);
    }
    if (num_classes < 0) num_classes = max_label + 1;
    if (max_label >= num_classes) {
        throw ValueError("dataset: label " + std::to_string(max_label) +
                         " outside [0, " + std::to_string(num_classes) + ")");
    }
    if (!features.allFinite()) throw NumericError("dataset: non-finite feature values");
    LabeledDataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.num_classes = num_classes;
    ds.domain_tag = tag;
    return ds;
}

Matrix segment_signal(const std::vector<double>& signal, int seg_len) {
    if (seg_len < 2) throw ValueError("segment_signal: segment length must be >= 2");
    if (static_cast<int>(signal.size()) < seg_len) {
        throw ValueError("segment_signal: signal of " + std::to_string(signal.size()) +
                         " points is shorter than one segment of " + std::to_string(seg_len));
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(signal.size() / seg_len);
    Matrix out(rows, seg_len);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int c = 0; c < seg_len; ++c) {
            out(r, c) = signal[static_cast<std::size_t>(r) * seg_len + c];
        }
    }
    return out;
}

Matrix zscore(const Matrix& X, std::vector<std::string>* warnings) {
    Matrix out(X.rows(), X.cols());
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double mean = X.col(c).mean();
        const double var = (X.col(c).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (sd > 0.0) {
            out.col(c) = (X.col(c).array() - mean) / sd;
        } else {
            out.col(c).setZero();
            const std::string msg =
                "zscore: column " + std::to_string(c) + " has zero variance, set to 0";
            if (warnings != nullptr) warnings->push_back(msg);
            log_warn(msg);
        }
    }
    return out;
}

Matrix minmax(const Matrix& X, std::vector<std::string>* warnings) {
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double lo = X.col(c).minCoeff();
        const double hi = X.col(c).maxCoeff();
        if (hi > lo) {
            out.col(c) = (X.col(c).array() - lo) / (hi - lo);
        } else {
            out.col(c).setConstant(0.5);
            const std::string msg =
                "minmax: column " + std::to_string(c) + " is constant, set to 0.5";
            if (warnings != nullptr) warnings->push_back(msg);
            log_warn(msg);
        }
    }
    return out;
}

namespace {

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<int>& rows) {
    Matrix features(static_cast<Eigen::Index>(rows.size()), ds.dim());
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        features.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
        labels[i] = ds.labels[static_cast<std::size_t>(rows[i])];
    }
    LabeledDataset out = make_dataset(std::move(features), std::move(labels), ds.num_classes,
                                      ds.domain_tag);
    out.class_names = ds.class_names;
    return out;
}

}  // namespace

SplitResult split(const LabeledDataset& ds, double train_fraction, double val_fraction,
                  double test_fraction, Rng& rng) {
    if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0) {
        throw ValueError("split: all fractions must be positive");
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw ValueError("split: fractions must sum to 1");
    }

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.num_classes));
    for (Eigen::Index r = 0; r < ds.rows(); ++r) {
        by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(r)])].push_back(
            static_cast<int>(r));
    }

    std::vector<int> train_rows;
    std::vector<int> val_rows;
    std::vector<int> test_rows;
    for (std::size_t cls = 0; cls < by_class.size(); ++cls) {
        std::vector<int>& members = by_class[cls];
        const int n = static_cast<int>(members.size());
        if (n < 3) {
            throw ValueError("split: class " + std::to_string(cls) + " has " +
                             std::to_string(n) + " samples, need at least 3");
        }
        // Largest-remainder allocation keeps every count within 1 of the exact share.
        const double shares[3] = {train_fraction * n, val_fraction * n, test_fraction * n};
        int counts[3];
        double remainders[3];
        int assigned = 0;
        for (int k = 0; k < 3; ++k) {
            counts[k] = static_cast<int>(std::floor(shares[k]));
            remainders[k] = shares[k] - counts[k];
            assigned += counts[k];
        }
        int order[3] = {0, 1, 2};
        std::stable_sort(order, order + 3,
                         [&](int a, int b) { return remainders[a] > remainders[b]; });
        for (int k = 0; assigned < n; ++k) {
            ++counts[order[k % 3]];
            ++assigned;
        }

        const std::vector<int> perm = rng.permutation(n);
        int pos = 0;
        for (int k = 0; k < counts[0]; ++k) train_rows.push_back(members[perm[pos++]]);
        for (int k = 0; k < counts[1]; ++k) val_rows.push_back(members[perm[pos++]]);
        for (int k = 0; k < counts[2]; ++k) test_rows.push_back(members[perm[pos++]]);
    }

    return SplitResult{take_rows(ds, train_rows), take_rows(ds, val_rows),
                       take_rows(ds, test_rows)};
}

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string body = strip(value);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::size_t start = 0;
    while (start <= body.size()) {
        const std::size_t comma = body.find(',', start);
        const std::string item =
            strip(comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Manifest parse_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("manifest: cannot open '" + path + "'");

    Manifest manifest;
    ManifestClass current;
    bool in_class = false;
    bool saw_segment_length = false;
    std::string line;
    int lineno = 0;

    auto fail = [&](const std::string& what) {
        throw ParseError("manifest " + path + ":" + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;

        if (line == "class {") {
            if (in_class) fail("nested class block");
            in_class = true;
            current = ManifestClass{};
            continue;
        }
        if (line == "}") {
            if (!in_class) fail("unmatched '}'");
            in_class = false;
            manifest.classes.push_back(current);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));

        if (in_class) {
            if (key == "label") {
                try {
                    current.label = std::stoi(value);
                } catch (...) {
                    fail("label must be an integer");
                }
            } else if (key == "name") {
                current.name = value;
            } else if (key == "files") {
                current.files = split_list(value);
            } else {
                fail("unknown class key '" + key + "'");
            }
        } else {
            if (key == "segment_length") {
                try {
                    manifest.segment_length = std::stoi(value);
                } catch (...) {
                    fail("segment_length must be an integer");
                }
                saw_segment_length = true;
            } else if (key == "normalization") {
                if (value == "zscore") {
                    manifest.normalization = Normalization::kZscore;
                } else if (value == "minmax") {
                    manifest.normalization = Normalization::kMinmax;
                } else if (value == "none") {
                    manifest.normalization = Normalization::kNone;
                } else {
                    fail("normalization must be zscore, minmax, or none");
                }
            } else {
                fail("unknown key '" + key + "'");
            }
        }
    }
    if (in_class) throw ParseError("manifest " + path + ": unterminated class block");
    if (!saw_segment_length) throw ParseError("manifest " + path + ": missing segment_length");
    if (manifest.segment_length < 2) {
        throw ParseError("manifest " + path + ": segment_length must be >= 2");
    }
    if (manifest.classes.empty()) throw ParseError("manifest " + path + ": no class blocks");

    std::set<int> labels;
    for (const auto& cls : manifest.classes) {
        if (cls.files.empty()) {
            throw ParseError("manifest " + path + ": class '" + cls.name + "' lists no files");
        }
        labels.insert(cls.label);
    }
    for (int expected = 0; expected < static_cast<int>(manifest.classes.size()); ++expected) {
        if (labels.count(expected) == 0) {
            throw ParseError("manifest " + path + ": class labels must be contiguous from 0 (missing " +
                             std::to_string(expected) + ")");
        }
    }
    return manifest;
}

std::vector<double> read_signal_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("signal file: cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing characters");
            values.push_back(v);
        } catch (...) {
            throw ParseError("signal file " + path + ":" + std::to_string(lineno) +
                             ": not a numeric value: '" + line + "'");
        }
    }
    return values;
}

LabeledDataset load_manifest(const std::string& path, DomainTag tag) {
    const Manifest manifest = parse_manifest(path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    // Classes assembled in ascending label order so the row layout is stable.
    std::vector<ManifestClass> classes = manifest.classes;
    std::sort(classes.begin(), classes.end(),
              [](const ManifestClass& a, const ManifestClass& b) { return a.label < b.label; });

    std::vector<Matrix> blocks;
    std::vector<int> labels;
    std::map<int, std::string> names;
    Eigen::Index total_rows = 0;
    for (const auto& cls : classes) {
        std::vector<double> signal;
        for (const auto& file : cls.files) {
            const std::filesystem::path full = base / file;
            const std::vector<double> part = read_signal_file(full.string());
            signal.insert(signal.end(), part.begin(), part.end());
        }
        if (static_cast<int>(signal.size()) < manifest.segment_length) {
            throw ValueError("manifest " + path + ": class '" + cls.name + "' has " +
                             std::to_string(signal.size()) +
                             " points, fewer than one segment of " +
                             std::to_string(manifest.segment_length));
        }
        Matrix block = segment_signal(signal, manifest.segment_length);
        total_rows += block.rows();
        labels.insert(labels.end(), static_cast<std::size_t>(block.rows()), cls.label);
        blocks.push_back(std::move(block));
        if (!cls.name.empty()) names[cls.label] = cls.name;
    }

    Matrix features(total_rows, manifest.segment_length);
    Eigen::Index row = 0;
    for (const auto& block : blocks) {
        features.middleRows(row, block.rows()) = block;
        row += block.rows();
    }

    switch (manifest.normalization) {
        case Normalization::kZscore: features = zscore(features); break;
        case Normalization::kMinmax: features = minmax(features); break;
        case Normalization::kNone: break;
    }

    LabeledDataset ds = make_dataset(std::move(features), std::move(labels),
                                     static_cast<int>(classes.size()), tag);
    ds.class_names = std::move(names);
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> synth_domain_shift(const SynthConfig& cfg, Rng& rng) {
    if (cfg.dim < 2) throw ValueError("synth: dim must be >= 2");
    if (cfg.num_classes < 2) throw ValueError("synth: num_classes must be >= 2");
    if (cfg.source_per_class < 1 || cfg.target_per_class < 1) {
        throw ValueError("synth: samples per class must be >= 1");
    }

    // Class centers: standard normal draws, rescaled when needed so that the
    // minimum pairwise separation is at least 4 * noise_std.
    Matrix centers(cfg.num_classes, cfg.dim);
    for (int i = 0; i < cfg.num_classes; ++i) {
        for (int d = 0; d < cfg.dim; ++d) centers(i, d) = rng.normal();
    }
    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.num_classes; ++i) {
        for (int j = i + 1; j < cfg.num_classes; ++j) {
            min_sep = std::min(min_sep, (centers.row(i) - centers.row(j)).norm());
        }
    }
    const double required = 4.0 * cfg.noise_std;
    if (min_sep < required && min_sep > 0.0) centers *= required / min_sep;

    auto draw_blobs = [&](int per_class) {
        Matrix features(static_cast<Eigen::Index>(per_class) * cfg.num_classes, cfg.dim);
        std::vector<int> labels(static_cast<std::size_t>(per_class) * cfg.num_classes);
        Eigen::Index row = 0;
        for (int cls = 0; cls < cfg.num_classes; ++cls) {
            for (int k = 0; k < per_class; ++k, ++row) {
                for (int d = 0; d < cfg.dim; ++d) {
                    features(row, d) = centers(cls, d) + rng.normal(0.0, cfg.noise_std);
                }
                labels[static_cast<std::size_t>(row)] = cls;
            }
        }
        return std::make_pair(std::move(features), std::move(labels));
    };

    auto [src_features, src_labels] = draw_blobs(cfg.source_per_class);

    // Shift direction and rotation plane are drawn after the source samples so
    // the source is identical across benchmark variants sharing a seed.
    Vector direction(cfg.dim);
    for (int d = 0; d < cfg.dim; ++d) direction(d) = rng.normal();
    direction.normalize();
    const int axis_a = rng.uniform_int(0, cfg.dim - 1);
    int axis_b = rng.uniform_int(0, cfg.dim - 2);
    if (axis_b >= axis_a) ++axis_b;

    auto [tgt_features, tgt_labels] = draw_blobs(cfg.target_per_class);
    const double theta = cfg.rotation_deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (Eigen::Index r = 0; r < tgt_features.rows(); ++r) {
        const double a = tgt_features(r, axis_a);
        const double b = tgt_features(r, axis_b);
        tgt_features(r, axis_a) = c * a - s * b;
        tgt_features(r, axis_b) = s * a + c * b;
    }
    tgt_features.rowwise() += (cfg.shift_magnitude * direction).transpose();

    LabeledDataset source = make_dataset(std::move(src_features), std::move(src_labels),
                                         cfg.num_classes, DomainTag::kSource);
    LabeledDataset target = make_dataset(std::move(tgt_features), std::move(tgt_labels),
                                         cfg.num_classes, DomainTag::kTarget);
    return {std::move(source), std::move(target)};
}

}  // namespace netevo::data
