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

#include "core/domain_adapt.hpp"

#include <cmath>

namespace netevo::adapt {

void validate(const AdaptConfig& cfg) {
    if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
        throw ValueError("adapt config: gamma must be a finite value >= 0");
    }
    if (cfg.finetune_iters < 1) throw ValueError("adapt config: finetune_iters must be >= 1");
}

namespace {

struct ClassStats {
    std::vector<int> count;   // per class
    Matrix mean;              // num_classes x feature dim, zero rows for empty classes
};

ClassStats class_means(const Matrix& features, const std::vector<int>& labels, int num_classes) {
    ClassStats stats;
    stats.count.assign(static_cast<std::size_t>(num_classes), 0);
    stats.mean = Matrix::Zero(num_classes, features.cols());
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= num_classes) {
            throw ValueError("classwise_mmd: label " + std::to_string(y) + " out of range");
        }
        stats.mean.row(y) += features.row(r);
        ++stats.count[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < num_classes; ++c) {
        if (stats.count[static_cast<std::size_t>(c)] > 0) {
            stats.mean.row(c) /= static_cast<double>(stats.count[static_cast<std::size_t>(c)]);
        }
    }
    return stats;
}

void check_mmd_inputs(const Matrix& src_features, const std::vector<int>& src_labels,
                      const Matrix& tgt_features, const std::vector<int>& tgt_labels) {
    if (src_features.cols() != tgt_features.cols()) {
        throw ShapeError("classwise_mmd: feature dimensions differ (" +
                         std::to_string(src_features.cols()) + " vs " +
                         std::to_string(tgt_features.cols()) + ")");
    }
    if (static_cast<std::size_t>(src_features.rows()) != src_labels.size() ||
        static_cast<std::size_t>(tgt_features.rows()) != tgt_labels.size()) {
        throw ShapeError("classwise_mmd: feature rows vs label count mismatch");
    }
}

}  // namespace

double classwise_mmd(const Matrix& src_features, const std::vector<int>& src_labels,
                     const Matrix& tgt_features, const std::vector<int>& tgt_labels,
                     int num_classes) {
    check_mmd_inputs(src_features, src_labels, tgt_features, tgt_labels);
    const ClassStats src = class_means(src_features, src_labels, num_classes);
    const ClassStats tgt = class_means(tgt_features, tgt_labels, num_classes);
    double total = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        if (src.count[static_cast<std::size_t>(c)] == 0 ||
            tgt.count[static_cast<std::size_t>(c)] == 0) {
            continue;
        }
        total += (src.mean.row(c) - tgt.mean.row(c)).squaredNorm();
    }
    return total;
}

namespace {

// Value and per-sample feature gradients of the class-conditional discrepancy.
double classwise_mmd_grad(const Matrix& src_features, const std::vector<int>& src_labels,
                          const Matrix& tgt_features, const std::vector<int>& tgt_labels,
                          int num_classes, Matrix& d_src, Matrix& d_tgt) {
    const ClassStats src = class_means(src_features, src_labels, num_classes);
    const ClassStats tgt = class_means(tgt_features, tgt_labels, num_classes);

    double total = 0.0;
    Matrix diff = Matrix::Zero(num_classes, src_features.cols());
    std::vector<bool> active(static_cast<std::size_t>(num_classes), false);
    for (int c = 0; c < num_classes; ++c) {
        if (src.count[static_cast<std::size_t>(c)] == 0 ||
            tgt.count[static_cast<std::size_t>(c)] == 0) {
            continue;
        }
        active[static_cast<std::size_t>(c)] = true;
        diff.row(c) = src.mean.row(c) - tgt.mean.row(c);
        total += diff.row(c).squaredNorm();
    }

    d_src = Matrix::Zero(src_features.rows(), src_features.cols());
    d_tgt = Matrix::Zero(tgt_features.rows(), tgt_features.cols());
    for (Eigen::Index r = 0; r < src_features.rows(); ++r) {
        const int y = src_labels[static_cast<std::size_t>(r)];
        if (!active[static_cast<std::size_t>(y)]) continue;
        d_src.row(r) = 2.0 / src.count[static_cast<std::size_t>(y)] * diff.row(y);
    }
    for (Eigen::Index r = 0; r < tgt_features.rows(); ++r) {
        const int y = tgt_labels[static_cast<std::size_t>(r)];
        if (!active[static_cast<std::size_t>(y)]) continue;
        d_tgt.row(r) = -2.0 / tgt.count[static_cast<std::size_t>(y)] * diff.row(y);
    }
    return total;
}

}  // namespace

CostEval combined_cost_at(const nn::DnnModel& like, const Vector& theta,
                          const data::LabeledDataset& source,
                          const data::LabeledDataset& target_train, const AdaptConfig& cfg) {
    validate(cfg);
    if (source.num_classes != like.arch.num_classes ||
        target_train.num_classes != like.arch.num_classes) {
        throw ShapeError("combined_cost: class count mismatch between model and datasets");
    }
    if (source.dim() != like.arch.input_dim || target_train.dim() != like.arch.input_dim) {
        throw ShapeError("combined_cost: feature dimension mismatch");
    }

    const nn::DnnModel model = nn::with_params(like, theta);
    const nn::ForwardCache src_cache = nn::forward_cached(model, source.features);
    const nn::ForwardCache tgt_cache = nn::forward_cached(model, target_train.features);

    const bool use_src = cfg.classification_scope != Scope::kTargetOnly;
    const bool use_tgt = cfg.classification_scope != Scope::kSourceOnly;

    double n_classification = 0.0;
    if (use_src) n_classification += static_cast<double>(source.rows());
    if (use_tgt) n_classification += static_cast<double>(target_train.rows());
    if (n_classification == 0.0) throw ValueError("combined_cost: empty classification scope");
    const double scale = 1.0 / n_classification;

    double value = 0.0;
    Matrix src_dlogits;
    Matrix tgt_dlogits;
    if (use_src) {
        value += nn::cross_entropy(src_cache.probs, source.labels) *
                 (static_cast<double>(source.rows()) * scale);
        src_dlogits = nn::cross_entropy_delta(src_cache.probs, source.labels, scale);
    } else {
        src_dlogits = Matrix::Zero(source.rows(), like.arch.num_classes);
    }
    if (use_tgt) {
        value += nn::cross_entropy(tgt_cache.probs, target_train.labels) *
                 (static_cast<double>(target_train.rows()) * scale);
        tgt_dlogits = nn::cross_entropy_delta(tgt_cache.probs, target_train.labels, scale);
    } else {
        tgt_dlogits = Matrix::Zero(target_train.rows(), like.arch.num_classes);
    }

    Matrix src_dfeat;
    Matrix tgt_dfeat;
    if (cfg.gamma > 0.0) {
        const double mmd = classwise_mmd_grad(
            src_cache.activations.back(), source.labels, tgt_cache.activations.back(),
            target_train.labels, like.arch.num_classes, src_dfeat, tgt_dfeat);
        value += cfg.gamma * mmd;
        src_dfeat *= cfg.gamma;
        tgt_dfeat *= cfg.gamma;
        if (model.depth() == 0) {
            // Features are the raw inputs; the discrepancy term is a constant.
            src_dfeat.resize(0, 0);
            tgt_dfeat.resize(0, 0);
        }
    }

    CostEval eval;
    eval.value = value;
    eval.gradient = nn::backward(model, src_cache, src_dlogits, src_dfeat);
    eval.gradient += nn::backward(model, tgt_cache, tgt_dlogits, tgt_dfeat);
    return eval;
}

CostEval combined_cost(const nn::DnnModel& model, const data::LabeledDataset& source,
                       const data::LabeledDataset& target_train, const AdaptConfig& cfg) {
    return combined_cost_at(model, nn::flatten_params(model), source, target_train, cfg);
}

FinetuneResult finetune(const nn::DnnModel& model, const data::LabeledDataset& source,
                        const data::LabeledDataset& target_train, const AdaptConfig& cfg,
                        const nn::TrainConfig& optimizer) {
    validate(cfg);
    nn::validate(model);

    nn::TrainConfig opt = optimizer;
    opt.max_iterations = cfg.finetune_iters;

    const nn::Objective objective = [&](const Vector& theta, Vector& grad) {
        CostEval eval = combined_cost_at(model, theta, source, target_train, cfg);
        grad = std::move(eval.gradient);
        return eval.value;
    };

    const nn::MinimizeResult fit =
        quasi_newton_minimize(objective, nn::flatten_params(model), opt);
    return FinetuneResult{nn::with_params(model, fit.params), fit.loss_history, fit.converged,
                          fit.line_search_failed};
}

}  // namespace netevo::adapt
