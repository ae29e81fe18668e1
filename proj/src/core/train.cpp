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

#include "core/train.hpp"

#include <cmath>

namespace netevo::nn {

namespace {

Matrix activate(const Matrix& z, Activation activation) {
    if (activation == Activation::kRectifier) return z.cwiseMax(0.0);
    return ((-z.array()).exp() + 1.0).inverse().matrix();
}

Matrix activate_derivative(const Matrix& z, Activation activation) {
    if (activation == Activation::kRectifier) {
        return (z.array() > 0.0).cast<double>().matrix();
    }
    const Eigen::ArrayXXd s = ((-z.array()).exp() + 1.0).inverse();
    return (s * (1.0 - s)).matrix();
}

// Tied-weight autoencoder objective over theta = (W row-major, encoder bias,
// decoder bias). code = act(Xin W + b), recon = code W^T + c, loss = mean
// squared entry-wise reconstruction error against the clean input.
class AutoencoderObjective {
public:
    AutoencoderObjective(const Matrix& clean, const Matrix& corrupted, int width,
                         Activation activation)
        : clean_(clean), corrupted_(corrupted), width_(width), activation_(activation) {}

    Eigen::Index num_params() const {
        return clean_.cols() * width_ + width_ + clean_.cols();
    }

    double operator()(const Vector& theta, Vector& grad) const {
        const Eigen::Index dim = clean_.cols();
        Matrix w(dim, width_);
        Eigen::Index pos = 0;
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (int c = 0; c < width_; ++c) w(r, c) = theta(pos++);
        }
        const Vector b = theta.segment(pos, width_);
        pos += width_;
        const Vector c = theta.segment(pos, dim);

        const Matrix z = (corrupted_ * w).rowwise() + b.transpose();
        const Matrix code = activate(z, activation_);
        const Matrix recon = (code * w.transpose()).rowwise() + c.transpose();

        const double scale = 1.0 / static_cast<double>(clean_.rows() * clean_.cols());
        const Matrix diff = recon - clean_;
        const double loss = scale * diff.squaredNorm();

        const Matrix drecon = 2.0 * scale * diff;
        // W appears on both sides of the tied autoencoder.
        Matrix dw = drecon.transpose() * code;
        const Matrix dcode = drecon * w;
        const Matrix dz = dcode.cwiseProduct(activate_derivative(z, activation_));
        dw += corrupted_.transpose() * dz;

        grad.resize(theta.size());
        pos = 0;
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (int k = 0; k < width_; ++k) grad(pos++) = dw(r, k);
        }
        grad.segment(pos, width_) = dz.colwise().sum();
        pos += width_;
        grad.segment(pos, dim) = drecon.colwise().sum();
        return loss;
    }

private:
    const Matrix& clean_;
    const Matrix& corrupted_;
    int width_;
    Activation activation_;
};

}  // namespace

DnnModel pretrain_stack(const Matrix& X, const Architecture& arch, const TrainConfig& cfg,
                        Rng& rng, Activation activation, PretrainTrace* trace) {
    validate(cfg);
    if (X.rows() == 0) throw ValueError("pretrain_stack: empty input");
    DnnModel model = init_model(arch, activation, rng);
    if (cfg.pretrain_epochs == 0) return model;

    Matrix codes = X;
    for (int layer = 0; layer < model.depth(); ++layer) {
        Matrix corrupted = codes;
        if (cfg.pretrain_noise > 0.0) {
            // Masking corruption drawn once per layer; the objective stays fixed
            // during optimization so its loss history is monotone.
            for (Eigen::Index r = 0; r < corrupted.rows(); ++r) {
                for (Eigen::Index c = 0; c < corrupted.cols(); ++c) {
                    if (rng.uniform() < cfg.pretrain_noise) corrupted(r, c) = 0.0;
                }
            }
        }

        const int width = arch.hidden_widths[static_cast<std::size_t>(layer)];
        AutoencoderObjective objective(codes, corrupted, width, activation);

        Vector theta(objective.num_params());
        Eigen::Index pos = 0;
        for (Eigen::Index r = 0; r < codes.cols(); ++r) {
            for (int c = 0; c < width; ++c) theta(pos++) = model.weights[layer](r, c);
        }
        theta.segment(pos, width) = model.biases[layer];
        pos += width;
        theta.segment(pos, codes.cols()).setZero();  // decoder bias

        TrainConfig layer_cfg = cfg;
        layer_cfg.max_iterations = cfg.pretrain_epochs;
        const MinimizeResult fit = quasi_newton_minimize(
            [&objective](const Vector& t, Vector& g) { return objective(t, g); }, theta,
            layer_cfg);

        pos = 0;
        for (Eigen::Index r = 0; r < codes.cols(); ++r) {
            for (int c = 0; c < width; ++c) model.weights[layer](r, c) = fit.params(pos++);
        }
        model.biases[layer] = fit.params.segment(pos, width);
        if (trace != nullptr) trace->layer_loss_history.push_back(fit.loss_history);

        codes = activate((codes * model.weights[layer]).rowwise() +
                             model.biases[layer].transpose(),
                         activation);
    }
    return model;
}

DnnModel train_source_model(const data::LabeledDataset& source, const Architecture& arch,
                            const TrainConfig& cfg, Rng& rng, Activation activation,
                            std::vector<double>* loss_history) {
    validate(cfg);
    if (source.rows() == 0) throw ValueError("train_source_model: empty dataset");
    if (source.num_classes < 2) {
        throw ValueError("train_source_model: dataset has " +
                         std::to_string(source.num_classes) + " classes, need at least 2");
    }
    if (arch.num_classes != source.num_classes) {
        throw ShapeError("train_source_model: architecture expects " +
                         std::to_string(arch.num_classes) + " classes, dataset has " +
                         std::to_string(source.num_classes));
    }
    if (source.dim() != arch.input_dim) {
        throw ShapeError("train_source_model: architecture expects input_dim " +
                         std::to_string(arch.input_dim) + ", dataset has " +
                         std::to_string(source.dim()));
    }

    DnnModel model = pretrain_stack(source.features, arch, cfg, rng, activation);

    const double scale = 1.0 / static_cast<double>(source.rows());
    const Objective objective = [&](const Vector& theta, Vector& grad) {
        const DnnModel candidate = with_params(model, theta);
        const ForwardCache cache = forward_cached(candidate, source.features);
        const double loss = cross_entropy(cache.probs, source.labels);
        const Matrix dlogits = cross_entropy_delta(cache.probs, source.labels, scale);
        grad = backward(candidate, cache, dlogits, Matrix());
        return loss;
    };

    const MinimizeResult fit = quasi_newton_minimize(objective, flatten_params(model), cfg);
    if (loss_history != nullptr) *loss_history = fit.loss_history;
    return with_params(model, fit.params);
}

}  // namespace netevo::nn
