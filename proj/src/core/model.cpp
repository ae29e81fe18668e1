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

#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace netevo::nn {

namespace {

Matrix apply_activation(const Matrix& z, Activation activation) {
    if (activation == Activation::kRectifier) {
        return z.cwiseMax(0.0);
    }
    return ((-z.array()).exp() + 1.0).inverse().matrix();
}

// Derivative of the hidden activation expressed through the pre-activation.
Matrix activation_derivative(const Matrix& z, Activation activation) {
    if (activation == Activation::kRectifier) {
        return (z.array() > 0.0).cast<double>().matrix();
    }
    const Eigen::ArrayXXd s = ((-z.array()).exp() + 1.0).inverse();
    return (s * (1.0 - s)).matrix();
}

}  // namespace

void validate(const DnnModel& model) {
    validate(model.arch);
    const auto shapes = layer_shapes(model.arch);
    if (model.weights.size() != shapes.size() || model.biases.size() != shapes.size()) {
        throw ShapeError("model: expected " + std::to_string(shapes.size()) +
                         " layers, got " + std::to_string(model.weights.size()) +
                         " weight matrices and " + std::to_string(model.biases.size()) +
                         " biases");
    }
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const auto [fan_in, fan_out] = shapes[l];
        if (model.weights[l].rows() != fan_in || model.weights[l].cols() != fan_out) {
            throw ShapeError("model: layer " + std::to_string(l) + " weight shape (" +
                             std::to_string(model.weights[l].rows()) + "x" +
                             std::to_string(model.weights[l].cols()) + ") does not match (" +
                             std::to_string(fan_in) + "x" + std::to_string(fan_out) + ")");
        }
        if (model.biases[l].size() != fan_out) {
            throw ShapeError("model: layer " + std::to_string(l) + " bias length mismatch");
        }
        if (!model.weights[l].allFinite() || !model.biases[l].allFinite()) {
            throw NumericError("model: non-finite parameter in layer " + std::to_string(l));
        }
    }
}

DnnModel make_model(Architecture arch, Activation activation, std::vector<Matrix> weights,
                    std::vector<Vector> biases) {
    DnnModel model{std::move(arch), activation, std::move(weights), std::move(biases)};
    validate(model);
    return model;
}

DnnModel init_model(const Architecture& arch, Activation activation, Rng& rng) {
    validate(arch);
    DnnModel model;
    model.arch = arch;
    model.hidden_activation = activation;
    for (const auto& [fan_in, fan_out] : layer_shapes(arch)) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (int r = 0; r < fan_in; ++r) {
            for (int c = 0; c < fan_out; ++c) {
                w(r, c) = rng.uniform(-bound, bound);
            }
        }
        model.weights.push_back(std::move(w));
        model.biases.push_back(Vector::Zero(fan_out));
    }
    return model;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double maxv = logits.row(r).maxCoeff();
        Eigen::ArrayXd e = (logits.row(r).array() - maxv).exp();
        probs.row(r) = (e / e.sum()).matrix();
    }
    return probs;
}

ForwardCache forward_cached(const DnnModel& model, const Matrix& X) {
    if (X.cols() != model.arch.input_dim) {
        throw ShapeError("forward: input has " + std::to_string(X.cols()) +
                         " columns, model expects " + std::to_string(model.arch.input_dim));
    }
    ForwardCache cache;
    cache.activations.reserve(model.depth() + 1);
    cache.preactivations.reserve(model.depth());
    cache.activations.push_back(X);
    for (int l = 0; l < model.depth(); ++l) {
        Matrix z = (cache.activations.back() * model.weights[l]).rowwise() +
                   model.biases[l].transpose();
        cache.activations.push_back(apply_activation(z, model.hidden_activation));
        cache.preactivations.push_back(std::move(z));
    }
    cache.logits = (cache.activations.back() * model.weights.back()).rowwise() +
                   model.biases.back().transpose();
    cache.probs = softmax_rows(cache.logits);
    return cache;
}

ForwardResult forward(const DnnModel& model, const Matrix& X) {
    ForwardCache cache = forward_cached(model, X);
    return ForwardResult{std::move(cache.activations.back()), std::move(cache.probs)};
}

Vector backward(const DnnModel& model, const ForwardCache& cache, const Matrix& dlogits,
                const Matrix& dfeatures) {
    const int depth = model.depth();
    std::vector<Matrix> dw(model.layer_count());
    std::vector<Vector> db(model.layer_count());

    dw[depth] = cache.activations[depth].transpose() * dlogits;
    db[depth] = dlogits.colwise().sum();

    Matrix dact = dlogits * model.weights[depth].transpose();
    if (dfeatures.size() > 0) dact += dfeatures;

    for (int l = depth - 1; l >= 0; --l) {
        const Matrix dz =
            dact.cwiseProduct(activation_derivative(cache.preactivations[l], model.hidden_activation));
        dw[l] = cache.activations[l].transpose() * dz;
        db[l] = dz.colwise().sum();
        if (l > 0) dact = dz * model.weights[l].transpose();
    }

    Vector grad(param_count(model.arch));
    Eigen::Index pos = 0;
    for (int l = 0; l < model.layer_count(); ++l) {
        for (Eigen::Index r = 0; r < dw[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < dw[l].cols(); ++c) {
                grad(pos++) = dw[l](r, c);
            }
        }
        grad.segment(pos, db[l].size()) = db[l];
        pos += db[l].size();
    }
    return grad;
}

double cross_entropy(const Matrix& class_probs, const std::vector<int>& labels) {
    if (class_probs.rows() == 0) throw ValueError("cross_entropy: empty batch");
    if (static_cast<std::size_t>(class_probs.rows()) != labels.size()) {
        throw ShapeError("cross_entropy: " + std::to_string(class_probs.rows()) +
                         " probability rows vs " + std::to_string(labels.size()) + " labels");
    }
    constexpr double kEps = 1e-12;
    double total = 0.0;
    for (Eigen::Index r = 0; r < class_probs.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= class_probs.cols()) {
            throw ValueError("cross_entropy: label " + std::to_string(y) + " out of range");
        }
        total -= std::log(std::max(class_probs(r, y), kEps));
    }
    return total / static_cast<double>(class_probs.rows());
}

Matrix cross_entropy_delta(const Matrix& probs, const std::vector<int>& labels, double scale) {
    Matrix delta = probs * scale;
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        delta(r, labels[static_cast<std::size_t>(r)]) -= scale;
    }
    return delta;
}

std::vector<int> predict(const DnnModel& model, const Matrix& X) {
    const Matrix probs = forward(model, X).class_probs;
    std::vector<int> out(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        int best = 0;
        for (Eigen::Index c = 1; c < probs.cols(); ++c) {
            if (probs(r, c) > probs(r, best)) best = static_cast<int>(c);
        }
        out[static_cast<std::size_t>(r)] = best;
    }
    return out;
}

double classification_accuracy(const DnnModel& model, const Matrix& X,
                               const std::vector<int>& labels) {
    if (X.rows() == 0) throw ValueError("classification_accuracy: empty dataset");
    if (static_cast<std::size_t>(X.rows()) != labels.size()) {
        throw ShapeError("classification_accuracy: rows vs labels mismatch");
    }
    const std::vector<int> predicted = predict(model, X);
    long long correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predicted[i] == labels[i]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

Vector flatten_params(const DnnModel& model) {
    Vector theta(param_count(model.arch));
    Eigen::Index pos = 0;
    for (int l = 0; l < model.layer_count(); ++l) {
        const Matrix& w = model.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                theta(pos++) = w(r, c);
            }
        }
        theta.segment(pos, model.biases[l].size()) = model.biases[l];
        pos += model.biases[l].size();
    }
    return theta;
}

DnnModel with_params(const DnnModel& like, const Vector& theta) {
    if (theta.size() != param_count(like.arch)) {
        throw ShapeError("with_params: expected " + std::to_string(param_count(like.arch)) +
                         " parameters, got " + std::to_string(theta.size()));
    }
    DnnModel model;
    model.arch = like.arch;
    model.hidden_activation = like.hidden_activation;
    Eigen::Index pos = 0;
    for (const auto& [fan_in, fan_out] : layer_shapes(like.arch)) {
        Matrix w(fan_in, fan_out);
        for (int r = 0; r < fan_in; ++r) {
            for (int c = 0; c < fan_out; ++c) {
                w(r, c) = theta(pos++);
            }
        }
        model.weights.push_back(std::move(w));
        model.biases.push_back(theta.segment(pos, fan_out));
        pos += fan_out;
    }
    return model;
}

namespace {

const char* activation_name(Activation activation) {
    return activation == Activation::kRectifier ? "rectifier" : "sigmoid";
}

Activation activation_from_name(const std::string& name) {
    if (name == "rectifier") return Activation::kRectifier;
    if (name == "sigmoid") return Activation::kSigmoid;
    throw ParseError("model json: unknown activation '" + name + "'");
}

}  // namespace

std::string to_json(const DnnModel& model) {
    nlohmann::json doc;
    doc["arch"] = {{"input_dim", model.arch.input_dim},
                   {"hidden_widths", model.arch.hidden_widths},
                   {"num_classes", model.arch.num_classes}};
    doc["activation"] = activation_name(model.hidden_activation);
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (int l = 0; l < model.layer_count(); ++l) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) {
                row.push_back(model.weights[l](r, c));
            }
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
        nlohmann::json b = nlohmann::json::array();
        for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) {
            b.push_back(model.biases[l](i));
        }
        biases.push_back(std::move(b));
    }
    doc["weights"] = std::move(weights);
    doc["biases"] = std::move(biases);
    return doc.dump();
}

DnnModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model json: ") + e.what());
    }
    try {
        Architecture arch;
        arch.input_dim = doc.at("arch").at("input_dim").get<int>();
        arch.hidden_widths = doc.at("arch").at("hidden_widths").get<std::vector<int>>();
        arch.num_classes = doc.at("arch").at("num_classes").get<int>();
        const Activation activation = activation_from_name(doc.at("activation").get<std::string>());
        std::vector<Matrix> weights;
        std::vector<Vector> biases;
        for (const auto& layer : doc.at("weights")) {
            const std::size_t rows = layer.size();
            const std::size_t cols = rows > 0 ? layer.at(0).size() : 0;
            Matrix w(rows, cols);
            for (std::size_t r = 0; r < rows; ++r) {
                if (layer.at(r).size() != cols) throw ParseError("model json: ragged weight rows");
                for (std::size_t c = 0; c < cols; ++c) {
                    w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        layer.at(r).at(c).get<double>();
                }
            }
            weights.push_back(std::move(w));
        }
        for (const auto& layer : doc.at("biases")) {
            Vector b(layer.size());
            for (std::size_t i = 0; i < layer.size(); ++i) {
                b(static_cast<Eigen::Index>(i)) = layer.at(i).get<double>();
            }
            biases.push_back(std::move(b));
        }
        return make_model(std::move(arch), activation, std::move(weights), std::move(biases));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model json: ") + e.what());
    }
}

void save_json_file(const DnnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_json(model) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

DnnModel load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace netevo::nn
