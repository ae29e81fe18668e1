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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "core/lbfgs.hpp"
#include "core/model.hpp"
#include "core/train.hpp"
#include "helpers.hpp"

using namespace netevo;
using nn::Activation;
using nn::Architecture;
using nn::DnnModel;

namespace {

DnnModel zero_model(int input_dim, int num_classes) {
    Architecture arch{input_dim, {}, num_classes};
    std::vector<Matrix> weights{Matrix::Zero(input_dim, num_classes)};
    std::vector<Vector> biases{Vector::Zero(num_classes)};
    return nn::make_model(arch, Activation::kRectifier, std::move(weights), std::move(biases));
}

// The fixed (2-4-3) model used for the golden forward check. All entries are
// exactly representable so the expected probabilities are bit-stable.
DnnModel golden_model() {
    Architecture arch{2, {4}, 3};
    Matrix w1(2, 4);
    w1 << 0.25, -0.5, 1.5, 0.125, -1.25, 0.75, -0.375, 2.0;
    Vector b1(4);
    b1 << 0.0625, -0.25, 0.5, -1.0;
    Matrix w2(4, 3);
    w2 << 1.0, -0.75, 0.5, 0.25, 1.25, -1.5, -0.625, 0.375, 0.875, 2.25, -0.125, 0.0625;
    Vector b2(3);
    b2 << -0.5, 0.25, 0.75;
    return nn::make_model(arch, Activation::kRectifier, {w1, w2}, {b1, b2});
}

}  // namespace

TEST_CASE("zero-depth model with zero weights predicts uniform probabilities") {
    const DnnModel model = zero_model(2, 2);
    Matrix x(3, 2);
    x << 1.0, -2.0, 0.5, 4.0, -7.0, 3.0;
    const auto [features, probs] = nn::forward(model, x);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        CHECK(probs(r, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(probs(r, 1) == doctest::Approx(0.5).epsilon(1e-12));
    }
    // Depth 0: the features are the raw input.
    CHECK(features == x);
}

TEST_CASE("identity hidden layer passes nonnegative input through") {
    Architecture arch{3, {3}, 2};
    std::vector<Matrix> weights{Matrix::Identity(3, 3), Matrix::Zero(3, 2)};
    std::vector<Vector> biases{Vector::Zero(3), Vector::Zero(2)};
    const DnnModel model =
        nn::make_model(arch, Activation::kRectifier, std::move(weights), std::move(biases));
    Matrix x(2, 3);
    x << 0.5, 0.0, 2.0, 1.25, 3.5, 0.75;
    const auto result = nn::forward(model, x);
    CHECK(result.hidden_features == x);
}

TEST_CASE("golden forward pass matches the hand-rolled oracle values") {
    const DnnModel model = golden_model();
    Matrix x(1, 2);
    x << 1.5, -2.25;
    const auto result = nn::forward(model, x);
    // Frozen from an independent plain-loop script.
    CHECK(result.class_probs(0, 0) == doctest::Approx(0.0065784629914874019).epsilon(1e-14));
    CHECK(result.class_probs(0, 1) == doctest::Approx(0.0017160946040844351).epsilon(1e-14));
    CHECK(result.class_probs(0, 2) == doctest::Approx(0.99170544240442826).epsilon(1e-14));
    CHECK(result.hidden_features(0, 0) == doctest::Approx(3.25));
    CHECK(result.hidden_features(0, 1) == 0.0);
}

TEST_CASE("forward agrees with the triple-loop oracle on random models") {
    Rng rng(71);
    for (int trial = 0; trial < 25; ++trial) {
        Architecture arch;
        arch.input_dim = rng.uniform_int(1, 6);
        const int depth = rng.uniform_int(0, 3);
        for (int l = 0; l < depth; ++l) arch.hidden_widths.push_back(rng.uniform_int(1, 7));
        arch.num_classes = rng.uniform_int(2, 5);
        const Activation act = trial % 2 == 0 ? Activation::kRectifier : Activation::kSigmoid;
        const DnnModel model = nn::init_model(arch, act, rng);

        std::vector<double> x(static_cast<std::size_t>(arch.input_dim));
        Matrix xm(1, arch.input_dim);
        for (int d = 0; d < arch.input_dim; ++d) {
            x[static_cast<std::size_t>(d)] = rng.uniform(-3.0, 3.0);
            xm(0, d) = x[static_cast<std::size_t>(d)];
        }
        const auto result = nn::forward(model, xm);
        const std::vector<double> expected = testo::oracle_probs(model, x);
        double row_sum = 0.0;
        for (int c = 0; c < arch.num_classes; ++c) {
            CHECK(result.class_probs(0, c) ==
                  doctest::Approx(expected[static_cast<std::size_t>(c)]).epsilon(1e-12));
            CHECK(result.class_probs(0, c) > 0.0);
            CHECK(result.class_probs(0, c) < 1.0);
            row_sum += result.class_probs(0, c);
        }
        CHECK(std::abs(row_sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("forward is pure and rejects mismatched input width") {
    Rng rng(5);
    const DnnModel model = nn::init_model(Architecture{4, {5}, 3}, Activation::kRectifier, rng);
    Matrix x(2, 4);
    x << 1, 2, 3, 4, -1, -2, -3, -4;
    const auto a = nn::forward(model, x);
    const auto b = nn::forward(model, x);
    CHECK(a.class_probs == b.class_probs);
    CHECK(a.hidden_features == b.hidden_features);

    Matrix bad(2, 3);
    bad.setZero();
    CHECK_THROWS_AS(nn::forward(model, bad), ShapeError);
}

TEST_CASE("cross entropy worked examples") {
    Matrix uniform(4, 2);
    uniform.setConstant(0.5);
    CHECK(nn::cross_entropy(uniform, {0, 1, 0, 1}) ==
          doctest::Approx(0.6931471805599453).epsilon(1e-14));

    Matrix onehot(3, 3);
    onehot.setZero();
    onehot(0, 2) = 1.0;
    onehot(1, 0) = 1.0;
    onehot(2, 1) = 1.0;
    CHECK(nn::cross_entropy(onehot, {2, 0, 1}) == doctest::Approx(0.0));

    Matrix single(1, 2);
    single << 0.25, 0.75;
    CHECK(nn::cross_entropy(single, {1}) ==
          doctest::Approx(0.2876820724517809).epsilon(1e-14));
}

TEST_CASE("cross entropy edge cases") {
    Matrix empty(0, 2);
    CHECK_THROWS_AS(nn::cross_entropy(empty, {}), ValueError);

    Matrix zeroed(1, 2);
    zeroed << 0.0, 1.0;
    // Probability 0 at the true class is clamped, not -inf.
    const double loss = nn::cross_entropy(zeroed, {0});
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(-std::log(1e-12)));

    Matrix row(1, 2);
    row << 0.5, 0.5;
    CHECK_THROWS_AS(nn::cross_entropy(row, {2}), ValueError);
    CHECK_THROWS_AS(nn::cross_entropy(row, {0, 1}), ShapeError);
}

TEST_CASE("classification accuracy counts argmax hits") {
    const DnnModel model = golden_model();
    Matrix x(4, 2);
    x << 1.5, -2.25, 1.5, -2.25, 1.5, -2.25, 1.5, -2.25;
    // The golden model predicts class 2 for this row.
    CHECK(nn::classification_accuracy(model, x, {2, 2, 2, 2}) == doctest::Approx(100.0));
    CHECK(nn::classification_accuracy(model, x, {0, 2, 0, 2}) == doctest::Approx(50.0));
    CHECK(nn::classification_accuracy(model, x, {2, 2, 2, 0}) == doctest::Approx(75.0));

    Matrix empty(0, 2);
    CHECK_THROWS_AS(nn::classification_accuracy(model, empty, {}), ValueError);
}

TEST_CASE("argmax ties break to the lowest class index") {
    const DnnModel model = zero_model(3, 4);  // all logits equal -> all probs equal
    Matrix x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    const std::vector<int> predicted = nn::predict(model, x);
    CHECK(predicted[0] == 0);
    CHECK(predicted[1] == 0);
}

TEST_CASE("param_count closed-form examples") {
    CHECK(nn::param_count(Architecture{100, {80, 40, 20}, 4}) == 12224);
    CHECK(nn::param_count(Architecture{100, {}, 4}) == 404);
    CHECK(nn::param_count(Architecture{1, {1}, 2}) == 6);
}

TEST_CASE("param_count equals the flattened parameter vector length") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        Architecture arch;
        arch.input_dim = rng.uniform_int(1, 9);
        const int depth = rng.uniform_int(0, 4);
        for (int l = 0; l < depth; ++l) arch.hidden_widths.push_back(rng.uniform_int(1, 9));
        arch.num_classes = rng.uniform_int(2, 6);
        const DnnModel model = nn::init_model(arch, Activation::kRectifier, rng);
        CHECK(nn::flatten_params(model).size() == nn::param_count(arch));

        // Round trip through the flat layout.
        const DnnModel back = nn::with_params(model, nn::flatten_params(model));
        CHECK(testo::params_equal(model, back));
    }
}

TEST_CASE("quasi-Newton minimizes a convex quadratic to the center") {
    Vector c(3);
    c << 1.0, -2.0, 3.0;
    const nn::Objective objective = [&](const Vector& x, Vector& grad) {
        grad = 2.0 * (x - c);
        return (x - c).squaredNorm();
    };
    nn::TrainConfig cfg;
    cfg.max_iterations = 50;
    cfg.gradient_tolerance = 1e-12;
    Vector init(3);
    init << -4.0, 7.0, 0.5;
    const auto result = nn::quasi_newton_minimize(objective, init, cfg);
    CHECK((result.params - c).norm() <= 1e-8);
    CHECK(result.iterations <= 50);
}

TEST_CASE("quasi-Newton solves the 2-D Rosenbrock benchmark") {
    const nn::Objective objective = [](const Vector& x, Vector& grad) {
        const double a = x(0);
        const double b = x(1);
        grad.resize(2);
        grad(0) = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        grad(1) = 200.0 * (b - a * a);
        const double d = b - a * a;
        return (1.0 - a) * (1.0 - a) + 100.0 * d * d;
    };
    nn::TrainConfig cfg;
    cfg.max_iterations = 1000;
    cfg.gradient_tolerance = 1e-10;
    Vector init(2);
    init << -1.2, 1.0;
    const auto result = nn::quasi_newton_minimize(objective, init, cfg);
    CHECK(std::abs(result.params(0) - 1.0) <= 1e-4);
    CHECK(std::abs(result.params(1) - 1.0) <= 1e-4);
}

TEST_CASE("quasi-Newton with a huge tolerance returns the start point") {
    const nn::Objective objective = [](const Vector& x, Vector& grad) {
        grad = 2.0 * x;
        return x.squaredNorm();
    };
    nn::TrainConfig cfg;
    cfg.max_iterations = 1;
    cfg.gradient_tolerance = 1e9;
    Vector init(2);
    init << 3.0, -4.0;
    const auto result = nn::quasi_newton_minimize(objective, init, cfg);
    CHECK(result.params == init);
    CHECK(result.loss_history.size() == 1);
    CHECK(result.converged);
}

TEST_CASE("quasi-Newton loss history decreases strictly") {
    Rng rng(99);
    const nn::Objective objective = [](const Vector& x, Vector& grad) {
        grad.resize(x.size());
        double f = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            f += 0.25 * std::pow(x(i), 4) + std::cos(x(i)) + 1.0;
            grad(i) = std::pow(x(i), 3) - std::sin(x(i));
        }
        return f;
    };
    Vector init(6);
    for (Eigen::Index i = 0; i < init.size(); ++i) init(i) = rng.uniform(-2.0, 2.0);
    nn::TrainConfig cfg;
    cfg.max_iterations = 40;
    cfg.gradient_tolerance = 0.0;
    const auto result = nn::quasi_newton_minimize(objective, init, cfg);
    REQUIRE(result.loss_history.size() >= 2);
    for (std::size_t i = 1; i < result.loss_history.size(); ++i) {
        CHECK(result.loss_history[i] < result.loss_history[i - 1]);
    }
}

TEST_CASE("quasi-Newton reports line-search failure and keeps the best iterate") {
    // |x| has no descent step from its kink; the search must give up cleanly.
    const nn::Objective objective = [](const Vector& x, Vector& grad) {
        grad.resize(1);
        grad(0) = x(0) >= 0.0 ? 1.0 : -1.0;
        return std::abs(x(0));
    };
    nn::TrainConfig cfg;
    cfg.max_iterations = 20;
    cfg.gradient_tolerance = 0.0;
    Vector init(1);
    init << 0.0;
    const auto result = nn::quasi_newton_minimize(objective, init, cfg);
    CHECK(result.line_search_failed);
    CHECK(result.params(0) == 0.0);
    CHECK(result.loss_history == std::vector<double>{0.0});
}

TEST_CASE("quasi-Newton rejects a non-finite start") {
    const nn::Objective objective = [](const Vector& x, Vector& grad) {
        grad = Vector::Zero(x.size());
        return std::numeric_limits<double>::quiet_NaN();
    };
    nn::TrainConfig cfg;
    Vector init = Vector::Zero(2);
    CHECK_THROWS_AS(nn::quasi_newton_minimize(objective, init, cfg), NumericError);
}

TEST_CASE("cross-entropy gradient matches central finite differences") {
    Rng rng(2024);
    const Architecture arch{5, {8, 6}, 3};
    Matrix x(12, 5);
    std::vector<int> labels(12);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform(-2.0, 2.0);
        labels[static_cast<std::size_t>(r)] = rng.uniform_int(0, 2);
    }

    for (const Activation act : {Activation::kRectifier, Activation::kSigmoid}) {
        const DnnModel like = nn::init_model(arch, act, rng);
        const auto loss_at = [&](const Vector& theta) {
            const DnnModel m = nn::with_params(like, theta);
            return nn::cross_entropy(nn::forward(m, x).class_probs, labels);
        };
        for (int point = 0; point < 20; ++point) {
            // Rectifier kinks within the finite-difference step would poison
            // the numeric estimate; resample until the point is smooth.
            Vector theta(nn::param_count(arch));
            DnnModel m = like;
            do {
                for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = rng.uniform(-0.7, 0.7);
                m = nn::with_params(like, theta);
            } while (act == Activation::kRectifier &&
                     testo::min_abs_preactivation(m, x) < 1e-3);
            const nn::ForwardCache cache = nn::forward_cached(m, x);
            const Matrix dlogits =
                nn::cross_entropy_delta(cache.probs, labels, 1.0 / static_cast<double>(x.rows()));
            const Vector analytic = nn::backward(m, cache, dlogits, Matrix());
            const Vector numeric = testo::central_difference(loss_at, theta, 1e-5);
            CHECK(testo::max_relative_gradient_error(analytic, numeric) <= 1e-4);
        }
    }
}

TEST_CASE("pretraining with zero epochs returns the seeded random initialization") {
    const Architecture arch{4, {3, 2}, 2};
    Matrix x(10, 4);
    Rng fill(3);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = fill.uniform(-1.0, 1.0);
    }
    nn::TrainConfig cfg;
    cfg.pretrain_epochs = 0;

    Rng rng_a(42);
    const DnnModel pretrained = nn::pretrain_stack(x, arch, cfg, rng_a);
    Rng rng_b(42);
    const DnnModel raw = nn::init_model(arch, Activation::kRectifier, rng_b);
    CHECK(testo::params_equal(pretrained, raw));
}

TEST_CASE("pretraining lowers the reconstruction loss of each layer") {
    // 1-D data cloned into two columns; a single width-1 code can capture it.
    Matrix x(40, 2);
    Rng fill(8);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double v = fill.uniform(0.0, 2.0);
        x(r, 0) = v;
        x(r, 1) = v;
    }
    nn::TrainConfig cfg;
    cfg.pretrain_epochs = 25;
    Rng rng(7);
    nn::PretrainTrace trace;
    const DnnModel model =
        nn::pretrain_stack(x, Architecture{2, {1}, 2}, cfg, rng, Activation::kRectifier, &trace);
    REQUIRE(trace.layer_loss_history.size() == 1);
    const auto& history = trace.layer_loss_history[0];
    REQUIRE(history.size() >= 2);
    CHECK(history.back() < history.front());
    for (std::size_t i = 1; i < history.size(); ++i) {
        CHECK(history[i] <= history[i - 1]);
    }
    // Output shapes always match the requested architecture.
    CHECK(model.weights[0].rows() == 2);
    CHECK(model.weights[0].cols() == 1);
    CHECK(model.weights[1].rows() == 1);
    CHECK(model.weights[1].cols() == 2);
}

TEST_CASE("pretraining allows widths beyond the sample count") {
    Matrix x(3, 2);
    x << 0.2, 0.4, 0.1, 0.8, 0.9, 0.3;
    nn::TrainConfig cfg;
    cfg.pretrain_epochs = 5;
    Rng rng(11);
    const DnnModel model = nn::pretrain_stack(x, Architecture{2, {9}, 2}, cfg, rng);
    CHECK(model.weights[0].cols() == 9);
}

TEST_CASE("teacher training reaches high accuracy on separable blobs") {
    const auto blobs = testo::make_blobs(2, 6, 60, 0.4, 21);
    nn::TrainConfig cfg;
    cfg.max_iterations = 200;
    cfg.pretrain_epochs = 10;
    Rng rng(9);
    const DnnModel model =
        nn::train_source_model(blobs, Architecture{6, {8, 4}, 2}, cfg, rng);
    CHECK(nn::classification_accuracy(model, blobs.features, blobs.labels) >= 99.0);
}

TEST_CASE("teacher training rejects single-class data") {
    Matrix x(6, 3);
    x.setRandom();
    const auto ds = data::make_dataset(x, {0, 0, 0, 0, 0, 0});
    nn::TrainConfig cfg;
    Rng rng(1);
    CHECK_THROWS_AS(nn::train_source_model(ds, Architecture{3, {4}, 2}, cfg, rng), ValueError);
}

TEST_CASE("teacher training is bit-for-bit deterministic under a fixed seed") {
    const auto blobs = testo::make_blobs(3, 4, 20, 0.5, 33);
    nn::TrainConfig cfg;
    cfg.max_iterations = 30;
    cfg.pretrain_epochs = 5;
    Rng rng_a(123);
    const DnnModel a = nn::train_source_model(blobs, Architecture{4, {5}, 3}, cfg, rng_a);
    Rng rng_b(123);
    const DnnModel b = nn::train_source_model(blobs, Architecture{4, {5}, 3}, cfg, rng_b);
    CHECK(testo::params_equal(a, b));
}

TEST_CASE("model json round trips losslessly") {
    Rng rng(55);
    const DnnModel model = nn::init_model(Architecture{3, {4, 2}, 3}, Activation::kSigmoid, rng);
    const std::string text = nn::to_json(model);
    const DnnModel back = nn::model_from_json(text);
    CHECK(testo::params_equal(model, back));
    CHECK(back.hidden_activation == Activation::kSigmoid);
    CHECK(nn::to_json(back) == text);

    const auto path = std::filesystem::temp_directory_path() / "netevo_model_roundtrip.json";
    nn::save_json_file(model, path.string());
    const DnnModel from_file = nn::load_json_file(path.string());
    CHECK(testo::params_equal(model, from_file));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(nn::model_from_json("{not json"), ParseError);
    CHECK_THROWS_AS(nn::load_json_file("/nonexistent/model.json"), IoError);
}
