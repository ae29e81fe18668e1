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

#include "core/net2net.hpp"
#include "helpers.hpp"

using namespace netevo;
using nn::Activation;
using nn::Architecture;
using nn::DnnModel;

namespace {

Matrix random_inputs(int rows, int cols, Rng& rng, double lo = -2.0, double hi = 2.0) {
    Matrix x(rows, cols);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform(lo, hi);
    }
    return x;
}

double max_prob_deviation(const DnnModel& a, const DnnModel& b, const Matrix& x) {
    const Matrix pa = nn::forward(a, x).class_probs;
    const Matrix pb = nn::forward(b, x).class_probs;
    return (pa - pb).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("widening replicates columns and splits outgoing rows") {
    // input 2 -> hidden 2 (the layer widened) -> hidden 1 -> softmax over 2.
    Architecture arch{2, {2, 1}, 2};
    Matrix w0(2, 2);
    w0 << 1.0, 2.0, 3.0, 4.0;
    Vector b0 = Vector::Zero(2);
    Matrix w1(2, 1);
    w1 << 1.0, 1.0;
    Vector b1 = Vector::Zero(1);
    Matrix w2(1, 2);
    w2 << 0.75, -0.5;
    Vector b2 = Vector::Zero(2);
    const DnnModel model =
        nn::make_model(arch, Activation::kRectifier, {w0, w1, w2}, {b0, b1, b2});

    Rng rng(1);
    // Unit 2 replicates unit 0; the class of unit 0 now has two members.
    const DnnModel wide = net2net::widen_layer_with_map(model, 0, {0, 1, 0}, rng);

    CHECK(wide.arch.hidden_widths[0] == 3);
    CHECK(wide.weights[0].col(0) == w0.col(0));
    CHECK(wide.weights[0].col(1) == w0.col(1));
    CHECK(wide.weights[0].col(2) == w0.col(0));
    CHECK(wide.weights[1](0, 0) == doctest::Approx(0.5));
    CHECK(wide.weights[1](1, 0) == doctest::Approx(1.0));
    CHECK(wide.weights[1](2, 0) == doctest::Approx(0.5));

    Rng probe(2);
    const Matrix x = random_inputs(50, 2, probe);
    CHECK(max_prob_deviation(model, wide, x) <= 1e-12);
}

TEST_CASE("widening to the current width returns the model unchanged") {
    Rng rng(3);
    const DnnModel model = nn::init_model(Architecture{3, {4}, 2}, Activation::kRectifier, rng);
    const DnnModel same = net2net::widen_layer(model, 0, 4, rng);
    CHECK(testo::params_equal(model, same));
}

TEST_CASE("shrinking keeps a unit subset with the right shapes") {
    Rng rng(4);
    const DnnModel model = nn::init_model(Architecture{5, {4, 3}, 2}, Activation::kRectifier, rng);
    const DnnModel narrow = net2net::widen_layer(model, 0, 2, rng);
    CHECK(narrow.arch.hidden_widths[0] == 2);
    CHECK(narrow.weights[0].cols() == 2);
    CHECK(narrow.weights[1].rows() == 2);
    CHECK(narrow.weights[1].cols() == 3);
}

TEST_CASE("widen validates its arguments") {
    Rng rng(5);
    const DnnModel model = nn::init_model(Architecture{3, {4}, 2}, Activation::kRectifier, rng);
    CHECK_THROWS_AS(net2net::widen_layer(model, 1, 6, rng), ValueError);
    CHECK_THROWS_AS(net2net::widen_layer(model, -1, 6, rng), ValueError);
    CHECK_THROWS_AS(net2net::widen_layer(model, 0, 0, rng), ValueError);
    // Replication maps must keep the original units in place.
    CHECK_THROWS_AS(net2net::widen_layer_with_map(model, 0, {0, 1, 0, 3, 1}, rng), ValueError);
    CHECK_THROWS_AS(net2net::widen_layer_with_map(model, 0, {0, 1, 2, 3, 9}, rng), ValueError);
}

TEST_CASE("replication classes conserve outgoing weight sums") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const int old_width = rng.uniform_int(2, 6);
        const int new_width = old_width + rng.uniform_int(1, 8);
        Architecture arch{rng.uniform_int(2, 5), {old_width}, rng.uniform_int(2, 4)};
        const DnnModel model = nn::init_model(arch, Activation::kRectifier, rng);

        std::vector<int> map(static_cast<std::size_t>(new_width));
        for (int j = 0; j < old_width; ++j) map[static_cast<std::size_t>(j)] = j;
        for (int j = old_width; j < new_width; ++j) {
            map[static_cast<std::size_t>(j)] = rng.uniform_int(0, old_width - 1);
        }
        const DnnModel wide = net2net::widen_layer_with_map(model, 0, map, rng);

        for (Eigen::Index k = 0; k < model.weights[1].cols(); ++k) {
            for (int src = 0; src < old_width; ++src) {
                double sum = 0.0;
                for (int j = 0; j < new_width; ++j) {
                    if (map[static_cast<std::size_t>(j)] == src) sum += wide.weights[1](j, k);
                }
                const double expected = model.weights[1](src, k);
                CHECK(std::abs(sum - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
            }
        }
    }
}

TEST_CASE("identity-layer insertion preserves rectifier outputs") {
    Rng rng(7);
    const DnnModel model =
        nn::init_model(Architecture{4, {6, 3}, 3}, Activation::kRectifier, rng);
    const auto deeper = net2net::deepen(model, 1);
    CHECK_FALSE(deeper.approximate);
    CHECK(deeper.model.depth() == 3);
    CHECK(deeper.model.arch.hidden_widths == std::vector<int>{6, 3, 3});

    const Matrix x = random_inputs(100, 4, rng);
    CHECK(max_prob_deviation(model, deeper.model, x) <= 1e-12);

    // Two consecutive insertions still preserve the function.
    const auto deeper2 = net2net::deepen(deeper.model, 0);
    CHECK(deeper2.model.depth() == 4);
    CHECK(max_prob_deviation(model, deeper2.model, x) <= 1e-12);
}

TEST_CASE("identity-layer insertion under the sigmoid is flagged approximate") {
    Rng rng(8);
    const DnnModel model = nn::init_model(Architecture{3, {5}, 2}, Activation::kSigmoid, rng);
    const auto deeper = net2net::deepen(model, 0);
    CHECK(deeper.approximate);
    const Matrix x = random_inputs(40, 3, rng);
    CHECK(max_prob_deviation(model, deeper.model, x) > 1e-6);
}

TEST_CASE("transform onto the teacher architecture is the identity") {
    Rng rng(9);
    const DnnModel teacher =
        nn::init_model(Architecture{6, {7, 4}, 3}, Activation::kRectifier, rng);
    const auto student = net2net::transform_to_architecture(teacher, teacher.arch, rng);
    CHECK_FALSE(student.approximate);
    CHECK(testo::params_equal(teacher, student.model));
}

TEST_CASE("growing transforms preserve the teacher function") {
    Rng rng(10);
    const DnnModel teacher =
        nn::init_model(Architecture{10, {8, 6, 4}, 3}, Activation::kRectifier, rng);
    const Architecture target{10, {12, 9, 6, 6}, 3};
    const auto student = net2net::transform_to_architecture(teacher, target, rng);
    CHECK_FALSE(student.approximate);
    CHECK(student.model.arch == target);

    const Matrix x = random_inputs(200, 10, rng);
    const Matrix pt = nn::forward(teacher, x).class_probs;
    const Matrix ps = nn::forward(student.model, x).class_probs;
    const double scale = 1.0 + pt.cwiseAbs().maxCoeff();
    CHECK((pt - ps).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("depth-reducing transforms have the target shape and are approximate") {
    Rng rng(11);
    const DnnModel teacher =
        nn::init_model(Architecture{10, {8, 6, 4}, 3}, Activation::kRectifier, rng);
    const Architecture target{10, {10}, 3};
    const auto student = net2net::transform_to_architecture(teacher, target, rng);
    CHECK(student.approximate);
    CHECK(student.model.arch == target);
    nn::validate(student.model);
}

TEST_CASE("transform rejects incompatible shapes") {
    Rng rng(12);
    const DnnModel teacher = nn::init_model(Architecture{5, {4}, 3}, Activation::kRectifier, rng);
    CHECK_THROWS_AS(
        net2net::transform_to_architecture(teacher, Architecture{6, {4}, 3}, rng), ShapeError);
    CHECK_THROWS_AS(
        net2net::transform_to_architecture(teacher, Architecture{5, {4}, 2}, rng), ShapeError);
}

TEST_CASE("random non-shrinking transforms stay within the preservation bound") {
    Rng rng(13);
    for (int trial = 0; trial < 15; ++trial) {
        Architecture teacher_arch;
        teacher_arch.input_dim = rng.uniform_int(3, 12);
        const int depth = rng.uniform_int(1, 3);
        for (int l = 0; l < depth; ++l) teacher_arch.hidden_widths.push_back(rng.uniform_int(2, 8));
        teacher_arch.num_classes = rng.uniform_int(2, 4);
        const DnnModel teacher = nn::init_model(teacher_arch, Activation::kRectifier, rng);

        Architecture target = teacher_arch;
        const int extra_depth = rng.uniform_int(0, 2);
        const int deepest = target.hidden_widths.back();
        for (int l = 0; l < extra_depth; ++l) target.hidden_widths.push_back(deepest);
        for (int& w : target.hidden_widths) w += rng.uniform_int(0, 6);

        const auto student = net2net::transform_to_architecture(teacher, target, rng);
        CHECK_FALSE(student.approximate);

        const Matrix x = random_inputs(100, teacher_arch.input_dim, rng);
        const Matrix pt = nn::forward(teacher, x).class_probs;
        const Matrix ps = nn::forward(student.model, x).class_probs;
        CHECK((pt - ps).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + pt.cwiseAbs().maxCoeff()));
    }
}
