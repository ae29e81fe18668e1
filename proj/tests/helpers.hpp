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

// Test-only oracles. These recompute expected results through deliberately
// naive routes (triple loops, finite differences, repeated peeling) that stay
// independent of the library code paths they check.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "core/dataset.hpp"
#include "core/evolution.hpp"
#include "core/model.hpp"

namespace testo {

using netevo::Matrix;
using netevo::Vector;

// Hand-rolled forward pass: plain loops over the model's weight entries.
inline std::vector<double> oracle_probs(const netevo::nn::DnnModel& model,
                                        const std::vector<double>& x) {
    std::vector<double> h = x;
    for (int l = 0; l < model.depth(); ++l) {
        const Matrix& w = model.weights[l];
        std::vector<double> z(static_cast<std::size_t>(w.cols()));
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            double s = model.biases[l](j);
            for (Eigen::Index i = 0; i < w.rows(); ++i) s += h[static_cast<std::size_t>(i)] * w(i, j);
            z[static_cast<std::size_t>(j)] = s;
        }
        h.resize(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (model.hidden_activation == netevo::nn::Activation::kRectifier) {
                h[j] = z[j] > 0.0 ? z[j] : 0.0;
            } else {
                h[j] = 1.0 / (1.0 + std::exp(-z[j]));
            }
        }
    }
    const Matrix& w = model.weights.back();
    std::vector<double> logits(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double s = model.biases.back()(j);
        for (Eigen::Index i = 0; i < w.rows(); ++i) s += h[static_cast<std::size_t>(i)] * w(i, j);
        logits[static_cast<std::size_t>(j)] = s;
    }
    double maxv = logits[0];
    for (double v : logits) maxv = std::max(maxv, v);
    double sum = 0.0;
    std::vector<double> probs(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        probs[j] = std::exp(logits[j] - maxv);
        sum += probs[j];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

// Central finite differences of a scalar function.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double step) {
    Vector grad(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double fp = f(probe);
        probe(i) = x(i) - step;
        const double fm = f(probe);
        probe(i) = x(i);
        grad(i) = (fp - fm) / (2.0 * step);
    }
    return grad;
}

// Largest per-component deviation of an analytic gradient from its
// finite-difference estimate, relative to the larger of 1 and the magnitudes.
inline double max_relative_gradient_error(const Vector& analytic, const Vector& numeric) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double denom = std::max({1.0, std::abs(analytic(i)), std::abs(numeric(i))});
        worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / denom);
    }
    return worst;
}

// Brute-force front assignment by repeated peeling of non-dominated sets.
inline std::vector<int> peel_sort(const std::vector<netevo::evo::FitnessRecord>& records) {
    const std::size_t n = records.size();
    auto better = [&](std::size_t a, std::size_t b) {
        return records[a].ca >= records[b].ca && records[a].params <= records[b].params &&
               (records[a].ca > records[b].ca || records[a].params < records[b].params);
    };
    std::vector<int> ranks(n, 0);
    std::vector<bool> assigned(n, false);
    int rank = 1;
    std::size_t remaining = n;
    while (remaining > 0) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                if (!assigned[j] && j != i && better(j, i)) dominated = true;
            }
            if (!dominated) front.push_back(i);
        }
        for (std::size_t i : front) {
            ranks[i] = rank;
            assigned[i] = true;
        }
        remaining -= front.size();
        ++rank;
    }
    return ranks;
}

// Well-separated axis-aligned Gaussian blobs, one center per class.
inline netevo::data::LabeledDataset make_blobs(int num_classes, int dim, int per_class,
                                               double noise, std::uint64_t seed,
                                               double separation = 6.0) {
    netevo::Rng rng(seed);
    Matrix features(static_cast<Eigen::Index>(num_classes) * per_class, dim);
    std::vector<int> labels(static_cast<std::size_t>(num_classes) * per_class);
    Eigen::Index row = 0;
    for (int cls = 0; cls < num_classes; ++cls) {
        for (int k = 0; k < per_class; ++k, ++row) {
            for (int d = 0; d < dim; ++d) {
                const double center = (d % num_classes) == cls ? separation : 0.0;
                features(row, d) = center + rng.normal(0.0, noise);
            }
            labels[static_cast<std::size_t>(row)] = cls;
        }
    }
    return netevo::data::make_dataset(std::move(features), std::move(labels), num_classes);
}

// Smallest |pre-activation| across all hidden layers; finite-difference
// checks of rectifier networks must stay clear of these kinks.
inline double min_abs_preactivation(const netevo::nn::DnnModel& model, const Matrix& X) {
    const auto cache = netevo::nn::forward_cached(model, X);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : cache.preactivations) {
        if (z.size() > 0) best = std::min(best, z.cwiseAbs().minCoeff());
    }
    return best;
}

inline bool params_equal(const netevo::nn::DnnModel& a, const netevo::nn::DnnModel& b) {
    if (!(a.arch == b.arch)) return false;
    const Vector pa = netevo::nn::flatten_params(a);
    const Vector pb = netevo::nn::flatten_params(b);
    for (Eigen::Index i = 0; i < pa.size(); ++i) {
        if (pa(i) != pb(i)) return false;
    }
    return true;
}

}  // namespace testo
