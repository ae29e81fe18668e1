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

#include "core/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace netevo::nn {

void validate(const TrainConfig& cfg) {
    if (cfg.max_iterations < 1) throw ValueError("train config: max_iterations must be >= 1");
    if (cfg.history_size < 1) throw ValueError("train config: history_size must be >= 1");
    if (cfg.gradient_tolerance < 0.0) {
        throw ValueError("train config: gradient_tolerance must be >= 0");
    }
    if (cfg.pretrain_epochs < 0) throw ValueError("train config: pretrain_epochs must be >= 0");
    if (cfg.pretrain_noise < 0.0 || cfg.pretrain_noise >= 1.0) {
        throw ValueError("train config: pretrain_noise must be in [0, 1)");
    }
}

namespace {

struct Correction {
    Vector s;
    Vector y;
    double rho;
};

// Two-loop recursion: applies the inverse-Hessian approximation to g.
Vector search_direction(const Vector& g, const std::deque<Correction>& history) {
    Vector q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
        alpha[i] = history[i].rho * history[i].s.dot(q);
        q -= alpha[i] * history[i].y;
    }
    if (!history.empty()) {
        const Correction& last = history.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double beta = history[i].rho * history[i].y.dot(q);
        q += (alpha[i] - beta) * history[i].s;
    }
    return -q;
}

}  // namespace

MinimizeResult quasi_newton_minimize(const Objective& objective, const Vector& init_params,
                                     const TrainConfig& cfg) {
    validate(cfg);
    if (!init_params.allFinite()) {
        throw NumericError("quasi_newton_minimize: non-finite initial parameters");
    }

    constexpr double kArmijoC1 = 1e-4;
    constexpr double kBacktrack = 0.5;
    constexpr double kMinStep = 1e-20;
    constexpr double kCurvatureGuard = 1e-10;

    Vector x = init_params;
    Vector g(x.size());
    double f = objective(x, g);
    if (!std::isfinite(f) || !g.allFinite()) {
        throw NumericError("quasi_newton_minimize: non-finite objective or gradient at start");
    }

    MinimizeResult result;
    result.loss_history.push_back(f);

    std::deque<Correction> history;
    Vector x_trial(x.size());
    Vector g_trial(x.size());

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        const double gnorm = g.norm();
        if (gnorm <= cfg.gradient_tolerance) {
            result.converged = true;
            break;
        }

        Vector direction = search_direction(g, history);
        double slope = direction.dot(g);
        if (!(slope < 0.0) || !direction.allFinite()) {
            direction = -g;  // fall back to steepest descent
            slope = -gnorm * gnorm;
        }

        double step = history.empty() ? std::min(1.0, 1.0 / std::max(gnorm, 1.0)) : 1.0;
        bool accepted = false;
        double f_trial = f;
        while (step >= kMinStep) {
            x_trial = x + step * direction;
            f_trial = objective(x_trial, g_trial);
            // The explicit f_trial < f guard keeps the recorded history strictly
            // decreasing even when c1*step*slope underflows against f.
            if (std::isfinite(f_trial) && g_trial.allFinite() && f_trial < f &&
                f_trial <= f + kArmijoC1 * step * slope) {
                accepted = true;
                break;
            }
            step *= kBacktrack;
        }
        if (!accepted) {
            result.line_search_failed = true;
            break;
        }

        Vector s = x_trial - x;
        Vector y = g_trial - g;
        const double sy = s.dot(y);
        if (sy > kCurvatureGuard * s.norm() * y.norm()) {
            history.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(history.size()) > cfg.history_size) history.pop_front();
        }

        x.swap(x_trial);
        g.swap(g_trial);
        f = f_trial;
        result.loss_history.push_back(f);
        result.iterations = iter;
    }

    result.params = std::move(x);
    return result;
}

}  // namespace netevo::nn
