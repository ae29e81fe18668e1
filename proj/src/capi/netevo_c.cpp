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

#include "netevo/netevo.h"

#include <cstring>
#include <exception>
#include <string>

#include "core/dataset.hpp"
#include "core/evolution.hpp"
#include "core/model.hpp"
#include "core/train.hpp"

using namespace netevo;

struct netevo_dataset {
    data::LabeledDataset value;
};

struct netevo_model {
    nn::DnnModel value;
};

struct netevo_run {
    evo::EvolveResult value;
};

namespace {

thread_local std::string g_last_error;

void clear_error() { g_last_error.clear(); }

netevo_status fail(netevo_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
netevo_status guarded(Fn&& fn) {
    clear_error();
    try {
        return fn();
    } catch (const ShapeError& e) {
        return fail(NETEVO_ERR_SHAPE, e.what());
    } catch (const ValueError& e) {
        return fail(NETEVO_ERR_INVALID_ARGUMENT, e.what());
    } catch (const IoError& e) {
        return fail(NETEVO_ERR_IO, e.what());
    } catch (const ParseError& e) {
        return fail(NETEVO_ERR_PARSE, e.what());
    } catch (const NumericError& e) {
        return fail(NETEVO_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(NETEVO_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(NETEVO_ERR_RUNTIME, "unknown error");
    }
}

netevo_status require(bool ok, const char* what) {
    return ok ? NETEVO_OK : fail(NETEVO_ERR_INVALID_ARGUMENT, what);
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nn::TrainConfig to_core(const netevo_train_config& cfg) {
    return nn::TrainConfig{cfg.max_iterations, cfg.gradient_tolerance, cfg.history_size,
                           cfg.pretrain_epochs, cfg.pretrain_noise};
}

adapt::AdaptConfig to_core(const netevo_adapt_config& cfg) {
    adapt::AdaptConfig out;
    out.gamma = cfg.gamma;
    switch (cfg.scope) {
        case NETEVO_SCOPE_SOURCE_ONLY: out.classification_scope = adapt::Scope::kSourceOnly; break;
        case NETEVO_SCOPE_TARGET_ONLY: out.classification_scope = adapt::Scope::kTargetOnly; break;
        case NETEVO_SCOPE_BOTH: out.classification_scope = adapt::Scope::kBoth; break;
        default: throw ValueError("adapt config: scope must be 0, 1, or 2");
    }
    out.finetune_iters = cfg.finetune_iters;
    return out;
}

evo::EvoConfig to_core(const netevo_evo_config& cfg) {
    evo::EvoConfig out;
    out.population_size = cfg.population_size;
    out.crossover_prob = cfg.crossover_prob;
    out.mutation_prob = cfg.mutation_prob;
    out.max_generations = cfg.max_generations;
    out.depth_min = cfg.depth_min;
    out.depth_max = cfg.depth_max;
    out.width_min = cfg.width_min;
    out.width_max = cfg.width_max;
    out.sbx_eta = cfg.sbx_eta;
    out.widen_noise_std = cfg.widen_noise_std;
    out.final_finetune_iters = cfg.final_finetune_iters;
    out.seed = cfg.seed;
    out.fitness_cache = cfg.fitness_cache != 0;
    out.worker_count = cfg.worker_count;
    out.adapt = to_core(cfg.adapt);
    out.optimizer = to_core(cfg.optimizer);
    return out;
}

data::SynthConfig to_core(const netevo_synth_config& cfg) {
    data::SynthConfig out;
    out.num_classes = cfg.num_classes;
    out.dim = cfg.dim;
    out.source_per_class = cfg.source_per_class;
    out.target_per_class = cfg.target_per_class;
    out.shift_magnitude = cfg.shift_magnitude;
    out.rotation_deg = cfg.rotation_deg;
    out.noise_std = cfg.noise_std;
    return out;
}

}  // namespace

extern "C" {

const char* netevo_version(void) { return "0.1.0"; }

const char* netevo_last_error(void) { return g_last_error.c_str(); }

void netevo_string_free(char* s) { delete[] s; }

void netevo_train_config_default(netevo_train_config* cfg) {
    if (cfg == nullptr) return;
    const nn::TrainConfig d;
    *cfg = netevo_train_config{d.max_iterations, d.gradient_tolerance, d.history_size,
                               d.pretrain_epochs, d.pretrain_noise};
}

void netevo_adapt_config_default(netevo_adapt_config* cfg) {
    if (cfg == nullptr) return;
    const adapt::AdaptConfig d;
    *cfg = netevo_adapt_config{d.gamma, NETEVO_SCOPE_BOTH, d.finetune_iters};
}

void netevo_evo_config_default(netevo_evo_config* cfg) {
    if (cfg == nullptr) return;
    const evo::EvoConfig d;
    netevo_evo_config out{};
    out.population_size = d.population_size;
    out.crossover_prob = d.crossover_prob;
    out.mutation_prob = d.mutation_prob;
    out.max_generations = d.max_generations;
    out.depth_min = d.depth_min;
    out.depth_max = d.depth_max;
    out.width_min = d.width_min;
    out.width_max = d.width_max;
    out.sbx_eta = d.sbx_eta;
    out.widen_noise_std = d.widen_noise_std;
    out.final_finetune_iters = d.final_finetune_iters;
    out.seed = d.seed;
    out.fitness_cache = d.fitness_cache ? 1 : 0;
    out.worker_count = d.worker_count;
    netevo_adapt_config_default(&out.adapt);
    netevo_train_config_default(&out.optimizer);
    *cfg = out;
}

void netevo_synth_config_default(netevo_synth_config* cfg) {
    if (cfg == nullptr) return;
    const data::SynthConfig d;
    *cfg = netevo_synth_config{d.num_classes, d.dim, d.source_per_class, d.target_per_class,
                               d.shift_magnitude, d.rotation_deg, d.noise_std};
}

netevo_status netevo_dataset_load_manifest(const char* path, int32_t domain_tag,
                                           netevo_dataset** out) {
    return guarded([&]() {
        if (netevo_status s = require(path != nullptr && out != nullptr,
                                      "load_manifest: null argument");
            s != NETEVO_OK) {
            return s;
        }
        const data::DomainTag tag = domain_tag == NETEVO_DOMAIN_TARGET
                                        ? data::DomainTag::kTarget
                                        : data::DomainTag::kSource;
        *out = new netevo_dataset{data::load_manifest(path, tag)};
        return NETEVO_OK;
    });
}

netevo_status netevo_dataset_synth(const netevo_synth_config* cfg, uint64_t seed,
                                   netevo_dataset** source, netevo_dataset** target) {
    return guarded([&]() {
        if (netevo_status s = require(cfg != nullptr && source != nullptr && target != nullptr,
                                      "dataset_synth: null argument");
            s != NETEVO_OK) {
            return s;
        }
        Rng rng(seed);
        auto [src, tgt] = data::synth_domain_shift(to_core(*cfg), rng);
        *source = new netevo_dataset{std::move(src)};
        *target = new netevo_dataset{std::move(tgt)};
        return NETEVO_OK;
    });
}

netevo_status netevo_dataset_split(const netevo_dataset* ds, double train_fraction,
                                   double val_fraction, double test_fraction, uint64_t seed,
                                   netevo_dataset** train, netevo_dataset** val,
                                   netevo_dataset** test) {
    return guarded([&]() {
        if (netevo_status s = require(ds != nullptr && train != nullptr && val != nullptr &&
                                          test != nullptr,
                                      "dataset_split: null argument");
            s != NETEVO_OK) {
            return s;
        }
        Rng rng(seed);
        data::SplitResult parts =
            data::split(ds->value, train_fraction, val_fraction, test_fraction, rng);
        *train = new netevo_dataset{std::move(parts.train)};
        *val = new netevo_dataset{std::move(parts.val)};
        *test = new netevo_dataset{std::move(parts.test)};
        return NETEVO_OK;
    });
}

int64_t netevo_dataset_rows(const netevo_dataset* ds) {
    return ds == nullptr ? 0 : static_cast<int64_t>(ds->value.rows());
}

int32_t netevo_dataset_dim(const netevo_dataset* ds) {
    return ds == nullptr ? 0 : static_cast<int32_t>(ds->value.dim());
}

int32_t netevo_dataset_num_classes(const netevo_dataset* ds) {
    return ds == nullptr ? 0 : ds->value.num_classes;
}

netevo_status netevo_dataset_copy_features(const netevo_dataset* ds, double* buf,
                                           int64_t buf_len) {
    return guarded([&]() {
        if (netevo_status s =
                require(ds != nullptr && buf != nullptr, "copy_features: null argument");
            s != NETEVO_OK) {
            return s;
        }
        const Matrix& f = ds->value.features;
        const int64_t needed = static_cast<int64_t>(f.rows()) * f.cols();
        if (buf_len < needed) {
            return fail(NETEVO_ERR_INVALID_ARGUMENT,
                        "copy_features: buffer holds " + std::to_string(buf_len) +
                            " values, need " + std::to_string(needed));
        }
        int64_t pos = 0;
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            for (Eigen::Index c = 0; c < f.cols(); ++c) buf[pos++] = f(r, c);
        }
        return NETEVO_OK;
    });
}

netevo_status netevo_dataset_copy_labels(const netevo_dataset* ds, int32_t* buf,
                                         int64_t buf_len) {
    return guarded([&]() {
        if (netevo_status s =
                require(ds != nullptr && buf != nullptr, "copy_labels: null argument");
            s != NETEVO_OK) {
            return s;
        }
        const auto& labels = ds->value.labels;
        if (buf_len < static_cast<int64_t>(labels.size())) {
            return fail(NETEVO_ERR_INVALID_ARGUMENT, "copy_labels: buffer too small");
        }
        for (std::size_t i = 0; i < labels.size(); ++i) buf[i] = labels[i];
        return NETEVO_OK;
    });
}

void netevo_dataset_free(netevo_dataset* ds) { delete ds; }

netevo_status netevo_train_teacher(const netevo_dataset* source, const int32_t* hidden_widths,
                                   int32_t depth, int32_t activation,
                                   const netevo_train_config* cfg, uint64_t seed,
                                   netevo_model** out) {
    return guarded([&]() {
        if (netevo_status s = require(source != nullptr && cfg != nullptr && out != nullptr &&
                                          (depth == 0 || hidden_widths != nullptr),
                                      "train_teacher: null argument");
            s != NETEVO_OK) {
            return s;
        }
        nn::Activation act;
        switch (activation) {
            case NETEVO_ACTIVATION_RECTIFIER: act = nn::Activation::kRectifier; break;
            case NETEVO_ACTIVATION_SIGMOID: act = nn::Activation::kSigmoid; break;
            default: throw ValueError("train_teacher: activation must be 0 or 1");
        }
        nn::Architecture arch;
        arch.input_dim = static_cast<int>(source->value.dim());
        arch.num_classes = source->value.num_classes;
        arch.hidden_widths.assign(hidden_widths, hidden_widths + depth);
        Rng rng(seed);
        *out = new netevo_model{
            nn::train_source_model(source->value, arch, to_core(*cfg), rng, act)};
        return NETEVO_OK;
    });
}

netevo_status netevo_model_load_json(const char* path, netevo_model** out) {
    return guarded([&]() {
        if (netevo_status s =
                require(path != nullptr && out != nullptr, "model_load_json: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *out = new netevo_model{nn::load_json_file(path)};
        return NETEVO_OK;
    });
}

netevo_status netevo_model_save_json(const netevo_model* model, const char* path) {
    return guarded([&]() {
        if (netevo_status s =
                require(model != nullptr && path != nullptr, "model_save_json: null argument");
            s != NETEVO_OK) {
            return s;
        }
        nn::save_json_file(model->value, path);
        return NETEVO_OK;
    });
}

netevo_status netevo_model_to_json(const netevo_model* model, char** out) {
    return guarded([&]() {
        if (netevo_status s =
                require(model != nullptr && out != nullptr, "model_to_json: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *out = copy_string(nn::to_json(model->value));
        return NETEVO_OK;
    });
}

netevo_status netevo_model_accuracy(const netevo_model* model, const netevo_dataset* ds,
                                    double* ca) {
    return guarded([&]() {
        if (netevo_status s = require(model != nullptr && ds != nullptr && ca != nullptr,
                                      "model_accuracy: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *ca = nn::classification_accuracy(model->value, ds->value.features, ds->value.labels);
        return NETEVO_OK;
    });
}

int64_t netevo_model_param_count(const netevo_model* model) {
    return model == nullptr ? 0 : nn::param_count(model->value.arch);
}

netevo_status netevo_model_hidden_widths(const netevo_model* model, int32_t* buf,
                                         int32_t buf_len, int32_t* depth_out) {
    return guarded([&]() {
        if (netevo_status s = require(model != nullptr && depth_out != nullptr,
                                      "model_hidden_widths: null argument");
            s != NETEVO_OK) {
            return s;
        }
        const auto& widths = model->value.arch.hidden_widths;
        *depth_out = static_cast<int32_t>(widths.size());
        if (buf != nullptr) {
            const int32_t n = std::min<int32_t>(buf_len, *depth_out);
            for (int32_t i = 0; i < n; ++i) buf[i] = widths[static_cast<std::size_t>(i)];
        }
        return NETEVO_OK;
    });
}

void netevo_model_free(netevo_model* model) { delete model; }

netevo_status netevo_evolve(const netevo_model* teacher, const netevo_dataset* source,
                            const netevo_dataset* target_train, const netevo_dataset* target_val,
                            const netevo_evo_config* cfg, netevo_run** out) {
    return guarded([&]() {
        if (netevo_status s = require(teacher != nullptr && source != nullptr &&
                                          target_train != nullptr && target_val != nullptr &&
                                          cfg != nullptr && out != nullptr,
                                      "evolve: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *out = new netevo_run{evo::evolve(teacher->value, source->value, target_train->value,
                                          target_val->value, to_core(*cfg))};
        return NETEVO_OK;
    });
}

netevo_status netevo_run_reports_json(const netevo_run* run, char** out) {
    return guarded([&]() {
        if (netevo_status s =
                require(run != nullptr && out != nullptr, "run_reports_json: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *out = copy_string(evo::reports_to_json(run->value.reports));
        return NETEVO_OK;
    });
}

netevo_status netevo_run_best_model(const netevo_run* run, netevo_model** out) {
    return guarded([&]() {
        if (netevo_status s =
                require(run != nullptr && out != nullptr, "run_best_model: null argument");
            s != NETEVO_OK) {
            return s;
        }
        *out = new netevo_model{run->value.best_model};
        return NETEVO_OK;
    });
}

void netevo_run_free(netevo_run* run) { delete run; }

}  // extern "C"
