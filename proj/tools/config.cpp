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

#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cli {

namespace {

std::string strip(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using Section = std::map<std::string, std::string>;

struct RawConfig {
    Section run;
    Section teacher;
    Section evolution;
    Section adapt;
    Section source;
    std::vector<std::pair<std::string, Section>> targets;  // file order
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    Section* current = nullptr;
    std::string current_name;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno), "unterminated section header");
            }
            const std::string header = strip(line.substr(1, line.size() - 2));
            if (header == "run") {
                current = &raw.run;
            } else if (header == "teacher") {
                current = &raw.teacher;
            } else if (header == "evolution") {
                current = &raw.evolution;
            } else if (header == "adapt") {
                current = &raw.adapt;
            } else if (header == "source") {
                current = &raw.source;
            } else if (header.rfind("target", 0) == 0) {
                std::string name = strip(header.substr(6));
                if (name.empty()) name = "target" + std::to_string(raw.targets.size() + 1);
                for (const auto& [existing, _] : raw.targets) {
                    if (existing == name) {
                        throw ConfigError("target " + name, "duplicate target section");
                    }
                }
                raw.targets.emplace_back(name, Section{});
                current = &raw.targets.back().second;
            } else {
                throw ConfigError(header, "unknown section");
            }
            current_name = header;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        }
        if (current == nullptr) {
            throw ConfigError("line " + std::to_string(lineno), "key outside of any section");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (!current->emplace(key, value).second) {
            throw ConfigError(current_name + "." + key, "duplicate key");
        }
    }
    return raw;
}

// Typed readers. Every failure names the fully qualified key.

double read_double(const Section& s, const std::string& section, const std::string& key,
                   double fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(section + "." + key, "expected a number, got '" + it->second + "'");
    }
}

long long read_int(const Section& s, const std::string& section, const std::string& key,
                   long long fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(section + "." + key, "expected an integer, got '" + it->second + "'");
    }
}

bool read_bool(const Section& s, const std::string& section, const std::string& key,
               bool fallback) {
    const auto it = s.find(key);
    if (it == s.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError(section + "." + key, "expected true or false, got '" + it->second + "'");
}

std::string read_string(const Section& s, const std::string& key, const std::string& fallback) {
    const auto it = s.find(key);
    return it == s.end() ? fallback : it->second;
}

std::vector<double> read_double_list(const Section& s, const std::string& section,
                                     const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end()) return {};
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = strip(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError(section + "." + key, "expected numbers, got '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(section + "." + key, "expected a non-empty list");
    return out;
}

void check_known_keys(const Section& s, const std::string& section,
                      const std::set<std::string>& known) {
    for (const auto& [key, _] : s) {
        if (known.count(key) == 0) throw ConfigError(section + "." + key, "unknown key");
    }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw ConfigError(key, message);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    const RawConfig raw = tokenize(text);
    RunConfig cfg;
    netevo_train_config_default(&cfg.train);
    netevo_evo_config_default(&cfg.evo);

    // [run]
    check_known_keys(raw.run, "run",
                     {"output_dir", "seed", "worker_count", "split", "baseline_ca"});
    cfg.output_dir = resolve(base_dir, read_string(raw.run, "output_dir", "out"));
    cfg.seed = static_cast<uint64_t>(read_int(raw.run, "run", "seed", 0));
    cfg.worker_count = static_cast<int>(read_int(raw.run, "run", "worker_count", 1));
    require(cfg.worker_count >= 1, "run.worker_count", "must be >= 1");
    if (raw.run.count("split") != 0) {
        const auto parts = read_double_list(raw.run, "run", "split");
        require(parts.size() == 3, "run.split", "expected three fractions");
        cfg.split_train = parts[0];
        cfg.split_val = parts[1];
        cfg.split_test = parts[2];
    }
    require(cfg.split_train > 0 && cfg.split_val > 0 && cfg.split_test > 0, "run.split",
            "all fractions must be positive");
    require(std::abs(cfg.split_train + cfg.split_val + cfg.split_test - 1.0) <= 1e-9,
            "run.split", "fractions must sum to 1");
    if (raw.run.count("baseline_ca") != 0) {
        cfg.baseline_ca = read_double_list(raw.run, "run", "baseline_ca");
    }

    // [teacher]
    check_known_keys(raw.teacher, "teacher",
                     {"hidden", "activation", "model", "max_iterations", "gradient_tolerance",
                      "history_size", "pretrain_epochs", "pretrain_noise"});
    if (raw.teacher.count("hidden") != 0) {
        cfg.teacher_hidden.clear();
        for (const double v : read_double_list(raw.teacher, "teacher", "hidden")) {
            require(v >= 1 && v == std::floor(v), "teacher.hidden",
                    "widths must be positive integers");
            cfg.teacher_hidden.push_back(static_cast<int32_t>(v));
        }
    }
    const std::string activation = read_string(raw.teacher, "activation", "rectifier");
    if (activation == "rectifier") {
        cfg.teacher_activation = NETEVO_ACTIVATION_RECTIFIER;
    } else if (activation == "sigmoid") {
        cfg.teacher_activation = NETEVO_ACTIVATION_SIGMOID;
    } else {
        throw ConfigError("teacher.activation", "must be rectifier or sigmoid");
    }
    if (raw.teacher.count("model") != 0) {
        cfg.teacher_model = resolve(base_dir, raw.teacher.at("model"));
    }
    cfg.train.max_iterations =
        static_cast<int32_t>(read_int(raw.teacher, "teacher", "max_iterations", 200));
    cfg.train.gradient_tolerance =
        read_double(raw.teacher, "teacher", "gradient_tolerance", cfg.train.gradient_tolerance);
    cfg.train.history_size =
        static_cast<int32_t>(read_int(raw.teacher, "teacher", "history_size",
                                      cfg.train.history_size));
    cfg.train.pretrain_epochs =
        static_cast<int32_t>(read_int(raw.teacher, "teacher", "pretrain_epochs",
                                      cfg.train.pretrain_epochs));
    cfg.train.pretrain_noise =
        read_double(raw.teacher, "teacher", "pretrain_noise", cfg.train.pretrain_noise);
    require(cfg.train.max_iterations >= 1, "teacher.max_iterations", "must be >= 1");
    require(cfg.train.history_size >= 1, "teacher.history_size", "must be >= 1");
    require(cfg.train.pretrain_epochs >= 0, "teacher.pretrain_epochs", "must be >= 0");
    require(cfg.train.pretrain_noise >= 0.0 && cfg.train.pretrain_noise < 1.0,
            "teacher.pretrain_noise", "must be in [0, 1)");

    // [evolution]
    check_known_keys(raw.evolution, "evolution",
                     {"population_size", "crossover_prob", "mutation_prob", "max_generations",
                      "depth_min", "depth_max", "width_min", "width_max", "sbx_eta",
                      "fitness_cache", "finetune_iters", "final_finetune_iters",
                      "widen_noise_std", "optimizer_history_size", "optimizer_tolerance"});
    netevo_evo_config& evo = cfg.evo;
    evo.population_size = static_cast<int32_t>(
        read_int(raw.evolution, "evolution", "population_size", evo.population_size));
    evo.crossover_prob =
        read_double(raw.evolution, "evolution", "crossover_prob", evo.crossover_prob);
    evo.mutation_prob =
        read_double(raw.evolution, "evolution", "mutation_prob", evo.mutation_prob);
    evo.max_generations = static_cast<int32_t>(
        read_int(raw.evolution, "evolution", "max_generations", evo.max_generations));
    evo.depth_min =
        static_cast<int32_t>(read_int(raw.evolution, "evolution", "depth_min", evo.depth_min));
    evo.depth_max =
        static_cast<int32_t>(read_int(raw.evolution, "evolution", "depth_max", evo.depth_max));
    evo.width_min =
        static_cast<int32_t>(read_int(raw.evolution, "evolution", "width_min", evo.width_min));
    evo.width_max =
        static_cast<int32_t>(read_int(raw.evolution, "evolution", "width_max", evo.width_max));
    evo.sbx_eta = read_double(raw.evolution, "evolution", "sbx_eta", evo.sbx_eta);
    evo.fitness_cache =
        read_bool(raw.evolution, "evolution", "fitness_cache", evo.fitness_cache != 0) ? 1 : 0;
    evo.adapt.finetune_iters = static_cast<int32_t>(
        read_int(raw.evolution, "evolution", "finetune_iters", evo.adapt.finetune_iters));
    evo.final_finetune_iters = static_cast<int32_t>(
        read_int(raw.evolution, "evolution", "final_finetune_iters", evo.final_finetune_iters));
    evo.widen_noise_std =
        read_double(raw.evolution, "evolution", "widen_noise_std", evo.widen_noise_std);
    evo.optimizer.history_size = static_cast<int32_t>(read_int(
        raw.evolution, "evolution", "optimizer_history_size", evo.optimizer.history_size));
    evo.optimizer.gradient_tolerance = read_double(raw.evolution, "evolution",
                                                   "optimizer_tolerance",
                                                   evo.optimizer.gradient_tolerance);
    evo.optimizer.pretrain_epochs = 0;  // candidates inherit the teacher's knowledge instead

    require(evo.population_size >= 2 && evo.population_size % 2 == 0,
            "evolution.population_size", "must be even and >= 2");
    require(evo.crossover_prob >= 0.0 && evo.crossover_prob <= 1.0, "evolution.crossover_prob",
            "must be in [0, 1]");
    require(evo.mutation_prob >= 0.0 && evo.mutation_prob <= 1.0, "evolution.mutation_prob",
            "must be in [0, 1]");
    require(evo.max_generations >= 0, "evolution.max_generations", "must be >= 0");
    require(evo.depth_min >= 1, "evolution.depth_min", "must be >= 1");
    require(evo.depth_max >= evo.depth_min, "evolution.depth_max", "must be >= depth_min");
    require(evo.width_min >= 1, "evolution.width_min", "must be >= 1");
    require(evo.width_max >= evo.width_min, "evolution.width_max", "must be >= width_min");
    require(evo.sbx_eta > 0.0, "evolution.sbx_eta", "must be > 0");
    require(evo.adapt.finetune_iters >= 1, "evolution.finetune_iters", "must be >= 1");
    require(evo.final_finetune_iters >= 0, "evolution.final_finetune_iters", "must be >= 0");
    require(evo.widen_noise_std >= 0.0, "evolution.widen_noise_std", "must be >= 0");

    // [adapt]
    check_known_keys(raw.adapt, "adapt", {"gamma", "scope"});
    evo.adapt.gamma = read_double(raw.adapt, "adapt", "gamma", evo.adapt.gamma);
    require(evo.adapt.gamma >= 0.0 && evo.adapt.gamma <= 1.0, "adapt.gamma",
            "must be in [0, 1]");
    const std::string scope = read_string(raw.adapt, "scope", "both");
    if (scope == "source_only") {
        evo.adapt.scope = NETEVO_SCOPE_SOURCE_ONLY;
    } else if (scope == "target_only") {
        evo.adapt.scope = NETEVO_SCOPE_TARGET_ONLY;
    } else if (scope == "both") {
        evo.adapt.scope = NETEVO_SCOPE_BOTH;
    } else {
        throw ConfigError("adapt.scope", "must be source_only, target_only, or both");
    }

    evo.seed = cfg.seed;
    evo.worker_count = cfg.worker_count;

    // [source]
    check_known_keys(raw.source, "source",
                     {"manifest", "synthetic", "classes", "dim", "samples_per_class",
                      "noise_std"});
    cfg.source.synthetic = read_bool(raw.source, "source", "synthetic", false);
    const bool has_manifest = raw.source.count("manifest") != 0;
    require(cfg.source.synthetic != has_manifest, "source.manifest",
            "exactly one of manifest or synthetic = true is required");
    if (has_manifest) {
        cfg.source.manifest = resolve(base_dir, raw.source.at("manifest"));
    } else {
        cfg.source.classes =
            static_cast<int>(read_int(raw.source, "source", "classes", cfg.source.classes));
        cfg.source.dim = static_cast<int>(read_int(raw.source, "source", "dim", cfg.source.dim));
        cfg.source.samples_per_class = static_cast<int>(
            read_int(raw.source, "source", "samples_per_class", cfg.source.samples_per_class));
        cfg.source.noise_std =
            read_double(raw.source, "source", "noise_std", cfg.source.noise_std);
        require(cfg.source.classes >= 2, "source.classes", "must be >= 2");
        require(cfg.source.dim >= 2, "source.dim", "must be >= 2");
        require(cfg.source.samples_per_class >= 5, "source.samples_per_class", "must be >= 5");
        require(cfg.source.noise_std > 0.0, "source.noise_std", "must be > 0");
    }

    // [target ...]
    require(!raw.targets.empty(), "target", "at least one target section is required");
    for (const auto& [name, section] : raw.targets) {
        const std::string qualifier = "target " + name;
        check_known_keys(section, qualifier,
                         {"manifest", "synthetic", "samples_per_class", "shift",
                          "rotation_deg"});
        TargetSpec target;
        target.name = name;
        target.synthetic = read_bool(section, qualifier, "synthetic", false);
        const bool target_manifest = section.count("manifest") != 0;
        require(target.synthetic != target_manifest, qualifier + ".manifest",
                "exactly one of manifest or synthetic = true is required");
        require(target.synthetic == cfg.source.synthetic, qualifier + ".synthetic",
                "synthetic targets require a synthetic source and vice versa");
        if (target_manifest) {
            target.manifest = resolve(base_dir, section.at("manifest"));
        } else {
            target.samples_per_class = static_cast<int>(
                read_int(section, qualifier, "samples_per_class", target.samples_per_class));
            target.shift = read_double(section, qualifier, "shift", target.shift);
            target.rotation_deg =
                read_double(section, qualifier, "rotation_deg", target.rotation_deg);
            require(target.samples_per_class >= 5, qualifier + ".samples_per_class",
                    "must be >= 5");
        }
        cfg.targets.push_back(std::move(target));
    }

    if (cfg.baseline_ca.has_value()) {
        require(cfg.baseline_ca->size() == cfg.targets.size(), "run.baseline_ca",
                "needs one value per target case");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace cli
