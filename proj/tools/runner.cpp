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

#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "json.hpp"

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Scoped owners for the C handles.
struct DatasetDeleter {
    void operator()(netevo_dataset* p) const { netevo_dataset_free(p); }
};
struct ModelDeleter {
    void operator()(netevo_model* p) const { netevo_model_free(p); }
};
struct RunDeleter {
    void operator()(netevo_run* p) const { netevo_run_free(p); }
};
using DatasetPtr = std::unique_ptr<netevo_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<netevo_model, ModelDeleter>;
using RunPtr = std::unique_ptr<netevo_run, RunDeleter>;

std::string take_string(char* s) {
    std::string out = s == nullptr ? "" : s;
    netevo_string_free(s);
    return out;
}

[[noreturn]] void raise_data(const std::string& context) {
    throw DataError(context + ": " + netevo_last_error());
}

[[noreturn]] void raise_run(const std::string& context) {
    throw RunError(context + ": " + netevo_last_error());
}

// Independent seed streams for the teacher, splits, and searches.
uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw RunError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw RunError("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

// Shortest round-trip decimal form, shared with the JSON artifacts.
std::string format_double(double v) { return json(v).dump(); }

struct CaseData {
    DatasetPtr source;
    DatasetPtr target;
};

CaseData load_case(const RunConfig& cfg, const TargetSpec& target) {
    CaseData out;
    netevo_dataset* source = nullptr;
    netevo_dataset* tgt = nullptr;
    if (cfg.source.synthetic) {
        netevo_synth_config synth;
        netevo_synth_config_default(&synth);
        synth.num_classes = cfg.source.classes;
        synth.dim = cfg.source.dim;
        synth.source_per_class = cfg.source.samples_per_class;
        synth.noise_std = cfg.source.noise_std;
        synth.target_per_class = target.samples_per_class;
        synth.shift_magnitude = target.shift;
        synth.rotation_deg = target.rotation_deg;
        // One shared stream: the source draws precede the target draws, so
        // every case sees the identical source dataset.
        if (netevo_dataset_synth(&synth, derive_seed(cfg.seed, 1), &source, &tgt) != NETEVO_OK) {
            raise_data("synthetic benchmark");
        }
    } else {
        if (netevo_dataset_load_manifest(cfg.source.manifest.c_str(), NETEVO_DOMAIN_SOURCE,
                                         &source) != NETEVO_OK) {
            raise_data("source manifest");
        }
        if (netevo_dataset_load_manifest(target.manifest.c_str(), NETEVO_DOMAIN_TARGET, &tgt) !=
            NETEVO_OK) {
            netevo_dataset_free(source);
            raise_data("target manifest '" + target.manifest + "'");
        }
    }
    out.source.reset(source);
    out.target.reset(tgt);
    return out;
}

ModelPtr obtain_teacher(const RunConfig& cfg, const netevo_dataset* source) {
    netevo_model* teacher = nullptr;
    if (!cfg.teacher_model.empty()) {
        if (netevo_model_load_json(cfg.teacher_model.c_str(), &teacher) != NETEVO_OK) {
            raise_data("teacher model '" + cfg.teacher_model + "'");
        }
        return ModelPtr(teacher);
    }
    if (netevo_train_teacher(source, cfg.teacher_hidden.data(),
                             static_cast<int32_t>(cfg.teacher_hidden.size()),
                             cfg.teacher_activation, &cfg.train, derive_seed(cfg.seed, 2),
                             &teacher) != NETEVO_OK) {
        raise_run("teacher training");
    }
    return ModelPtr(teacher);
}

std::vector<int> model_widths(const netevo_model* model) {
    int32_t depth = 0;
    if (netevo_model_hidden_widths(model, nullptr, 0, &depth) != NETEVO_OK) {
        raise_run("model widths");
    }
    std::vector<int32_t> raw(static_cast<std::size_t>(depth));
    if (depth > 0 &&
        netevo_model_hidden_widths(model, raw.data(), depth, &depth) != NETEVO_OK) {
        raise_run("model widths");
    }
    return std::vector<int>(raw.begin(), raw.end());
}

}  // namespace

double compute_ti(const std::vector<double>& ca, const std::vector<double>& baseline_ca) {
    if (ca.empty() || ca.size() != baseline_ca.size()) {
        throw std::invalid_argument("compute_ti: vectors must be non-empty and equal length");
    }
    double mean = 0.0;
    double base = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        mean += ca[i];
        base += baseline_ca[i];
    }
    return (mean - base) / static_cast<double>(ca.size());
}

std::pair<double, double> aggregate(const std::vector<double>& ca) {
    if (ca.empty()) throw std::invalid_argument("aggregate: empty vector");
    double mean = 0.0;
    for (double v : ca) mean += v;
    mean /= static_cast<double>(ca.size());
    double var = 0.0;
    for (double v : ca) var += (v - mean) * (v - mean);
    var /= static_cast<double>(ca.size());
    return {mean, std::sqrt(var)};
}

std::string emit_curve(const std::string& reports_json) {
    const json reports = json::parse(reports_json);
    if (!reports.is_array() || reports.empty()) {
        throw std::invalid_argument("emit_curve: empty report list");
    }
    std::string out = "generation,best_ca,best_so_far_ca,front_size\n";
    for (const auto& report : reports) {
        out += std::to_string(report.at("generation").get<int>()) + "," +
               format_double(report.at("best_ca").get<double>()) + "," +
               format_double(report.at("best_so_far_ca").get<double>()) + "," +
               std::to_string(report.at("front").size()) + "\n";
    }
    return out;
}

std::string emit_pareto_front(const std::string& reports_json) {
    const json reports = json::parse(reports_json);
    if (!reports.is_array() || reports.empty()) {
        throw std::invalid_argument("emit_pareto_front: empty report list");
    }
    const json& last = reports.back();
    std::string out = "ca,params,widths\n";
    for (const auto& index : last.at("front")) {
        const json& member = last.at("individuals").at(index.get<std::size_t>());
        out += format_double(member.at("ca").get<double>()) + "," +
               std::to_string(member.at("params").get<long long>()) + ",";
        const auto& widths = member.at("widths");
        for (std::size_t i = 0; i < widths.size(); ++i) {
            if (i > 0) out += "-";
            out += std::to_string(widths.at(i).get<int>());
        }
        out += "\n";
    }
    return out;
}

void run(const RunConfig& cfg) {
    const fs::path out_root(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) throw RunError("cannot create output directory '" + out_root.string() + "'");

    ModelPtr teacher;
    json case_summaries = json::array();
    std::vector<double> case_cas;

    for (std::size_t case_index = 0; case_index < cfg.targets.size(); ++case_index) {
        const TargetSpec& target = cfg.targets[case_index];
        const auto started = std::chrono::steady_clock::now();

        CaseData datasets = load_case(cfg, target);
        if (!teacher) teacher = obtain_teacher(cfg, datasets.source.get());

        netevo_dataset* train = nullptr;
        netevo_dataset* val = nullptr;
        netevo_dataset* test = nullptr;
        if (netevo_dataset_split(datasets.target.get(), cfg.split_train, cfg.split_val,
                                 cfg.split_test, derive_seed(cfg.seed, 100 + case_index), &train,
                                 &val, &test) != NETEVO_OK) {
            raise_data("target split for case '" + target.name + "'");
        }
        DatasetPtr train_ptr(train);
        DatasetPtr val_ptr(val);
        DatasetPtr test_ptr(test);

        netevo_evo_config evo = cfg.evo;
        evo.seed = derive_seed(cfg.seed, 200 + case_index);
        netevo_run* search = nullptr;
        if (netevo_evolve(teacher.get(), datasets.source.get(), train, val, &evo, &search) !=
            NETEVO_OK) {
            raise_run("evolution for case '" + target.name + "'");
        }
        RunPtr search_ptr(search);

        char* reports_raw = nullptr;
        if (netevo_run_reports_json(search, &reports_raw) != NETEVO_OK) raise_run("reports");
        const std::string reports = take_string(reports_raw);

        netevo_model* best_raw = nullptr;
        if (netevo_run_best_model(search, &best_raw) != NETEVO_OK) raise_run("best model");
        ModelPtr best(best_raw);

        double test_ca = 0.0;
        if (netevo_model_accuracy(best.get(), test, &test_ca) != NETEVO_OK) {
            raise_run("test accuracy for case '" + target.name + "'");
        }

        const fs::path case_dir = out_root / target.name;
        fs::create_directories(case_dir, ec);
        if (ec) throw RunError("cannot create '" + case_dir.string() + "'");
        write_file_atomic(case_dir / "generations.json", reports + "\n");
        write_file_atomic(case_dir / "pareto_final.csv", emit_pareto_front(reports));
        write_file_atomic(case_dir / "curve.csv", emit_curve(reports));
        const fs::path model_tmp = case_dir / "best_model.json.tmp";
        if (netevo_model_save_json(best.get(), model_tmp.string().c_str()) != NETEVO_OK) {
            raise_run("saving best model");
        }
        fs::rename(model_tmp, case_dir / "best_model.json");

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        case_cas.push_back(test_ca);
        case_summaries.push_back({{"name", target.name},
                                  {"test_ca", test_ca},
                                  {"best_widths", model_widths(best.get())},
                                  {"best_params", netevo_model_param_count(best.get())},
                                  {"seconds", seconds}});
        std::fprintf(stderr, "case %-12s test CA %6.2f  best", target.name.c_str(), test_ca);
        for (int w : model_widths(best.get())) std::fprintf(stderr, " %d", w);
        std::fprintf(stderr, "  (%.1fs)\n", seconds);
    }

    const auto [mean, stdev] = aggregate(case_cas);
    json summary{{"cases", std::move(case_summaries)}, {"mean_ca", mean}, {"std_ca", stdev}};
    if (cfg.baseline_ca.has_value()) {
        summary["baseline_ca"] = *cfg.baseline_ca;
        summary["ti"] = compute_ti(case_cas, *cfg.baseline_ca);
    }
    write_file_atomic(out_root / "summary.json", summary.dump(2) + "\n");
}

namespace {

// Writes one class of a dataset as a plain signal file, one value per line.
void write_class_signals(const fs::path& path, const std::vector<double>& features,
                         const std::vector<int32_t>& labels, int dim, int cls) {
    std::string body;
    for (std::size_t row = 0; row < labels.size(); ++row) {
        if (labels[row] != cls) continue;
        for (int d = 0; d < dim; ++d) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g\n",
                          features[row * static_cast<std::size_t>(dim) +
                                   static_cast<std::size_t>(d)]);
            body += buf;
        }
    }
    write_file_atomic(path, body);
}

void write_domain(const fs::path& dir, const std::string& stem, const netevo_dataset* ds) {
    const auto rows = netevo_dataset_rows(ds);
    const auto dim = netevo_dataset_dim(ds);
    const auto classes = netevo_dataset_num_classes(ds);
    std::vector<double> features(static_cast<std::size_t>(rows) * dim);
    std::vector<int32_t> labels(static_cast<std::size_t>(rows));
    if (netevo_dataset_copy_features(ds, features.data(),
                                     static_cast<int64_t>(features.size())) != NETEVO_OK ||
        netevo_dataset_copy_labels(ds, labels.data(), rows) != NETEVO_OK) {
        raise_run("benchmark export");
    }

    std::string manifest = "segment_length = " + std::to_string(dim) +
                           "\nnormalization = none\n";
    for (int cls = 0; cls < classes; ++cls) {
        const std::string file = "signals/" + stem + "_class" + std::to_string(cls) + ".txt";
        write_class_signals(dir / file, features, labels, dim, cls);
        manifest += "class {\n  label = " + std::to_string(cls) + "\n  name = class" +
                    std::to_string(cls) + "\n  files = [" + file + "]\n}\n";
    }
    write_file_atomic(dir / (stem + ".manifest"), manifest);
}

}  // namespace

void write_synth_benchmark(const std::string& out_dir) {
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir / "signals", ec);
    if (ec) throw RunError("cannot create '" + out_dir + "'");

    netevo_synth_config synth;
    netevo_synth_config_default(&synth);
    netevo_dataset* source = nullptr;
    netevo_dataset* target = nullptr;
    // The fixed seed makes the exported benchmark reproducible.
    if (netevo_dataset_synth(&synth, 20260809ull, &source, &target) != NETEVO_OK) {
        raise_run("benchmark generation");
    }
    DatasetPtr source_ptr(source);
    DatasetPtr target_ptr(target);

    write_domain(dir, "source", source);
    write_domain(dir, "target_shift", target);

    const std::string config =
        "# Calibrated synthetic domain-shift benchmark.\n"
        "[run]\n"
        "output_dir = results\n"
        "seed = 20260809\n"
        "worker_count = 2\n"
        "split = 0.64,0.16,0.20\n"
        "\n"
        "[teacher]\n"
        "hidden = 16,8\n"
        "max_iterations = 200\n"
        "pretrain_epochs = 20\n"
        "\n"
        "[evolution]\n"
        "population_size = 12\n"
        "crossover_prob = 0.8\n"
        "mutation_prob = 0.2\n"
        "max_generations = 8\n"
        "depth_min = 1\n"
        "depth_max = 4\n"
        "width_min = 4\n"
        "width_max = 32\n"
        "finetune_iters = 50\n"
        "\n"
        "[adapt]\n"
        "gamma = 0.5\n"
        "scope = both\n"
        "\n"
        "[source]\n"
        "manifest = source.manifest\n"
        "\n"
        "[target shifted]\n"
        "manifest = target_shift.manifest\n";
    write_file_atomic(dir / "benchmark.conf", config);
}

}  // namespace cli
