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

// Batch front-end for the evolutionary architecture search library.
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "config.hpp"
#include "runner.hpp"

namespace {

int run_command(const std::string& config_path, bool validate_only) {
    cli::RunConfig config;
    try {
        config = cli::load_config(config_path);
    } catch (const cli::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (validate_only) {
        std::printf("ok: %zu target case(s)\n", config.targets.size());
        return 0;
    }
    try {
        cli::run(config);
    } catch (const cli::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 4;
    }
    return 0;
}

int synth_bench_command(const std::string& out_dir) {
    try {
        cli::write_synth_benchmark(out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 4;
    }
    std::printf("benchmark written to %s (run it with: netevo run %s/benchmark.conf)\n",
                out_dir.c_str(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evolutionary architecture search for fully-connected classifiers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(netevo_version()));

    std::string config_path;
    std::string bench_dir;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a full search run");
    run_cmd->add_option("config", config_path, "run configuration file")->required();

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "parse and validate a configuration, then exit");
    validate_cmd->add_option("config", config_path, "run configuration file")->required();

    CLI::App* bench_cmd = app.add_subcommand(
        "synth-bench", "write the calibrated synthetic benchmark as manifests + signal files");
    bench_cmd->add_option("out_dir", bench_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return run_command(config_path, false);
    if (validate_cmd->parsed()) return run_command(config_path, true);
    return synth_bench_command(bench_dir);
}
