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

#include "core/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace netevo {

namespace {

LogLevel level_from_env() {
    const char* env = std::getenv("NETEVO_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "warn") == 0) return LogLevel::kWarn;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::kQuiet;
    return LogLevel::kWarn;
}

std::atomic<int>& threshold_storage() {
    static std::atomic<int> threshold{static_cast<int>(level_from_env())};
    return threshold;
}

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::kDebug: return "debug";
        case LogLevel::kInfo: return "info";
        case LogLevel::kWarn: return "warn";
        case LogLevel::kError: return "error";
        default: return "?";
    }
}

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold_storage().load()); }

void set_log_threshold(LogLevel level) { threshold_storage().store(static_cast<int>(level)); }

void log_message(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) < static_cast<int>(log_threshold())) return;
    std::fprintf(stderr, "[%s] %s\n", level_name(level), message.c_str());
}

}  // namespace netevo
