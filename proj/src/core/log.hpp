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

#pragma once

#include <string>

namespace netevo {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kQuiet = 4 };

/// Threshold initialized once from the NETEVO_LOG environment variable
/// (debug|info|warn|error|quiet, default warn); can be overridden at runtime.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

/// Writes "[level] message" to stderr when level passes the threshold.
void log_message(LogLevel level, const std::string& message);

inline void log_warn(const std::string& message) { log_message(LogLevel::kWarn, message); }
inline void log_info(const std::string& message) { log_message(LogLevel::kInfo, message); }

}  // namespace netevo
