/*
 * Copyright (C) 2026 The PMT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Command-line frontend. The commands write to caller-supplied streams and
// return the process exit code so they can be driven in-process by tests.

#include "pmt/sensor.hpp"
#include "pmt/state.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pmt::cli {

inline constexpr int kExitBackendError = 2;
inline constexpr int kExitSpawnFailure = 127;

struct RunOptions {
  std::vector<std::string> backends;
  unsigned device = 0;
  unsigned interval_ms = 0;
  std::optional<std::filesystem::path> dump_path;
  /// Per-backend options, keyed by backend name.
  std::map<std::string, Config> backend_config;
  std::vector<std::string> command;
};

struct RunReport {
  std::vector<Measurement> measurements;
  int exit_status = 0;
  std::vector<std::filesystem::path> dump_paths;
};

struct AnalyzeOptions {
  std::vector<std::filesystem::path> traces;
  std::optional<std::uint64_t> flop_count;
  bool csv = false;
  bool phases = false;
};

/// `$PMT_DEFAULT_BACKEND`, or "rapl".
std::string default_backend();

/// One line per backend: name, availability, device count, min interval.
int cmd_list(std::ostream& out);

/// Measure `options.command` as a child process. Prints one
/// `<backend> <joules> J <watts> W <seconds> s` line per backend to `report`
/// and returns the child's exit code (2 on backend errors, 127 when the
/// child could not be spawned).
int cmd_run(const RunOptions& options, std::ostream& report, std::ostream& err, RunReport* result = nullptr);

/// Energy, EDP and efficiency report over dump files. Returns 1 on bad input.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

/// Spawn `command`, wait for it and return its exit code (128 + signal when
/// killed). Returns std::nullopt when it could not be started.
std::optional<int> run_child(const std::vector<std::string>& command);

int main(int argc, char** argv);

}  // namespace pmt::cli
