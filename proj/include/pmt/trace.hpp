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

// Dump-mode trace files.
//
//   # pmt-dump backend=<name> device=<index> interval_ms=<i> channels=<c1,c2,...>
//   <timestamp_s> <watts_total> <watts_c1> <watts_c2> ...
//
// Timestamps are seconds since sensor creation.

#include "pmt/state.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pmt {

struct TraceHeader {
  std::string backend_name;
  unsigned device_index = 0;
  std::chrono::milliseconds interval{0};
  std::vector<std::string> channel_names;
};

struct TraceRecord {
  double timestamp = 0.0;
  double watts_total = 0.0;
  std::vector<double> watts_per_channel;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRecord> records;
};

std::string format_header(const TraceHeader& header);
std::string format_record(const TraceRecord& record);

/// Appends trace lines to a file. Throws IoError when the file can't be written.
class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& path, const TraceHeader& header);

  void write(const TraceRecord& record);
  void close();

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Throws ParseError naming the offending line.
Trace parse_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

struct TraceSummary {
  std::size_t records = 0;
  double duration = 0.0;
  /// Sum of w_i * (t_{i+1} - t_i) over measured timestamps.
  double joules = 0.0;
  /// Time-weighted mean; the single reading when the trace has one record.
  double mean_watts = 0.0;
  double min_watts = 0.0;
  double max_watts = 0.0;
};

/// Throws EmptyTrace when there are no records.
TraceSummary summarize(const Trace& trace);

Measurement to_measurement(const TraceSummary& summary, std::string name = {});

/// A stretch of the trace where power stays at one level.
struct Phase {
  double begin = 0.0;
  double end = 0.0;
  double mean_watts = 0.0;
  std::size_t records = 0;
};

/// Split a trace into power plateaus. A record opens a new phase when it
/// deviates from the running mean of the current phase by more than
/// `relative_threshold` of that mean (with a 1 W floor).
std::vector<Phase> detect_phases(const Trace& trace, double relative_threshold = 0.25);

/// Per-timestamp CSV of total watts, one column per trace, on the timeline of
/// the first trace; other traces contribute the record nearest in time.
std::string stacked_csv(const std::vector<Trace>& traces, const std::vector<std::string>& names);

/// Quote a CSV field when it contains a separator, quote or line break.
std::string csv_field(const std::string& field);

}  // namespace pmt
