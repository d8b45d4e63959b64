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
#include "pmt/trace.hpp"

#include "pmt/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string_view>
#include <system_error>

namespace pmt {

namespace {

constexpr std::string_view kMagic = "# pmt-dump";

std::string sanitize_channel(std::string name) {
  for (char& c : name) {
    if (c == ' ' || c == ',' || c == '\t' || c == '\n' || c == '\r') {
      c = '_';
    }
  }
  return name;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) {
      ++pos;
    }
    if (pos >= line.size()) {
      break;
    }
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') {
      ++end;
    }
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(fmt::format("'{}' is not a number", field), line_no);
  }
  return value;
}

unsigned long long parse_unsigned(std::string_view field, std::size_t line_no) {
  unsigned long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(fmt::format("'{}' is not a non-negative integer", field), line_no);
  }
  return value;
}

TraceHeader parse_header(std::string_view line) {
  if (line.substr(0, kMagic.size()) != kMagic) {
    throw ParseError("missing '# pmt-dump' header", 1);
  }
  TraceHeader header;
  bool seen_backend = false;
  bool seen_device = false;
  bool seen_interval = false;
  bool seen_channels = false;
  for (auto token : split_ws(line.substr(kMagic.size()))) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("header token '{}' is not key=value", token), 1);
    }
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "backend") {
      header.backend_name = std::string(value);
      seen_backend = true;
    } else if (key == "device") {
      header.device_index = static_cast<unsigned>(parse_unsigned(value, 1));
      seen_device = true;
    } else if (key == "interval_ms") {
      header.interval = std::chrono::milliseconds(parse_unsigned(value, 1));
      seen_interval = true;
    } else if (key == "channels") {
      std::size_t pos = 0;
      while (!value.empty() && pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos) {
          comma = value.size();
        }
        header.channel_names.emplace_back(value.substr(pos, comma - pos));
        pos = comma + 1;
      }
      seen_channels = true;
    }
    // Unknown keys are tolerated so the header can grow.
  }
  if (!seen_backend || !seen_device || !seen_interval || !seen_channels) {
    throw ParseError("header lacks one of backend/device/interval_ms/channels", 1);
  }
  return header;
}

}  // namespace

std::string format_header(const TraceHeader& header) {
  std::string channels;
  for (std::size_t i = 0; i < header.channel_names.size(); ++i) {
    if (i > 0) {
      channels += ',';
    }
    channels += sanitize_channel(header.channel_names[i]);
  }
  return fmt::format("{} backend={} device={} interval_ms={} channels={}\n", kMagic,
                     sanitize_channel(header.backend_name), header.device_index, header.interval.count(),
                     channels);
}

std::string format_record(const TraceRecord& record) {
  std::string line = fmt::format("{:.9g} {:.9g}", record.timestamp, record.watts_total);
  for (double w : record.watts_per_channel) {
    line += fmt::format(" {:.9g}", w);
  }
  line += '\n';
  return line;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, const TraceHeader& header)
    : path_(path), out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) {
    throw IoError(fmt::format("cannot open dump file '{}' for writing", path.string()));
  }
  out_ << format_header(header);
  if (!out_) {
    throw IoError(fmt::format("cannot write dump file '{}'", path.string()));
  }
}

void TraceWriter::write(const TraceRecord& record) {
  out_ << format_record(record);
  if (!out_) {
    throw IoError(fmt::format("write to dump file '{}' failed", path_.string()));
  }
}

void TraceWriter::close() {
  if (!out_.is_open()) {
    return;
  }
  out_.flush();
  const bool ok = static_cast<bool>(out_);
  out_.close();
  if (!ok) {
    throw IoError(fmt::format("flushing dump file '{}' failed", path_.string()));
  }
}

Trace parse_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!have_header) {
      trace.header = parse_header(line);
      have_header = true;
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') {
      continue;
    }
    const std::size_t expected = 2 + trace.header.channel_names.size();
    if (fields.size() != expected) {
      throw ParseError(fmt::format("expected {} fields, found {}", expected, fields.size()), line_no);
    }
    TraceRecord record;
    record.timestamp = parse_real(fields[0], line_no);
    record.watts_total = parse_real(fields[1], line_no);
    record.watts_per_channel.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      record.watts_per_channel.push_back(parse_real(fields[i], line_no));
    }
    if (!trace.records.empty() && record.timestamp <= trace.records.back().timestamp) {
      throw ParseError("timestamps must be strictly increasing", line_no);
    }
    trace.records.push_back(std::move(record));
  }
  if (!have_header) {
    throw ParseError("empty file, missing header", 1);
  }
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open trace '{}'", path.string()));
  }
  try {
    return parse_trace(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.line());
  }
}

TraceSummary summarize(const Trace& trace) {
  const auto& records = trace.records;
  if (records.empty()) {
    throw EmptyTrace("trace has no records");
  }
  TraceSummary summary;
  summary.records = records.size();
  summary.duration = records.back().timestamp - records.front().timestamp;
  summary.min_watts = records.front().watts_total;
  summary.max_watts = records.front().watts_total;
  for (std::size_t i = 0; i < records.size(); ++i) {
    summary.min_watts = std::min(summary.min_watts, records[i].watts_total);
    summary.max_watts = std::max(summary.max_watts, records[i].watts_total);
    if (i + 1 < records.size()) {
      summary.joules += records[i].watts_total * (records[i + 1].timestamp - records[i].timestamp);
    }
  }
  summary.mean_watts = summary.duration > 0.0 ? summary.joules / summary.duration : records.front().watts_total;
  return summary;
}

Measurement to_measurement(const TraceSummary& summary, std::string name) {
  return Measurement{summary.joules, summary.mean_watts, summary.duration, std::move(name)};
}

std::vector<Phase> detect_phases(const Trace& trace, double relative_threshold) {
  std::vector<Phase> phases;
  const auto& records = trace.records;
  if (records.empty()) {
    return phases;
  }
  Phase current{records.front().timestamp, records.front().timestamp, records.front().watts_total, 1};
  double sum = records.front().watts_total;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double w = records[i].watts_total;
    const double mean = sum / static_cast<double>(current.records);
    if (std::abs(w - mean) > relative_threshold * std::max(std::abs(mean), 1.0)) {
      current.end = records[i].timestamp;
      current.mean_watts = mean;
      phases.push_back(current);
      current = Phase{records[i].timestamp, records[i].timestamp, w, 1};
      sum = w;
    } else {
      sum += w;
      ++current.records;
    }
  }
  current.end = records.back().timestamp;
  current.mean_watts = sum / static_cast<double>(current.records);
  phases.push_back(current);
  return phases;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string stacked_csv(const std::vector<Trace>& traces, const std::vector<std::string>& names) {
  if (traces.empty()) {
    throw EmptyTrace("no traces to stack");
  }
  for (const auto& trace : traces) {
    if (trace.records.empty()) {
      throw EmptyTrace("cannot stack an empty trace");
    }
  }
  std::string out = "timestamp_s";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    out += ',';
    out += csv_field(i < names.size() ? names[i] : fmt::format("trace{}", i));
  }
  out += "\r\n";

  for (const auto& reference : traces.front().records) {
    out += fmt::format("{:.9g}", reference.timestamp);
    for (const auto& trace : traces) {
      const auto& records = trace.records;
      auto it = std::lower_bound(records.begin(), records.end(), reference.timestamp,
                                 [](const TraceRecord& r, double t) { return r.timestamp < t; });
      if (it == records.end()) {
        it = std::prev(records.end());
      } else if (it != records.begin()) {
        const auto before = std::prev(it);
        if (reference.timestamp - before->timestamp <= it->timestamp - reference.timestamp) {
          it = before;
        }
      }
      out += fmt::format(",{:.9g}", it->watts_total);
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace pmt
