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
#include "pmt/state.hpp"

#include "pmt/error.hpp"

#include <fmt/format.h>

#include <utility>

namespace pmt {

const char* to_string(CounterKind kind) noexcept {
  switch (kind) {
    case CounterKind::CumulativeEnergy:
      return "energy";
    case CounterKind::InstantaneousPower:
      return "power";
  }
  return "unknown";
}

namespace {

void check_order(const State& start, const State& end) {
  if (end.timestamp < start.timestamp) {
    throw NegativeInterval(
        fmt::format("end state (t={}) precedes start state (t={})", end.timestamp, start.timestamp));
  }
}

}  // namespace

double joules(const State& start, const State& end) {
  check_order(start, end);
  return end.joules_total - start.joules_total;
}

double seconds(const State& start, const State& end) {
  check_order(start, end);
  return end.timestamp - start.timestamp;
}

double watts(const State& start, const State& end) {
  const double s = seconds(start, end);
  if (s == 0.0) {
    return 0.0;
  }
  return joules(start, end) / s;
}

Measurement measure(const State& start, const State& end, std::string backend_name) {
  return Measurement{joules(start, end), watts(start, end), seconds(start, end), std::move(backend_name)};
}

double energy_delay_product(const Measurement& m) noexcept { return m.joules * m.seconds; }

double flops_efficiency(const Measurement& m, std::uint64_t flop_count) {
  if (!(m.seconds > 0.0) || !(m.watts > 0.0)) {
    throw DegenerateMeasurement(
        fmt::format("flops efficiency needs positive time and power (got {} s, {} W)", m.seconds, m.watts));
  }
  const double gflops_per_second = static_cast<double>(flop_count) / m.seconds / 1e9;
  return gflops_per_second / m.watts;
}

}  // namespace pmt
