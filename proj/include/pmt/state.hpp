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

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace pmt {

enum class CounterKind {
  CumulativeEnergy,
  InstantaneousPower,
};

const char* to_string(CounterKind kind) noexcept;

/// Identity and capabilities of one backend instance.
///
/// `channel_in_total` marks which channels contribute to the sensor total.
/// Channels that are already contained in another channel (RAPL sub-domains)
/// are reported but not summed.
struct SensorDescriptor {
  std::string backend_name;
  unsigned device_index = 0;
  CounterKind counter_kind = CounterKind::InstantaneousPower;
  std::chrono::milliseconds min_interval{1};
  std::chrono::milliseconds default_interval{100};
  std::vector<std::string> channel_names;
  std::vector<bool> channel_in_total;
};

/// One consistent snapshot of a sensor.
///
/// `timestamp` is seconds on a monotonic clock zeroed at sensor creation and
/// all joule values are cumulative since that instant, wrap corrected.
/// A State is a plain value and stays valid after its sensor is gone.
struct State {
  double timestamp = 0.0;
  double joules_total = 0.0;
  std::vector<double> joules_per_channel;
  std::vector<std::string> channel_names;
  std::vector<bool> channel_in_total;
};

/// Energy, average power and duration of one measured region.
struct Measurement {
  double joules = 0.0;
  double watts = 0.0;
  double seconds = 0.0;
  std::string backend_name;
};

// Region metrics over two States of the same sensor. All throw
// NegativeInterval when `end` precedes `start`.
double joules(const State& start, const State& end);
double seconds(const State& start, const State& end);
/// Average power; 0 for a zero-length interval.
double watts(const State& start, const State& end);

Measurement measure(const State& start, const State& end, std::string backend_name = {});

/// Energy-delay product in J*s.
double energy_delay_product(const Measurement& m) noexcept;

/// Throughput per watt in GFLOP/s/W. Throws DegenerateMeasurement when the
/// measurement has no duration or no power.
double flops_efficiency(const Measurement& m, std::uint64_t flop_count);

}  // namespace pmt
