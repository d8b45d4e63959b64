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

#include "pmt/backend.hpp"
#include "pmt/state.hpp"
#include "pmt/trace.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

namespace pmt {

struct SamplerConfig {
  /// Zero selects the backend's default interval.
  std::chrono::milliseconds interval{0};
  /// When set, dump-mode starts together with the sampler.
  std::optional<std::filesystem::path> dump_path;
};

/// Integrator state of one channel.
struct EnergyAccumulator {
  std::uint64_t last_raw = 0;
  double last_power_watts = 0.0;
  double accumulated_joules = 0.0;
  double last_tick = 0.0;
};

/// Establish the zero point of an accumulator from the first sample at time `t`.
EnergyAccumulator prime_accumulator(const RawSample& sample, CounterKind kind, double t) noexcept;

/// Advance an accumulator by one sample taken `dt` seconds after the previous one.
///
/// Energy counters add the wrap-corrected counter delta. Power readings are
/// integrated with the left rectangle rule: the previous power times `dt`.
EnergyAccumulator tick(EnergyAccumulator acc, const RawSample& sample, CounterKind kind, double dt) noexcept;

/// Background loop that polls one backend and publishes cumulative States.
///
/// The first sample is taken synchronously by the constructor and defines
/// time and energy zero. Afterwards a thread samples every `interval`; a
/// sample that overruns its slot is not back-filled, the next dt is simply
/// longer. If the backend fails mid-run the snapshot freezes and read()
/// throws SensorStopped.
class Sampler {
 public:
  Sampler(std::unique_ptr<Backend> backend, SamplerConfig config);
  ~Sampler();

  Sampler(const Sampler&) = delete;
  Sampler& operator=(const Sampler&) = delete;

  /// Latest snapshot. Power-type sensors are extrapolated to "now" with the
  /// last reading, which is exactly what the next tick will integrate.
  State read() const;

  void start_dump(const std::filesystem::path& path);
  void stop_dump();
  bool dump_active() const;

  /// Terminate the loop. Idempotent; the final snapshot stays readable.
  void stop();

  bool running() const noexcept { return !stopped_.load(); }
  bool failed() const noexcept { return failed_.load(); }
  std::string failure() const;

  const SensorDescriptor& descriptor() const noexcept { return descriptor_; }
  std::chrono::milliseconds interval() const noexcept { return interval_; }

 private:
  void loop(std::stop_token stop);
  void tick_once();
  double now() const noexcept;

  std::unique_ptr<Backend> backend_;
  SensorDescriptor descriptor_;
  std::chrono::milliseconds interval_;
  std::chrono::steady_clock::time_point origin_;

  // Loop-owned.
  std::vector<RawSample> samples_;

  mutable std::mutex snapshot_mutex_;
  std::vector<EnergyAccumulator> accumulators_;
  State snapshot_;

  mutable std::mutex dump_mutex_;
  std::optional<TraceWriter> dump_;

  mutable std::mutex failure_mutex_;
  std::string failure_;

  std::atomic<bool> stopped_{false};
  std::atomic<bool> failed_{false};

  std::mutex wake_mutex_;
  std::condition_variable_any wake_;
  std::jthread thread_;
};

}  // namespace pmt
