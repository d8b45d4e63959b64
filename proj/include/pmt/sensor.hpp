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
#include "pmt/sampler.hpp"
#include "pmt/state.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pmt {

/// Backend options. Keys understood by every backend: `interval_ms`,
/// `dump_path`. File-backed backends also take `root`; see each backend for
/// the rest. Unknown keys are rejected with InvalidConfig.
using Config = std::map<std::string, std::string, std::less<>>;

/// A running power sensor: a backend plus its background sampler.
///
///   pmt::Sensor sensor = pmt::create_sensor("rapl");
///   pmt::State start = sensor.read();
///   run_region();
///   pmt::State end = sensor.read();
///   std::cout << sensor.joules(start, end) << " [J]\n";
class Sensor {
 public:
  explicit Sensor(std::unique_ptr<Backend> backend, SamplerConfig config = {});
  Sensor(Sensor&&) noexcept = default;
  Sensor& operator=(Sensor&&) noexcept = default;
  ~Sensor() = default;

  /// Cheap snapshot copy; safe to call from any thread. Throws SensorStopped
  /// if the backend failed after startup.
  State read() const;

  double joules(const State& start, const State& end) const { return pmt::joules(start, end); }
  double watts(const State& start, const State& end) const { return pmt::watts(start, end); }
  double seconds(const State& start, const State& end) const { return pmt::seconds(start, end); }
  Measurement measure(const State& start, const State& end) const;

  void start_dump(const std::filesystem::path& path);
  void stop_dump();
  bool dump_active() const;

  /// Stop sampling; later reads return the final State. Idempotent.
  void stop();

  const SensorDescriptor& descriptor() const;
  std::chrono::milliseconds interval() const;

 private:
  Sampler& sampler() const;

  std::unique_ptr<Sampler> sampler_;
};

/// Create a sensor from the backend registry.
///
/// Registered names: `synthetic` (any `synthetic-<tag>` is a further
/// synthetic instance under that name), `rapl`, `hwmon`, `nvml`, `rocm-smi`.
/// Throws UnknownBackend, DeviceUnavailable or InvalidConfig.
Sensor create_sensor(std::string_view backend_name, unsigned device_index = 0, const Config& config = {});

struct BackendInfo {
  SensorDescriptor descriptor;
  bool available = false;
  unsigned device_count = 0;
  /// Why the backend is unavailable, empty otherwise.
  std::string detail;
};

/// Every registered backend with its current availability.
std::vector<BackendInfo> list_backends(const Config& config = {});

/// Names in the static registry, in listing order.
std::vector<std::string> registered_backends();

}  // namespace pmt
