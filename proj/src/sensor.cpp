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
#include "pmt/sensor.hpp"

#include "pmt/error.hpp"
#include "pmt/gpu.hpp"
#include "pmt/hwmon.hpp"
#include "pmt/powercap.hpp"
#include "pmt/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <system_error>
#include <utility>

namespace pmt {

Sensor::Sensor(std::unique_ptr<Backend> backend, SamplerConfig config)
    : sampler_(std::make_unique<Sampler>(std::move(backend), std::move(config))) {}

Sampler& Sensor::sampler() const {
  if (!sampler_) {
    throw SensorStopped("sensor has been moved from");
  }
  return *sampler_;
}

State Sensor::read() const { return sampler().read(); }

Measurement Sensor::measure(const State& start, const State& end) const {
  return pmt::measure(start, end, sampler().descriptor().backend_name);
}

void Sensor::start_dump(const std::filesystem::path& path) { sampler().start_dump(path); }
void Sensor::stop_dump() { sampler().stop_dump(); }
bool Sensor::dump_active() const { return sampler().dump_active(); }

void Sensor::stop() {
  if (sampler_) {
    sampler_->stop();
  }
}

const SensorDescriptor& Sensor::descriptor() const { return sampler().descriptor(); }
std::chrono::milliseconds Sensor::interval() const { return sampler().interval(); }

namespace {

using BackendFactory = std::unique_ptr<Backend> (*)(std::string_view name, unsigned device, const Config& config);
using BackendProbe = BackendInfo (*)(std::string_view name, const Config& config);

struct RegistryEntry {
  std::string_view name;
  std::vector<std::string_view> keys;
  BackendFactory make;
  BackendProbe probe;
};

std::uint64_t config_integer(const Config& config, std::string_view key, std::uint64_t fallback) {
  const auto it = config.find(key);
  if (it == config.end()) {
    return fallback;
  }
  const std::string& text = it->second;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidConfig(fmt::format("'{}' must be a non-negative integer, got '{}'", key, text));
  }
  return value;
}

std::filesystem::path config_root(const Config& config, std::filesystem::path fallback) {
  const auto it = config.find("root");
  return it == config.end() ? fallback : std::filesystem::path(it->second);
}

SensorDescriptor base_descriptor(std::string_view name, CounterKind kind, std::chrono::milliseconds min_interval) {
  SensorDescriptor d;
  d.backend_name = std::string(name);
  d.counter_kind = kind;
  d.min_interval = min_interval;
  d.default_interval = std::max(min_interval, std::chrono::milliseconds{10});
  return d;
}

// synthetic

std::unique_ptr<Backend> make_synthetic(std::string_view name, unsigned device, const Config& config) {
  if (device != 0) {
    throw DeviceUnavailable(fmt::format("{} has a single device, got index {}", name, device));
  }
  const auto min_interval = std::chrono::milliseconds(config_integer(config, "min_interval_ms", 1));
  return std::make_unique<synthetic::SyntheticBackend>(std::string(name), device, synthetic::parse_profile(config),
                                                       min_interval);
}

BackendInfo probe_synthetic(std::string_view name, const Config&) {
  BackendInfo info;
  info.descriptor = base_descriptor(name, CounterKind::InstantaneousPower, std::chrono::milliseconds{1});
  info.available = true;
  info.device_count = 1;
  return info;
}

// rapl

std::unique_ptr<Backend> make_rapl(std::string_view, unsigned device, const Config& config) {
  if (device != 0) {
    throw DeviceUnavailable(fmt::format("rapl exposes a single system-wide device, got index {}", device));
  }
  return std::make_unique<powercap::PowercapBackend>(config_root(config, powercap::default_root()));
}

BackendInfo probe_rapl(std::string_view name, const Config& config) {
  BackendInfo info;
  info.descriptor = base_descriptor(name, CounterKind::CumulativeEnergy, powercap::kMinInterval);
  try {
    powercap::PowercapBackend backend(config_root(config, powercap::default_root()));
    info.descriptor = backend.descriptor();
    info.available = true;
    info.device_count = 1;
  } catch (const Error& e) {
    info.detail = e.what();
  }
  return info;
}

// hwmon

std::unique_ptr<Backend> make_hwmon(std::string_view, unsigned device, const Config& config) {
  return std::make_unique<hwmon::HwmonBackend>(config_root(config, hwmon::default_root()), device);
}

BackendInfo probe_hwmon(std::string_view name, const Config& config) {
  BackendInfo info;
  info.descriptor = base_descriptor(name, CounterKind::InstantaneousPower, hwmon::kMinInterval);
  const auto root = config_root(config, hwmon::default_root());
  const auto devices = hwmon::usable_devices(root);
  info.device_count = static_cast<unsigned>(devices.size());
  if (devices.empty()) {
    info.detail = fmt::format("no usable hwmon channels under '{}'", root.string());
    return info;
  }
  try {
    hwmon::HwmonBackend backend(root, devices.front());
    info.descriptor = backend.descriptor();
    info.available = true;
  } catch (const Error& e) {
    info.detail = e.what();
  }
  return info;
}

// vendor GPUs

template <std::unique_ptr<gpu::Reader> (*MakeReader)()>
std::unique_ptr<Backend> make_gpu(std::string_view, unsigned device, const Config&) {
  return std::make_unique<gpu::GpuBackend>(MakeReader(), device);
}

template <std::unique_ptr<gpu::Reader> (*MakeReader)()>
BackendInfo probe_gpu(std::string_view name, const Config&) {
  BackendInfo info;
  info.descriptor = base_descriptor(name, CounterKind::InstantaneousPower, gpu::kMinInterval);
  auto reader = MakeReader();
  if (!reader->initialize()) {
    info.detail = fmt::format("{} could not be initialized", reader->name());
    return info;
  }
  info.device_count = reader->device_count();
  info.available = info.device_count > 0;
  if (!info.available) {
    info.detail = "no devices";
  }
  reader->shutdown();
  return info;
}

const std::array<RegistryEntry, 5>& registry() {
  static const std::array<RegistryEntry, 5> entries{{
      {"synthetic",
       {"shape", "base_watts", "peak_watts", "period_s", "duration_s", "power_watts", "min_interval_ms"},
       &make_synthetic, &probe_synthetic},
      {"rapl", {"root"}, &make_rapl, &probe_rapl},
      {"hwmon", {"root"}, &make_hwmon, &probe_hwmon},
      {"nvml", {}, &make_gpu<&gpu::make_nvml_reader>,
       &probe_gpu<&gpu::make_nvml_reader>},
      {"rocm-smi", {}, &make_gpu<&gpu::make_rocm_smi_reader>,
       &probe_gpu<&gpu::make_rocm_smi_reader>},
  }};
  return entries;
}

const RegistryEntry* find_entry(std::string_view name) {
  for (const auto& entry : registry()) {
    if (entry.name == name) {
      return &entry;
    }
  }
  // Additional synthetic instances, so several can run side by side.
  if (name.size() > 10 && name.substr(0, 10) == "synthetic-") {
    return &registry().front();
  }
  return nullptr;
}

void check_keys(const RegistryEntry& entry, std::string_view name, const Config& config) {
  for (const auto& [key, value] : config) {
    if (key == "interval_ms" || key == "dump_path") {
      continue;
    }
    if (std::find(entry.keys.begin(), entry.keys.end(), key) == entry.keys.end()) {
      throw InvalidConfig(fmt::format("backend '{}' does not accept option '{}'", name, key));
    }
  }
}

}  // namespace

Sensor create_sensor(std::string_view backend_name, unsigned device_index, const Config& config) {
  const RegistryEntry* entry = find_entry(backend_name);
  if (entry == nullptr) {
    throw UnknownBackend(fmt::format("unknown backend '{}'", backend_name));
  }
  check_keys(*entry, backend_name, config);

  SamplerConfig sampler_config;
  sampler_config.interval = std::chrono::milliseconds(config_integer(config, "interval_ms", 0));
  if (const auto it = config.find("dump_path"); it != config.end()) {
    sampler_config.dump_path = it->second;
  }
  return Sensor(entry->make(backend_name, device_index, config), std::move(sampler_config));
}

std::vector<BackendInfo> list_backends(const Config& config) {
  std::vector<BackendInfo> infos;
  for (const auto& entry : registry()) {
    infos.push_back(entry.probe(entry.name, config));
  }
  return infos;
}

std::vector<std::string> registered_backends() {
  std::vector<std::string> names;
  for (const auto& entry : registry()) {
    names.emplace_back(entry.name);
  }
  return names;
}

}  // namespace pmt
