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
#include "pmt/gpu.hpp"

#include "pmt/error.hpp"

#include <fmt/format.h>

#include <dlfcn.h>

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <utility>

namespace pmt::gpu {

double sample_power(Reader& reader, unsigned device_index) {
  const PowerQuery query = reader.power_mw(device_index);
  if (query.status != 0) {
    throw BackendReadFailed(
        fmt::format("{}: power query for device {} failed with status {}", reader.name(), device_index, query.status));
  }
  return static_cast<double>(query.milliwatts) / 1000.0;
}

GpuBackend::GpuBackend(std::unique_ptr<Reader> reader, unsigned device_index)
    : reader_(std::move(reader)), device_index_(device_index) {
  if (!reader_->initialize()) {
    const std::string name = reader_->name();
    reader_.reset();
    throw DeviceUnavailable(fmt::format("{}: initialization failed", name));
  }
  const unsigned count = reader_->device_count();
  if (device_index_ >= count) {
    const std::string name = reader_->name();
    reader_->shutdown();
    reader_.reset();
    throw DeviceUnavailable(fmt::format("{}: device {} requested but only {} present", name, device_index_, count));
  }
  descriptor_.backend_name = reader_->name();
  descriptor_.device_index = device_index_;
  descriptor_.counter_kind = CounterKind::InstantaneousPower;
  descriptor_.min_interval = kMinInterval;
  descriptor_.default_interval = kMinInterval;
  descriptor_.channel_names = {fmt::format("gpu{}", device_index_)};
  descriptor_.channel_in_total = {true};
}

GpuBackend::~GpuBackend() {
  if (reader_) {
    reader_->shutdown();
  }
}

void GpuBackend::sample(std::span<RawSample> out) { out[0] = RawSample{0, 0, sample_power(*reader_, device_index_)}; }

Sensor create_gpu_sensor(std::unique_ptr<Reader> reader, unsigned device_index, SamplerConfig config) {
  return Sensor(std::make_unique<GpuBackend>(std::move(reader), device_index), std::move(config));
}

namespace {

class DynamicLibrary {
 public:
  explicit DynamicLibrary(std::initializer_list<const char*> candidates) {
    for (const char* name : candidates) {
      handle_ = ::dlopen(name, RTLD_NOW | RTLD_LOCAL);
      if (handle_ != nullptr) {
        break;
      }
    }
  }
  ~DynamicLibrary() {
    if (handle_ != nullptr) {
      ::dlclose(handle_);
    }
  }
  DynamicLibrary(const DynamicLibrary&) = delete;
  DynamicLibrary& operator=(const DynamicLibrary&) = delete;

  bool loaded() const noexcept { return handle_ != nullptr; }

  template <typename Fn>
  Fn symbol(const char* name) const {
    return handle_ == nullptr ? nullptr : reinterpret_cast<Fn>(::dlsym(handle_, name));
  }

 private:
  void* handle_ = nullptr;
};

// Signatures follow nvml.h; nvmlReturn_t is an int-sized enum, 0 is success.
class NvmlReader final : public Reader {
 public:
  NvmlReader() : lib_({"libnvidia-ml.so.1", "libnvidia-ml.so"}) {
    init_ = lib_.symbol<int (*)()>("nvmlInit_v2");
    shutdown_ = lib_.symbol<int (*)()>("nvmlShutdown");
    count_ = lib_.symbol<int (*)(unsigned*)>("nvmlDeviceGetCount_v2");
    handle_ = lib_.symbol<int (*)(unsigned, void**)>("nvmlDeviceGetHandleByIndex_v2");
    power_ = lib_.symbol<int (*)(void*, unsigned*)>("nvmlDeviceGetPowerUsage");
  }

  std::string name() const override { return "nvml"; }

  bool initialize() override {
    if (!init_ || !shutdown_ || !count_ || !handle_ || !power_) {
      return false;
    }
    return init_() == 0;
  }

  unsigned device_count() override {
    unsigned count = 0;
    return count_(&count) == 0 ? count : 0;
  }

  PowerQuery power_mw(unsigned device_index) override {
    void* device = nullptr;
    if (const int status = handle_(device_index, &device); status != 0) {
      return PowerQuery{status, 0};
    }
    unsigned milliwatts = 0;
    const int status = power_(device, &milliwatts);
    return PowerQuery{status, milliwatts};
  }

  bool shutdown() override { return shutdown_ != nullptr && shutdown_() == 0; }

 private:
  DynamicLibrary lib_;
  int (*init_)() = nullptr;
  int (*shutdown_)() = nullptr;
  int (*count_)(unsigned*) = nullptr;
  int (*handle_)(unsigned, void**) = nullptr;
  int (*power_)(void*, unsigned*) = nullptr;
};

// Signatures follow rocm_smi.h. Average socket power is reported in microwatts.
class RocmSmiReader final : public Reader {
 public:
  RocmSmiReader() : lib_({"librocm_smi64.so", "librocm_smi64.so.7", "librocm_smi64.so.6", "librocm_smi64.so.5"}) {
    init_ = lib_.symbol<int (*)(std::uint64_t)>("rsmi_init");
    shutdown_ = lib_.symbol<int (*)()>("rsmi_shut_down");
    count_ = lib_.symbol<int (*)(std::uint32_t*)>("rsmi_num_monitor_devices");
    power_ = lib_.symbol<int (*)(std::uint32_t, std::uint32_t, std::uint64_t*)>("rsmi_dev_power_ave_get");
  }

  std::string name() const override { return "rocm-smi"; }

  bool initialize() override {
    if (!init_ || !shutdown_ || !count_ || !power_) {
      return false;
    }
    return init_(0) == 0;
  }

  unsigned device_count() override {
    std::uint32_t count = 0;
    return count_(&count) == 0 ? count : 0;
  }

  PowerQuery power_mw(unsigned device_index) override {
    std::uint64_t microwatts = 0;
    const int status = power_(device_index, 0, &microwatts);
    const std::uint64_t milliwatts = microwatts / 1000;
    return PowerQuery{status, static_cast<std::uint32_t>(
                                  std::min<std::uint64_t>(milliwatts, std::numeric_limits<std::uint32_t>::max()))};
  }

  bool shutdown() override { return shutdown_ != nullptr && shutdown_() == 0; }

 private:
  DynamicLibrary lib_;
  int (*init_)(std::uint64_t) = nullptr;
  int (*shutdown_)() = nullptr;
  int (*count_)(std::uint32_t*) = nullptr;
  int (*power_)(std::uint32_t, std::uint32_t, std::uint64_t*) = nullptr;
};

}  // namespace

std::unique_ptr<Reader> make_nvml_reader() { return std::make_unique<NvmlReader>(); }
std::unique_ptr<Reader> make_rocm_smi_reader() { return std::make_unique<RocmSmiReader>(); }

}  // namespace pmt::gpu
