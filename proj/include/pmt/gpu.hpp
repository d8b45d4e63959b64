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

// Vendor GPU power (NVML, ROCm SMI) behind a minimal reader contract.
//
// Production readers bind the vendor libraries at run time with dlopen, so the
// toolkit builds and runs on machines without a GPU driver; there the readers
// simply fail to initialize and the backend reports itself unavailable.

#include "pmt/backend.hpp"
#include "pmt/sensor.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace pmt::gpu {

inline constexpr std::chrono::milliseconds kMinInterval{10};

struct PowerQuery {
  /// 0 on success, otherwise the vendor status code.
  int status = 0;
  std::uint32_t milliwatts = 0;
};

/// Low-level power reader of one vendor interface.
///
/// power_mw() is only called between a successful initialize() and the
/// matching shutdown(), with `device_index < device_count()`.
class Reader {
 public:
  virtual ~Reader() = default;

  virtual std::string name() const = 0;
  virtual bool initialize() = 0;
  virtual unsigned device_count() = 0;
  virtual PowerQuery power_mw(unsigned device_index) = 0;
  virtual bool shutdown() = 0;
};

/// Board power in watts. Throws BackendReadFailed on a vendor error code.
double sample_power(Reader& reader, unsigned device_index);

/// Owns an initialized reader for one device; shuts it down exactly once.
class GpuBackend final : public Backend {
 public:
  /// Throws DeviceUnavailable when the reader can't initialize or the index is out of range.
  GpuBackend(std::unique_ptr<Reader> reader, unsigned device_index);
  ~GpuBackend() override;

  GpuBackend(const GpuBackend&) = delete;
  GpuBackend& operator=(const GpuBackend&) = delete;

  const SensorDescriptor& descriptor() const override { return descriptor_; }
  void sample(std::span<RawSample> out) override;

 private:
  std::unique_ptr<Reader> reader_;
  unsigned device_index_;
  SensorDescriptor descriptor_;
};

Sensor create_gpu_sensor(std::unique_ptr<Reader> reader, unsigned device_index, SamplerConfig config = {});

/// Readers bound to libnvidia-ml and librocm_smi64 at run time.
std::unique_ptr<Reader> make_nvml_reader();
std::unique_ptr<Reader> make_rocm_smi_reader();

}  // namespace pmt::gpu
