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

// Generic hwmon sysfs sensors: hwmon<n>/power<k>_input (microwatts) or
// hwmon<n>/energy<k>_input (microjoules). One sensor covers one hwmon
// directory, and all its channels must be of the same kind.

#include "pmt/backend.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pmt::hwmon {

inline constexpr std::chrono::milliseconds kMinInterval{100};

enum class ChannelKind {
  PowerMicrowatts,
  EnergyMicrojoules,
};

struct Channel {
  std::filesystem::path file_path;
  ChannelKind kind = ChannelKind::PowerMicrowatts;
  std::string label;
  unsigned hwmon_index = 0;
  unsigned channel_index = 0;
};

/// `$PMT_SYSFS_ROOT/class/hwmon`, or `/sys/class/hwmon`.
std::filesystem::path default_root();

/// All channels under `root`, ordered by hwmon index then channel index.
/// Throws NoDomainsFound when there are none and MixedKinds when a directory
/// exposes both power and energy files.
std::vector<Channel> discover_channels(const std::filesystem::path& root);

/// The channels of `hwmon<index>` only.
std::vector<Channel> discover_device(const std::filesystem::path& root, unsigned index);

/// Indices of hwmon directories that expose at least one usable channel.
std::vector<unsigned> usable_devices(const std::filesystem::path& root);

/// Raw value in the channel's unit. Throws IoError or ParseError.
std::uint64_t read_channel(const Channel& channel);

constexpr double microwatts_to_watts(std::uint64_t raw) noexcept { return static_cast<double>(raw) * 1e-6; }

class HwmonBackend final : public Backend {
 public:
  HwmonBackend(const std::filesystem::path& root, unsigned device_index);

  const SensorDescriptor& descriptor() const override { return descriptor_; }
  void sample(std::span<RawSample> out) override;

  const std::vector<Channel>& channels() const noexcept { return channels_; }

 private:
  std::vector<Channel> channels_;
  SensorDescriptor descriptor_;
};

}  // namespace pmt::hwmon
