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
#include "pmt/hwmon.hpp"

#include "pmt/error.hpp"
#include "sysfs.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <optional>
#include <tuple>

namespace pmt::hwmon {

namespace {

// hwmon energy counters are 64-bit and do not roll over in practice.
constexpr std::uint64_t kEnergyRange = std::numeric_limits<std::uint64_t>::max();

struct ChannelFile {
  ChannelKind kind;
  unsigned index;
};

// "power<k>_input" / "energy<k>_input"
std::optional<ChannelFile> parse_channel_file(const std::string& name) {
  constexpr std::string_view kSuffix = "_input";
  if (name.size() <= kSuffix.size() || name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
    return std::nullopt;
  }
  const std::string stem = name.substr(0, name.size() - kSuffix.size());
  if (auto k = sysfs::suffix_index(stem, "power")) {
    return ChannelFile{ChannelKind::PowerMicrowatts, *k};
  }
  if (auto k = sysfs::suffix_index(stem, "energy")) {
    return ChannelFile{ChannelKind::EnergyMicrojoules, *k};
  }
  return std::nullopt;
}

std::vector<Channel> scan_directory(const std::filesystem::path& dir, unsigned hwmon_index) {
  std::vector<Channel> channels;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    auto file = parse_channel_file(name);
    if (!file || entry.is_directory(ec)) {
      continue;
    }
    Channel channel;
    channel.file_path = entry.path();
    channel.kind = file->kind;
    channel.hwmon_index = hwmon_index;
    channel.channel_index = file->index;
    channels.push_back(std::move(channel));
  }
  std::sort(channels.begin(), channels.end(), [](const Channel& a, const Channel& b) {
    return std::make_tuple(a.kind, a.channel_index) < std::make_tuple(b.kind, b.channel_index);
  });
  if (channels.empty()) {
    return channels;
  }

  const bool mixed = std::any_of(channels.begin(), channels.end(),
                                 [&](const Channel& c) { return c.kind != channels.front().kind; });
  if (mixed) {
    throw MixedKinds(fmt::format("'{}' exposes both power and energy channels", dir.string()));
  }

  const std::string device_name = sysfs::try_read_text(dir / "name").value_or(dir.filename().string());
  for (auto& channel : channels) {
    const std::string prefix = channel.kind == ChannelKind::PowerMicrowatts ? "power" : "energy";
    const std::string stem = fmt::format("{}{}", prefix, channel.channel_index);
    if (auto label = sysfs::try_read_text(dir / (stem + "_label")); label && !label->empty()) {
      channel.label = *label;
    } else if (channels.size() == 1) {
      channel.label = device_name;
    } else {
      channel.label = fmt::format("{}:{}", device_name, stem);
    }
  }
  return channels;
}

std::vector<std::pair<unsigned, std::filesystem::path>> hwmon_dirs(const std::filesystem::path& root) {
  std::vector<std::pair<unsigned, std::filesystem::path>> dirs;
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    return dirs;
  }
  for (const auto& entry : std::filesystem::directory_iterator(root, ec)) {
    if (auto index = sysfs::suffix_index(entry.path().filename().string(), "hwmon"); index && entry.is_directory(ec)) {
      dirs.emplace_back(*index, entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace

std::filesystem::path default_root() { return sysfs::root_for("class/hwmon"); }

std::vector<Channel> discover_channels(const std::filesystem::path& root) {
  std::vector<Channel> all;
  for (const auto& [index, dir] : hwmon_dirs(root)) {
    auto channels = scan_directory(dir, index);
    all.insert(all.end(), channels.begin(), channels.end());
  }
  if (all.empty()) {
    throw NoDomainsFound(fmt::format("no hwmon power or energy channels under '{}'", root.string()));
  }
  return all;
}

std::vector<Channel> discover_device(const std::filesystem::path& root, unsigned index) {
  const auto dir = root / fmt::format("hwmon{}", index);
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw NoDomainsFound(fmt::format("'{}' does not exist", dir.string()));
  }
  auto channels = scan_directory(dir, index);
  if (channels.empty()) {
    throw NoDomainsFound(fmt::format("'{}' has no power or energy channels", dir.string()));
  }
  return channels;
}

std::vector<unsigned> usable_devices(const std::filesystem::path& root) {
  std::vector<unsigned> devices;
  for (const auto& [index, dir] : hwmon_dirs(root)) {
    try {
      if (!scan_directory(dir, index).empty()) {
        devices.push_back(index);
      }
    } catch (const MixedKinds&) {
    }
  }
  return devices;
}

std::uint64_t read_channel(const Channel& channel) { return sysfs::read_u64(channel.file_path); }

HwmonBackend::HwmonBackend(const std::filesystem::path& root, unsigned device_index)
    : channels_(discover_device(root, device_index)) {
  // Fail at creation rather than on the first tick when the files are unreadable.
  for (const auto& channel : channels_) {
    try {
      (void)read_channel(channel);
    } catch (const IoError& e) {
      throw DeviceUnavailable(e.what());
    }
  }
  descriptor_.backend_name = "hwmon";
  descriptor_.device_index = device_index;
  descriptor_.counter_kind = channels_.front().kind == ChannelKind::PowerMicrowatts ? CounterKind::InstantaneousPower
                                                                                    : CounterKind::CumulativeEnergy;
  descriptor_.min_interval = kMinInterval;
  descriptor_.default_interval = kMinInterval;
  for (const auto& channel : channels_) {
    descriptor_.channel_names.push_back(channel.label);
    descriptor_.channel_in_total.push_back(true);
  }
}

void HwmonBackend::sample(std::span<RawSample> out) {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    const std::uint64_t raw = read_channel(channels_[i]);
    if (channels_[i].kind == ChannelKind::PowerMicrowatts) {
      out[i] = RawSample{0, 0, microwatts_to_watts(raw)};
    } else {
      out[i] = RawSample{raw, kEnergyRange, 0.0};
    }
  }
}

}  // namespace pmt::hwmon
