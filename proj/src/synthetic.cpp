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
#include "pmt/synthetic.hpp"

#include "pmt/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>
#include <utility>

namespace pmt::synthetic {

namespace {

double number(const std::map<std::string, std::string, std::less<>>& config, std::string_view key, double fallback) {
  const auto it = config.find(key);
  if (it == config.end()) {
    return fallback;
  }
  const std::string& text = it->second;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidConfig(fmt::format("synthetic: '{}' must be a number, got '{}'", key, text));
  }
  return value;
}

}  // namespace

double power_at(const Profile& profile, double t) noexcept {
  t = std::max(t, 0.0);
  switch (profile.shape) {
    case Shape::Constant:
      return profile.base_watts;
    case Shape::Ramp:
      return profile.base_watts + (profile.peak_watts - profile.base_watts) * std::min(t / profile.duration_s, 1.0);
    case Shape::Square:
      return std::fmod(t, profile.period_s) < 0.5 * profile.period_s ? profile.peak_watts : profile.base_watts;
  }
  return profile.base_watts;
}

Profile parse_profile(const std::map<std::string, std::string, std::less<>>& config) {
  Profile profile;
  if (const auto it = config.find("shape"); it != config.end()) {
    if (it->second == "constant") {
      profile.shape = Shape::Constant;
    } else if (it->second == "ramp") {
      profile.shape = Shape::Ramp;
    } else if (it->second == "square") {
      profile.shape = Shape::Square;
    } else {
      throw InvalidConfig(fmt::format("synthetic: unknown shape '{}'", it->second));
    }
  }
  const double power = number(config, "power_watts", 0.0);
  profile.base_watts = number(config, "base_watts", power);
  profile.peak_watts = number(config, "peak_watts", profile.shape == Shape::Constant ? profile.base_watts : power);
  profile.period_s = number(config, "period_s", 1.0);
  profile.duration_s = number(config, "duration_s", 1.0);

  if (profile.shape == Shape::Constant) {
    profile.peak_watts = std::max(profile.peak_watts, profile.base_watts);
  }
  if (profile.base_watts < 0.0) {
    throw InvalidConfig("synthetic: base_watts must be >= 0");
  }
  if (profile.peak_watts < profile.base_watts) {
    throw InvalidConfig("synthetic: peak_watts must be >= base_watts");
  }
  if (!(profile.period_s > 0.0) || !(profile.duration_s > 0.0)) {
    throw InvalidConfig("synthetic: period_s and duration_s must be > 0");
  }
  return profile;
}

SyntheticBackend::SyntheticBackend(std::string name, unsigned device_index, Profile profile,
                                   std::chrono::milliseconds min_interval)
    : profile_(profile), origin_(std::chrono::steady_clock::now()) {
  if (min_interval.count() < 1) {
    throw InvalidConfig("synthetic: min_interval must be at least 1 ms");
  }
  descriptor_.backend_name = std::move(name);
  descriptor_.device_index = device_index;
  descriptor_.counter_kind = CounterKind::InstantaneousPower;
  descriptor_.min_interval = min_interval;
  descriptor_.default_interval = std::max(min_interval, std::chrono::milliseconds{10});
  descriptor_.channel_names = {fmt::format("synthetic{}", device_index)};
  descriptor_.channel_in_total = {true};
}

void SyntheticBackend::sample(std::span<RawSample> out) {
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  out[0] = RawSample{0, 0, power_at(profile_, t)};
}

}  // namespace pmt::synthetic
