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

#include <chrono>
#include <map>
#include <string>

namespace pmt::synthetic {

enum class Shape {
  Constant,
  Ramp,
  Square,
};

/// Power as a function of time since the sensor was created.
struct Profile {
  Shape shape = Shape::Constant;
  double base_watts = 0.0;
  double peak_watts = 0.0;
  /// Square wave period; peak during the first half of each period.
  double period_s = 1.0;
  /// Ramp length; power stays at peak afterwards.
  double duration_s = 1.0;
};

double power_at(const Profile& profile, double t) noexcept;

/// Build a profile from `shape`, `base_watts`, `peak_watts`, `period_s`,
/// `duration_s` and the shorthand `power_watts` (constant). Throws InvalidConfig.
Profile parse_profile(const std::map<std::string, std::string, std::less<>>& config);

class SyntheticBackend final : public Backend {
 public:
  SyntheticBackend(std::string name, unsigned device_index, Profile profile,
                   std::chrono::milliseconds min_interval = std::chrono::milliseconds{1});

  const SensorDescriptor& descriptor() const override { return descriptor_; }
  void sample(std::span<RawSample> out) override;

  const Profile& profile() const noexcept { return profile_; }

 private:
  Profile profile_;
  SensorDescriptor descriptor_;
  std::chrono::steady_clock::time_point origin_;
};

}  // namespace pmt::synthetic
