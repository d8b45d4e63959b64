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

// CPU package energy via the Linux powercap (RAPL) sysfs interface.
//
// Layout below the root: intel-rapl:<n>/{name,energy_uj,max_energy_range_uj}
// for packages and intel-rapl:<n>:<m>/ for their sub-domains.

#include "pmt/backend.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pmt::powercap {

inline constexpr std::chrono::milliseconds kMinInterval{100};

struct Domain {
  std::filesystem::path path;
  std::string name;
  std::uint64_t max_energy_range_uj = 0;
  std::uint64_t last_raw_uj = 0;
  unsigned package = 0;
  /// Sub-domains are part of their package's counter and excluded from totals.
  bool subdomain = false;
};

/// `$PMT_SYSFS_ROOT/class/powercap`, or `/sys/class/powercap`.
std::filesystem::path default_root();

/// Packages and sub-domains ordered by (package, sub-domain) index.
/// Throws NoDomainsFound when there are none.
std::vector<Domain> enumerate_domains(const std::filesystem::path& root);

/// Current counter value in microjoules. Throws IoError or ParseError.
std::uint64_t read_raw(const Domain& domain);

/// Counter advance from `prev_raw` to `cur_raw` for a counter that rolls over
/// at `max_range`, assuming at most one rollover in between.
constexpr std::uint64_t wrap_corrected_delta(std::uint64_t prev_raw, std::uint64_t cur_raw,
                                             std::uint64_t max_range) noexcept {
  if (cur_raw >= prev_raw) {
    return cur_raw - prev_raw;
  }
  return cur_raw + (max_range - prev_raw);
}

class PowercapBackend final : public Backend {
 public:
  /// Throws DeviceUnavailable (or NoDomainsFound) when the tree is unusable.
  explicit PowercapBackend(const std::filesystem::path& root);

  const SensorDescriptor& descriptor() const override { return descriptor_; }
  void sample(std::span<RawSample> out) override;

  const std::vector<Domain>& domains() const noexcept { return domains_; }

 private:
  std::vector<Domain> domains_;
  SensorDescriptor descriptor_;
};

}  // namespace pmt::powercap
