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
#include "pmt/powercap.hpp"

#include "pmt/error.hpp"
#include "sysfs.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <optional>
#include <system_error>
#include <tuple>

namespace pmt::powercap {

namespace {

constexpr std::string_view kPrefix = "intel-rapl:";

struct DomainIndex {
  unsigned package = 0;
  std::optional<unsigned> sub;
};

// "intel-rapl:<n>" or "intel-rapl:<n>:<m>"
std::optional<DomainIndex> parse_domain_name(const std::string& name) {
  if (name.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  const char* p = name.data() + kPrefix.size();
  const char* last = name.data() + name.size();
  DomainIndex index;
  auto [after_pkg, ec] = std::from_chars(p, last, index.package);
  if (ec != std::errc{}) {
    return std::nullopt;
  }
  if (after_pkg == last) {
    return index;
  }
  if (*after_pkg != ':') {
    return std::nullopt;
  }
  unsigned sub = 0;
  auto [after_sub, ec2] = std::from_chars(after_pkg + 1, last, sub);
  if (ec2 != std::errc{} || after_sub != last) {
    return std::nullopt;
  }
  index.sub = sub;
  return index;
}

}  // namespace

std::filesystem::path default_root() { return sysfs::root_for("class/powercap"); }

std::vector<Domain> enumerate_domains(const std::filesystem::path& root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    throw NoDomainsFound(fmt::format("powercap root '{}' does not exist", root.string()));
  }

  std::vector<std::pair<DomainIndex, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(root, ec)) {
    const std::string name = entry.path().filename().string();
    auto index = parse_domain_name(name);
    if (!index || !entry.is_directory(ec)) {
      continue;
    }
    found.emplace_back(*index, entry.path());
  }
  if (found.empty()) {
    throw NoDomainsFound(fmt::format("no intel-rapl domains under '{}'", root.string()));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    // Packages sort before their sub-domains.
    const auto key = [](const DomainIndex& i) { return std::make_tuple(i.package, i.sub.has_value(), i.sub.value_or(0)); };
    return key(a.first) < key(b.first);
  });

  std::vector<Domain> domains;
  domains.reserve(found.size());
  for (const auto& [index, path] : found) {
    Domain domain;
    domain.path = path;
    domain.package = index.package;
    domain.subdomain = index.sub.has_value();
    domain.name = sysfs::try_read_text(path / "name").value_or(path.filename().string());
    if (domain.name.empty()) {
      domain.name = path.filename().string();
    }
    domain.max_energy_range_uj = sysfs::read_u64(path / "max_energy_range_uj");
    if (domain.max_energy_range_uj == 0) {
      throw ParseError(fmt::format("'{}' reports a zero energy range", path.string()));
    }
    domain.last_raw_uj = read_raw(domain);
    domains.push_back(std::move(domain));
  }
  return domains;
}

std::uint64_t read_raw(const Domain& domain) {
  const auto file = domain.path / "energy_uj";
  const std::uint64_t value = sysfs::read_u64(file);
  if (domain.max_energy_range_uj != 0 && value > domain.max_energy_range_uj) {
    throw ParseError(fmt::format("'{}' value {} exceeds max_energy_range_uj {}", file.string(), value,
                                 domain.max_energy_range_uj));
  }
  return value;
}

PowercapBackend::PowercapBackend(const std::filesystem::path& root) {
  try {
    domains_ = enumerate_domains(root);
  } catch (const DeviceUnavailable&) {
    throw;
  } catch (const Error& e) {
    throw DeviceUnavailable(fmt::format("powercap tree '{}' is unusable: {}", root.string(), e.what()));
  }
  descriptor_.backend_name = "rapl";
  descriptor_.device_index = 0;
  descriptor_.counter_kind = CounterKind::CumulativeEnergy;
  descriptor_.min_interval = kMinInterval;
  descriptor_.default_interval = kMinInterval;
  for (const auto& domain : domains_) {
    descriptor_.channel_names.push_back(domain.name);
    descriptor_.channel_in_total.push_back(!domain.subdomain);
  }
}

void PowercapBackend::sample(std::span<RawSample> out) {
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    auto& domain = domains_[i];
    domain.last_raw_uj = read_raw(domain);
    out[i] = RawSample{domain.last_raw_uj, domain.max_energy_range_uj, 0.0};
  }
}

}  // namespace pmt::powercap
