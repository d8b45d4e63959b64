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

// Helpers shared by the sysfs-backed backends. Not installed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace pmt::sysfs {

/// Contents of a small text file with surrounding whitespace removed.
/// Throws IoError when the file can't be read.
std::string read_text(const std::filesystem::path& path);

/// Same, but std::nullopt when the file is missing or unreadable.
std::optional<std::string> try_read_text(const std::filesystem::path& path);

/// A non-negative ASCII decimal integer. Throws IoError or ParseError.
std::uint64_t read_u64(const std::filesystem::path& path);

/// `$PMT_SYSFS_ROOT/<relative>` when the variable is set, `/sys/<relative>` otherwise.
std::filesystem::path root_for(const std::filesystem::path& relative);

/// Trailing decimal index after `prefix` ("hwmon3" -> 3), or nullopt.
std::optional<unsigned> suffix_index(const std::string& name, const std::string& prefix);

}  // namespace pmt::sysfs
