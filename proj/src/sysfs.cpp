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
#include "sysfs.hpp"

#include "pmt/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <system_error>

namespace pmt::sysfs {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::optional<std::string> try_read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return std::nullopt;
  }
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    return std::nullopt;
  }
  return trim(std::move(contents));
}

std::string read_text(const std::filesystem::path& path) {
  auto text = try_read_text(path);
  if (!text) {
    throw IoError(fmt::format("cannot read '{}'", path.string()));
  }
  return *text;
}

std::uint64_t read_u64(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (text.empty()) {
    throw ParseError(fmt::format("'{}' is empty", path.string()));
  }
  std::uint64_t value = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(fmt::format("'{}' does not hold a non-negative integer: '{}'", path.string(), text));
  }
  return value;
}

std::filesystem::path root_for(const std::filesystem::path& relative) {
  if (const char* env = std::getenv("PMT_SYSFS_ROOT"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env) / relative;
  }
  return std::filesystem::path("/sys") / relative;
}

std::optional<unsigned> suffix_index(const std::string& name, const std::string& prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) {
    return std::nullopt;
  }
  unsigned value = 0;
  const char* first = name.data() + prefix.size();
  const char* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    return std::nullopt;
  }
  return value;
}

}  // namespace pmt::sysfs
