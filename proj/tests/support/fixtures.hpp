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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unistd.h>

namespace pmt::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "pmt-test-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view child) const { return path_ / child; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << contents;
  if (!out) {
    throw std::runtime_error("cannot write fixture file " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// One RAPL domain directory: intel-rapl:<pkg> or intel-rapl:<pkg>:<sub>.
inline std::filesystem::path make_rapl_domain(const std::filesystem::path& root, std::string_view dir,
                                              std::string_view name, std::uint64_t energy_uj,
                                              std::uint64_t max_range_uj = 262143328850ULL) {
  const auto path = root / dir;
  write_file(path / "name", std::string(name) + "\n");
  write_file(path / "energy_uj", std::to_string(energy_uj) + "\n");
  write_file(path / "max_energy_range_uj", std::to_string(max_range_uj) + "\n");
  return path;
}

/// Write-then-rename so a concurrent reader never sees a partial value.
inline void replace_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, contents);
  std::filesystem::rename(tmp, path);
}

inline void set_counter(const std::filesystem::path& domain, std::uint64_t energy_uj) {
  replace_file(domain / "energy_uj", std::to_string(energy_uj) + "\n");
}

/// Scoped environment variable override.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) {
      old_ = old;
    }
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(0x5eed'5eedULL);
  return engine;
}

}  // namespace pmt::testing
