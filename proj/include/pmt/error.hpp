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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmt {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownBackend : public Error {
 public:
  using Error::Error;
};

/// The device or its sysfs files are missing; a misconfiguration, not a crash.
class DeviceUnavailable : public Error {
 public:
  using Error::Error;
};

class NoDomainsFound : public DeviceUnavailable {
 public:
  using DeviceUnavailable::DeviceUnavailable;
};

class MixedKinds : public DeviceUnavailable {
 public:
  using DeviceUnavailable::DeviceUnavailable;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class IntervalTooSmall : public InvalidConfig {
 public:
  using InvalidConfig::InvalidConfig;
};

class SensorStopped : public Error {
 public:
  using Error::Error;
};

class NegativeInterval : public Error {
 public:
  using Error::Error;
};

class DegenerateMeasurement : public Error {
 public:
  using Error::Error;
};

class BackendReadFailed : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DumpAlreadyActive : public Error {
 public:
  using Error::Error;
};

class DumpNotActive : public Error {
 public:
  using Error::Error;
};

class EmptyTrace : public Error {
 public:
  using Error::Error;
};

/// Malformed input. `line()` is 1-based, or 0 when the input is not line oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pmt
