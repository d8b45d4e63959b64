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

#include "pmt/state.hpp"

#include <cstdint>
#include <span>

namespace pmt {

/// One raw reading of one channel, in the units the backend produced it.
///
/// Energy backends fill the counter fields (microjoules and the counter's
/// wrap modulus), power backends fill `watts`.
struct RawSample {
  std::uint64_t counter_uj = 0;
  std::uint64_t counter_range_uj = 0;
  double watts = 0.0;
};

/// Low-level power source polled by a sampler loop.
///
/// A backend is owned by exactly one sampler and is only ever called from
/// that sampler's thread after construction.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const SensorDescriptor& descriptor() const = 0;

  /// Fill `out` (one element per channel). Throws pmt::Error on failure.
  virtual void sample(std::span<RawSample> out) = 0;
};

}  // namespace pmt
