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
#include "pmt/sampler.hpp"

#include "pmt/error.hpp"
#include "pmt/powercap.hpp"

#include <fmt/format.h>

#include <utility>

namespace pmt {

EnergyAccumulator prime_accumulator(const RawSample& sample, CounterKind kind, double t) noexcept {
  EnergyAccumulator acc;
  acc.last_tick = t;
  if (kind == CounterKind::CumulativeEnergy) {
    acc.last_raw = sample.counter_uj;
  } else {
    acc.last_power_watts = sample.watts;
  }
  return acc;
}

EnergyAccumulator tick(EnergyAccumulator acc, const RawSample& sample, CounterKind kind, double dt) noexcept {
  if (kind == CounterKind::CumulativeEnergy) {
    const auto delta = powercap::wrap_corrected_delta(acc.last_raw, sample.counter_uj, sample.counter_range_uj);
    acc.accumulated_joules += static_cast<double>(delta) * 1e-6;
    acc.last_raw = sample.counter_uj;
  } else {
    acc.accumulated_joules += acc.last_power_watts * dt;
    acc.last_power_watts = sample.watts;
  }
  acc.last_tick += dt;
  return acc;
}

Sampler::Sampler(std::unique_ptr<Backend> backend, SamplerConfig config)
    : backend_(std::move(backend)), descriptor_(backend_->descriptor()) {
  interval_ = config.interval.count() == 0 ? descriptor_.default_interval : config.interval;
  if (interval_ < descriptor_.min_interval) {
    throw IntervalTooSmall(fmt::format("interval {} ms is below the {} ms minimum of backend '{}'", interval_.count(),
                                       descriptor_.min_interval.count(), descriptor_.backend_name));
  }

  const std::size_t channels = descriptor_.channel_names.size();
  if (descriptor_.channel_in_total.size() != channels) {
    descriptor_.channel_in_total.assign(channels, true);
  }
  samples_.resize(channels);
  try {
    backend_->sample(samples_);
  } catch (const std::exception& e) {
    throw BackendReadFailed(fmt::format("initial read of backend '{}' failed: {}", descriptor_.backend_name, e.what()));
  }
  origin_ = std::chrono::steady_clock::now();

  accumulators_.reserve(channels);
  for (const auto& s : samples_) {
    accumulators_.push_back(prime_accumulator(s, descriptor_.counter_kind, 0.0));
  }
  snapshot_.timestamp = 0.0;
  snapshot_.joules_total = 0.0;
  snapshot_.joules_per_channel.assign(channels, 0.0);
  snapshot_.channel_names = descriptor_.channel_names;
  snapshot_.channel_in_total = descriptor_.channel_in_total;

  if (config.dump_path) {
    start_dump(*config.dump_path);
  }
  thread_ = std::jthread([this](std::stop_token stop) { loop(std::move(stop)); });
}

Sampler::~Sampler() {
  stop();
  std::lock_guard lock(dump_mutex_);
  if (dump_) {
    try {
      dump_->close();
    } catch (const Error&) {
      // Nothing to report to from a destructor.
    }
  }
}

double Sampler::now() const noexcept {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
}

void Sampler::loop(std::stop_token stop) {
  auto next = std::chrono::steady_clock::now() + interval_;
  std::unique_lock lock(wake_mutex_);
  while (!stop.stop_requested()) {
    wake_.wait_until(lock, stop, next, [] { return false; });
    if (stop.stop_requested()) {
      break;
    }
    tick_once();
    if (failed_.load()) {
      break;
    }
    next += interval_;
    const auto current = std::chrono::steady_clock::now();
    if (next <= current) {
      next = current + interval_;
    }
  }
}

void Sampler::tick_once() {
  try {
    backend_->sample(samples_);
  } catch (const std::exception& e) {
    {
      std::lock_guard lock(failure_mutex_);
      failure_ = fmt::format("backend '{}' failed: {}", descriptor_.backend_name, e.what());
    }
    failed_.store(true);
    return;
  }

  TraceRecord record;
  {
    // The clock is read under the snapshot lock so that readers, which also
    // read it under the lock, observe a single total order of timestamps.
    std::lock_guard lock(snapshot_mutex_);
    const double t = now();
    const double dt = t - snapshot_.timestamp;
    if (dt <= 0.0) {
      return;
    }
    record.timestamp = t;
    record.watts_per_channel.resize(accumulators_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < accumulators_.size(); ++i) {
      const double before = accumulators_[i].accumulated_joules;
      accumulators_[i] = tick(accumulators_[i], samples_[i], descriptor_.counter_kind, dt);
      const double after = accumulators_[i].accumulated_joules;
      snapshot_.joules_per_channel[i] = after;
      record.watts_per_channel[i] =
          descriptor_.counter_kind == CounterKind::InstantaneousPower ? samples_[i].watts : (after - before) / dt;
      if (descriptor_.channel_in_total[i]) {
        total += after;
        record.watts_total += record.watts_per_channel[i];
      }
    }
    snapshot_.timestamp = t;
    snapshot_.joules_total = total;
  }

  std::lock_guard lock(dump_mutex_);
  if (dump_) {
    try {
      dump_->write(record);
    } catch (const Error& e) {
      std::lock_guard failure_lock(failure_mutex_);
      failure_ = e.what();
      dump_.reset();
    }
  }
}

State Sampler::read() const {
  if (failed_.load()) {
    throw SensorStopped(failure());
  }
  std::lock_guard lock(snapshot_mutex_);
  State state = snapshot_;
  if (descriptor_.counter_kind == CounterKind::InstantaneousPower && !stopped_.load()) {
    const double t = now();
    const double extra = t - state.timestamp;
    if (extra > 0.0) {
      double total = 0.0;
      for (std::size_t i = 0; i < accumulators_.size(); ++i) {
        state.joules_per_channel[i] += accumulators_[i].last_power_watts * extra;
        if (state.channel_in_total[i]) {
          total += state.joules_per_channel[i];
        }
      }
      state.joules_total = total;
      state.timestamp = t;
    }
  }
  return state;
}

void Sampler::start_dump(const std::filesystem::path& path) {
  std::lock_guard lock(dump_mutex_);
  if (dump_) {
    throw DumpAlreadyActive(fmt::format("dump to '{}' is already active", dump_->path().string()));
  }
  dump_.emplace(path, TraceHeader{descriptor_.backend_name, descriptor_.device_index, interval_,
                                  descriptor_.channel_names});
}

void Sampler::stop_dump() {
  std::lock_guard lock(dump_mutex_);
  if (!dump_) {
    throw DumpNotActive("no dump is active");
  }
  auto writer = std::move(*dump_);
  dump_.reset();
  writer.close();
}

bool Sampler::dump_active() const {
  std::lock_guard lock(dump_mutex_);
  return dump_.has_value();
}

void Sampler::stop() {
  if (stopped_.exchange(true)) {
    return;
  }
  thread_.request_stop();
  if (thread_.joinable()) {
    thread_.join();
  }
}

std::string Sampler::failure() const {
  std::lock_guard lock(failure_mutex_);
  return failure_;
}

}  // namespace pmt
