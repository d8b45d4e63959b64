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
#include "pmt/pmt_c.h"

#include "pmt/error.hpp"
#include "pmt/sensor.hpp"
#include "pmt/state.hpp"

#include <exception>
#include <new>
#include <string>

struct pmt_sensor {
  pmt::Sensor sensor;
};

namespace {

thread_local std::string last_error;

pmt_status fail(pmt_status status, const char* message) {
  last_error = message;
  return status;
}

// Translate the in-flight exception into a status code.
pmt_status translate() {
  try {
    throw;
  } catch (const pmt::UnknownBackend& e) {
    return fail(PMT_ERR_UNKNOWN_BACKEND, e.what());
  } catch (const pmt::DeviceUnavailable& e) {
    return fail(PMT_ERR_DEVICE_UNAVAILABLE, e.what());
  } catch (const pmt::InvalidConfig& e) {
    return fail(PMT_ERR_INVALID_CONFIG, e.what());
  } catch (const pmt::SensorStopped& e) {
    return fail(PMT_ERR_SENSOR_STOPPED, e.what());
  } catch (const pmt::NegativeInterval& e) {
    return fail(PMT_ERR_NEGATIVE_INTERVAL, e.what());
  } catch (const pmt::DegenerateMeasurement& e) {
    return fail(PMT_ERR_DEGENERATE_MEASUREMENT, e.what());
  } catch (const pmt::BackendReadFailed& e) {
    return fail(PMT_ERR_BACKEND_READ_FAILED, e.what());
  } catch (const pmt::IoError& e) {
    return fail(PMT_ERR_IO, e.what());
  } catch (const pmt::DumpAlreadyActive& e) {
    return fail(PMT_ERR_DUMP_ALREADY_ACTIVE, e.what());
  } catch (const pmt::DumpNotActive& e) {
    return fail(PMT_ERR_DUMP_NOT_ACTIVE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PMT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PMT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PMT_ERR_INTERNAL, "unknown error");
  }
}

pmt::State to_state(const pmt_state& s) {
  pmt::State state;
  state.timestamp = s.timestamp;
  state.joules_total = s.joules;
  return state;
}

template <typename Fn>
pmt_status metric(const pmt_state* start, const pmt_state* end, double* out, Fn fn) {
  if (start == nullptr || end == nullptr || out == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  try {
    *out = fn(to_state(*start), to_state(*end));
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

}  // namespace

extern "C" {

pmt_status pmt_create(const char* backend, unsigned device, const char* const* keys, const char* const* values,
                      size_t count, pmt_sensor** out) {
  if (backend == nullptr || out == nullptr || (count > 0 && (keys == nullptr || values == nullptr))) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  try {
    pmt::Config config;
    for (size_t i = 0; i < count; ++i) {
      if (keys[i] == nullptr || values[i] == nullptr) {
        return fail(PMT_ERR_INVALID_ARGUMENT, "null option key or value");
      }
      config[keys[i]] = values[i];
    }
    *out = new pmt_sensor{pmt::create_sensor(backend, device, config)};
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

void pmt_destroy(pmt_sensor* sensor) { delete sensor; }

pmt_status pmt_read(const pmt_sensor* sensor, pmt_state* out) {
  if (sensor == nullptr || out == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  try {
    const pmt::State state = sensor->sensor.read();
    out->timestamp = state.timestamp;
    out->joules = state.joules_total;
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

pmt_status pmt_stop(pmt_sensor* sensor) {
  if (sensor == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  sensor->sensor.stop();
  return PMT_OK;
}

pmt_status pmt_joules(const pmt_state* start, const pmt_state* end, double* out) {
  return metric(start, end, out, [](const pmt::State& a, const pmt::State& b) { return pmt::joules(a, b); });
}

pmt_status pmt_watts(const pmt_state* start, const pmt_state* end, double* out) {
  return metric(start, end, out, [](const pmt::State& a, const pmt::State& b) { return pmt::watts(a, b); });
}

pmt_status pmt_seconds(const pmt_state* start, const pmt_state* end, double* out) {
  return metric(start, end, out, [](const pmt::State& a, const pmt::State& b) { return pmt::seconds(a, b); });
}

pmt_status pmt_measure(const pmt_state* start, const pmt_state* end, pmt_measurement* out) {
  if (start == nullptr || end == nullptr || out == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  try {
    const auto m = pmt::measure(to_state(*start), to_state(*end));
    *out = pmt_measurement{m.joules, m.watts, m.seconds};
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

pmt_status pmt_start_dump(pmt_sensor* sensor, const char* path) {
  if (sensor == nullptr || path == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  try {
    sensor->sensor.start_dump(path);
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

pmt_status pmt_stop_dump(pmt_sensor* sensor) {
  if (sensor == nullptr) {
    return fail(PMT_ERR_INVALID_ARGUMENT, "null argument");
  }
  try {
    sensor->sensor.stop_dump();
    return PMT_OK;
  } catch (...) {
    return translate();
  }
}

const char* pmt_backend_name(const pmt_sensor* sensor) {
  return sensor == nullptr ? nullptr : sensor->sensor.descriptor().backend_name.c_str();
}

const char* pmt_last_error(void) { return last_error.c_str(); }

}  // extern "C"
