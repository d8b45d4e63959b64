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
#ifndef PMT_PMT_C_H_
#define PMT_PMT_C_H_

/* Stable C interface for language bindings. All functions are thread safe
 * with respect to distinct sensors; a sensor may be read from any thread.
 * On failure a function returns a non-zero status and pmt_last_error()
 * describes it (per thread). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pmt_sensor pmt_sensor;

typedef enum pmt_status {
  PMT_OK = 0,
  PMT_ERR_UNKNOWN_BACKEND = 1,
  PMT_ERR_DEVICE_UNAVAILABLE = 2,
  PMT_ERR_INVALID_CONFIG = 3,
  PMT_ERR_SENSOR_STOPPED = 4,
  PMT_ERR_NEGATIVE_INTERVAL = 5,
  PMT_ERR_DEGENERATE_MEASUREMENT = 6,
  PMT_ERR_BACKEND_READ_FAILED = 7,
  PMT_ERR_IO = 8,
  PMT_ERR_DUMP_ALREADY_ACTIVE = 9,
  PMT_ERR_DUMP_NOT_ACTIVE = 10,
  PMT_ERR_INVALID_ARGUMENT = 11,
  PMT_ERR_INTERNAL = 12
} pmt_status;

typedef struct pmt_state {
  double timestamp; /* seconds since sensor creation */
  double joules;    /* cumulative total */
} pmt_state;

typedef struct pmt_measurement {
  double joules;
  double watts;
  double seconds;
} pmt_measurement;

/* `keys`/`values` are `count` parallel option strings (may be NULL when count is 0). */
pmt_status pmt_create(const char* backend, unsigned device, const char* const* keys, const char* const* values,
                      size_t count, pmt_sensor** out);
void pmt_destroy(pmt_sensor* sensor);

pmt_status pmt_read(const pmt_sensor* sensor, pmt_state* out);
pmt_status pmt_stop(pmt_sensor* sensor);

pmt_status pmt_joules(const pmt_state* start, const pmt_state* end, double* out);
pmt_status pmt_watts(const pmt_state* start, const pmt_state* end, double* out);
pmt_status pmt_seconds(const pmt_state* start, const pmt_state* end, double* out);
pmt_status pmt_measure(const pmt_state* start, const pmt_state* end, pmt_measurement* out);

pmt_status pmt_start_dump(pmt_sensor* sensor, const char* path);
pmt_status pmt_stop_dump(pmt_sensor* sensor);

/* Name of the sensor's backend; valid for the sensor's lifetime. */
const char* pmt_backend_name(const pmt_sensor* sensor);

const char* pmt_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* PMT_PMT_C_H_ */
