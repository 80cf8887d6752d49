/*
 * Copyright 2026 The ofprint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libofprint. Handles are opaque; every call that can fail
 * returns an ofp_status and leaves a message for ofp_last_error() on the
 * calling thread.
 */

#ifndef OFPRINT_H
#define OFPRINT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OFPRINT_BUILDING)
#    define OFP_API __declspec(dllexport)
#  else
#    define OFP_API __declspec(dllimport)
#  endif
#else
#  define OFP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ofp_status {
    OFP_OK = 0,
    OFP_E_PARSE,
    OFP_E_DUPLICATE_ID,
    OFP_E_IO,
    OFP_E_INVALID_ARGUMENT,
    OFP_E_INVALID_CONFIG,
    OFP_E_TRANSPORT_DOWN,
    OFP_E_CAPTURE_UNSUPPORTED,
    OFP_E_PROBE_LOST,
    OFP_E_INSUFFICIENT_SAMPLES,
    OFP_E_INSUFFICIENT_OBSERVATIONS,
    OFP_E_INCONSISTENT_ENVIRONMENT,
    OFP_E_PERIOD_TOO_SMALL,
    OFP_E_MALFORMED_FRAME,
    OFP_E_INTERNAL
} ofp_status;

typedef struct ofp_db ofp_db;         /* signature database */
typedef struct ofp_report ofp_report; /* result of scan, build or classify */

OFP_API const char* ofp_status_string(ofp_status status);
OFP_API const char* ofp_last_error(void);
OFP_API const char* ofp_version(void);

/* Signature database. */
OFP_API ofp_status ofp_db_default(ofp_db** out);
OFP_API ofp_status ofp_db_load(const char* path, ofp_db** out);
OFP_API ofp_status ofp_db_save(const ofp_db* db, const char* path);
OFP_API size_t ofp_db_size(const ofp_db* db);
/* Id of entry `index`, or NULL when out of range. Owned by the handle. */
OFP_API const char* ofp_db_id(const ofp_db* db, size_t index);
OFP_API void ofp_db_free(ofp_db* db);

/*
 * Scan and build settings. Durations are in seconds; a value <= 0 leaves
 * the library default in place. Strings may be NULL.
 */
typedef struct ofp_options {
    const char* techniques; /* comma list of lldp,timeout,processing-time,arp; NULL = all */
    uint64_t seed;
    int n;                  /* baseline / build sample count */
    int m;                  /* fingerprint sample count */
    double step_s;
    double period_s;
    double wait_cap_s;
    double lldp_window_s;
    const char* profile;    /* simulated noise profile: default, noisy, minimal */
    const char* trace_path; /* simulated event trace */
    const char* log_path;   /* per-probe measurement log (JSON lines) */
} ofp_options;

OFP_API void ofp_options_init(ofp_options* options);

/* `scenario` is a controller id, an alias such as "odl-hydrogen", or a
 * scenario file. */
OFP_API ofp_status ofp_scan_sim(const ofp_db* db, const char* scenario, const ofp_options* options,
                                ofp_report** out);

/* Raw-socket backend; OFP_E_CAPTURE_UNSUPPORTED when built without it or
 * without privileges. */
OFP_API ofp_status ofp_scan_live(const ofp_db* db, const char* iface, const char* destination,
                                 const ofp_options* options, ofp_report** out);

/* Measures every target and merges the records into `db`. Per-target
 * failures do not fail the call; see ofp_report_failures. */
OFP_API ofp_status ofp_build_db(ofp_db* db, const char* const* targets, size_t count,
                                const ofp_options* options, ofp_report** out);

OFP_API ofp_status ofp_classify_capture(const ofp_db* db, const char* capture_path,
                                        ofp_report** out);

/* Writes `window_s` seconds of simulated LLDP/0x8942 traffic as a dump. */
OFP_API ofp_status ofp_capture_sim(const ofp_db* db, const char* scenario,
                                   const ofp_options* options, double window_s,
                                   const char* out_path);

OFP_API int ofp_report_decided(const ofp_report* report);
/* Top-ranked id when decided, else NULL. */
OFP_API const char* ofp_report_top(const ofp_report* report);
OFP_API size_t ofp_report_failures(const ofp_report* report);
OFP_API const char* ofp_report_json(const ofp_report* report);
OFP_API void ofp_report_free(ofp_report* report);

#ifdef __cplusplus
}
#endif

#endif /* OFPRINT_H */
