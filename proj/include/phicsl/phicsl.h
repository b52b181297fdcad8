/* SPDX-License-Identifier: Apache-2.0 */
#ifndef PHICSL_PHICSL_H
#define PHICSL_PHICSL_H

/*
 * C interface to the phicsl collapse simulator.
 *
 * Every call returns a phicsl_status. On failure the message is available from
 * phicsl_last_error() until the next failing call on the same thread. Handles
 * are opaque and owned by the caller; destroy functions accept NULL. Strings
 * returned through const char** stay valid while the owning handle lives.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PHICSL_API __declspec(dllexport)
#else
#define PHICSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phicsl_status {
    PHICSL_OK = 0,
    PHICSL_ERR_INVALID_ARGUMENT = 1,
    PHICSL_ERR_CONFIG = 2,
    PHICSL_ERR_NUMERIC = 3,
    PHICSL_ERR_IO = 4,
    PHICSL_ERR_INTERNAL = 5
} phicsl_status;

typedef struct phicsl_state phicsl_state;
typedef struct phicsl_config phicsl_config;
typedef struct phicsl_run phicsl_run;
typedef struct phicsl_phi_report phicsl_phi_report;

PHICSL_API const char* phicsl_version(void);
PHICSL_API const char* phicsl_last_error(void);
PHICSL_API const char* phicsl_status_name(phicsl_status status);

/* States */
PHICSL_API phicsl_status phicsl_state_parse(const char* spec, phicsl_state** out);
/* amplitudes: interleaved (re, im) pairs, prod(dims) of them; normalized on creation. */
PHICSL_API phicsl_status phicsl_state_create(const size_t* dims, size_t n_subsystems, const double* amplitudes,
                                             phicsl_state** out);
PHICSL_API void phicsl_state_destroy(phicsl_state* state);
PHICSL_API phicsl_status phicsl_state_dimension(const phicsl_state* state, size_t* out);
PHICSL_API phicsl_status phicsl_state_subsystems(const phicsl_state* state, size_t* out);

/* Phi */
PHICSL_API phicsl_status phicsl_phi_max(const phicsl_state* state, double* out);
PHICSL_API phicsl_status phicsl_entanglement_entropy(const phicsl_state* state, const size_t* side, size_t n_side,
                                                     double* out);
PHICSL_API phicsl_status phicsl_phi_report_create(const phicsl_state* state, phicsl_phi_report** out);
PHICSL_API void phicsl_phi_report_destroy(phicsl_phi_report* report);
PHICSL_API phicsl_status phicsl_phi_report_rows(const phicsl_phi_report* report, size_t* out);
PHICSL_API phicsl_status phicsl_phi_report_row(const phicsl_phi_report* report, size_t index, const char** grain,
                                               const char** bipartition, double* phi);
PHICSL_API phicsl_status phicsl_phi_report_max(const phicsl_phi_report* report, const char** grain,
                                               const char** bipartition, double* phi);
PHICSL_API phicsl_status phicsl_phi_report_csv(const phicsl_phi_report* report, const char** out);
PHICSL_API phicsl_status phicsl_phi_report_text(const phicsl_phi_report* report, const char** out);

/* Configs */
PHICSL_API phicsl_status phicsl_config_load(const char* path, phicsl_config** out);
/* base_dir may be NULL; relative output paths then resolve against the working directory. */
PHICSL_API phicsl_status phicsl_config_parse(const char* text, const char* base_dir, phicsl_config** out);
PHICSL_API void phicsl_config_destroy(phicsl_config* config);
PHICSL_API phicsl_status phicsl_config_output_path(const phicsl_config* config, const char** out);

/* Runs. threads = 0 uses every hardware thread; results do not depend on it. */
PHICSL_API phicsl_status phicsl_run_config(const phicsl_config* config, unsigned threads, phicsl_run** out);
PHICSL_API void phicsl_run_destroy(phicsl_run* run);
/* Writes the CSV to the configured output path plus <path>.summary.json. */
PHICSL_API phicsl_status phicsl_run_write(const phicsl_run* run);
PHICSL_API phicsl_status phicsl_run_write_to(const phicsl_run* run, const char* csv_path);
PHICSL_API phicsl_status phicsl_run_class_count(const phicsl_run* run, size_t* out);
PHICSL_API phicsl_status phicsl_run_counts(const phicsl_run* run, uint64_t* counts, size_t n);
PHICSL_API phicsl_status phicsl_run_born(const phicsl_run* run, double* born, size_t n);
PHICSL_API phicsl_status phicsl_run_chi_square(const phicsl_run* run, double* statistic, size_t* dof, double* p_value);
PHICSL_API phicsl_status phicsl_run_collapsed(const phicsl_run* run, size_t* out);
PHICSL_API phicsl_status phicsl_run_warning_count(const phicsl_run* run, size_t* out);
PHICSL_API phicsl_status phicsl_run_warning(const phicsl_run* run, size_t index, const char** out);
PHICSL_API phicsl_status phicsl_run_csv(const phicsl_run* run, const char** out);
PHICSL_API phicsl_status phicsl_run_summary_json(const phicsl_run* run, const char** out);

/* Scenario catalog */
PHICSL_API size_t phicsl_scenario_count(void);
PHICSL_API phicsl_status phicsl_scenario_name(size_t index, const char** out);
PHICSL_API phicsl_status phicsl_scenario_description(size_t index, const char** out);
PHICSL_API phicsl_status phicsl_scenario_parameter_count(size_t index, size_t* out);
PHICSL_API phicsl_status phicsl_scenario_parameter(size_t index, size_t parameter, const char** name,
                                                   double* default_value);

#ifdef __cplusplus
}
#endif

#endif /* PHICSL_PHICSL_H */
