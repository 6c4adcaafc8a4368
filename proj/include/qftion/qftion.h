/*
 * qftion C API.
 *
 * Opaque handles own their data; release them with the matching *_free call.
 * Every function returning qft_status leaves a human-readable message for the
 * calling thread in qft_last_error() when it fails. Status values double as
 * process exit codes for the qftsim CLI.
 */
#ifndef QFTION_H
#define QFTION_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef QFTION_BUILDING
#    define QFTION_API __declspec(dllexport)
#  else
#    define QFTION_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define QFTION_API __attribute__((visibility("default")))
#else
#  define QFTION_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qft_status {
    QFT_OK = 0,
    QFT_ERR_INTERNAL = 1,
    QFT_ERR_PARSE = 2,
    QFT_ERR_VALIDATION = 3,
    QFT_ERR_TRUNCATION = 4,
    QFT_ERR_VERIFY = 5,
    QFT_ERR_IO = 6
} qft_status;

typedef struct qft_scenario qft_scenario;
typedef struct qft_series qft_series;
typedef struct qft_report qft_report;

typedef enum qft_column {
    QFT_COL_TIME = 0,
    QFT_COL_SURVIVAL,
    QFT_COL_MEAN_N,
    QFT_COL_POP_VAC,
    QFT_COL_POP_F,
    QFT_COL_POP_FBAR,
    QFT_COL_POP_PAIR,
    QFT_COL_NORM_ERROR
} qft_column;

QFTION_API const char* qft_version(void);
QFTION_API const char* qft_last_error(void);

/* Scenario files */
QFTION_API qft_status qft_scenario_load(const char* path, qft_scenario** out);
QFTION_API qft_status qft_scenario_parse(const char* text, qft_scenario** out);
QFTION_API void qft_scenario_free(qft_scenario* s);
/* Overrides one [couplings] entry (g1, g2, sigma_t, T, delta, omega0, k0). */
QFTION_API qft_status qft_scenario_set(qft_scenario* s, const char* key, double value);
/* Newline-separated warnings (empty string when none). Owned by the scenario. */
QFTION_API const char* qft_scenario_warnings(const qft_scenario* s);

/* Runs the scenario in memory. */
QFTION_API qft_status qft_scenario_simulate(const qft_scenario* s, qft_series** out);
/* Runs and writes the CSV. out_dir may be NULL. The written path is copied to
 * path_buf (truncated to path_len) when path_buf is not NULL. */
QFTION_API qft_status qft_scenario_run(const qft_scenario* s, const char* out_dir, char* path_buf,
                                       size_t path_len);
/* One CSV per value plus <stem>_sweep_<key>.csv. values is a comma-separated
 * list. Returns the first failing status, after all values have run. */
QFTION_API qft_status qft_scenario_sweep(const qft_scenario* s, const char* key,
                                         const char* values, const char* out_dir,
                                         unsigned threads, qft_report** report);
/* Certification suite; QFT_ERR_VERIFY when any check fails. */
QFTION_API qft_status qft_scenario_verify(const qft_scenario* s, qft_report** report);

QFTION_API const char* qft_report_text(const qft_report* r);
QFTION_API void qft_report_free(qft_report* r);

QFTION_API size_t qft_series_length(const qft_series* ts);
QFTION_API int qft_series_n_max(const qft_series* ts);
QFTION_API qft_status qft_series_column(const qft_series* ts, qft_column column, double* out,
                                        size_t len);
/* CSV text of the series. Owned by the series. */
QFTION_API const char* qft_series_csv(qft_series* ts);
QFTION_API void qft_series_free(qft_series* ts);

/* Building blocks */
QFTION_API qft_status qft_gaussian_overlap(double a, double s1, double b, double s2, double q,
                                           double* re, double* im);
QFTION_API qft_status qft_manymode_dimension(int n_ions, int phonons_per_ion, uint64_t* out);
QFTION_API qft_status qft_driven_oscillator_oracle(double g1, double omega0, double t,
                                                   double* mean_boson, double* survival);

#ifdef __cplusplus
}
#endif

#endif
