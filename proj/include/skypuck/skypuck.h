/* skypuck — multi-UAV conflict-management and beaconing simulator.
 *
 * C interface of the shared library. All objects are opaque handles owned by
 * the library; every fallible call returns a skypuck_status, with a detail
 * message available from skypuck_last_error() on the calling thread.
 */
#ifndef SKYPUCK_H
#define SKYPUCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKYPUCK_API __declspec(dllexport)
#else
#define SKYPUCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skypuck_status {
    SKYPUCK_OK = 0,
    SKYPUCK_ERR_ARGUMENT = 1,
    SKYPUCK_ERR_IO = 2,
    SKYPUCK_ERR_PARSE = 3,
    SKYPUCK_ERR_VALIDATION = 4,
    SKYPUCK_ERR_RUNTIME = 5,
    SKYPUCK_ERR_SINGULAR_FIT = 6,
    SKYPUCK_ERR_UNRESOLVABLE = 7
} skypuck_status;

typedef enum skypuck_layer {
    SKYPUCK_LAYER_STRATEGIC = 0,
    SKYPUCK_LAYER_WELL_CLEAR = 1,
    SKYPUCK_LAYER_COLLISION_AVOIDANCE = 2,
    SKYPUCK_LAYER_NO_CONFLICT = 3
} skypuck_layer;

SKYPUCK_API const char* skypuck_version(void);
SKYPUCK_API const char* skypuck_status_name(skypuck_status status);

/* Thread-local message describing the most recent failure on this thread. */
SKYPUCK_API const char* skypuck_last_error(void);

/* ------------------------------------------------------------------ */
/* Text blobs returned by the library (reports, tables, summaries).    */
/* ------------------------------------------------------------------ */

typedef struct skypuck_report skypuck_report;

SKYPUCK_API const char* skypuck_report_text(const skypuck_report* report);
SKYPUCK_API size_t skypuck_report_size(const skypuck_report* report);
SKYPUCK_API void skypuck_report_free(skypuck_report* report);

/* ------------------------------------------------------------------ */
/* Scenarios                                                           */
/* ------------------------------------------------------------------ */

typedef struct skypuck_scenario skypuck_scenario;

SKYPUCK_API skypuck_status skypuck_scenario_open(const char* path, skypuck_scenario** out);
SKYPUCK_API skypuck_status skypuck_scenario_parse(const char* json_text, skypuck_scenario** out);
SKYPUCK_API void skypuck_scenario_free(skypuck_scenario* scenario);

/* 16 hex characters identifying the scenario content. `cap` >= 17. */
SKYPUCK_API skypuck_status skypuck_scenario_digest(const skypuck_scenario* scenario, char* buf,
                                                   size_t cap);
SKYPUCK_API skypuck_status skypuck_scenario_set_seed(skypuck_scenario* scenario, uint64_t seed);
SKYPUCK_API skypuck_status skypuck_scenario_seed(const skypuck_scenario* scenario, uint64_t* seed);

/* Validation report: one "CODE: message" line per breach.
 * `violation_count` receives the number of breaches (0 when runnable). */
SKYPUCK_API skypuck_status skypuck_scenario_validate(const skypuck_scenario* scenario,
                                                     int* violation_count,
                                                     skypuck_report** report);

/* Run the scenario. When `out_dir` is non-NULL the RSSI trace, delay
 * metrics, event log, and summary document are written there; the summary
 * document is always returned. */
SKYPUCK_API skypuck_status skypuck_run(const skypuck_scenario* scenario, const char* out_dir,
                                       skypuck_report** summary);

/* ------------------------------------------------------------------ */
/* Path-loss regression                                                */
/* ------------------------------------------------------------------ */

typedef struct skypuck_fit_result {
    double pl0_db;
    double exponent;
    double sigma_db;
    uint64_t sample_count;
} skypuck_fit_result;

/* Fit the log-distance model to the received rows of an RSSI trace CSV
 * (schema: time_s,tx_id,rx_id,distance_m,rssi_dbm,received). */
SKYPUCK_API skypuck_status skypuck_fit_rssi_csv(const char* csv_path, double tx_power_dbm,
                                                double antenna_gain_db, double d0_m,
                                                skypuck_fit_result* out);

/* Sample the fitted RSSI curve for plotting: CSV distance_m,rssi_dbm_fit. */
SKYPUCK_API skypuck_status skypuck_fit_curve_csv(const skypuck_fit_result* fit,
                                                 double tx_power_dbm, double antenna_gain_db,
                                                 double d0_m, double d_min_m, double d_max_m,
                                                 int points, const char* out_path);

/* ------------------------------------------------------------------ */
/* Technology recommendation                                           */
/* ------------------------------------------------------------------ */

/* `layer`: "strategic" | "well-clear" | "collision-avoidance";
 * `environment`: "suburban" | "urban".
 * The report is a CSV table: name,mode,range_m,min_update_s,measured_s. */
SKYPUCK_API skypuck_status skypuck_recommend(const char* layer, const char* environment,
                                             skypuck_report** table);

/* ------------------------------------------------------------------ */
/* Separation geometry helpers                                         */
/* ------------------------------------------------------------------ */

SKYPUCK_API double skypuck_horizontal_separation(const double a_enu[3], const double b_enu[3]);
SKYPUCK_API double skypuck_vertical_separation(const double a_enu[3], const double b_enu[3]);
SKYPUCK_API int skypuck_puck_violation(const double a_enu[3], const double b_enu[3], double d_h,
                                       double d_v);

/* Time to collision under constant velocities; +infinity when receding.
 * Fails with SKYPUCK_ERR_ARGUMENT for coincident positions. */
SKYPUCK_API skypuck_status skypuck_time_to_collision(const double pa_enu[3], const double va[3],
                                                     const double pb_enu[3], const double vb[3],
                                                     double* out_seconds);

/* Time-based layer classification; negative ttc fails. */
SKYPUCK_API skypuck_status skypuck_classify_layer_time(double ttc_s, skypuck_layer* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SKYPUCK_H */
