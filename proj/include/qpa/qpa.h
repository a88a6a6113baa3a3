/*
 * C interface to the qpa purification simulator.
 *
 * All objects are opaque handles released with their matching *_free
 * function. Every fallible call returns a qpa_status; on failure the message
 * is available from qpa_last_error() on the calling thread until the next
 * call into the library from that thread.
 *
 * Index conventions:
 *   Bell probabilities:  [Phi+, Psi+, Phi-, Psi-]   (label index phase*2+amplitude)
 *   Subensemble weights: [flag * 4 + bell], 16 entries
 *   Noise probabilities: [alice * 4 + bob] over Paulis I, X, Y, Z
 */
#ifndef QPA_QPA_H
#define QPA_QPA_H

#include <stddef.h>
#include <stdint.h>

#if defined(QPA_BUILDING_LIBRARY)
#define QPA_API __attribute__((visibility("default")))
#else
#define QPA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpa_status {
  QPA_OK = 0,
  QPA_ERR_INVALID_ARGUMENT = 1,
  QPA_ERR_CONFIG = 2,
  QPA_ERR_DEGENERATE = 3,
  QPA_ERR_NO_THRESHOLD = 4,
  QPA_ERR_INSUFFICIENT_TAIL = 5,
  QPA_ERR_HALT = 6,
  QPA_ERR_VERIFICATION = 7,
  QPA_ERR_IO = 8,
  QPA_ERR_INTERNAL = 9
} qpa_status;

typedef enum qpa_placement {
  QPA_PLACEMENT_BEFORE_ROTATION = 0,
  QPA_PLACEMENT_BEFORE_BCNOT = 1
} qpa_placement;

typedef enum qpa_flag_mode { QPA_FLAGS_FIXED = 0, QPA_FLAGS_RANDOM = 1 } qpa_flag_mode;

typedef enum qpa_regime {
  QPA_REGIME_NO_PURIFICATION = 0,
  QPA_REGIME_PURIFY_INSECURE = 1,
  QPA_REGIME_PURIFY_SECURE = 2
} qpa_regime;

typedef enum qpa_noise_family {
  QPA_NOISE_PRODUCT = 0,
  QPA_NOISE_ONE_SIDED = 1,
  QPA_NOISE_UNIFORM = 2,
  QPA_NOISE_EXPLICIT = 3
} qpa_noise_family;

typedef struct qpa_noise qpa_noise;
typedef struct qpa_state qpa_state;
typedef struct qpa_trajectory qpa_trajectory;
typedef struct qpa_ensemble qpa_ensemble;
typedef struct qpa_experiment qpa_experiment;

QPA_API const char* qpa_version(void);
QPA_API const char* qpa_last_error(void);
QPA_API const char* qpa_status_name(qpa_status status);
/* Releases strings returned through char** out-parameters. */
QPA_API void qpa_string_free(char* s);

/* ---- Bell labels (index = phase * 2 + amplitude) ---------------------- */

QPA_API unsigned qpa_bell_rotate(unsigned bell);
QPA_API void qpa_bell_bcnot(unsigned source, unsigned target, unsigned* source_out, unsigned* target_out);
QPA_API int qpa_bell_coincides(unsigned target);
QPA_API unsigned qpa_flag_update(unsigned kept_flag, unsigned measured_flag);

/* ---- Noise ------------------------------------------------------------ */

QPA_API qpa_status qpa_noise_create(qpa_noise_family family, double parameter, qpa_noise** out);
QPA_API qpa_status qpa_noise_create_explicit(const double f[16], qpa_noise** out);
QPA_API qpa_status qpa_noise_from_json(const char* json, qpa_noise** out);
/* JSON document, release with qpa_string_free. */
QPA_API qpa_status qpa_noise_to_json(const qpa_noise* noise, char** out);
QPA_API qpa_status qpa_noise_probabilities(const qpa_noise* noise, double out[16]);
QPA_API qpa_status qpa_noise_label_shifts(const qpa_noise* noise, double out[4]);
QPA_API void qpa_noise_free(qpa_noise* noise);

/* ---- Subensemble states and the recurrence ---------------------------- */

QPA_API qpa_status qpa_state_create(const double p[16], qpa_state** out);
QPA_API qpa_status qpa_state_from_bell(const double bell[4], qpa_flag_mode mode, qpa_state** out);
QPA_API qpa_status qpa_state_werner(double fidelity, qpa_flag_mode mode, qpa_state** out);
QPA_API qpa_status qpa_state_coefficients(const qpa_state* state, double out[16]);
QPA_API double qpa_state_fidelity(const qpa_state* state);
QPA_API double qpa_state_conditional_fidelity(const qpa_state* state);
QPA_API void qpa_state_free(qpa_state* state);

QPA_API qpa_status qpa_one_round(const qpa_state* in, const qpa_noise* noise, qpa_placement placement,
                                 qpa_state** out, double* keep_probability);
/* Dense density-matrix reference for the same round. */
QPA_API qpa_status qpa_oracle_one_round(const qpa_state* in, const qpa_noise* noise, qpa_placement placement,
                                        qpa_state** out, double* keep_probability);

typedef struct qpa_round_record {
  size_t round;
  double fidelity;
  double conditional_fidelity;
  double keep_probability;
  double coefficients[16];
} qpa_round_record;

QPA_API qpa_status qpa_iterate(const qpa_state* initial, const qpa_noise* noise, qpa_placement placement,
                               size_t max_rounds, double fixpoint_tol, qpa_trajectory** out);
QPA_API size_t qpa_trajectory_length(const qpa_trajectory* t);
QPA_API int qpa_trajectory_converged(const qpa_trajectory* t);
QPA_API qpa_status qpa_trajectory_record(const qpa_trajectory* t, size_t index, qpa_round_record* out);
QPA_API qpa_status qpa_convergence_exponents(const qpa_trajectory* t, double* rate_fidelity,
                                             double* rate_conditional);
QPA_API void qpa_trajectory_free(qpa_trajectory* t);

typedef struct qpa_regime_report {
  qpa_regime regime;
  double max_fidelity;
  double conditional_limit;
  size_t rounds;
  int converged;
} qpa_regime_report;

QPA_API qpa_status qpa_classify_regime(const qpa_noise* noise, const qpa_state* initial, qpa_placement placement,
                                       qpa_regime_report* out);

typedef struct qpa_thresholds {
  int has_purify;
  double purify_lo, purify_hi;
  int has_secure;
  double secure_lo, secure_hi;
} qpa_thresholds;

QPA_API qpa_status qpa_find_thresholds(qpa_noise_family family, const qpa_state* initial, double lo, double hi,
                                       double bisect_tol, qpa_thresholds* out);

/* ---- Monte Carlo ------------------------------------------------------- */

typedef struct qpa_mc_round {
  size_t round;
  size_t input_pairs;
  size_t survivors;
  double keep_fraction;
  double fidelity;
  double conditional_fidelity;
  double stddev_fidelity;
  size_t histogram[16];
} qpa_mc_round;

QPA_API qpa_status qpa_ensemble_create(const double bell[4], size_t pairs, qpa_flag_mode mode, uint64_t seed,
                                       size_t chunks, qpa_ensemble** out);
QPA_API size_t qpa_ensemble_size(const qpa_ensemble* e);
QPA_API qpa_status qpa_ensemble_histogram(const qpa_ensemble* e, size_t out[16]);
/* QPA_ERR_HALT when fewer than two pairs remain. */
QPA_API qpa_status qpa_ensemble_run_round(qpa_ensemble* e, const qpa_noise* noise, qpa_placement placement,
                                          unsigned threads, qpa_mc_round* out);
QPA_API qpa_status qpa_ensemble_check_minimum_fidelity(qpa_ensemble* e, double sacrifice_fraction, double f_min,
                                                       int* passed, double* estimate, double* lower, double* upper);
QPA_API void qpa_ensemble_free(qpa_ensemble* e);

/* ---- Experiments (the CLI's entry points) ------------------------------ */

QPA_API qpa_status qpa_experiment_create(qpa_experiment** out);
QPA_API qpa_status qpa_experiment_load_preset(qpa_experiment* x, const char* name);
/* `source_name` prefixes line-anchored error messages. */
QPA_API qpa_status qpa_experiment_load_config(qpa_experiment* x, const char* text, const char* source_name);
QPA_API qpa_status qpa_experiment_set_seed(qpa_experiment* x, uint64_t seed);
/* "csv" or "json" */
QPA_API qpa_status qpa_experiment_set_format(qpa_experiment* x, const char* format);
QPA_API qpa_status qpa_experiment_set_output_dir(qpa_experiment* x, const char* dir);
QPA_API qpa_status qpa_experiment_set_deterministic(qpa_experiment* x, int deterministic);
/* Effective configuration as JSON. */
QPA_API qpa_status qpa_experiment_config_json(const qpa_experiment* x, char** out);
/* command: "iterate", "mc" or "scan". `summary` (may be NULL) receives a JSON report. */
QPA_API qpa_status qpa_experiment_run(qpa_experiment* x, const char* command, char** summary);
QPA_API void qpa_experiment_free(qpa_experiment* x);

/* Conformance checks; `tables_json` (may be NULL) overrides the label tables under test. */
QPA_API qpa_status qpa_verify(const char* tables_json, const char* out_dir, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* QPA_QPA_H */
