/*
 * pdsp - benchmarking harness for parallel and distributed stream processing.
 *
 * C interface to the harness pipeline: workload generation, parallelism
 * enumeration, embedded execution over simulated clusters, corpus storage,
 * and learned cost models. The library owns all heavy state behind the
 * opaque pdsp_harness handle; strings returned through out-parameters are
 * allocated by the library and released with pdsp_string_free().
 *
 * Thread safety: a pdsp_harness may be used from one thread at a time;
 * independent handles are fully isolated. pdsp_last_error() is thread-local.
 */

#ifndef PDSP_H
#define PDSP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdsp_status {
    PDSP_OK = 0,
    PDSP_ERR_INVALID_ARGUMENT = 1,
    PDSP_ERR_IO = 2,
    PDSP_ERR_GENERATION = 3,
    PDSP_ERR_EXECUTION = 4,
    PDSP_ERR_TRAINING = 5,
    PDSP_ERR_INTERNAL = 6
} pdsp_status;

/* Library version string, e.g. "0.1.0". */
const char* pdsp_version(void);

/* Stable name of a status code ("ok", "invalid_argument", ...). */
const char* pdsp_status_name(pdsp_status status);

/* Message of the most recent failure on this thread; empty string if none. */
const char* pdsp_last_error(void);

/* Releases strings returned through char** out-parameters. NULL is a no-op. */
void pdsp_string_free(char* s);

/*
 * Harness context. Holds the full configuration (paths, cluster, generator
 * ranges, enumeration strategy, cost model, protocol, split and training
 * settings). config_json may be NULL or "{}" for defaults; unknown keys are
 * rejected.
 */
typedef struct pdsp_harness pdsp_harness;

pdsp_status pdsp_harness_create(const char* config_json, pdsp_harness** out);
pdsp_status pdsp_harness_create_from_file(const char* config_path, pdsp_harness** out);
void pdsp_harness_destroy(pdsp_harness* harness);

/* Current configuration as canonical JSON. */
pdsp_status pdsp_harness_config(pdsp_harness* harness, char** config_json);

/*
 * Pipeline stages. options_json (NULL or "{}" allowed) overrides config keys
 * for this call only, using the same schema as the config file. Stages that
 * produce tables return CSV text; the others return a JSON summary.
 */

/* Generate workload plans into a line-delimited plan file. */
pdsp_status pdsp_generate(pdsp_harness* harness, const char* options_json,
                          const char* out_plans_path, char** summary_json);

/* Assign parallelism degrees to base plans using the configured strategy. */
pdsp_status pdsp_enumerate(pdsp_harness* harness, const char* plans_path, const char* options_json,
                           const char* out_plans_path, char** summary_json);

/* Execute plans under the measurement protocol, appending run records. */
pdsp_status pdsp_run(pdsp_harness* harness, const char* plans_path, const char* options_json,
                     const char* corpus_path, char** summary_json);

/* Grouped latency table (structure x parallelism category x cluster).
 * group_by is a comma list of "structure", "category", "cluster"; NULL means
 * all three. */
pdsp_status pdsp_report(pdsp_harness* harness, const char* corpus_path, const char* group_by,
                        char** csv);

/* Flatten a corpus (features + labels) to CSV. */
pdsp_status pdsp_corpus_export(pdsp_harness* harness, const char* corpus_path, char** csv);

/* Train the configured model on a stored corpus and save it. */
pdsp_status pdsp_train(pdsp_harness* harness, const char* corpus_path, const char* options_json,
                       const char* model_out_path, char** summary_json);

/* Q-error evaluation of a saved model over a corpus (per-structure rows).
 * test_subset_only != 0 evaluates only the configured test split. */
pdsp_status pdsp_evaluate(pdsp_harness* harness, const char* model_path, const char* corpus_path,
                          const char* options_json, int test_subset_only, char** csv);

/* Train identical models on per-strategy corpora and compare accuracy and
 * training cost. strategies/corpus_paths are parallel arrays of length n. */
pdsp_status pdsp_compare_strategies(pdsp_harness* harness, const char* const* strategies,
                                    const char* const* corpus_paths, size_t n,
                                    const char* options_json, char** csv);

/* Full pipeline: generate, enumerate, run, split, train all configured
 * models, evaluate, compare strategies. Artifacts land under out_dir. */
pdsp_status pdsp_pipeline(pdsp_harness* harness, const char* options_json, const char* out_dir,
                          char** summary_json);

/* Validate a plan file; report_json lists violations per plan. Status is
 * PDSP_OK even when plans are invalid (violations are data, not failures). */
pdsp_status pdsp_validate_plans(pdsp_harness* harness, const char* plans_path, char** report_json);

/*
 * Small pure helpers, exposed for tooling.
 */

/* max(c/c', c'/c) with the prediction clamped to >= 1e-6. */
pdsp_status pdsp_q_error(double truth, double prediction, double* out);

/* Parallelism category name ("XS".."XXL") for a maximum degree >= 1. */
pdsp_status pdsp_parallelism_category(int max_degree, const char** out_name);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PDSP_H */
