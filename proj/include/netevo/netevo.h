/* Copyright 2026 The netevo Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the netevo shared library: an evolutionary architecture
 * search engine for fully-connected classifiers. Candidate networks are
 * warm-started from a teacher model through function-preserving transforms
 * and fine-tuned with a discrepancy-regularized loss for domain adaptation.
 *
 * All objects are opaque handles owned by the library; every fallible call
 * returns a netevo_status and leaves a human-readable message retrievable
 * with netevo_last_error() on failure. Handles must be released with the
 * matching *_free function. The last-error message is thread-local.
 */

#ifndef NETEVO_H
#define NETEVO_H

#include <stdint.h>

#if defined(_WIN32)
#define NETEVO_API __declspec(dllexport)
#else
#define NETEVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum netevo_status {
    NETEVO_OK = 0,
    NETEVO_ERR_INVALID_ARGUMENT = 1, /* bad value or configuration */
    NETEVO_ERR_SHAPE = 2,            /* incompatible dimensions */
    NETEVO_ERR_IO = 3,               /* missing or unwritable file */
    NETEVO_ERR_PARSE = 4,            /* malformed manifest/signal/model file */
    NETEVO_ERR_NUMERIC = 5,          /* non-finite values during computation */
    NETEVO_ERR_RUNTIME = 6           /* any other failure */
} netevo_status;

/* Library version as "major.minor.patch". */
NETEVO_API const char* netevo_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
NETEVO_API const char* netevo_last_error(void);

/* Frees strings returned through char** output parameters. */
NETEVO_API void netevo_string_free(char* s);

typedef struct netevo_dataset netevo_dataset;
typedef struct netevo_model netevo_model;
typedef struct netevo_run netevo_run;

/* ------------------------------------------------------------------------- */
/* Configuration                                                              */
/* ------------------------------------------------------------------------- */

typedef struct netevo_train_config {
    int32_t max_iterations;     /* full-batch optimizer budget */
    double gradient_tolerance;  /* stop when the gradient norm falls below */
    int32_t history_size;       /* quasi-Newton memory */
    int32_t pretrain_epochs;    /* per-layer autoencoder iterations; 0 disables */
    double pretrain_noise;      /* denoising corruption fraction in [0, 1) */
} netevo_train_config;

enum {
    NETEVO_SCOPE_SOURCE_ONLY = 0,
    NETEVO_SCOPE_TARGET_ONLY = 1,
    NETEVO_SCOPE_BOTH = 2
};

typedef struct netevo_adapt_config {
    double gamma;           /* weight of the discrepancy term; 0 disables it */
    int32_t scope;          /* NETEVO_SCOPE_* for the classification term */
    int32_t finetune_iters; /* optimizer budget per candidate */
} netevo_adapt_config;

typedef struct netevo_evo_config {
    int32_t population_size; /* even, >= 2 */
    double crossover_prob;
    double mutation_prob;
    int32_t max_generations;
    int32_t depth_min;
    int32_t depth_max;
    int32_t width_min;
    int32_t width_max;
    double sbx_eta;                /* SBX distribution index */
    double widen_noise_std;        /* symmetry-breaking noise after widening */
    int32_t final_finetune_iters;  /* extra budget for the returned best model */
    uint64_t seed;
    int32_t fitness_cache; /* nonzero reuses fitness across generations */
    int32_t worker_count;  /* parallel fitness evaluations */
    netevo_adapt_config adapt;
    netevo_train_config optimizer;
} netevo_evo_config;

typedef struct netevo_synth_config {
    int32_t num_classes;
    int32_t dim;
    int32_t source_per_class;
    int32_t target_per_class;
    double shift_magnitude;
    double rotation_deg;
    double noise_std;
} netevo_synth_config;

/* Fill a config with the documented defaults. */
NETEVO_API void netevo_train_config_default(netevo_train_config* cfg);
NETEVO_API void netevo_adapt_config_default(netevo_adapt_config* cfg);
NETEVO_API void netevo_evo_config_default(netevo_evo_config* cfg);
NETEVO_API void netevo_synth_config_default(netevo_synth_config* cfg);

/* ------------------------------------------------------------------------- */
/* Datasets                                                                   */
/* ------------------------------------------------------------------------- */

enum {
    NETEVO_DOMAIN_SOURCE = 0,
    NETEVO_DOMAIN_TARGET = 1
};

/* Loads a dataset manifest: per class the listed signal files are
 * concatenated, segmented into rows of segment_length points, stacked, and
 * normalized as the manifest requests. */
NETEVO_API netevo_status netevo_dataset_load_manifest(const char* path, int32_t domain_tag,
                                                      netevo_dataset** out);

/* Synthetic domain-shift benchmark: Gaussian class blobs for the source, the
 * same blobs rotated and translated for the target. Defaults (see
 * netevo_synth_config_default) are the calibrated desk-scale benchmark. */
NETEVO_API netevo_status netevo_dataset_synth(const netevo_synth_config* cfg, uint64_t seed,
                                              netevo_dataset** source, netevo_dataset** target);

/* Stratified split into train/val/test; fractions must be positive and sum
 * to 1, and every class needs at least 3 samples. */
NETEVO_API netevo_status netevo_dataset_split(const netevo_dataset* ds, double train_fraction,
                                              double val_fraction, double test_fraction,
                                              uint64_t seed, netevo_dataset** train,
                                              netevo_dataset** val, netevo_dataset** test);

NETEVO_API int64_t netevo_dataset_rows(const netevo_dataset* ds);
NETEVO_API int32_t netevo_dataset_dim(const netevo_dataset* ds);
NETEVO_API int32_t netevo_dataset_num_classes(const netevo_dataset* ds);

/* Copies the feature matrix row-major into buf (buf_len >= rows*dim). */
NETEVO_API netevo_status netevo_dataset_copy_features(const netevo_dataset* ds, double* buf,
                                                      int64_t buf_len);
/* Copies the labels into buf (buf_len >= rows). */
NETEVO_API netevo_status netevo_dataset_copy_labels(const netevo_dataset* ds, int32_t* buf,
                                                    int64_t buf_len);

NETEVO_API void netevo_dataset_free(netevo_dataset* ds);

/* ------------------------------------------------------------------------- */
/* Models                                                                     */
/* ------------------------------------------------------------------------- */

enum {
    NETEVO_ACTIVATION_RECTIFIER = 0,
    NETEVO_ACTIVATION_SIGMOID = 1
};

/* Trains the teacher on a labeled dataset: greedy layer-wise autoencoder
 * pretraining followed by supervised fine-tuning. hidden_widths lists `depth`
 * hidden-layer sizes; activation is one of NETEVO_ACTIVATION_*. */
NETEVO_API netevo_status netevo_train_teacher(const netevo_dataset* source,
                                              const int32_t* hidden_widths, int32_t depth,
                                              int32_t activation, const netevo_train_config* cfg,
                                              uint64_t seed, netevo_model** out);

NETEVO_API netevo_status netevo_model_load_json(const char* path, netevo_model** out);
NETEVO_API netevo_status netevo_model_save_json(const netevo_model* model, const char* path);
/* Serialized model; exact round trip at full float precision. */
NETEVO_API netevo_status netevo_model_to_json(const netevo_model* model, char** out);

/* Classification accuracy in [0, 100] on a labeled dataset. */
NETEVO_API netevo_status netevo_model_accuracy(const netevo_model* model,
                                               const netevo_dataset* ds, double* ca);

NETEVO_API int64_t netevo_model_param_count(const netevo_model* model);

/* Writes up to buf_len hidden widths; *depth_out receives the full depth. */
NETEVO_API netevo_status netevo_model_hidden_widths(const netevo_model* model, int32_t* buf,
                                                    int32_t buf_len, int32_t* depth_out);

NETEVO_API void netevo_model_free(netevo_model* model);

/* ------------------------------------------------------------------------- */
/* Evolutionary search                                                        */
/* ------------------------------------------------------------------------- */

/* Runs the full search: every candidate architecture is warm-started from the
 * current teacher, fine-tuned on the combined classification + discrepancy
 * cost, and scored on target validation accuracy; each generation hands its
 * best model to the next as the new teacher. */
NETEVO_API netevo_status netevo_evolve(const netevo_model* teacher, const netevo_dataset* source,
                                       const netevo_dataset* target_train,
                                       const netevo_dataset* target_val,
                                       const netevo_evo_config* cfg, netevo_run** out);

/* Per-generation history as a JSON array; identical seeds give identical
 * bytes when worker_count is fixed. */
NETEVO_API netevo_status netevo_run_reports_json(const netevo_run* run, char** out);

/* Copy of the best model of the last generation; caller frees it. */
NETEVO_API netevo_status netevo_run_best_model(const netevo_run* run, netevo_model** out);

NETEVO_API void netevo_run_free(netevo_run* run);

#ifdef __cplusplus
}
#endif

#endif /* NETEVO_H */
