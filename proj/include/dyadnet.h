#ifndef DYADNET_H
#define DYADNET_H

/*
 * dyadnet - pedestrian-dyad social relationship classifier toolkit.
 *
 * C interface over the C++ core. All heap-backed objects are opaque handles
 * created by dyad_* constructors and released with the matching *_free call
 * (free functions accept NULL). Every fallible function returns dyad_status;
 * on failure the thread-local message from dyad_last_error() names the
 * violated contract, prefixed with the status name (e.g. "UnknownModelName:
 * no model named 'RN2-9' in the registry").
 *
 * Handles are immutable after creation and safe to share across threads for
 * concurrent reads. dyad_train runs on the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32 || defined __CYGWIN__
#define DYAD_API __declspec(dllexport)
#else
#define DYAD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dyad_status {
  DYAD_OK = 0,
  DYAD_ERR_IO = 1,
  DYAD_ERR_EMPTY_FILE = 2,
  DYAD_ERR_MALFORMED_ROW = 3,
  DYAD_ERR_UNKNOWN_LABEL = 4,
  DYAD_ERR_NON_MONOTONIC_TIME = 5,
  DYAD_ERR_EMPTY_SPLIT = 6,
  DYAD_ERR_EMPTY_INPUT = 7,
  DYAD_ERR_SHAPE_MISMATCH = 8,
  DYAD_ERR_EMPTY_SEQUENCE = 9,
  DYAD_ERR_INVALID_TARGET = 10,
  DYAD_ERR_UNKNOWN_MODEL_NAME = 11,
  DYAD_ERR_CORRUPT_MODEL_FILE = 12,
  DYAD_ERR_INVALID_PROFILE = 13,
  DYAD_ERR_LABEL_OUT_OF_SPACE = 14,
  DYAD_ERR_INVALID_ARGUMENT = 15,
  DYAD_ERR_INTERNAL = 16,
  DYAD_ERR_SELFTEST_FAILED = 17
} dyad_status;

/* Relationship labels, stable encoding. */
enum {
  DYAD_LABEL_COLLEAGUES = 0,
  DYAD_LABEL_COUPLE = 1,
  DYAD_LABEL_FAMILY = 2,
  DYAD_LABEL_FRIENDSHIP = 3,
  DYAD_NUM_LABELS = 4
};

/* Two-category coarsening: colleagues vs couple+family+friendship. */
enum {
  DYAD_BINARY_ACQUAINTANCES = 0,
  DYAD_BINARY_INTIMATE = 1,
  DYAD_NUM_BINARY_LABELS = 2
};

DYAD_API const char* dyad_version(void);
DYAD_API const char* dyad_status_name(dyad_status status);
/* Message of the most recent failure on this thread; never NULL. */
DYAD_API const char* dyad_last_error(void);

/* Returned strings are heap-allocated; release with dyad_string_free. */
DYAD_API void dyad_string_free(char* s);

DYAD_API const char* dyad_label_name(int label);        /* NULL if out of range */
DYAD_API const char* dyad_binary_label_name(int label); /* NULL if out of range */
DYAD_API dyad_status dyad_label_parse(const char* name, int* label_out);
DYAD_API int dyad_label_to_binary(int label);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

typedef struct dyad_dataset dyad_dataset;

/* CSV schema:
 *   exp_id,t,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,label
 * Header row required; rows of one experiment contiguous and strictly
 * increasing in t; label one of the lowercase relationship names. */
DYAD_API dyad_status dyad_dataset_load(const char* path, dyad_dataset** out);
DYAD_API dyad_status dyad_dataset_save(const dyad_dataset* ds, const char* path);
DYAD_API void dyad_dataset_free(dyad_dataset* ds);

DYAD_API size_t dyad_dataset_size(const dyad_dataset* ds);
DYAD_API dyad_status dyad_dataset_label_counts(const dyad_dataset* ds,
                                               uint64_t counts_out[DYAD_NUM_LABELS]);
DYAD_API dyad_status dyad_dataset_binary_counts(const dyad_dataset* ds,
                                                uint64_t counts_out[DYAD_NUM_BINARY_LABELS]);

/* Seeded shuffle; the first floor(n * train_fraction) experiments form the
 * training set. Fails with DYAD_ERR_EMPTY_SPLIT if either side is empty. */
DYAD_API dyad_status dyad_dataset_split(const dyad_dataset* ds, double train_fraction,
                                        uint64_t seed, dyad_dataset** train_out,
                                        dyad_dataset** test_out);

/* Synthetic trajectory generation. mode is "separable" or "overlapping";
 * profiles_path may be NULL (built-in defaults) or a key-value file applied
 * on top of the mode defaults. counts are per relationship label. */
DYAD_API dyad_status dyad_generate(const char* mode, const char* profiles_path,
                                   const uint64_t counts[DYAD_NUM_LABELS], uint64_t seed,
                                   unsigned jobs, dyad_dataset** out);

/* One averaged 16-feature row (+label) per experiment. */
DYAD_API dyad_status dyad_features_write_csv(const dyad_dataset* ds, const char* path);

/* ------------------------------------------------------------------ */
/* Model registry                                                      */
/* ------------------------------------------------------------------ */

#define DYAD_MAX_HIDDEN_LAYERS 16
#define DYAD_MODEL_NAME_MAX 32

typedef struct dyad_model_spec {
  char name[DYAD_MODEL_NAME_MAX];
  uint32_t input_size;  /* always 16 */
  uint32_t output_size; /* 2 or 4 */
  uint32_t hidden_count;
  uint32_t hidden[DYAD_MAX_HIDDEN_LAYERS];
  int first_hidden_is_lstm;
  int l2_enabled;
  double dropout_rate;
  double learning_rate;
  uint32_t epochs;
} dyad_model_spec;

DYAD_API dyad_status dyad_registry_lookup(const char* name, dyad_model_spec* spec_out);
/* Newline-separated registry names. */
DYAD_API dyad_status dyad_registry_names(char** names_out);
/* The full registry rendered as a text table. */
DYAD_API dyad_status dyad_models_table(char** table_out);

/* ------------------------------------------------------------------ */
/* Training and evaluation                                             */
/* ------------------------------------------------------------------ */

typedef struct dyad_model dyad_model;
typedef struct dyad_report dyad_report;
typedef struct dyad_predictions dyad_predictions;

typedef struct dyad_train_config {
  double learning_rate;
  uint32_t epochs;
  uint32_t batch_size;
  double l2_lambda; /* applied only when the spec enables L2 */
  double dropout_rate;
  uint64_t seed;
  double train_fraction;
} dyad_train_config;

/* learning_rate/epochs/dropout_rate from the spec; batch 32, lambda 1e-3,
 * seed 0, fraction 0.9. */
DYAD_API dyad_status dyad_train_config_defaults(const dyad_model_spec* spec,
                                                dyad_train_config* cfg_out);

/* Full run: split, standardize on the training side, spec.epochs epochs of
 * mini-batch SGD. Any of the three result pointers may be NULL. */
DYAD_API dyad_status dyad_train(const dyad_model_spec* spec, const dyad_dataset* ds,
                                const dyad_train_config* cfg, dyad_model** model_out,
                                dyad_report** report_out, dyad_predictions** train_preds_out,
                                dyad_predictions** test_preds_out);

DYAD_API void dyad_model_free(dyad_model* model);
DYAD_API dyad_status dyad_model_spec_of(const dyad_model* model, dyad_model_spec* spec_out);
DYAD_API dyad_status dyad_model_save(const dyad_model* model, const char* path);
DYAD_API dyad_status dyad_model_load(const char* path, dyad_model** out);

/* Argmax scoring with the model's embedded standardizer; two-class models
 * score against merged binary truth. */
DYAD_API dyad_status dyad_evaluate(const dyad_model* model, const dyad_dataset* ds,
                                   double* accuracy_out, dyad_predictions** preds_out);

DYAD_API void dyad_report_free(dyad_report* report);
DYAD_API double dyad_report_train_accuracy(const dyad_report* report);
DYAD_API double dyad_report_test_accuracy(const dyad_report* report);
DYAD_API double dyad_report_wall_seconds(const dyad_report* report);
/* Line-oriented epoch log plus summary (format trainlog/1). */
DYAD_API dyad_status dyad_report_render(const dyad_report* report, char** text_out);
DYAD_API dyad_status dyad_report_write(const dyad_report* report, const char* path);
/* Newline-separated warnings (possibly empty string). */
DYAD_API dyad_status dyad_report_warnings(const dyad_report* report, char** text_out);

DYAD_API void dyad_predictions_free(dyad_predictions* preds);
DYAD_API size_t dyad_predictions_size(const dyad_predictions* preds);
DYAD_API dyad_status dyad_predictions_write_tsv(const dyad_predictions* preds, const char* path);
DYAD_API dyad_status dyad_predictions_load_tsv(const char* path, dyad_predictions** out);

/* ------------------------------------------------------------------ */
/* Confusion-matrix reports                                            */
/* ------------------------------------------------------------------ */

typedef enum dyad_render_style { DYAD_RENDER_COUNTS = 0, DYAD_RENDER_PERCENT = 1 } dyad_render_style;

/* Row-normalized confusion table (rows = real value, columns = predicted).
 * merge_binary folds 4-class predictions into acquaintances/intimate first. */
DYAD_API dyad_status dyad_confusion_render(const dyad_predictions* preds, int merge_binary,
                                           dyad_render_style style, char** table_out);
/* Count and percent tables plus overall and per-class accuracy. */
DYAD_API dyad_status dyad_confusion_report(const dyad_predictions* preds, int merge_binary,
                                           char** report_out);
DYAD_API dyad_status dyad_confusion_accuracy(const dyad_predictions* preds, int merge_binary,
                                             double* accuracy_out);

/* ------------------------------------------------------------------ */
/* Self test                                                           */
/* ------------------------------------------------------------------ */

/* Gradient checks plus the numeric invariant suite. Returns DYAD_OK or
 * DYAD_ERR_SELFTEST_FAILED; *log_out (optional) receives the check log. */
DYAD_API dyad_status dyad_selftest(char** log_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DYADNET_H */
