#ifndef DPHC_H
#define DPHC_H

/* Dephasing-channel simulator and tomographic-classification pipeline.
 *
 * Every entry point returns a dphc_status; 0 means success.  On failure a
 * thread-local message is available from dphc_last_error().  Out-parameters
 * are written only on success.  Strings returned through char** are
 * heap-allocated and must be released with dphc_string_free(); object
 * handles must be released with their matching *_free().
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dphc_status {
  DPHC_OK = 0,
  DPHC_ERR_INVALID_ARGUMENT = 1, /* bad parameter, config, or JSON */
  DPHC_ERR_QUADRATURE = 2,       /* integrator could not reach tolerance */
  DPHC_ERR_POLE = 3,             /* gamma function at a non-positive integer */
  DPHC_ERR_IO = 4,               /* file could not be opened/read/written */
  DPHC_ERR_MALFORMED = 5,        /* file exists but is not a dphc artifact */
  DPHC_ERR_TRUNCATED = 6,        /* file ends before its declared payload */
  DPHC_ERR_CHECKSUM = 7,         /* payload bytes fail their checksum */
  DPHC_ERR_DIMENSION = 8,        /* shape mismatch between artifacts */
  DPHC_ERR_DIVERGED = 9,         /* training loss became non-finite */
  DPHC_ERR_UNKNOWN = 10
} dphc_status;

/* Library version as "major.minor.patch". Static storage; do not free. */
const char* dphc_version(void);

/* Message for the last failure on this thread. Static storage; do not
 * free.  Empty string when no failure has occurred yet. */
const char* dphc_last_error(void);

void dphc_string_free(char* s);

/* ---- scalar channel functions ------------------------------------- */

/* Random-telegraph-noise dephasing kernel G(t, gamma), t >= 0, gamma > 0. */
dphc_status dphc_rtn_kernel(double t, double gamma, double* out);

/* Switching-rate weight p_alpha(gamma) on [gamma1, gamma2]; the mixture
 * behind a 1/f^alpha spectrum. */
dphc_status dphc_color_weight(double gamma, double alpha, double gamma1,
                              double gamma2, double* out);

/* Classical dephasing coefficient: G averaged over p_alpha by adaptive
 * Gauss-Kronrod quadrature in log gamma (absolute tolerance quad_tol). */
dphc_status dphc_lambda_classical(double t, double alpha, double gamma1,
                                  double gamma2, double quad_tol,
                                  double* out);

/* Zero-temperature Ohmic-family coefficient exp(-Gamma(t)); s > 0,
 * omega_c > 0. */
dphc_status dphc_lambda_quantum(double t, double s, double omega_c,
                                double* out);

/* Gamma function (Lanczos + reflection); poles at 0, -1, -2, ... fail
 * with DPHC_ERR_POLE. */
dphc_status dphc_gamma_function(double x, double* out);

/* ---- datasets ------------------------------------------------------ */

typedef struct dphc_bundle dphc_bundle;

/* Generates a dataset bundle from a generation-spec JSON object (see the
 * README for the schema; unknown keys are rejected). */
dphc_status dphc_generate(const char* genspec_json, int threads,
                          dphc_bundle** out);

/* Writes basename.train.dphc / .val.dphc / .test.dphc and
 * basename.meta.json. */
dphc_status dphc_bundle_save(const dphc_bundle* bundle, const char* basename);
dphc_status dphc_bundle_load(const char* basename, dphc_bundle** out);

/* JSON summary: generation spec, class values, split sizes. */
dphc_status dphc_bundle_info(const dphc_bundle* bundle, char** json_out);

/* Split is "train", "val", or "test". */
dphc_status dphc_bundle_counts(const dphc_bundle* bundle, const char* split,
                               int64_t* n_samples, int* feature_dim,
                               int* n_classes);

/* Copies sample i of the split: 8 features into x (as stored, f32
 * precision) and its label. */
dphc_status dphc_bundle_sample(const dphc_bundle* bundle, const char* split,
                               int64_t i, double* x, int* label);

void dphc_bundle_free(dphc_bundle* bundle);

/* ---- models -------------------------------------------------------- */

typedef struct dphc_model dphc_model;

/* Trains on the bundle's train/val splits per the train-config JSON
 * (architecture via "hidden"; see README).  On success returns the model
 * and, when report_json_out is non-NULL, a JSON training report with
 * per-epoch curves. */
dphc_status dphc_train(const dphc_bundle* bundle, const char* config_json,
                       dphc_model** out, char** report_json_out);

dphc_status dphc_model_save(const dphc_model* model, const char* path);
dphc_status dphc_model_load(const char* path, dphc_model** out);

/* JSON summary: layer sizes and the training configuration echo. */
dphc_status dphc_model_info(const dphc_model* model, char** json_out);

/* Runs one sample of dim features through the model.  label_out receives
 * the argmax class; probs_out, when non-NULL, must hold one double per
 * output class and receives the softmax distribution. */
dphc_status dphc_model_predict(const dphc_model* model, const double* x,
                               int dim, int* label_out, double* probs_out);

void dphc_model_free(dphc_model* model);

/* ---- evaluation ---------------------------------------------------- */

typedef struct dphc_eval dphc_eval;

dphc_status dphc_evaluate(const dphc_model* model, const dphc_bundle* bundle,
                          const char* split, dphc_eval** out);

dphc_status dphc_eval_accuracy(const dphc_eval* ev, double* out);
dphc_status dphc_eval_macro_f1(const dphc_eval* ev, double* out);

/* Confusion count at (actual, predicted). */
dphc_status dphc_eval_confusion(const dphc_eval* ev, int actual,
                                int predicted, int64_t* out);

/* Full scorecard as JSON: accuracy, macro-F1, both per-class marginal
 * ratios, the confusion matrix. */
dphc_status dphc_eval_scores_json(const dphc_eval* ev, char** out);
dphc_status dphc_eval_confusion_csv(const dphc_eval* ev, char** out);
dphc_status dphc_eval_confusion_svg(const dphc_eval* ev, char** out);

void dphc_eval_free(dphc_eval* ev);

/* Converts a dphc_train report JSON into the per-epoch curves CSV. */
dphc_status dphc_curves_csv(const char* report_json, char** out);

/* ---- experiment presets -------------------------------------------- */

/* Loads the preset (name resolved against presets_dir, $DPHC_PRESETS,
 * then ./presets; a path is used as-is), generates its datasets, trains
 * and evaluates every run, and writes all artifacts under outdir.
 * paper_scale != 0 switches to 140625 samples per class.  seed >= 0
 * replaces the preset's generation/training seeds.  all_passed_out (may
 * be NULL) receives 1 when every run landed inside its expected score
 * bands.  summary_json_out (may be NULL) receives the run summary. */
dphc_status dphc_run_preset(const char* name_or_path, const char* presets_dir,
                            const char* outdir, int paper_scale, int threads,
                            int64_t seed, int quiet, char** summary_json_out,
                            int* all_passed_out);

#ifdef __cplusplus
}
#endif

#endif /* DPHC_H */
