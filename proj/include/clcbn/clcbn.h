// Copyright 2026 The clcbn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the NE lexicon extraction pipeline.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions returning clcbn_status report failures through the code and
 * clcbn_last_error(), a thread-local message valid until the next call on
 * the same thread. Strings are UTF-8.
 */
#ifndef CLCBN_CLCBN_H_
#define CLCBN_CLCBN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CLCBN_API __declspec(dllexport)
#else
#  define CLCBN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CLCBN_VERSION_STRING "1.0.0"

typedef enum clcbn_status {
  CLCBN_OK = 0,
  CLCBN_E_INVALID_ARGUMENT = 1,
  CLCBN_E_IO = 2,
  CLCBN_E_MALFORMED_LINE = 3,
  CLCBN_E_DUPLICATE_VERSE_ID = 4,
  CLCBN_E_BAD_FORMAT = 5,
  CLCBN_E_UNSUPPORTED_VERSION = 6,
  CLCBN_E_TRUNCATED = 7,
  CLCBN_E_DIMENSION_MISMATCH = 8,
  CLCBN_E_NON_FINITE_LOSS = 9,
  CLCBN_E_EMPTY_INPUT = 10,
  CLCBN_E_NOT_INJECTIVE = 11,
  CLCBN_E_INTERNAL = 99
} clcbn_status;

CLCBN_API const char* clcbn_version(void);
CLCBN_API const char* clcbn_last_error(void);
CLCBN_API const char* clcbn_status_name(clcbn_status status);

/* ---- corpus ----------------------------------------------------------- */

typedef struct clcbn_edition clcbn_edition;
typedef struct clcbn_corpus clcbn_corpus;
typedef struct clcbn_ne_list clcbn_ne_list;

/* `verse_id<TAB>text` lines; `#` lines are comments. */
CLCBN_API clcbn_status clcbn_edition_load(const char* path, const char* language_tag,
                                          clcbn_edition** out);
CLCBN_API size_t clcbn_edition_verse_count(const clcbn_edition* edition);
CLCBN_API void clcbn_edition_free(clcbn_edition* edition);

/* Copies both editions. An empty intersection is valid; check
 * clcbn_corpus_shared_count. */
CLCBN_API clcbn_status clcbn_corpus_align(const clcbn_edition* english,
                                          const clcbn_edition* target, clcbn_corpus** out);
CLCBN_API size_t clcbn_corpus_shared_count(const clcbn_corpus* corpus);
CLCBN_API void clcbn_corpus_free(clcbn_corpus* corpus);

/* One NE per line; frequencies are counted against `english`. */
CLCBN_API clcbn_status clcbn_ne_list_load(const char* path, const clcbn_edition* english,
                                          clcbn_ne_list** out);
CLCBN_API size_t clcbn_ne_list_size(const clcbn_ne_list* list);
CLCBN_API size_t clcbn_ne_list_absent_count(const clcbn_ne_list* list);
CLCBN_API size_t clcbn_ne_list_rejected_count(const clcbn_ne_list* list);
CLCBN_API void clcbn_ne_list_free(clcbn_ne_list* list);

/* ---- bootstrapping ---------------------------------------------------- */

typedef struct clcbn_clcb_params {
  int n_min;       /* default 4 */
  int n_max;       /* default 19 */
  size_t max_fa;   /* default 50 */
} clcbn_clcb_params;

CLCBN_API void clcbn_clcb_params_default(clcbn_clcb_params* params);

typedef struct clcbn_bootstrap clcbn_bootstrap;

/* params may be NULL for defaults. */
CLCBN_API clcbn_status clcbn_bootstrap_run(const clcbn_corpus* corpus,
                                           const clcbn_ne_list* nes,
                                           const clcbn_clcb_params* params,
                                           clcbn_bootstrap** out);
CLCBN_API size_t clcbn_bootstrap_pair_count(const clcbn_bootstrap* result);
CLCBN_API size_t clcbn_bootstrap_skipped_count(const clcbn_bootstrap* result);
/* Pairs TSV `english<TAB>target<TAB>f_s<TAB>f_a`, skip TSV
 * `english<TAB>reason`. `header` (may be NULL) is written first verbatim. */
CLCBN_API clcbn_status clcbn_bootstrap_write(const clcbn_bootstrap* result,
                                             const char* pairs_path,
                                             const char* skipped_path, const char* header);
CLCBN_API void clcbn_bootstrap_free(clcbn_bootstrap* result);

/* ---- transliteration model -------------------------------------------- */

typedef enum clcbn_optimizer { CLCBN_OPTIMIZER_SGD = 0, CLCBN_OPTIMIZER_ADAM = 1 } clcbn_optimizer;

typedef struct clcbn_translit_params {
  int embedding_dim;
  int encoder_hidden_per_direction;
  int decoder_hidden;
  double dropout;
  int batch_size;
  double learning_rate;
  int epochs;
  double grad_clip_norm;
  uint64_t seed;
  clcbn_optimizer optimizer;
  double init_range;  /* parameters start uniform in [-init_range, init_range] */
} clcbn_translit_params;

CLCBN_API void clcbn_translit_params_default(clcbn_translit_params* params);

typedef struct clcbn_model clcbn_model;

/* Trains on a bootstrap pairs TSV. `augmentation_path` (one English NE per
 * line) may be NULL to train without augmentation. */
CLCBN_API clcbn_status clcbn_model_train(const char* pairs_path, const char* augmentation_path,
                                         const clcbn_translit_params* params,
                                         clcbn_model** out);
CLCBN_API clcbn_status clcbn_model_save(const clcbn_model* model, const char* path);
CLCBN_API clcbn_status clcbn_model_load(const char* path, clcbn_model** out);
CLCBN_API size_t clcbn_model_parameter_count(const clcbn_model* model);
CLCBN_API size_t clcbn_model_epoch_count(const clcbn_model* model);
CLCBN_API double clcbn_model_epoch_loss(const clcbn_model* model, size_t epoch_index);
/* CSV `epoch,mean_loss` after `header`. */
CLCBN_API clcbn_status clcbn_model_write_loss_curve(const clcbn_model* model, const char* path,
                                                    const char* header);
/* Mean log-likelihood per output symbol of `english` given `candidate`. */
CLCBN_API clcbn_status clcbn_model_score(const clcbn_model* model, const char* candidate,
                                         const char* english, double* out);
CLCBN_API void clcbn_model_free(clcbn_model* model);

/* ---- mining ----------------------------------------------------------- */

typedef enum clcbn_mode { CLCBN_MODE_TOKENIZED = 0, CLCBN_MODE_UNTOKENIZED = 1 } clcbn_mode;

typedef struct clcbn_mine_params {
  clcbn_mode mode;
  clcbn_clcb_params clcb;
  int use_min_score;  /* 0 keeps the best candidate unconditionally */
  double min_score;
} clcbn_mine_params;

CLCBN_API void clcbn_mine_params_default(clcbn_mine_params* params);

typedef struct clcbn_mined clcbn_mined;

CLCBN_API clcbn_status clcbn_mine(const clcbn_model* model, const clcbn_corpus* corpus,
                                  const clcbn_ne_list* nes, const clcbn_mine_params* params,
                                  clcbn_mined** out);
CLCBN_API size_t clcbn_mined_pair_count(const clcbn_mined* mined);
CLCBN_API size_t clcbn_mined_skipped_count(const clcbn_mined* mined);
/* Resource TSV `english<TAB>target<TAB>score<TAB>verse_frequency` sorted
 * by english, skip TSV `english<TAB>reason`. */
CLCBN_API clcbn_status clcbn_mined_write(const clcbn_mined* mined, const char* resource_path,
                                         const char* skipped_path, const char* header);
CLCBN_API void clcbn_mined_free(clcbn_mined* mined);

/* ---- evaluation ------------------------------------------------------- */

typedef struct clcbn_eval_summary {
  size_t total;
  size_t correct;
  double precision;
  double mean_kappa;  /* gold evaluation only; otherwise 0 */
} clcbn_eval_summary;

CLCBN_API clcbn_status clcbn_jaro_distance(const char* a, const char* b, double* out);

/* Silver lexicon `english<TAB>target`. Writes the per-pair report TSV to
 * report_path (may be NULL). */
CLCBN_API clcbn_status clcbn_eval_silver(const char* resource_path, const char* silver_path,
                                         double threshold, const char* report_path,
                                         const char* header, clcbn_eval_summary* out);
/* Annotations `question_id<TAB>annotator_id<TAB>chosen_option`, gold by
 * majority vote of three annotators. */
CLCBN_API clcbn_status clcbn_eval_gold(const char* resource_path, const char* annotations_path,
                                       const char* report_path, const char* header,
                                       clcbn_eval_summary* out);

/* Human-readable summary of the last successful evaluation on this thread. */
CLCBN_API const char* clcbn_eval_last_summary(void);

/* ---- synthetic corpora ------------------------------------------------ */

/* Reads a `key=value` spec file and writes english.txt, target.txt,
 * ne_list.txt, aug_list.txt and gold.tsv into out_dir. */
CLCBN_API clcbn_status clcbn_synth(const char* spec_path, const char* out_dir,
                                   const char* header);

/* ---- utilities -------------------------------------------------------- */

/* Lowercase hex SHA-256 into out_hex (65 bytes incl. terminator). */
CLCBN_API clcbn_status clcbn_digest_file(const char* path, char out_hex[65]);
CLCBN_API clcbn_status clcbn_digest_bytes(const void* data, size_t size, char out_hex[65]);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* CLCBN_CLCBN_H_ */
