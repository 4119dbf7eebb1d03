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

#include "clcbn/clcbn.h"

#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "clcbn/clcb.hpp"
#include "clcbn/corpus.hpp"
#include "clcbn/digest.hpp"
#include "clcbn/error.hpp"
#include "clcbn/eval.hpp"
#include "clcbn/io.hpp"
#include "clcbn/miner.hpp"
#include "clcbn/text.hpp"
#include "clcbn/translit.hpp"

struct clcbn_edition {
  clcbn::Edition edition;
};

struct clcbn_corpus {
  clcbn::ParallelCorpus corpus;
};

struct clcbn_ne_list {
  clcbn::NeList list;
};

struct clcbn_bootstrap {
  clcbn::BootstrapResult result;
};

struct clcbn_model {
  clcbn::translit::TranslitModel model;
};

struct clcbn_mined {
  clcbn::MineResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_summary;

clcbn_status Fail(clcbn_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
clcbn_status Guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CLCBN_OK;
  } catch (const clcbn::Error& e) {
    return Fail(static_cast<clcbn_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(CLCBN_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(CLCBN_E_IO, e.what());
  } catch (const std::exception& e) {
    return Fail(CLCBN_E_INTERNAL, e.what());
  }
}

#define CLCBN_REQUIRE(cond, what)                                 \
  do {                                                            \
    if (!(cond)) return Fail(CLCBN_E_INVALID_ARGUMENT, (what));   \
  } while (0)

clcbn::ClcbParams ToParams(const clcbn_clcb_params* p) {
  clcbn::ClcbParams out;
  if (p != nullptr) {
    out.n_min = p->n_min;
    out.n_max = p->n_max;
    out.max_fa = p->max_fa;
  }
  return out;
}

std::string HeaderOf(const char* header) { return header ? header : ""; }

std::vector<std::string> LoadWordList(const char* path) {
  std::vector<std::string> words;
  for (const std::string& line : clcbn::io::ReadLines(path)) {
    if (!clcbn::io::IsDataLine(line)) continue;
    std::string w = clcbn::text::Normalize(clcbn::text::Trim(line));
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

void CopyHex(const std::string& hex, char out_hex[65]) {
  std::memcpy(out_hex, hex.data(), 64);
  out_hex[64] = '\0';
}

}  // namespace

extern "C" {

const char* clcbn_version(void) { return CLCBN_VERSION_STRING; }

const char* clcbn_last_error(void) { return g_last_error.c_str(); }

const char* clcbn_status_name(clcbn_status status) {
  if (status == CLCBN_OK) return "Ok";
  return clcbn::ErrorCodeName(static_cast<clcbn::ErrorCode>(status));
}

clcbn_status clcbn_edition_load(const char* path, const char* language_tag,
                                clcbn_edition** out) {
  CLCBN_REQUIRE(path && out, "path and out are required");
  return Guard([&] {
    *out = new clcbn_edition{clcbn::LoadEdition(path, language_tag ? language_tag : "")};
  });
}

size_t clcbn_edition_verse_count(const clcbn_edition* e) { return e ? e->edition.size() : 0; }

void clcbn_edition_free(clcbn_edition* e) { delete e; }

clcbn_status clcbn_corpus_align(const clcbn_edition* english, const clcbn_edition* target,
                                clcbn_corpus** out) {
  CLCBN_REQUIRE(english && target && out, "editions and out are required");
  return Guard([&] {
    *out = new clcbn_corpus{clcbn::Align(english->edition, target->edition)};
  });
}

size_t clcbn_corpus_shared_count(const clcbn_corpus* c) {
  return c ? c->corpus.shared_ids().size() : 0;
}

void clcbn_corpus_free(clcbn_corpus* c) { delete c; }

clcbn_status clcbn_ne_list_load(const char* path, const clcbn_edition* english,
                                clcbn_ne_list** out) {
  CLCBN_REQUIRE(path && english && out, "path, edition and out are required");
  return Guard([&] { *out = new clcbn_ne_list{clcbn::LoadNeList(path, english->edition)}; });
}

size_t clcbn_ne_list_size(const clcbn_ne_list* l) { return l ? l->list.nes.size() : 0; }

size_t clcbn_ne_list_absent_count(const clcbn_ne_list* l) {
  size_t n = 0;
  if (l) {
    for (const auto& ne : l->list.nes) n += ne.absent();
  }
  return n;
}

size_t clcbn_ne_list_rejected_count(const clcbn_ne_list* l) {
  return l ? l->list.rejected.size() : 0;
}

void clcbn_ne_list_free(clcbn_ne_list* l) { delete l; }

void clcbn_clcb_params_default(clcbn_clcb_params* p) {
  if (p == nullptr) return;
  const clcbn::ClcbParams d;
  p->n_min = d.n_min;
  p->n_max = d.n_max;
  p->max_fa = d.max_fa;
}

clcbn_status clcbn_bootstrap_run(const clcbn_corpus* corpus, const clcbn_ne_list* nes,
                                 const clcbn_clcb_params* params, clcbn_bootstrap** out) {
  CLCBN_REQUIRE(corpus && nes && out, "corpus, NE list and out are required");
  return Guard([&] {
    if (corpus->corpus.empty_intersection()) {
      throw clcbn::Error(clcbn::ErrorCode::kEmptyInput, "editions share no verse ids");
    }
    *out = new clcbn_bootstrap{clcbn::Bootstrap(corpus->corpus, nes->list.nes, ToParams(params))};
  });
}

size_t clcbn_bootstrap_pair_count(const clcbn_bootstrap* r) { return r ? r->result.pairs.size() : 0; }

size_t clcbn_bootstrap_skipped_count(const clcbn_bootstrap* r) {
  return r ? r->result.skipped.size() : 0;
}

clcbn_status clcbn_bootstrap_write(const clcbn_bootstrap* r, const char* pairs_path,
                                   const char* skipped_path, const char* header) {
  CLCBN_REQUIRE(r && pairs_path, "result and pairs_path are required");
  return Guard([&] {
    clcbn::io::WriteFile(pairs_path, clcbn::FormatPairs(r->result, HeaderOf(header)));
    if (skipped_path) {
      clcbn::io::WriteFile(skipped_path, clcbn::FormatSkipped(r->result.skipped, HeaderOf(header)));
    }
  });
}

void clcbn_bootstrap_free(clcbn_bootstrap* r) { delete r; }

void clcbn_translit_params_default(clcbn_translit_params* p) {
  if (p == nullptr) return;
  const clcbn::translit::TranslitConfig c;
  p->embedding_dim = c.embedding_dim;
  p->encoder_hidden_per_direction = c.encoder_hidden_per_direction;
  p->decoder_hidden = c.decoder_hidden;
  p->dropout = c.dropout;
  p->batch_size = c.batch_size;
  p->learning_rate = c.learning_rate;
  p->epochs = c.epochs;
  p->grad_clip_norm = c.grad_clip_norm;
  p->seed = c.seed;
  p->optimizer = static_cast<clcbn_optimizer>(c.optimizer);
  p->init_range = c.init_range;
}

clcbn_status clcbn_model_train(const char* pairs_path, const char* augmentation_path,
                               const clcbn_translit_params* params, clcbn_model** out) {
  CLCBN_REQUIRE(pairs_path && out, "pairs_path and out are required");
  return Guard([&] {
    clcbn::translit::TranslitConfig c;
    if (params) {
      c.embedding_dim = params->embedding_dim;
      c.encoder_hidden_per_direction = params->encoder_hidden_per_direction;
      c.decoder_hidden = params->decoder_hidden;
      c.dropout = params->dropout;
      c.batch_size = params->batch_size;
      c.learning_rate = params->learning_rate;
      c.epochs = params->epochs;
      c.grad_clip_norm = params->grad_clip_norm;
      c.seed = params->seed;
      if (params->optimizer != CLCBN_OPTIMIZER_SGD && params->optimizer != CLCBN_OPTIMIZER_ADAM) {
        throw clcbn::Error(clcbn::ErrorCode::kInvalidArgument, "unknown optimizer");
      }
      c.optimizer = static_cast<clcbn::translit::Optimizer>(params->optimizer);
      c.init_range = params->init_range;
    }
    std::vector<clcbn::TrainingPair> pairs;
    for (auto& p : clcbn::ParsePairs(clcbn::io::ReadFile(pairs_path))) {
      pairs.push_back(std::move(p.pair));
    }
    std::vector<std::string> aug;
    if (augmentation_path) aug = LoadWordList(augmentation_path);
    *out = new clcbn_model{clcbn::translit::Train(pairs, aug, c)};
  });
}

clcbn_status clcbn_model_save(const clcbn_model* m, const char* path) {
  CLCBN_REQUIRE(m && path, "model and path are required");
  return Guard([&] { clcbn::translit::SaveModel(m->model, path); });
}

clcbn_status clcbn_model_load(const char* path, clcbn_model** out) {
  CLCBN_REQUIRE(path && out, "path and out are required");
  return Guard([&] { *out = new clcbn_model{clcbn::translit::LoadModel(path)}; });
}

size_t clcbn_model_parameter_count(const clcbn_model* m) { return m ? m->model.ParameterCount() : 0; }

size_t clcbn_model_epoch_count(const clcbn_model* m) { return m ? m->model.loss_curve().size() : 0; }

double clcbn_model_epoch_loss(const clcbn_model* m, size_t i) {
  if (m == nullptr || i >= m->model.loss_curve().size()) return 0.0;
  return m->model.loss_curve()[i];
}

clcbn_status clcbn_model_write_loss_curve(const clcbn_model* m, const char* path,
                                          const char* header) {
  CLCBN_REQUIRE(m && path, "model and path are required");
  return Guard([&] {
    clcbn::io::WriteFile(path, clcbn::translit::FormatLossCurve(m->model.loss_curve(),
                                                                HeaderOf(header)));
  });
}

clcbn_status clcbn_model_score(const clcbn_model* m, const char* candidate, const char* english,
                               double* out) {
  CLCBN_REQUIRE(m && candidate && english && out, "model, strings and out are required");
  return Guard([&] { *out = m->model.Score(candidate, english); });
}

void clcbn_model_free(clcbn_model* m) { delete m; }

void clcbn_mine_params_default(clcbn_mine_params* p) {
  if (p == nullptr) return;
  p->mode = CLCBN_MODE_TOKENIZED;
  clcbn_clcb_params_default(&p->clcb);
  p->use_min_score = 0;
  p->min_score = 0.0;
}

clcbn_status clcbn_mine(const clcbn_model* m, const clcbn_corpus* corpus,
                        const clcbn_ne_list* nes, const clcbn_mine_params* params,
                        clcbn_mined** out) {
  CLCBN_REQUIRE(m && corpus && nes && out, "model, corpus, NE list and out are required");
  return Guard([&] {
    clcbn::MineOptions opts;
    if (params) {
      if (params->mode != CLCBN_MODE_TOKENIZED && params->mode != CLCBN_MODE_UNTOKENIZED) {
        throw clcbn::Error(clcbn::ErrorCode::kInvalidArgument, "unknown mining mode");
      }
      opts.mode = params->mode == CLCBN_MODE_TOKENIZED ? clcbn::MiningMode::kTokenized
                                                       : clcbn::MiningMode::kUntokenized;
      opts.clcb = ToParams(&params->clcb);
      if (params->use_min_score) opts.min_score = params->min_score;
    }
    *out = new clcbn_mined{clcbn::Mine(m->model, corpus->corpus, nes->list.nes, opts)};
  });
}

size_t clcbn_mined_pair_count(const clcbn_mined* r) { return r ? r->result.pairs.size() : 0; }

size_t clcbn_mined_skipped_count(const clcbn_mined* r) { return r ? r->result.skipped.size() : 0; }

clcbn_status clcbn_mined_write(const clcbn_mined* r, const char* resource_path,
                               const char* skipped_path, const char* header) {
  CLCBN_REQUIRE(r && resource_path, "result and resource_path are required");
  return Guard([&] {
    clcbn::io::WriteFile(resource_path, clcbn::FormatResource(r->result.pairs, HeaderOf(header)));
    if (skipped_path) {
      clcbn::io::WriteFile(skipped_path, clcbn::FormatSkipped(r->result.skipped, HeaderOf(header)));
    }
  });
}

void clcbn_mined_free(clcbn_mined* r) { delete r; }

clcbn_status clcbn_jaro_distance(const char* a, const char* b, double* out) {
  CLCBN_REQUIRE(a && b && out, "strings and out are required");
  return Guard([&] { *out = clcbn::eval::JaroDistance(a, b); });
}

clcbn_status clcbn_eval_silver(const char* resource_path, const char* silver_path,
                               double threshold, const char* report_path, const char* header,
                               clcbn_eval_summary* out) {
  CLCBN_REQUIRE(resource_path && silver_path, "resource and silver paths are required");
  return Guard([&] {
    const auto pairs = clcbn::ParseResource(clcbn::io::ReadFile(resource_path));
    const auto silver = clcbn::eval::ParseSilver(clcbn::io::ReadFile(silver_path));
    const auto report = clcbn::eval::SilverEval(pairs, silver, threshold);
    if (report_path) {
      clcbn::io::WriteFile(report_path, clcbn::eval::FormatReport(report, HeaderOf(header)));
    }
    g_last_summary = clcbn::eval::FormatSummary(report);
    if (out) *out = {report.total, report.correct, report.precision, 0.0};
  });
}

clcbn_status clcbn_eval_gold(const char* resource_path, const char* annotations_path,
                             const char* report_path, const char* header,
                             clcbn_eval_summary* out) {
  CLCBN_REQUIRE(resource_path && annotations_path, "resource and annotation paths are required");
  return Guard([&] {
    const auto pairs = clcbn::ParseResource(clcbn::io::ReadFile(resource_path));
    const auto annotations = clcbn::eval::ParseAnnotations(clcbn::io::ReadFile(annotations_path));
    const auto report = clcbn::eval::GoldEval(pairs, annotations);
    const double kappa = clcbn::eval::MeanPairwiseKappa(annotations);
    if (report_path) {
      clcbn::io::WriteFile(report_path, clcbn::eval::FormatReport(report, HeaderOf(header)));
    }
    g_last_summary = clcbn::eval::FormatSummary(report) +
                     "mean pairwise kappa: " + clcbn::io::FormatFixed(kappa, 4) + "\n";
    if (out) *out = {report.total, report.correct, report.precision, kappa};
  });
}

const char* clcbn_eval_last_summary(void) { return g_last_summary.c_str(); }

clcbn_status clcbn_synth(const char* spec_path, const char* out_dir, const char* header) {
  CLCBN_REQUIRE(spec_path && out_dir, "spec_path and out_dir are required");
  return Guard([&] {
    const auto spec = clcbn::eval::ParseSynthSpec(clcbn::io::ReadFile(spec_path));
    clcbn::eval::WriteSynthCorpus(clcbn::eval::Synthesize(spec), out_dir, HeaderOf(header));
  });
}

clcbn_status clcbn_digest_file(const char* path, char out_hex[65]) {
  CLCBN_REQUIRE(path && out_hex, "path and out_hex are required");
  return Guard([&] { CopyHex(clcbn::digest::Sha256File(path), out_hex); });
}

clcbn_status clcbn_digest_bytes(const void* data, size_t size, char out_hex[65]) {
  CLCBN_REQUIRE((data || size == 0) && out_hex, "data and out_hex are required");
  return Guard([&] {
    CopyHex(clcbn::digest::Sha256Hex(
                std::string_view(static_cast<const char*>(data ? data : ""), size)),
            out_hex);
  });
}

}  // extern "C"
