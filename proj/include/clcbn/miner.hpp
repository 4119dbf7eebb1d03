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

#ifndef CLCBN_MINER_HPP_
#define CLCBN_MINER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clcbn/clcb.hpp"
#include "clcbn/corpus.hpp"
#include "clcbn/translit.hpp"

namespace clcbn {

enum class MiningMode { kTokenized, kUntokenized };

struct NePair {
  std::string english;
  std::string target;
  double score = 0.0;       // mean log-likelihood per output symbol
  size_t n_candidates = 0;  // 0 when read back from a resource file
  size_t verse_frequency = 0;
};

// Distinct tokens of S_t with at least two code points, sorted.
// Throws Error(kEmptyInput) for an empty subcorpus.
std::vector<std::string> CandidatesTokenized(const ParallelSubcorpus& subcorpus);

// Ngrams surviving the count-difference stage of the filter for `english_ne`
// over S_t, sorted. Empty when nothing survives.
std::vector<std::string> CandidatesUntokenized(std::string_view english_ne,
                                               const std::vector<std::string>& target_verses,
                                               const GlobalNgramCounts& global,
                                               const ClcbParams& params = {});

struct MineOptions {
  MiningMode mode = MiningMode::kTokenized;
  ClcbParams clcb;
  std::optional<double> min_score;  // off by default
};

struct MineResult {
  std::vector<NePair> pairs;  // NE input order
  std::vector<SkippedNe> skipped;
};

// Best-scoring candidate per NE; exact score ties go to the lexicographically
// smallest target. `global` is required in untokenized mode and built from
// the corpus when null.
MineResult Mine(const translit::TranslitModel& model, const ParallelCorpus& corpus,
                const std::vector<EnglishNe>& nes, const MineOptions& options = {},
                const GlobalNgramCounts* global = nullptr);

// `english<TAB>target<TAB>score<TAB>verse_frequency` sorted by english, after
// `header`. Scores use six decimals.
std::string FormatResource(std::vector<NePair> pairs, std::string_view header);
std::vector<NePair> ParseResource(std::string_view tsv);

}  // namespace clcbn

#endif  // CLCBN_MINER_HPP_
