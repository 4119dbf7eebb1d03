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

#ifndef CLCBN_CLCB_HPP_
#define CLCBN_CLCB_HPP_

// Character-level correspondence bootstrapping: candidate target ngrams
// for each English NE from cooccurrence counts over verse-aligned text.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clcbn/corpus.hpp"

namespace clcbn {

struct ClcbParams {
  int n_min = 4;
  int n_max = 19;
  size_t max_fa = 50;  // ngrams more frequent than this in the edition are dropped
};

struct NgramStat {
  std::string ngram;
  size_t f_s = 0;  // occurrences inside S_t
  size_t f_a = 0;  // occurrences inside the whole target edition

  bool operator==(const NgramStat&) const = default;
};

enum class PairSource { kBootstrapped, kAugmented };

struct TrainingPair {
  std::string target;   // model input; empty for augmented pairs
  std::string english;  // model output
  PairSource source = PairSource::kBootstrapped;

  bool operator==(const TrainingPair&) const = default;
};

// Every window of n_min..n_max code points made only of ngram characters,
// counted with overlaps. Keys are UTF-8.
std::map<std::string, size_t> CharNgrams(std::string_view text, int n_min = 4,
                                         int n_max = 19);

// Occurrence counts of every ngram of an edition, queried by content.
// Backed by a sorted array of ngram start positions, so memory is linear in
// the edition size rather than in the number of distinct ngrams.
class GlobalNgramCounts {
 public:
  GlobalNgramCounts(const Edition& edition, int n_min = 4, int n_max = 19);

  size_t Count(std::u32string_view ngram) const;
  size_t Count(std::string_view utf8) const;

  // Every distinct ngram with its count. Cost grows with the number of
  // distinct ngrams; intended for small editions and diagnostics.
  std::map<std::string, size_t> ToMap() const;

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }

 private:
  std::u32string_view Key(uint32_t pos) const;

  int n_min_;
  int n_max_;
  std::u32string text_;
  std::vector<uint8_t> run_;         // valid-run length at each position, capped at n_max
  std::vector<uint32_t> positions_;  // sorted by Key()
};

// G_t: ngrams of S_t with f_s >= 2 and f_a <= max_fa, sorted by ngram.
std::vector<NgramStat> GetNgrams(const std::vector<std::string>& target_verses,
                                 const GlobalNgramCounts& global,
                                 const ClcbParams& params = {});

struct FilterStages {
  std::vector<NgramStat> highest_fs;      // stage a
  std::vector<NgramStat> closest_counts;  // stage b: min |f_a - f_s|
  std::vector<NgramStat> closest_length;  // stage c: min length difference to w
};

// Each stage keeps every tied survivor; each list is sorted by ngram.
FilterStages RunFilter(const std::vector<NgramStat>& candidates,
                       std::string_view english_ne);
std::vector<std::string> Filter(const std::vector<NgramStat>& candidates,
                                std::string_view english_ne);

enum class SkipReason { kAbsent, kFrequencyOne, kNoCandidates, kBelowMinScore };
const char* SkipReasonName(SkipReason reason);

struct BootstrappedPair {
  TrainingPair pair;
  size_t f_s = 0;
  size_t f_a = 0;

  bool operator==(const BootstrappedPair&) const = default;
};

struct SkippedNe {
  std::string english;
  SkipReason reason;
};

struct BootstrapResult {
  std::vector<BootstrappedPair> pairs;  // NE input order, then ngram order
  std::vector<SkippedNe> skipped;
};

// The frequency gate uses the number of parallel verses containing the NE.
BootstrapResult Bootstrap(const ParallelCorpus& corpus,
                          const std::vector<EnglishNe>& nes,
                          const GlobalNgramCounts& global,
                          const ClcbParams& params = {});
BootstrapResult Bootstrap(const ParallelCorpus& corpus,
                          const std::vector<EnglishNe>& nes,
                          const ClcbParams& params = {});

// `english<TAB>target<TAB>f_s<TAB>f_a`, preceded by `header` (which may be
// empty or hold `#` lines).
std::string FormatPairs(const BootstrapResult& result, std::string_view header);
std::string FormatSkipped(const std::vector<SkippedNe>& skipped,
                          std::string_view header);
std::vector<BootstrappedPair> ParsePairs(std::string_view tsv);

}  // namespace clcbn

#endif  // CLCBN_CLCB_HPP_
