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

#ifndef CLCBN_EVAL_HPP_
#define CLCBN_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clcbn/corpus.hpp"
#include "clcbn/miner.hpp"

namespace clcbn::eval {

// Plain Jaro (no Winkler prefix bonus) over code points. Two empty strings
// are identical (1); one empty string or no matches gives 0.
double JaroSimilarity(std::string_view a, std::string_view b);
double JaroDistance(std::string_view a, std::string_view b);

// english NE -> single reference translation; keys lowercase NFC.
using SilverLexicon = std::map<std::string, std::string>;

// `english<TAB>target[<TAB>...]`; extra columns are ignored.
SilverLexicon ParseSilver(std::string_view tsv);

struct Judgment {
  std::string english;
  std::string predicted;
  std::string reference;
  double distance = 0.0;
  bool correct = false;
};

struct EvalReport {
  size_t total = 0;
  size_t correct = 0;
  double precision = 0.0;
  std::vector<Judgment> per_pair;
};

// Extra normalization applied to both sides after lowercase + NFC.
using Normalizer = std::function<std::string(std::string_view)>;

// Removes combining marks (Mn) after canonical decomposition, e.g. for
// comparing abjad text with and without short-vowel marks.
std::string StripMarks(std::string_view utf8);

// A pair is correct iff its English NE is in `silver` and the Jaro distance
// to the silver target is <= threshold. Pairs without a silver entry are not
// counted. Throws Error(kEmptyInput) when no pair has a silver entry.
EvalReport SilverEval(const std::vector<NePair>& pairs, const SilverLexicon& silver,
                      double threshold = 0.3, const Normalizer& extra = nullptr);

struct AnnotationQuestion {
  std::string english;
  std::vector<std::string> options;     // sorted
  std::vector<std::string> annotators;  // sorted ids
  std::vector<std::set<std::string>> choices;  // parallel to annotators
};

struct AnnotationSet {
  std::vector<AnnotationQuestion> questions;  // sorted by question id
};

// Rows `question_id<TAB>annotator_id<TAB>chosen_option`. The question id is
// the English NE. An empty option records an annotator who chose nothing;
// annotator id `*` declares an option without choosing it.
AnnotationSet ParseAnnotations(std::string_view tsv);

using GoldSet = std::set<std::pair<std::string, std::string>>;

// Options chosen by at least two of exactly three annotators.
// Throws Error(kInvalidArgument) when a question has another annotator count.
GoldSet MajorityVote(const AnnotationSet& annotations);

// Binary judgments; throws Error(kInvalidArgument) on length mismatch or
// empty input. When chance agreement is 1 the result is 1 if observed
// agreement is 1, else 0.
double CohensKappa(const std::vector<bool>& a, const std::vector<bool>& b);

// Mean Cohen's kappa over the three annotator pairs, with one binary item
// per (question, option). Annotators are matched by rank of their id within
// each question.
double MeanPairwiseKappa(const AnnotationSet& annotations);

// Precision of mined pairs against majority-vote gold. Pairs whose English
// NE has no question are not counted.
EvalReport GoldEval(const std::vector<NePair>& pairs, const AnnotationSet& annotations);

// `english<TAB>predicted<TAB>reference<TAB>distance<TAB>verdict` after header.
std::string FormatReport(const EvalReport& report, std::string_view header);
std::string FormatSummary(const EvalReport& report);

// ---------------------------------------------------------------------------
// Synthetic corpora with known transliterations.

struct SynthSpec {
  // English letter -> target string. Must be injective.
  std::map<char32_t, std::string> substitution;
  size_t num_nes = 20;
  size_t min_frequency = 2;
  size_t max_frequency = 10;
  size_t singletons = 0;  // additional NEs planted in exactly one verse
  size_t verses = 500;
  size_t filler_vocab = 40;
  size_t words_per_verse = 8;
  size_t augmentation_nes = 100;
  bool unsegmented = false;  // target verses written without spaces
  uint64_t seed = 1;

  static SynthSpec Default();
  // Throws Error(kNotInjective) or Error(kInvalidArgument).
  void Validate() const;
};

// Flat `key=value` lines; `map=a:x,b:y` overrides single letters.
SynthSpec ParseSynthSpec(std::string_view text);

struct SynthCorpus {
  Edition english;
  Edition target;
  std::vector<std::string> ne_list;  // planted English NEs
  std::map<std::string, std::string> gold;
  std::map<std::string, size_t> frequency;  // planted verse counts
  std::vector<std::string> augmentation_nes;
};

SynthCorpus Synthesize(const SynthSpec& spec);

// english.txt, target.txt, ne_list.txt, aug_list.txt, gold.tsv; each file
// starts with `header`.
void WriteSynthCorpus(const SynthCorpus& corpus, const std::filesystem::path& dir,
                      std::string_view header);

}  // namespace clcbn::eval

#endif  // CLCBN_EVAL_HPP_
