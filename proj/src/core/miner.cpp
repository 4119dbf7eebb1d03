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

#include "clcbn/miner.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <memory>
#include <set>

#include "clcbn/error.hpp"
#include "clcbn/io.hpp"
#include "clcbn/text.hpp"

namespace clcbn {

std::vector<std::string> CandidatesTokenized(const ParallelSubcorpus& subcorpus) {
  if (subcorpus.empty()) throw Error(ErrorCode::kEmptyInput, "empty subcorpus");
  std::set<std::string> tokens;
  for (const std::string& verse : subcorpus.target_verses) {
    for (std::string& tok : text::Tokenize(verse)) {
      if (text::Length(tok) >= 2) tokens.insert(std::move(tok));
    }
  }
  return {tokens.begin(), tokens.end()};
}

std::vector<std::string> CandidatesUntokenized(std::string_view english_ne,
                                               const std::vector<std::string>& target_verses,
                                               const GlobalNgramCounts& global,
                                               const ClcbParams& params) {
  if (target_verses.empty()) throw Error(ErrorCode::kEmptyInput, "empty subcorpus");
  std::vector<std::string> out;
  for (auto& s : RunFilter(GetNgrams(target_verses, global, params), english_ne).closest_counts) {
    out.push_back(std::move(s.ngram));
  }
  return out;
}

MineResult Mine(const translit::TranslitModel& model, const ParallelCorpus& corpus,
                const std::vector<EnglishNe>& nes, const MineOptions& options,
                const GlobalNgramCounts* global) {
  std::unique_ptr<GlobalNgramCounts> owned;
  if (options.mode == MiningMode::kUntokenized && global == nullptr) {
    owned = std::make_unique<GlobalNgramCounts>(corpus.target(), options.clcb.n_min,
                                                options.clcb.n_max);
    global = owned.get();
  }
  MineResult result;
  for (const EnglishNe& ne : nes) {
    if (ne.surface.empty()) continue;
    const ParallelSubcorpus sub = ExtractSubcorpus(corpus, ne);
    if (sub.empty()) {
      result.skipped.push_back({ne.surface, SkipReason::kAbsent});
      continue;
    }
    const std::vector<std::string> candidates =
        options.mode == MiningMode::kTokenized
            ? CandidatesTokenized(sub)
            : CandidatesUntokenized(ne.surface, sub.target_verses, *global, options.clcb);
    if (candidates.empty()) {
      result.skipped.push_back({ne.surface, SkipReason::kNoCandidates});
      continue;
    }
    // Candidates are sorted, so a strict comparison keeps the smallest on ties.
    size_t best = 0;
    double best_score = model.Score(candidates[0], ne.surface);
    for (size_t i = 1; i < candidates.size(); ++i) {
      const double s = model.Score(candidates[i], ne.surface);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    if (options.min_score && best_score < *options.min_score) {
      result.skipped.push_back({ne.surface, SkipReason::kBelowMinScore});
      continue;
    }
    result.pairs.push_back(
        {ne.surface, candidates[best], best_score, candidates.size(), sub.size()});
  }
  return result;
}

std::string FormatResource(std::vector<NePair> pairs, std::string_view header) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const NePair& a, const NePair& b) { return a.english < b.english; });
  std::string out(header);
  for (const NePair& p : pairs) {
    out += p.english;
    out += '\t';
    out += p.target;
    out += '\t';
    out += io::FormatFixed(p.score, 6);
    out += '\t';
    out += std::to_string(p.verse_frequency);
    out += '\n';
  }
  return out;
}

std::vector<NePair> ParseResource(std::string_view tsv) {
  std::vector<NePair> pairs;
  size_t start = 0;
  while (start < tsv.size()) {
    size_t end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (!io::IsDataLine(line)) continue;
    const auto f = io::SplitTabs(line);
    if (f.size() != 4 || f[0].empty() || f[1].empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected english<TAB>target<TAB>score<TAB>verse_frequency: " + std::string(line));
    }
    NePair p;
    p.english = std::string(f[0]);
    p.target = std::string(f[1]);
    const std::string score(f[2]);
    char* endp = nullptr;
    p.score = std::strtod(score.c_str(), &endp);
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), p.verse_frequency);
    if (endp != score.c_str() + score.size() || ec != std::errc() ||
        ptr != f[3].data() + f[3].size()) {
      throw Error(ErrorCode::kMalformedLine, "bad number in resource line: " + std::string(line));
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace clcbn
