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

#include "clcbn/clcb.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <unordered_map>

#include "clcbn/error.hpp"
#include "clcbn/io.hpp"
#include "clcbn/text.hpp"

namespace clcbn {

namespace {

void CheckBounds(int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max || n_max > 255) {
    throw Error(ErrorCode::kInvalidArgument, "ngram bounds must satisfy 1 <= n_min <= n_max <= 255");
  }
}

// Length of the run of ngram characters starting at each position.
std::vector<size_t> RunLengths(std::u32string_view u) {
  std::vector<size_t> run(u.size() + 1, 0);
  for (size_t i = u.size(); i-- > 0;) {
    run[i] = text::IsNgramChar(u[i]) ? run[i + 1] + 1 : 0;
  }
  return run;
}

template <typename Fn>
void ForEachNgram(std::u32string_view u, int n_min, int n_max, Fn&& fn) {
  const auto run = RunLengths(u);
  for (size_t p = 0; p < u.size(); ++p) {
    const size_t limit = std::min<size_t>(run[p], static_cast<size_t>(n_max));
    for (size_t n = static_cast<size_t>(n_min); n <= limit; ++n) {
      fn(u.substr(p, n));
    }
  }
}

size_t AbsDiff(size_t a, size_t b) { return a > b ? a - b : b - a; }

template <typename Key>
std::vector<NgramStat> KeepBest(const std::vector<NgramStat>& in, Key key) {
  std::vector<NgramStat> out;
  if (in.empty()) return out;
  auto best = key(in.front());
  for (const auto& s : in) best = std::min(best, key(s));
  for (const auto& s : in) {
    if (key(s) == best) out.push_back(s);
  }
  return out;
}

bool ByNgram(const NgramStat& a, const NgramStat& b) { return a.ngram < b.ngram; }

size_t ParseCount(std::string_view field, std::string_view line) {
  size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kMalformedLine, "bad count in pairs line: " + std::string(line));
  }
  return v;
}

}  // namespace

std::map<std::string, size_t> CharNgrams(std::string_view utf8, int n_min,
                                         int n_max) {
  CheckBounds(n_min, n_max);
  std::map<std::string, size_t> out;
  const std::u32string u = text::ToU32(utf8);
  ForEachNgram(u, n_min, n_max,
               [&](std::u32string_view g) { ++out[text::ToUtf8(g)]; });
  return out;
}

GlobalNgramCounts::GlobalNgramCounts(const Edition& edition, int n_min,
                                     int n_max)
    : n_min_(n_min), n_max_(n_max) {
  CheckBounds(n_min, n_max);
  for (const Verse& v : edition.verses()) {
    text_ += text::ToU32(v.text);
    text_.push_back(U'\0');  // never an ngram character
  }
  if (text_.size() > std::numeric_limits<uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "edition too large to index");
  }
  const auto run = RunLengths(text_);
  run_.resize(text_.size());
  for (size_t p = 0; p < text_.size(); ++p) {
    run_[p] = static_cast<uint8_t>(std::min<size_t>(run[p], n_max_));
    if (run[p] >= static_cast<size_t>(n_min_)) {
      positions_.push_back(static_cast<uint32_t>(p));
    }
  }
  std::sort(positions_.begin(), positions_.end(), [this](uint32_t a, uint32_t b) {
    const auto ka = Key(a), kb = Key(b);
    return ka < kb || (ka == kb && a < b);
  });
}

std::u32string_view GlobalNgramCounts::Key(uint32_t pos) const {
  return std::u32string_view(text_).substr(pos, run_[pos]);
}

size_t GlobalNgramCounts::Count(std::u32string_view g) const {
  if (g.size() < static_cast<size_t>(n_min_) || g.size() > static_cast<size_t>(n_max_)) {
    return 0;
  }
  const size_t n = g.size();
  auto lo = std::lower_bound(positions_.begin(), positions_.end(), g,
                             [&](uint32_t pos, std::u32string_view q) {
                               return Key(pos).substr(0, n) < q;
                             });
  auto hi = std::upper_bound(lo, positions_.end(), g,
                             [&](std::u32string_view q, uint32_t pos) {
                               return q < Key(pos).substr(0, n);
                             });
  return static_cast<size_t>(hi - lo);
}

size_t GlobalNgramCounts::Count(std::string_view utf8) const {
  return Count(std::u32string_view(text::ToU32(utf8)));
}

std::map<std::string, size_t> GlobalNgramCounts::ToMap() const {
  std::map<std::string, size_t> out;
  for (uint32_t pos : positions_) {
    const auto key = Key(pos);
    for (size_t n = n_min_; n <= key.size(); ++n) ++out[text::ToUtf8(key.substr(0, n))];
  }
  return out;
}

std::vector<NgramStat> GetNgrams(const std::vector<std::string>& target_verses,
                                 const GlobalNgramCounts& global,
                                 const ClcbParams& params) {
  CheckBounds(params.n_min, params.n_max);
  std::unordered_map<std::u32string, size_t> local;
  for (const std::string& verse : target_verses) {
    const std::u32string u = text::ToU32(verse);
    ForEachNgram(u, params.n_min, params.n_max,
                 [&](std::u32string_view g) { ++local[std::u32string(g)]; });
  }
  std::vector<NgramStat> out;
  for (const auto& [g, f_s] : local) {
    if (f_s < 2) continue;
    const size_t f_a = global.Count(std::u32string_view(g));
    if (f_a > params.max_fa) continue;
    out.push_back({text::ToUtf8(g), f_s, f_a});
  }
  std::sort(out.begin(), out.end(), ByNgram);
  return out;
}

FilterStages RunFilter(const std::vector<NgramStat>& candidates,
                       std::string_view english_ne) {
  FilterStages st;
  // Maximizing f_s == minimizing its negation; keep the key unsigned-safe.
  st.highest_fs = KeepBest(candidates, [](const NgramStat& s) {
    return std::numeric_limits<size_t>::max() - s.f_s;
  });
  st.closest_counts =
      KeepBest(st.highest_fs, [](const NgramStat& s) { return AbsDiff(s.f_a, s.f_s); });
  const size_t w_len = text::Length(english_ne);
  st.closest_length = KeepBest(st.closest_counts, [w_len](const NgramStat& s) {
    return AbsDiff(text::Length(s.ngram), w_len);
  });
  std::sort(st.highest_fs.begin(), st.highest_fs.end(), ByNgram);
  std::sort(st.closest_counts.begin(), st.closest_counts.end(), ByNgram);
  std::sort(st.closest_length.begin(), st.closest_length.end(), ByNgram);
  return st;
}

std::vector<std::string> Filter(const std::vector<NgramStat>& candidates,
                                std::string_view english_ne) {
  std::vector<std::string> out;
  for (auto& s : RunFilter(candidates, english_ne).closest_length) {
    out.push_back(std::move(s.ngram));
  }
  return out;
}

const char* SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kAbsent: return "Absent";
    case SkipReason::kFrequencyOne: return "FrequencyOne";
    case SkipReason::kNoCandidates: return "NoCandidates";
    case SkipReason::kBelowMinScore: return "BelowMinScore";
  }
  return "Unknown";
}

BootstrapResult Bootstrap(const ParallelCorpus& corpus,
                          const std::vector<EnglishNe>& nes,
                          const GlobalNgramCounts& global,
                          const ClcbParams& params) {
  if (global.n_min() != params.n_min || global.n_max() != params.n_max) {
    throw Error(ErrorCode::kInvalidArgument, "global counts built with different ngram bounds");
  }
  BootstrapResult result;
  for (const EnglishNe& ne : nes) {
    if (ne.surface.empty()) continue;
    const ParallelSubcorpus sub = ExtractSubcorpus(corpus, ne);
    if (sub.empty()) {
      result.skipped.push_back({ne.surface, SkipReason::kAbsent});
      continue;
    }
    if (sub.size() == 1) {
      result.skipped.push_back({ne.surface, SkipReason::kFrequencyOne});
      continue;
    }
    const auto g_t = GetNgrams(sub.target_verses, global, params);
    const auto survivors = RunFilter(g_t, ne.surface).closest_length;
    if (survivors.empty()) {
      result.skipped.push_back({ne.surface, SkipReason::kNoCandidates});
      continue;
    }
    for (const NgramStat& s : survivors) {
      result.pairs.push_back(
          {{s.ngram, ne.surface, PairSource::kBootstrapped}, s.f_s, s.f_a});
    }
  }
  return result;
}

BootstrapResult Bootstrap(const ParallelCorpus& corpus,
                          const std::vector<EnglishNe>& nes,
                          const ClcbParams& params) {
  const GlobalNgramCounts global(corpus.target(), params.n_min, params.n_max);
  return Bootstrap(corpus, nes, global, params);
}

std::string FormatPairs(const BootstrapResult& result, std::string_view header) {
  std::string out(header);
  for (const auto& p : result.pairs) {
    out += p.pair.english;
    out += '\t';
    out += p.pair.target;
    out += '\t';
    out += std::to_string(p.f_s);
    out += '\t';
    out += std::to_string(p.f_a);
    out += '\n';
  }
  return out;
}

std::string FormatSkipped(const std::vector<SkippedNe>& skipped,
                          std::string_view header) {
  std::string out(header);
  for (const auto& s : skipped) {
    out += s.english;
    out += '\t';
    out += SkipReasonName(s.reason);
    out += '\n';
  }
  return out;
}

std::vector<BootstrappedPair> ParsePairs(std::string_view tsv) {
  std::vector<BootstrappedPair> pairs;
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
                  "expected english<TAB>target<TAB>f_s<TAB>f_a: " + std::string(line));
    }
    pairs.push_back({{std::string(f[1]), std::string(f[0]), PairSource::kBootstrapped},
                     ParseCount(f[2], line),
                     ParseCount(f[3], line)});
  }
  return pairs;
}

}  // namespace clcbn
