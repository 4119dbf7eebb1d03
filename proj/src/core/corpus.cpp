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

#include "clcbn/corpus.hpp"

#include <algorithm>
#include <unordered_set>

#include "clcbn/error.hpp"
#include "clcbn/io.hpp"
#include "clcbn/text.hpp"

namespace clcbn {

bool Edition::Add(std::string id, std::string_view raw_text) {
  if (index_.count(id)) {
    throw Error(ErrorCode::kDuplicateVerseId, "duplicate verse id " + id);
  }
  std::string text = text::Nfc(text::Trim(raw_text));
  if (text.empty()) return false;
  index_.emplace(id, verses_.size());
  verses_.push_back({std::move(id), std::move(text)});
  return true;
}

const std::string* Edition::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &verses_[it->second].text;
}

Edition LoadEdition(const std::filesystem::path& path, std::string language_tag) {
  Edition edition(std::move(language_tag));
  const auto lines = io::ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (!io::IsDataLine(line)) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorCode::kMalformedLine,
                  path.string() + ":" + std::to_string(i + 1) +
                      ": expected verse_id<TAB>text");
    }
    edition.Add(line.substr(0, tab), std::string_view(line).substr(tab + 1));
  }
  return edition;
}

ParallelCorpus::ParallelCorpus(Edition english, Edition target)
    : english_(std::move(english)), target_(std::move(target)) {
  for (const Verse& v : english_.verses()) {
    const std::string* t = target_.Find(v.id);
    if (t == nullptr) continue;
    const auto pos = static_cast<uint32_t>(shared_ids_.size());
    shared_ids_.push_back(v.id);
    english_text_.push_back(v.text);
    target_text_.push_back(*t);
    for (std::string& tok : text::Tokenize(v.text)) {
      auto& occ = english_index_[std::move(tok)];
      if (occ.empty() || occ.back() != pos) occ.push_back(pos);
    }
  }
}

const std::vector<uint32_t>& ParallelCorpus::Occurrences(
    const std::string& token) const {
  static const std::vector<uint32_t> kNone;
  auto it = english_index_.find(token);
  return it == english_index_.end() ? kNone : it->second;
}

ParallelCorpus Align(Edition english, Edition target) {
  return ParallelCorpus(std::move(english), std::move(target));
}

ParallelSubcorpus ExtractSubcorpus(const ParallelCorpus& corpus,
                                   const EnglishNe& ne) {
  if (ne.surface.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty NE surface");
  }
  ParallelSubcorpus sub;
  for (uint32_t pos : corpus.Occurrences(ne.surface)) {
    sub.verse_ids.push_back(corpus.shared_ids()[pos]);
    sub.english_verses.push_back(corpus.english_text()[pos]);
    sub.target_verses.push_back(corpus.target_text()[pos]);
  }
  return sub;
}

std::unordered_map<std::string, size_t> VerseTokenFrequencies(
    const Edition& edition) {
  std::unordered_map<std::string, size_t> freq;
  for (const Verse& v : edition.verses()) {
    auto tokens = text::Tokenize(v.text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (std::string& tok : tokens) ++freq[std::move(tok)];
  }
  return freq;
}

NeList MakeNeList(const std::vector<std::string>& surfaces,
                  const Edition& edition) {
  const auto freq = VerseTokenFrequencies(edition);
  NeList list;
  std::unordered_set<std::string> seen;
  for (const std::string& raw : surfaces) {
    auto tokens = text::Tokenize(raw);
    if (tokens.empty()) continue;
    if (tokens.size() > 1) {
      list.rejected.push_back(text::Trim(raw));
      continue;
    }
    if (!seen.insert(tokens[0]).second) continue;
    EnglishNe ne;
    ne.surface = std::move(tokens[0]);
    auto it = freq.find(ne.surface);
    ne.frequency = it == freq.end() ? 0 : it->second;
    list.nes.push_back(std::move(ne));
  }
  return list;
}

NeList LoadNeList(const std::filesystem::path& path, const Edition& edition) {
  std::vector<std::string> surfaces;
  for (std::string& line : io::ReadLines(path)) {
    if (io::IsDataLine(line)) surfaces.push_back(std::move(line));
  }
  return MakeNeList(surfaces, edition);
}

}  // namespace clcbn
