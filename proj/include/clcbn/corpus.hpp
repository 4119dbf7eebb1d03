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

#ifndef CLCBN_CORPUS_HPP_
#define CLCBN_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clcbn {

struct Verse {
  std::string id;
  std::string text;  // NFC
};

// Verse-keyed text of one language, in file order. Immutable once loaded.
class Edition {
 public:
  explicit Edition(std::string language_tag = {})
      : language_tag_(std::move(language_tag)) {}

  // Throws Error(kDuplicateVerseId). Text is NFC-normalized; text that is
  // empty after trimming is not stored and Add returns false.
  bool Add(std::string id, std::string_view text);

  const std::string& language_tag() const { return language_tag_; }
  const std::vector<Verse>& verses() const { return verses_; }
  size_t size() const { return verses_.size(); }
  bool empty() const { return verses_.empty(); }
  const std::string* Find(std::string_view id) const;

 private:
  std::string language_tag_;
  std::vector<Verse> verses_;
  std::unordered_map<std::string, size_t> index_;
};

// `verse_id<TAB>text` per line; `#` lines and blank lines ignored.
Edition LoadEdition(const std::filesystem::path& path, std::string language_tag);

class ParallelCorpus {
 public:
  ParallelCorpus(Edition english, Edition target);

  const Edition& english() const { return english_; }
  const Edition& target() const { return target_; }
  // Intersection of verse ids, in english-edition order.
  const std::vector<std::string>& shared_ids() const { return shared_ids_; }
  const std::vector<std::string>& english_text() const { return english_text_; }
  const std::vector<std::string>& target_text() const { return target_text_; }
  bool empty_intersection() const { return shared_ids_.empty(); }

  // Positions into shared_ids() whose English verse contains `token` as a
  // whole token. Ascending.
  const std::vector<uint32_t>& Occurrences(const std::string& token) const;

 private:
  Edition english_;
  Edition target_;
  std::vector<std::string> shared_ids_;
  std::vector<std::string> english_text_;
  std::vector<std::string> target_text_;
  std::unordered_map<std::string, std::vector<uint32_t>> english_index_;
};

ParallelCorpus Align(Edition english, Edition target);

struct ParallelSubcorpus {
  std::vector<std::string> english_verses;  // S_e
  std::vector<std::string> target_verses;   // S_t
  std::vector<std::string> verse_ids;

  size_t size() const { return verse_ids.size(); }
  bool empty() const { return verse_ids.empty(); }
};

struct EnglishNe {
  std::string surface;  // lowercase NFC, single token
  size_t frequency = 0; // verses of the edition containing it as a token
  bool absent() const { return frequency == 0; }
};

ParallelSubcorpus ExtractSubcorpus(const ParallelCorpus& corpus,
                                   const EnglishNe& ne);

struct NeList {
  std::vector<EnglishNe> nes;         // input order, deduplicated
  std::vector<std::string> rejected;  // multi-token lines
};

// Per-edition token -> number of verses containing it.
std::unordered_map<std::string, size_t> VerseTokenFrequencies(
    const Edition& edition);

NeList LoadNeList(const std::filesystem::path& path, const Edition& edition);
NeList MakeNeList(const std::vector<std::string>& surfaces,
                  const Edition& edition);

}  // namespace clcbn

#endif  // CLCBN_CORPUS_HPP_
