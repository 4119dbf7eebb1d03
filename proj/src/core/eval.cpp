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

#include "clcbn/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>

#include "clcbn/error.hpp"
#include "clcbn/io.hpp"
#include "clcbn/random.hpp"
#include "clcbn/text.hpp"

namespace clcbn::eval {

namespace {

// Data lines of a TSV blob, split on tabs.
std::vector<std::vector<std::string>> TsvRows(std::string_view tsv) {
  std::vector<std::vector<std::string>> rows;
  size_t start = 0;
  while (start < tsv.size()) {
    size_t end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (!io::IsDataLine(line)) continue;
    std::vector<std::string> row;
    for (auto f : io::SplitTabs(line)) row.emplace_back(f);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

double JaroSimilarity(std::string_view a_utf8, std::string_view b_utf8) {
  const std::u32string a = text::ToU32(a_utf8);
  const std::u32string b = text::ToU32(b_utf8);
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const size_t window = std::max(a.size(), b.size()) / 2;
  const size_t reach = window > 0 ? window - 1 : 0;
  std::vector<bool> a_match(a.size(), false), b_match(b.size(), false);
  size_t matches = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const size_t lo = i > reach ? i - reach : 0;
    const size_t hi = std::min(b.size(), i + reach + 1);
    for (size_t j = lo; j < hi; ++j) {
      if (b_match[j] || a[i] != b[j]) continue;
      a_match[i] = b_match[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  size_t half_transpositions = 0;
  size_t k = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a_match[i]) continue;
    while (!b_match[k]) ++k;
    if (a[i] != b[k]) ++half_transpositions;
    ++k;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  return (m / a.size() + m / b.size() + (m - t) / m) / 3.0;
}

double JaroDistance(std::string_view a, std::string_view b) {
  return 1.0 - JaroSimilarity(a, b);
}

SilverLexicon ParseSilver(std::string_view tsv) {
  SilverLexicon silver;
  for (const auto& row : TsvRows(tsv)) {
    if (row.size() < 2 || row[0].empty() || row[1].empty()) {
      throw Error(ErrorCode::kMalformedLine, "expected english<TAB>target in silver lexicon");
    }
    silver[text::Normalize(row[0])] = text::Normalize(row[1]);
  }
  return silver;
}

std::string StripMarks(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "ICU NFD unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString decomposed = nfd->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "NFD normalization failed");
  std::string out8;
  decomposed.toUTF8String(out8);
  std::u32string kept;
  for (char32_t c : text::ToU32(out8)) {
    if (u_charType(static_cast<UChar32>(c)) != U_NON_SPACING_MARK) kept.push_back(c);
  }
  return text::Nfc(text::ToUtf8(kept));
}

EvalReport SilverEval(const std::vector<NePair>& pairs, const SilverLexicon& silver,
                      double threshold, const Normalizer& extra) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in (0, 1]");
  }
  auto norm = [&](std::string_view s) {
    std::string n = text::Normalize(s);
    return extra ? extra(n) : n;
  };
  EvalReport report;
  for (const NePair& p : pairs) {
    auto it = silver.find(text::Normalize(p.english));
    if (it == silver.end()) continue;
    Judgment j;
    j.english = p.english;
    j.predicted = p.target;
    j.reference = it->second;
    j.distance = JaroDistance(norm(p.target), norm(it->second));
    j.correct = j.distance <= threshold;
    report.correct += j.correct;
    report.per_pair.push_back(std::move(j));
  }
  report.total = report.per_pair.size();
  if (report.total == 0) {
    throw Error(ErrorCode::kEmptyInput, "no mined NE has a silver entry");
  }
  report.precision = static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

AnnotationSet ParseAnnotations(std::string_view tsv) {
  struct Draft {
    std::set<std::string> options;
    std::map<std::string, std::set<std::string>> by_annotator;
  };
  std::map<std::string, Draft> drafts;
  for (const auto& row : TsvRows(tsv)) {
    if (row.size() != 3 || row[0].empty() || row[1].empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected question_id<TAB>annotator_id<TAB>chosen_option");
    }
    Draft& d = drafts[text::Normalize(row[0])];
    const std::string option = row[2].empty() ? std::string() : text::Normalize(row[2]);
    if (!option.empty()) d.options.insert(option);
    if (row[1] == "*") continue;
    auto& chosen = d.by_annotator[row[1]];
    if (!option.empty()) chosen.insert(option);
  }
  AnnotationSet set;
  for (auto& [english, d] : drafts) {
    AnnotationQuestion q;
    q.english = english;
    q.options.assign(d.options.begin(), d.options.end());
    for (auto& [annotator, chosen] : d.by_annotator) {
      q.annotators.push_back(annotator);
      q.choices.push_back(std::move(chosen));
    }
    set.questions.push_back(std::move(q));
  }
  return set;
}

namespace {

void RequireThreeAnnotators(const AnnotationQuestion& q) {
  if (q.annotators.size() != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "question '" + q.english + "' has " + std::to_string(q.annotators.size()) +
                    " annotators; exactly 3 are required");
  }
}

}  // namespace

GoldSet MajorityVote(const AnnotationSet& annotations) {
  GoldSet gold;
  for (const AnnotationQuestion& q : annotations.questions) {
    RequireThreeAnnotators(q);
    for (const std::string& option : q.options) {
      int votes = 0;
      for (const auto& chosen : q.choices) votes += chosen.count(option) ? 1 : 0;
      if (votes >= 2) gold.emplace(q.english, option);
    }
  }
  return gold;
}

double CohensKappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "judgment lengths differ");
  if (a.empty()) throw Error(ErrorCode::kInvalidArgument, "no judgments");
  const auto n = static_cast<long long>(a.size());
  long long agree = 0, a1 = 0, b1 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a1 += a[i];
    b1 += b[i];
  }
  const long long chance_num = a1 * b1 + (n - a1) * (n - b1);
  if (chance_num == n * n) return agree == n ? 1.0 : 0.0;
  const double p_o = static_cast<double>(agree) / static_cast<double>(n);
  const double p_e = static_cast<double>(chance_num) / static_cast<double>(n * n);
  return (p_o - p_e) / (1.0 - p_e);
}

double MeanPairwiseKappa(const AnnotationSet& annotations) {
  std::vector<bool> slots[3];
  for (const AnnotationQuestion& q : annotations.questions) {
    RequireThreeAnnotators(q);
    for (const std::string& option : q.options) {
      for (int s = 0; s < 3; ++s) slots[s].push_back(q.choices[s].count(option) > 0);
    }
  }
  return (CohensKappa(slots[0], slots[1]) + CohensKappa(slots[0], slots[2]) +
          CohensKappa(slots[1], slots[2])) /
         3.0;
}

EvalReport GoldEval(const std::vector<NePair>& pairs, const AnnotationSet& annotations) {
  const GoldSet gold = MajorityVote(annotations);
  std::map<std::string, std::string> first_gold;
  std::set<std::string> asked;
  for (const auto& q : annotations.questions) asked.insert(q.english);
  for (const auto& [english, target] : gold) first_gold.emplace(english, target);
  EvalReport report;
  for (const NePair& p : pairs) {
    const std::string english = text::Normalize(p.english);
    if (!asked.count(english)) continue;
    const std::string predicted = text::Normalize(p.target);
    Judgment j;
    j.english = p.english;
    j.predicted = p.target;
    j.correct = gold.count({english, predicted}) > 0;
    auto it = first_gold.find(english);
    j.reference = j.correct ? predicted : (it == first_gold.end() ? "" : it->second);
    j.distance = JaroDistance(predicted, j.reference);
    report.correct += j.correct;
    report.per_pair.push_back(std::move(j));
  }
  report.total = report.per_pair.size();
  if (report.total == 0) throw Error(ErrorCode::kEmptyInput, "no mined NE has a gold question");
  report.precision = static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

std::string FormatReport(const EvalReport& report, std::string_view header) {
  std::string out(header);
  out += "#english\tpredicted\treference\tdistance\tverdict\n";
  for (const Judgment& j : report.per_pair) {
    out += j.english + '\t' + j.predicted + '\t' + j.reference + '\t' +
           io::FormatFixed(j.distance, 4) + '\t' + (j.correct ? "correct" : "incorrect") + '\n';
  }
  return out;
}

std::string FormatSummary(const EvalReport& report) {
  return "pairs evaluated: " + std::to_string(report.total) + "\n" +
         "correct:         " + std::to_string(report.correct) + "\n" +
         "precision:       " + io::FormatFixed(report.precision, 4) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic corpora

namespace {

constexpr const char* kEnglishFiller[] = {
    "the",   "and",  "of",    "to",    "in",    "he",     "that",  "his",   "unto",
    "said",  "was",  "for",   "with",  "they",  "him",    "not",   "them",  "is",
    "be",    "all",  "thou",  "lord",  "shall", "which",  "from",  "my",    "their",
    "as",    "but",  "have",  "this",  "you",   "were",   "there", "by",    "when",
    "out",   "then", "upon",  "up",    "me",    "people", "came",  "went",  "into",
    "house", "son",  "god",   "king",  "day",   "land",   "hand",  "men",   "children"};

constexpr std::u32string_view kTargetAlphabet =
    U"абвгдежзийклмнопрстуфхцчшщъыьэюя";

std::map<char32_t, std::string> DefaultSubstitution() {
  return {{U'a', "а"}, {U'b', "б"}, {U'c', "ц"},  {U'd', "д"}, {U'e', "е"},
          {U'f', "ф"}, {U'g', "г"}, {U'h', "х"},  {U'i', "и"}, {U'j', "й"},
          {U'k', "к"}, {U'l', "л"}, {U'm', "м"},  {U'n', "н"}, {U'o', "о"},
          {U'p', "п"}, {U'q', "ку"}, {U'r', "р"}, {U's', "с"}, {U't', "т"},
          {U'u', "у"}, {U'v', "в"}, {U'w', "ў"},  {U'x', "кс"}, {U'y', "ы"},
          {U'z', "з"}};
}

size_t ParseSize(const std::string& key, const std::string& value) {
  size_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kInvalidArgument, "synth spec: bad integer for " + key + ": " + value);
  }
  return v;
}

std::string Transliterate(const std::string& name, const std::map<char32_t, std::string>& map) {
  std::string out;
  for (char32_t c : text::ToU32(name)) out += map.at(c);
  return out;
}

}  // namespace

SynthSpec SynthSpec::Default() {
  SynthSpec s;
  s.substitution = DefaultSubstitution();
  return s;
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, "synth spec: " + m); };
  if (num_nes + singletons == 0) fail("no NEs to plant");
  if (min_frequency < 1 || min_frequency > max_frequency) fail("need 1 <= min_frequency <= max_frequency");
  if (max_frequency > verses) fail("max_frequency exceeds verse count");
  if (verses == 0) fail("verses must be positive");
  if (filler_vocab < 2) fail("filler_vocab must be at least 2");
  if (words_per_verse == 0) fail("words_per_verse must be positive");
  std::set<std::string> images;
  for (const auto& [c, s] : substitution) {
    if (s.empty()) fail("empty substitution for a letter");
    if (!images.insert(s).second) {
      throw Error(ErrorCode::kNotInjective, "synth spec: substitution map is not injective (" + s +
                                                " is the image of two letters)");
    }
  }
}

SynthSpec ParseSynthSpec(std::string_view spec_text) {
  SynthSpec spec = SynthSpec::Default();
  size_t start = 0;
  while (start < spec_text.size()) {
    size_t end = spec_text.find('\n', start);
    if (end == std::string_view::npos) end = spec_text.size();
    std::string line = text::Trim(spec_text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "synth spec: expected key=value: " + line);
    }
    const std::string key = text::Trim(line.substr(0, eq));
    const std::string value = text::Trim(line.substr(eq + 1));
    if (key == "seed") spec.seed = ParseSize(key, value);
    else if (key == "verses") spec.verses = ParseSize(key, value);
    else if (key == "nes") spec.num_nes = ParseSize(key, value);
    else if (key == "min_freq") spec.min_frequency = ParseSize(key, value);
    else if (key == "max_freq") spec.max_frequency = ParseSize(key, value);
    else if (key == "singletons") spec.singletons = ParseSize(key, value);
    else if (key == "filler_vocab") spec.filler_vocab = ParseSize(key, value);
    else if (key == "words_per_verse") spec.words_per_verse = ParseSize(key, value);
    else if (key == "aug_nes") spec.augmentation_nes = ParseSize(key, value);
    else if (key == "unsegmented") {
      if (value != "true" && value != "false") {
        throw Error(ErrorCode::kInvalidArgument, "synth spec: unsegmented must be true or false");
      }
      spec.unsegmented = value == "true";
    } else if (key == "map") {
      size_t p = 0;
      while (p <= value.size()) {
        size_t comma = value.find(',', p);
        if (comma == std::string::npos) comma = value.size();
        const std::string entry = value.substr(p, comma - p);
        p = comma + 1;
        if (entry.empty()) continue;
        const size_t colon = entry.find(':');
        const std::u32string letter =
            colon == std::string::npos ? U"" : text::ToU32(entry.substr(0, colon));
        if (letter.size() != 1) {
          throw Error(ErrorCode::kInvalidArgument, "synth spec: bad map entry " + entry);
        }
        spec.substitution[letter[0]] = text::Nfc(entry.substr(colon + 1));
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, "synth spec: unknown key " + key);
    }
  }
  spec.Validate();
  return spec;
}

SynthCorpus Synthesize(const SynthSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  auto pick = [&rng](size_t n) { return static_cast<size_t>(random::UniformIndex(rng, n)); };

  std::u32string consonants, vowels;
  for (char32_t c : std::u32string_view(U"bcdfghjklmnprstvwxz")) {
    if (spec.substitution.count(c)) consonants.push_back(c);
  }
  for (char32_t c : std::u32string_view(U"aeiou")) {
    if (spec.substitution.count(c)) vowels.push_back(c);
  }
  if (consonants.empty() || vowels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "synth spec: map must cover some consonants and vowels");
  }
  std::unordered_set<std::string> reserved(std::begin(kEnglishFiller), std::end(kEnglishFiller));
  std::set<std::string> images;
  auto make_name = [&]() {
    while (true) {
      std::u32string name;
      const size_t syllables = 2 + pick(3);
      for (size_t s = 0; s < syllables; ++s) {
        name.push_back(consonants[pick(consonants.size())]);
        name.push_back(vowels[pick(vowels.size())]);
      }
      if (pick(2)) name.push_back(consonants[pick(consonants.size())]);
      std::string utf8 = text::ToUtf8(name);
      if (name.size() < 5 || reserved.count(utf8)) continue;
      std::string image = Transliterate(utf8, spec.substitution);
      if (images.count(image)) continue;
      reserved.insert(utf8);
      images.insert(image);
      return utf8;
    }
  };

  SynthCorpus out;
  out.english = Edition("eng");
  out.target = Edition("tgt");
  const size_t total_nes = spec.num_nes + spec.singletons;
  std::vector<size_t> freq(total_nes);
  for (size_t i = 0; i < total_nes; ++i) {
    const std::string name = make_name();
    out.ne_list.push_back(name);
    out.gold[name] = Transliterate(name, spec.substitution);
    const size_t span = spec.max_frequency - spec.min_frequency + 1;
    freq[i] = i < spec.num_nes ? spec.min_frequency + i % span : 1;
    out.frequency[name] = freq[i];
  }
  for (size_t i = 0; i < spec.augmentation_nes; ++i) out.augmentation_nes.push_back(make_name());

  std::vector<std::string> target_filler;
  std::set<std::string> filler_seen;
  while (target_filler.size() < spec.filler_vocab) {
    std::u32string w;
    const size_t len = 2 + pick(6);
    for (size_t k = 0; k < len; ++k) w.push_back(kTargetAlphabet[pick(kTargetAlphabet.size())]);
    std::string utf8 = text::ToUtf8(w);
    bool clash = images.count(utf8) > 0;
    for (const auto& img : images) clash = clash || utf8.find(img) != std::string::npos;
    if (!clash && filler_seen.insert(utf8).second) target_filler.push_back(std::move(utf8));
  }

  std::vector<std::vector<size_t>> planted(spec.verses);
  std::vector<size_t> verse_idx(spec.verses);
  for (size_t i = 0; i < total_nes; ++i) {
    std::iota(verse_idx.begin(), verse_idx.end(), size_t{0});
    for (size_t k = 0; k < freq[i]; ++k) {
      std::swap(verse_idx[k], verse_idx[k + pick(spec.verses - k)]);
      planted[verse_idx[k]].push_back(i);
    }
  }

  constexpr size_t kEnglishFillerSize = std::size(kEnglishFiller);
  for (size_t v = 0; v < spec.verses; ++v) {
    std::vector<std::string> en, tg;
    for (size_t k = 0; k < spec.words_per_verse; ++k) {
      en.emplace_back(kEnglishFiller[pick(kEnglishFillerSize)]);
      tg.push_back(target_filler[pick(target_filler.size())]);
    }
    for (size_t i : planted[v]) {
      en.insert(en.begin() + static_cast<std::ptrdiff_t>(pick(en.size() + 1)), out.ne_list[i]);
      tg.insert(tg.begin() + static_cast<std::ptrdiff_t>(pick(tg.size() + 1)),
                out.gold[out.ne_list[i]]);
    }
    std::string en_text, tg_text;
    for (const auto& w : en) en_text += (en_text.empty() ? "" : " ") + w;
    for (const auto& w : tg) tg_text += (tg_text.empty() || spec.unsegmented ? "" : " ") + w;
    const std::string id = std::to_string(40001001 + (v / 50) * 1000 + v % 50);
    out.english.Add(id, en_text);
    out.target.Add(id, tg_text);
  }
  return out;
}

void WriteSynthCorpus(const SynthCorpus& corpus, const std::filesystem::path& dir,
                      std::string_view header) {
  std::filesystem::create_directories(dir);
  auto edition_text = [&](const Edition& e) {
    std::string s(header);
    for (const Verse& v : e.verses()) s += v.id + '\t' + v.text + '\n';
    return s;
  };
  io::WriteFile(dir / "english.txt", edition_text(corpus.english));
  io::WriteFile(dir / "target.txt", edition_text(corpus.target));
  std::string nes(header), aug(header), gold(header);
  for (const auto& n : corpus.ne_list) nes += n + '\n';
  for (const auto& n : corpus.augmentation_nes) aug += n + '\n';
  for (const auto& [e, t] : corpus.gold) gold += e + '\t' + t + '\n';
  io::WriteFile(dir / "ne_list.txt", nes);
  io::WriteFile(dir / "aug_list.txt", aug);
  io::WriteFile(dir / "gold.tsv", gold);
}

}  // namespace clcbn::eval
