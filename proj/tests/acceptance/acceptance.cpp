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


// Prints one PASS or FAIL line per acceptance criterion and exits nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "clcbn/clcb.hpp"
#include "clcbn/corpus.hpp"
#include "clcbn/eval.hpp"
#include "clcbn/io.hpp"
#include "clcbn/miner.hpp"
#include "clcbn/translit.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
namespace tl = clcbn::translit;
using clcbn::PairSource;
using clcbn::TrainingPair;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// Runs the CLI in-process with stdout discarded. Throws on a nonzero exit.
void Cli(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"clcbn"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream sink, err;
  auto* old_out = std::cout.rdbuf(sink.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = clcbn_cli::RunCli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (code != 0) {
    throw std::runtime_error(owned[1] + " exited " + std::to_string(code) + ": " + err.str());
  }
}

// Synthesizes a corpus from `spec` and runs the full pipeline on it.
void SynthAndRun(const testing::TempDir& dir, const std::string& name, const std::string& spec,
                 const std::string& mode) {
  const std::string corpus = dir / (name + "_corpus");
  Cli({"synth", "--spec", dir.Write(name + "_spec.txt", spec), "--out", corpus});
  Cli({"run", "--english", corpus + "/english.txt", "--target", corpus + "/target.txt",
       "--ne-list", corpus + "/ne_list.txt", "--aug-list", corpus + "/aug_list.txt", "--mode",
       mode, "--out", dir / (name + "_out")});
}

// First two columns of a TSV file, skipping header and comment lines.
std::map<std::string, std::string> ReadPairs(const std::string& path) {
  return clcbn::eval::ParseSilver(clcbn::io::ReadFile(path));
}

Outcome EndToEnd() {
  testing::TempDir dir;
  const auto start = Clock::now();
  std::string detail;
  bool pass = true;
  for (int seed = 1; seed <= 3; ++seed) {
    for (const bool tokenized : {true, false}) {
      const std::string name = (tokenized ? "tok" : "untok") + std::to_string(seed);
      std::string spec = "seed=" + std::to_string(seed) + "\n";
      if (!tokenized) spec += "unsegmented=true\n";
      SynthAndRun(dir, name, spec, tokenized ? "tokenized" : "untokenized");
      const auto gold = ReadPairs(dir / (name + "_corpus/gold.tsv"));
      const auto mined = ReadPairs(dir / (name + "_out/resource.tsv"));
      size_t hits = 0;
      for (const auto& [en, tg] : gold) {
        const auto it = mined.find(en);
        hits += it != mined.end() && it->second == tg ? 1 : 0;
      }
      const double need = tokenized ? 0.9 : 0.8;
      pass = pass && gold.size() == 20 && hits >= need * gold.size();
      detail += name + "=" + std::to_string(hits) + "/" + std::to_string(gold.size()) + " ";
    }
  }
  const double secs = Seconds(start);
  pass = pass && secs < 300.0;
  return {pass, detail + "time=" + Fixed(secs, 1) + "s"};
}

Outcome FrequencyOne() {
  testing::TempDir dir;
  SynthAndRun(dir, "single", "seed=7\nsingletons=3\n", "tokenized");
  const auto english = clcbn::LoadEdition(dir / "single_corpus/english.txt", "eng");
  const auto freq = clcbn::VerseTokenFrequencies(english);
  const auto gold = ReadPairs(dir / "single_corpus/gold.tsv");
  const auto pairs = ReadPairs(dir / "single_out/bootstrap_pairs.tsv");
  const auto mined = ReadPairs(dir / "single_out/resource.tsv");
  size_t singles = 0, bootstrapped = 0, in_resource = 0;
  for (const auto& [en, tg] : gold) {
    const auto it = freq.find(en);
    if (it == freq.end() || it->second != 1) continue;
    ++singles;
    bootstrapped += pairs.count(en);
    in_resource += mined.count(en);
  }
  return {singles == 3 && bootstrapped == 0 && in_resource == singles,
          "singletons=" + std::to_string(singles) + " bootstrapped=" +
              std::to_string(bootstrapped) + " mined=" + std::to_string(in_resource)};
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(20260101);
  size_t mismatches = 0, lines = 0;
  for (int round = 0; round < 100; ++round) {
    const auto c = oracle::RandomClcbCase(rng, 200);
    clcbn::Edition en("eng"), tg("tgt");
    for (const auto& [id, t] : c.english) en.Add(id, t);
    for (const auto& [id, t] : c.target) tg.Add(id, t);
    const auto nes = clcbn::MakeNeList(c.ne_lines, en);
    const auto corpus = clcbn::Align(std::move(en), std::move(tg));
    const auto result = clcbn::Bootstrap(corpus, nes.nes, {c.n_min, c.n_max, c.max_fa});
    const std::string pairs = clcbn::FormatPairs(result, "");
    const std::string skipped = clcbn::FormatSkipped(result.skipped, "");
    const auto naive = oracle::NaiveBootstrap(c);
    mismatches += pairs != naive.pairs || skipped != naive.skipped ? 1 : 0;
    lines += static_cast<size_t>(std::count(pairs.begin(), pairs.end(), '\n') +
                                 std::count(skipped.begin(), skipped.end(), '\n'));
  }
  return {mismatches == 0, "corpora=100 mismatches=" + std::to_string(mismatches) +
                               " lines_compared=" + std::to_string(lines)};
}

std::string RandomWord(std::mt19937_64& rng, const std::string& alphabet, size_t min_len,
                       size_t max_len) {
  std::string s(min_len + rng() % (max_len - min_len + 1), ' ');
  for (char& ch : s) ch = alphabet[rng() % alphabet.size()];
  return s;
}

Outcome Gradients() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int round = 0; round < 20; ++round) {
    const std::string in_alpha = std::string("abcd").substr(0, 1 + rng() % 4);
    const std::string out_alpha = std::string("wxyz").substr(0, 1 + rng() % 4);
    tl::TranslitConfig c;
    c.embedding_dim = 1 + static_cast<int>(rng() % 4);
    c.encoder_hidden_per_direction = 1 + static_cast<int>(rng() % 2);
    c.decoder_hidden = 2 * c.encoder_hidden_per_direction;
    auto [in, out] = tl::BuildVocabs({{in_alpha, out_alpha, PairSource::kBootstrapped}});
    tl::TranslitModel m(in, out, c);
    m.InitializeUniform(rng(), 0.5);
    const std::string target = round % 5 == 0 ? "" : RandomWord(rng, in_alpha, 1, 6);
    const TrainingPair pair{target, RandomWord(rng, out_alpha, 1, 5),
                            target.empty() ? PairSource::kAugmented : PairSource::kBootstrapped};
    tl::GradientCheckOptions opts;
    opts.sample = m.ParameterCount();
    opts.seed = static_cast<uint64_t>(round);
    worst = std::max(worst, tl::GradientCheck(m, pair, opts));
  }

  tl::TranslitConfig c;
  c.embedding_dim = 3;
  c.encoder_hidden_per_direction = 2;
  c.decoder_hidden = 4;
  auto [in, out] = tl::BuildVocabs({{"abcd", "wxyz", PairSource::kBootstrapped}});
  tl::TranslitModel m(in, out, c);
  m.InitializeUniform(1, 0.5);
  tl::GradientCheckOptions opts;
  opts.sample = m.ParameterCount();
  opts.fault = tl::GradientFault::kAttentionScores;
  const double faulty = tl::GradientCheck(m, {"abcd", "wxz", PairSource::kBootstrapped}, opts);
  return {worst < 1e-3 && faulty > 1e-3,
          "max_rel_error=" + Fixed(worst, 9) + " fault_fixture=" + Fixed(faulty, 4)};
}

Outcome Monotonicity() {
  std::mt19937_64 rng(55);
  size_t violations = 0, masked = 0;
  const std::string in_alpha = "abcdefgh", out_alpha = "stuvwxyz";
  for (int round = 0; round < 1000; ++round) {
    tl::TranslitConfig c;
    c.embedding_dim = 2 + static_cast<int>(rng() % 6);
    c.encoder_hidden_per_direction = 1 + static_cast<int>(rng() % 4);
    c.decoder_hidden = 2 * c.encoder_hidden_per_direction;
    auto [in, out] = tl::BuildVocabs({{in_alpha, out_alpha, PairSource::kBootstrapped}});
    tl::TranslitModel m(in, out, c);
    m.InitializeUniform(rng(), 0.2 + 0.2 * static_cast<double>(rng() % 15));
    const auto tr =
        m.Forward(RandomWord(rng, in_alpha, 0, 12), RandomWord(rng, out_alpha, 1, 12)).trace;
    for (size_t t = 0; t < tr.weights.size(); ++t) {
      if (tr.mask_start[t] != (t == 0 ? 0 : tr.argmax[t - 1])) ++violations;
      for (size_t s = 0; s < tr.mask_start[t]; ++s) {
        ++masked;
        if (tr.weights[t][s] != 0.0) ++violations;
      }
      if (t > 0 && tr.argmax[t] < tr.argmax[t - 1]) ++violations;
    }
  }
  return {violations == 0, "traces=1000 masked_entries=" + std::to_string(masked) +
                               " violations=" + std::to_string(violations)};
}

Outcome JaroAnchor() {
  const double anchor = clcbn::eval::JaroDistance("salome", "salom");
  std::mt19937_64 rng(6);
  const std::u32string pool = U"abcdefghijklmnopqrstuvwxyzабвгдеёжзийклмнопрстуфхцчшщъыьэюяαβγδεζηθ";
  size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::u32string a, b;
    for (size_t n = rng() % 12; n > 0; --n) a += pool[rng() % pool.size()];
    for (size_t n = rng() % 12; n > 0; --n) b += pool[rng() % pool.size()];
    const std::string ea = oracle::Encode(a), eb = oracle::Encode(b);
    if (clcbn::eval::JaroDistance(ea, ea) != 0.0) ++bad;
    if (clcbn::eval::JaroDistance(ea, eb) != clcbn::eval::JaroDistance(eb, ea)) ++bad;
  }
  return {std::abs(anchor - 0.0556) <= 1e-4 && bad == 0,
          "salome/salom=" + Fixed(anchor, 6) + " identity_and_symmetry_violations=" +
              std::to_string(bad)};
}

Outcome ParameterCount() {
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  const auto [in, out] = tl::BuildVocabs({{alphabet, alphabet, PairSource::kBootstrapped}});
  const tl::TranslitConfig c;
  const tl::TranslitModel m(in, out, c);
  size_t enumerated = 0;
  for (const auto& t : m.parameters().tensors()) enumerated += t.rows * t.cols;
  const size_t count = m.ParameterCount();
  const size_t formula = tl::TranslitModel::ParameterCountFormula(c, in.size(), out.size());
  const size_t independent =
      oracle::ParameterCount(in.size(), out.size(), static_cast<size_t>(c.embedding_dim),
                             static_cast<size_t>(c.encoder_hidden_per_direction),
                             static_cast<size_t>(c.decoder_hidden));
  return {count >= 12000 && count <= 48000 && count == enumerated && count == formula &&
              count == independent,
          "vocabs=" + std::to_string(in.size()) + "/" + std::to_string(out.size()) +
              " count=" + std::to_string(count) + " enumerated=" + std::to_string(enumerated) +
              " formula=" + std::to_string(formula)};
}

Outcome AugmentBalance() {
  std::mt19937_64 rng(8);
  size_t worst = 0;
  for (int round = 0; round < 300; ++round) {
    std::vector<TrainingPair> boot;
    for (size_t n = 1 + rng() % 150; n > 0; --n) {
      boot.push_back({"t" + std::to_string(n), "e" + std::to_string(n),
                      PairSource::kBootstrapped});
    }
    std::vector<std::string> nes;
    for (size_t n = 1 + rng() % 150; n > 0; --n) nes.push_back("n" + std::to_string(n));
    const auto mixed = tl::Augment(boot, nes, rng());
    size_t a = 0, b = 0;
    for (const auto& p : mixed) (p.source == PairSource::kAugmented ? a : b) += 1;
    worst = std::max(worst, a > b ? a - b : b - a);
  }
  return {worst <= 1, "trials=300 max_difference=" + std::to_string(worst)};
}

Outcome Determinism() {
  testing::TempDir dir;
  const std::string spec = dir.Write("spec.txt", "seed=11\n");
  Cli({"synth", "--spec", spec, "--out", dir / "corpus"});
  for (const std::string name : {"first", "second"}) {
    Cli({"run", "--english", dir / "corpus/english.txt", "--target", dir / "corpus/target.txt",
         "--ne-list", dir / "corpus/ne_list.txt", "--aug-list", dir / "corpus/aug_list.txt",
         "--seed", "17", "--out", dir / name});
  }
  const std::string a = clcbn::io::ReadFile(dir / "first/manifest.tsv");
  const std::string b = clcbn::io::ReadFile(dir / "second/manifest.tsv");
  const auto entries = std::count(a.begin(), a.end(), '\n') - 1;
  return {!a.empty() && a == b, "manifest_entries=" + std::to_string(entries) +
                                    (a == b ? " identical" : " differ")};
}

Outcome TrainingSmoke() {
  std::mt19937_64 rng(5);
  const std::string letters = "abcdefghiklmnoprstuvz";
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 50; ++i) {
    const std::string s = RandomWord(rng, letters, 4, 8);
    pairs.push_back({s, s, PairSource::kBootstrapped});
  }
  tl::TranslitConfig c;
  c.epochs = 50;
  const auto start = Clock::now();
  const auto m = tl::Train(pairs, {}, c);
  const double secs = Seconds(start);
  const auto& curve = m.loss_curve();
  const double ratio = curve.back() / curve.front();
  return {curve.size() == 50 && ratio < 0.2 && secs < 120.0,
          "first=" + Fixed(curve.front(), 4) + " last=" + Fixed(curve.back(), 4) +
              " ratio=" + Fixed(ratio, 4) + " time=" + Fixed(secs, 1) + "s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"synthetic end-to-end recovery", EndToEnd},
      {"frequency-1 handling", FrequencyOne},
      {"bootstrap equals naive reference", OracleEquivalence},
      {"gradient correctness", Gradients},
      {"monotonic attention", Monotonicity},
      {"jaro anchor", JaroAnchor},
      {"parameter count", ParameterCount},
      {"augmentation balance", AugmentBalance},
      {"determinism", Determinism},
      {"training smoke", TrainingSmoke},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
