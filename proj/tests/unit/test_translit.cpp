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


#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "clcbn/translit.hpp"
#include "error_code.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using clcbn::ErrorCode;
using clcbn::PairSource;
using clcbn::TrainingPair;
using testing::ErrorCodeOf;
namespace tl = clcbn::translit;

namespace {

std::vector<std::string> Reserved() { return {"<pad>", "<s>", "</s>", "<unk>"}; }

std::vector<TrainingPair> IdentityPairs(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::string letters = "abcdefghiklmnoprstuvz";
  std::vector<TrainingPair> pairs;
  for (size_t i = 0; i < n; ++i) {
    std::string s(4 + rng() % 5, 'a');
    for (char& c : s) c = letters[rng() % letters.size()];
    pairs.push_back({s, s, PairSource::kBootstrapped});
  }
  return pairs;
}

tl::TranslitModel TinyModel(uint64_t seed, int emb = 3, int h = 2) {
  tl::TranslitConfig c;
  c.embedding_dim = emb;
  c.encoder_hidden_per_direction = h;
  c.decoder_hidden = 2 * h;
  auto [in, out] = tl::BuildVocabs({{"abcd", "wxyz", PairSource::kBootstrapped}});
  tl::TranslitModel m(in, out, c);
  m.InitializeUniform(seed, 0.5);
  return m;
}

}  // namespace

TEST_SUITE("translit") {
  TEST_CASE("vocabs reserve the first four ids") {
    const auto [in, out] = tl::BuildVocabs({{"abc", "xy", PairSource::kBootstrapped}});
    auto expected_in = Reserved();
    expected_in.insert(expected_in.end(), {"a", "b", "c"});
    auto expected_out = Reserved();
    expected_out.insert(expected_out.end(), {"x", "y"});
    CHECK(in.symbols() == expected_in);
    CHECK(out.symbols() == expected_out);
    CHECK(in.Id(U'a') == 4);
    CHECK(in.Id(U'q') == tl::kUnk);
    CHECK(in.Encode("cz") == std::vector<int>{6, tl::kUnk});
  }

  TEST_CASE("augmented pairs only reach the output vocab") {
    const std::vector<TrainingPair> pairs = {{"ab", "ab", PairSource::kBootstrapped},
                                             {"", "mark", PairSource::kAugmented}};
    const auto [in, out] = tl::BuildVocabs(pairs);
    CHECK(in.size() == 6);
    CHECK(out.size() == 9);
    CHECK(tl::BuildVocabs(pairs) == tl::BuildVocabs(pairs));
    CHECK(tl::Vocab::FromSymbols(out.symbols()) == out);
  }

  TEST_CASE("augment balances the two sources") {
    auto count = [](const std::vector<TrainingPair>& v, PairSource s) {
      size_t n = 0;
      for (const auto& p : v) n += p.source == s ? 1 : 0;
      return n;
    };
    std::vector<TrainingPair> boot;
    for (int i = 0; i < 10; ++i) boot.push_back({"t" + std::to_string(i), "e", PairSource::kBootstrapped});
    std::vector<std::string> aug30, aug25;
    for (int i = 0; i < 30; ++i) aug30.push_back("n" + std::to_string(i));
    aug25.assign(aug30.begin(), aug30.begin() + 25);

    const auto a = tl::Augment(boot, aug30, 1);
    CHECK(count(a, PairSource::kAugmented) == 30);
    CHECK(count(a, PairSource::kBootstrapped) == 30);
    std::map<std::string, int> copies;
    for (const auto& p : a) {
      if (p.source == PairSource::kBootstrapped) ++copies[p.target];
      else CHECK(p.target.empty());
    }
    for (const auto& [t, n] : copies) CHECK(n == 3);

    const auto b = tl::Augment(boot, aug25, 1);
    CHECK(count(b, PairSource::kBootstrapped) == 25);
    copies.clear();
    for (const auto& p : b) {
      if (p.source == PairSource::kBootstrapped) ++copies[p.target];
    }
    int triples = 0;
    for (const auto& [t, n] : copies) {
      CHECK((n == 2 || n == 3));
      triples += n == 3;
    }
    CHECK(triples == 5);

    std::vector<std::string> aug10(aug30.begin(), aug30.begin() + 10);
    const auto c = tl::Augment(boot, aug10, 1);
    CHECK(c.size() == 20);
    CHECK(tl::Augment(boot, aug25, 1) == b);
    CHECK(tl::Augment(boot, aug25, 2) != b);
  }

  TEST_CASE("forward shapes and loss") {
    const auto m = TinyModel(1);
    const auto r = m.Forward("abcd", "wxy");
    CHECK(r.loss >= 0.0);
    CHECK(r.trace.weights.size() == 4);
    for (const auto& w : r.trace.weights) CHECK(w.size() == 5);
    CHECK(ErrorCodeOf([&] { m.Forward("ab", ""); }) == ErrorCode::kEmptyInput);
  }

  TEST_CASE("empty input attends the single eos position") {
    const auto m = TinyModel(2);
    CHECK(m.EncodeInput("") == std::vector<int>{tl::kEos});
    const auto r = m.Forward("", "wxyz");
    for (size_t t = 0; t < r.trace.weights.size(); ++t) {
      CHECK(r.trace.weights[t] == std::vector<double>{1.0});
      CHECK(r.trace.argmax[t] == 0);
    }
  }

  TEST_CASE("attention rows are normalized and masked exactly") {
    std::mt19937_64 rng(9);
    for (int round = 0; round < 50; ++round) {
      const auto m = TinyModel(round, 4, 2);
      std::string in(1 + rng() % 7, 'a'), out(1 + rng() % 6, 'w');
      for (char& c : in) c = "abcd"[rng() % 4];
      for (char& c : out) c = "wxyz"[rng() % 4];
      const auto tr = m.Forward(in, out).trace;
      for (size_t t = 0; t < tr.weights.size(); ++t) {
        double sum = 0;
        for (double w : tr.weights[t]) sum += w;
        CHECK(std::abs(sum - 1.0) < 1e-6);
        CHECK(tr.mask_start[t] == (t == 0 ? 0 : tr.argmax[t - 1]));
        for (size_t s = 0; s < tr.mask_start[t]; ++s) CHECK(tr.weights[t][s] == 0.0);
        if (t > 0) CHECK(tr.argmax[t] >= tr.argmax[t - 1]);
      }
    }
  }

  TEST_CASE("score is the negated mean loss") {
    const auto m = TinyModel(3);
    for (const std::string e : {"w", "wxyz", "zzq"}) {
      const double loss = m.Forward("abca", e).loss;
      const double expected = -loss / static_cast<double>(e.size() + 1);
      CHECK(m.Score("abca", e) == expected);
      CHECK(m.Score("abca", e) <= 0.0);
      CHECK(m.Score("abca", e) == m.Score("abca", e));
    }
    CHECK(m.Score("qqq", "wx") <= 0.0);  // unknown input characters map to UNK
  }

  TEST_CASE("an overfit model scores its training pair near zero") {
    tl::TranslitConfig c;
    c.epochs = 150;
    c.dropout = 0.0;
    const auto m = tl::Train({{"abc", "abc", PairSource::kBootstrapped}}, {}, c);
    CHECK(m.Score("abc", "abc") > -0.01);
    CHECK(m.Score("abc", "abc") <= 0.0);
  }

  TEST_CASE("parameter count matches formula and enumeration") {
    std::vector<TrainingPair> pairs;
    std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    pairs.push_back({alphabet, alphabet, PairSource::kBootstrapped});
    const auto [in, out] = tl::BuildVocabs(pairs);
    REQUIRE(in.size() == 30);
    tl::TranslitConfig c;
    const tl::TranslitModel m(in, out, c);
    size_t enumerated = 0;
    for (const auto& t : m.parameters().tensors()) enumerated += t.rows * t.cols;
    CHECK(m.ParameterCount() == enumerated);
    CHECK(m.ParameterCount() == tl::TranslitModel::ParameterCountFormula(c, 30, 30));
    CHECK(m.ParameterCount() == oracle::ParameterCount(30, 30, 32, 16, 32));
    CHECK(m.ParameterCount() >= 12000);
    CHECK(m.ParameterCount() <= 48000);
  }

  TEST_CASE("config validation") {
    tl::TranslitConfig c;
    c.decoder_hidden = 31;
    CHECK(ErrorCodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
    c = {};
    c.dropout = 1.0;
    CHECK(ErrorCodeOf([&] { c.Validate(); }) == ErrorCode::kInvalidArgument);
    c = {};
    CHECK_FALSE(ErrorCodeOf([&] { c.Validate(); }).has_value());
  }

  TEST_CASE("training is reproducible and reduces loss") {
    tl::TranslitConfig c;
    c.epochs = 8;
    const auto pairs = IdentityPairs(20, 4);
    const auto a = tl::Train(pairs, {"mark", "luke"}, c);
    const auto b = tl::Train(pairs, {"mark", "luke"}, c);
    REQUIRE(a.loss_curve().size() == 8);
    CHECK(a.loss_curve() == b.loss_curve());
    CHECK(a.loss_curve().back() < a.loss_curve().front());
    CHECK(a.parameters().AllFinite());
    c.seed = 2;
    CHECK(tl::Train(pairs, {"mark", "luke"}, c).loss_curve() != a.loss_curve());
  }

  TEST_CASE("training reports each epoch") {
    tl::TranslitConfig c;
    c.epochs = 3;
    std::vector<int> epochs;
    tl::TrainOptions opts;
    opts.on_epoch = [&](int e, double loss) {
      epochs.push_back(e);
      CHECK(std::isfinite(loss));
    };
    tl::Train(IdentityPairs(5, 1), {}, c, opts);
    CHECK(epochs == std::vector<int>{1, 2, 3});
  }

  TEST_CASE("training aborts on non-finite loss") {
    tl::TranslitConfig c;
    c.epochs = 30;
    c.learning_rate = 1e300;
    c.grad_clip_norm = 1e300;
    c.optimizer = tl::Optimizer::kSgd;
    CHECK(ErrorCodeOf([&] { tl::Train(IdentityPairs(10, 2), {}, c); }) ==
          ErrorCode::kNonFiniteLoss);
  }

  TEST_CASE("gradient check") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const auto m = TinyModel(seed);
      tl::GradientCheckOptions opts;
      opts.sample = m.ParameterCount();
      opts.seed = seed;
      CHECK(tl::GradientCheck(m, {"abcd", "wxz", PairSource::kBootstrapped}, opts) < 1e-3);
      CHECK(tl::GradientCheck(m, {"", "wxz", PairSource::kAugmented}, opts) < 1e-3);
      opts.fault = tl::GradientFault::kAttentionScores;
      CHECK(tl::GradientCheck(m, {"abcd", "wxz", PairSource::kBootstrapped}, opts) > 1e-1);
    }
    tl::GradientCheckOptions none;
    none.sample = 0;
    CHECK(tl::GradientCheck(TinyModel(1), {"ab", "wx", PairSource::kBootstrapped}, none) == 0.0);
  }

  TEST_CASE("model round trip is exact") {
    tl::TranslitConfig c;
    c.epochs = 2;
    const auto m = tl::Train(IdentityPairs(8, 3), {"anna"}, c);
    testing::TempDir dir;
    tl::SaveModel(m, dir / "m.bin");
    const auto back = tl::LoadModel(dir / "m.bin");
    CHECK(back.config() == m.config());
    CHECK(back.input_vocab() == m.input_vocab());
    CHECK(back.output_vocab() == m.output_vocab());
    CHECK(back.loss_curve() == m.loss_curve());
    const double a = m.Forward("abcde", "abcde").loss;
    const double b = back.Forward("abcde", "abcde").loss;
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    CHECK(tl::SerializeModel(back) == tl::SerializeModel(m));
  }

  TEST_CASE("model file errors") {
    const auto m = TinyModel(1);
    const std::string good = tl::SerializeModel(m);

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(bad_magic); }) == ErrorCode::kBadFormat);

    std::string old = good;
    const uint32_t v0 = 0;
    std::memcpy(old.data() + 8, &v0, sizeof v0);
    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(old); }) == ErrorCode::kUnsupportedVersion);

    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(good.substr(0, good.size() - 3)); }) ==
          ErrorCode::kTruncated);
    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(good.substr(0, 20)); }) == ErrorCode::kTruncated);

    std::string dims = good;
    const std::string& name = m.parameters()[0].name;
    const size_t at = dims.find(name) + name.size();
    uint32_t rows;
    std::memcpy(&rows, dims.data() + at, sizeof rows);
    ++rows;
    std::memcpy(dims.data() + at, &rows, sizeof rows);
    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(dims); }) == ErrorCode::kDimensionMismatch);

    CHECK(ErrorCodeOf([&] { tl::DeserializeModel(good + "x"); }) == ErrorCode::kBadFormat);
  }

  TEST_CASE("loss curve csv") {
    CHECK(tl::FormatLossCurve({2.5, 1.25}, "# h\n") ==
          "# h\nepoch,mean_loss\n1,2.5000000000\n2,1.2500000000\n");
  }
}
