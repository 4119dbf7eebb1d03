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

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "temp_dir.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"clcbn"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = clcbn_cli::RunCli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

// Synthesizes a corpus under dir/corpus and writes a config file for it.
std::string Prepare(const testing::TempDir& dir, const std::string& spec = "seed=5\n") {
  const std::string spec_path = dir.Write("spec.txt", spec);
  const auto r = Run({"synth", "--spec", spec_path, "--out", dir / "corpus"});
  REQUIRE(r.code == clcbn_cli::kExitOk);
  return dir.Write("run.cfg", "# pipeline\n"
                              "english=" + (dir / "corpus/english.txt") + "\n" +
                              "target=" + (dir / "corpus/target.txt") + "\n" +
                              "ne_list=" + (dir / "corpus/ne_list.txt") + "\n" +
                              "aug_list=" + (dir / "corpus/aug_list.txt") + "\n" +
                              "epochs=3\nseed=9\n");
}

const char* const kOutputs[] = {"bootstrap_pairs.tsv", "bootstrap_skipped.tsv", "model.bin",
                                "loss.csv", "resource.tsv", "mine_skipped.tsv", "manifest.tsv"};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and unknown subcommand") {
    CHECK(Run({"--help"}).code == clcbn_cli::kExitOk);
    CHECK(Run({"frobnicate"}).code == clcbn_cli::kExitUsage);
    CHECK(Run({}).code == clcbn_cli::kExitUsage);
  }

  TEST_CASE("run writes every artifact with a header") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    const auto r = Run({"run", "--config", cfg, "--out", dir / "out"});
    REQUIRE_MESSAGE(r.code == clcbn_cli::kExitOk, r.err);
    CHECK(r.out.find("bootstrap: pairs=") != std::string::npos);
    CHECK(r.out.find("mine: pairs=") != std::string::npos);
    for (const char* name : kOutputs) {
      const std::string path = dir / ("out/" + std::string(name));
      REQUIRE_MESSAGE(fs::exists(path), name);
      if (std::string(name) == "model.bin") continue;
      const std::string text = testing::Slurp(path);
      CHECK_MESSAGE(text.rfind("# clcbn 1.0.0 seed=9 config=", 0) == 0, name);
    }
    const std::string pairs = testing::Slurp(dir / "out/bootstrap_pairs.tsv");
    CHECK(std::count(pairs.begin(), pairs.end(), '\n') > 10);
    const std::string manifest = testing::Slurp(dir / "out/manifest.tsv");
    CHECK(manifest.find("model.bin\t") != std::string::npos);
    CHECK(manifest.find("resource.tsv\t") != std::string::npos);
  }

  TEST_CASE("reruns are byte identical") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    REQUIRE(Run({"run", "--config", cfg, "--out", dir / "a"}).code == 0);
    REQUIRE(Run({"run", "--config", cfg, "--out", dir / "b"}).code == 0);
    for (const char* name : kOutputs) {
      CHECK_MESSAGE(testing::Slurp(dir / ("a/" + std::string(name))) ==
                        testing::Slurp(dir / ("b/" + std::string(name))),
                    name);
    }
  }

  TEST_CASE("staged commands match run") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    REQUIRE(Run({"run", "--config", cfg, "--out", dir / "whole"}).code == 0);
    const std::string staged = dir / "staged";
    REQUIRE(Run({"bootstrap", "--config", cfg, "--out", staged}).code == 0);
    CHECK_FALSE(fs::exists(staged + "/model.bin"));
    REQUIRE(Run({"train", "--config", cfg, "--out", staged}).code == 0);
    REQUIRE(Run({"mine", "--config", cfg, "--out", staged}).code == 0);
    CHECK(testing::Slurp(staged + "/manifest.tsv") == testing::Slurp(dir / "whole/manifest.tsv"));
  }

  TEST_CASE("flags override the config file") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    REQUIRE(Run({"bootstrap", "--config", cfg, "--seed", "4", "--out", dir / "o"}).code == 0);
    const std::string text = testing::Slurp(dir / "o/bootstrap_pairs.tsv");
    CHECK(text.rfind("# clcbn 1.0.0 seed=4 ", 0) == 0);
  }

  TEST_CASE("usage errors exit 2") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    auto r = Run({"bootstrap", "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);
    CHECK(r.err.find("english") != std::string::npos);

    r = Run({"bootstrap", "--config", cfg, "--english", dir / "missing.txt", "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);
    CHECK(r.err.find("missing.txt") != std::string::npos);

    r = Run({"train", "--config", cfg, "--epochs", "ten", "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);
    CHECK(r.err.find("epochs") != std::string::npos);

    const std::string bad_cfg = dir.Write("bad.cfg", "english=x\ncolour=blue\n");
    r = Run({"bootstrap", "--config", bad_cfg, "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);
    CHECK(r.err.find("colour") != std::string::npos);

    r = Run({"train", "--config", cfg, "--optimizer", "rmsprop", "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);

    r = Run({"mine", "--config", cfg, "--mode", "sideways", "--out", dir / "o"});
    CHECK(r.code == clcbn_cli::kExitUsage);
  }

  TEST_CASE("synth rejects a non-injective map") {
    testing::TempDir dir;
    const std::string spec = dir.Write("spec.txt", "map=a:x,e:x\n");
    const auto r = Run({"synth", "--spec", spec, "--out", dir / "c"});
    CHECK(r.code == clcbn_cli::kExitUsage);
  }

  TEST_CASE("corrupted intermediate files fail at runtime") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    const std::string out = dir / "o";
    REQUIRE(Run({"run", "--config", cfg, "--out", out}).code == 0);
    std::string model = testing::Slurp(out + "/model.bin");
    model.resize(model.size() / 2);
    dir.Write("o/model.bin", model);
    fs::remove(out + "/resource.tsv");
    auto r = Run({"mine", "--config", cfg, "--out", out});
    CHECK(r.code == clcbn_cli::kExitRuntime);
    CHECK(r.err.find("Truncated") != std::string::npos);
    CHECK_FALSE(fs::exists(out + "/resource.tsv"));

    dir.Write("o/bootstrap_pairs.tsv", "paul\n");
    r = Run({"train", "--config", cfg, "--out", out});
    CHECK(r.code == clcbn_cli::kExitRuntime);

    const std::string dup = dir.Write("dup.txt", "1\ta\n1\tb\n");
    r = Run({"run", "--config", cfg, "--target", dup, "--out", dir / "p"});
    CHECK(r.code == clcbn_cli::kExitRuntime);
    CHECK_FALSE(fs::exists(dir / "p/model.bin"));
  }

  TEST_CASE("eval against silver and annotations") {
    testing::TempDir dir;
    const std::string cfg = Prepare(dir);
    const std::string out = dir / "o";
    REQUIRE(Run({"run", "--config", cfg, "--out", out}).code == 0);

    auto r = Run({"eval", "--config", cfg, "--silver", dir / "corpus/gold.tsv", "--out", out});
    REQUIRE_MESSAGE(r.code == clcbn_cli::kExitOk, r.err);
    CHECK(r.out.find("precision") != std::string::npos);
    CHECK(testing::Slurp(out + "/eval_report.tsv").rfind("# clcbn 1.0.0 seed=9", 0) == 0);

    std::istringstream gold(testing::Slurp(dir / "corpus/gold.tsv"));
    std::string line, ann;
    int questions = 0;
    while (std::getline(gold, line) && questions < 3) {
      if (line.empty() || line[0] == '#') continue;
      const std::string en = line.substr(0, line.find('\t'));
      const std::string tg = line.substr(line.find('\t') + 1);
      ann += en + "\t*\twrong\n";
      ann += en + "\ta1\t" + tg + "\n" + en + "\ta2\t" + tg + "\n";
      ann += en + "\ta3\t" + (questions == 0 ? "" : tg) + "\n";
      ++questions;
    }
    REQUIRE(questions == 3);
    const std::string annotations = dir.Write("ann.tsv", ann);
    r = Run({"eval", "--config", cfg, "--annotations", annotations, "--out", out});
    REQUIRE_MESSAGE(r.code == clcbn_cli::kExitOk, r.err);
    CHECK(r.out.find("kappa") != std::string::npos);

    r = Run({"eval", "--config", cfg, "--out", out});
    CHECK(r.code == clcbn_cli::kExitUsage);
    r = Run({"eval", "--config", cfg, "--silver", annotations, "--annotations", annotations,
             "--out", out});
    CHECK(r.code == clcbn_cli::kExitUsage);
  }
}
