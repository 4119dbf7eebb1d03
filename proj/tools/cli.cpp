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


#include "cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clcbn/clcbn.h"

namespace clcbn_cli {
namespace {

namespace fs = std::filesystem;

// Exits with kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed library call; `code` is the exit code.
struct StageError : std::runtime_error {
  StageError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

struct Key {
  const char* name;
  const char* help;
  bool hashed;  // part of the config hash in output headers
};

constexpr Key kKeys[] = {
    {"english", "English edition, verse_id<TAB>text per line", true},
    {"target", "target-language edition", true},
    {"ne_list", "English NE list, one per line", true},
    {"aug_list", "augmentation NE list (defaults to the NE list)", true},
    {"mode", "tokenized or untokenized", true},
    {"seed", "random seed", true},
    {"max_fa", "drop ngrams more frequent than this in the target edition", true},
    {"n_min", "shortest ngram in characters", true},
    {"n_max", "longest ngram in characters", true},
    {"epochs", "training epochs", true},
    {"batch_size", "minibatch size", true},
    {"lr", "learning rate", true},
    {"dropout", "dropout probability", true},
    {"embedding_dim", "character embedding size", true},
    {"encoder_hidden", "encoder hidden size per direction", true},
    {"decoder_hidden", "decoder hidden size", true},
    {"grad_clip", "global gradient norm clip", true},
    {"optimizer", "adam or sgd", true},
    {"init_range", "uniform initialization half-width", true},
    {"min_score", "drop mined pairs scoring below this", true},
    {"out", "output directory", false},
    {"pairs", "bootstrap pairs TSV (default <out>/bootstrap_pairs.tsv)", false},
    {"model", "model file (default <out>/model.bin)", false},
    {"resource", "mined resource TSV (default <out>/resource.tsv)", false},
    {"silver", "silver lexicon TSV, english<TAB>target", false},
    {"annotations", "annotation TSV, question_id<TAB>annotator_id<TAB>option", false},
    {"threshold", "Jaro distance threshold for silver evaluation", false},
};

const char* const kBootstrapPairs = "bootstrap_pairs.tsv";
const char* const kBootstrapSkipped = "bootstrap_skipped.tsv";
const char* const kModel = "model.bin";
const char* const kLoss = "loss.csv";
const char* const kResource = "resource.tsv";
const char* const kMineSkipped = "mine_skipped.tsv";
const char* const kEvalReport = "eval_report.tsv";
const char* const kManifest = "manifest.tsv";

const char* const kArtifacts[] = {kBootstrapPairs, kBootstrapSkipped, kModel,       kLoss,
                                  kResource,       kMineSkipped,      kEvalReport};

using Settings = std::map<std::string, std::string>;

struct Options {
  std::string english, target, ne_list, aug_list, out;
  std::string pairs, model, resource, silver, annotations, spec;
  clcbn_mode mode = CLCBN_MODE_TOKENIZED;
  uint64_t seed = 1;
  clcbn_clcb_params clcb{};
  clcbn_translit_params translit{};
  std::optional<double> min_score;
  double threshold = 0.3;
  std::string header;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using EditionHandle = Handle<clcbn_edition, clcbn_edition_free>;
using CorpusHandle = Handle<clcbn_corpus, clcbn_corpus_free>;
using NeListHandle = Handle<clcbn_ne_list, clcbn_ne_list_free>;
using BootstrapHandle = Handle<clcbn_bootstrap, clcbn_bootstrap_free>;
using ModelHandle = Handle<clcbn_model, clcbn_model_free>;
using MinedHandle = Handle<clcbn_mined, clcbn_mined_free>;

int StatusExit(clcbn_status s) {
  return s == CLCBN_E_INVALID_ARGUMENT || s == CLCBN_E_NOT_INJECTIVE ? kExitUsage : kExitRuntime;
}

void Check(clcbn_status s, const std::string& what) {
  if (s != CLCBN_OK) {
    throw StageError(StatusExit(s), what + ": " + clcbn_status_name(s) + ": " + clcbn_last_error());
  }
}

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Flat key=value file; `#` starts a comment line.
Settings ReadKeyValueFile(const std::string& path, const char* field) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string(field) + ": cannot read " + path);
  Settings out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    out[Trim(line.substr(0, eq))] = Trim(line.substr(eq + 1));
  }
  return out;
}

bool IsKnownKey(const std::string& key) {
  for (const Key& k : kKeys) {
    if (key == k.name) return true;
  }
  return false;
}

std::string FlagName(const std::string& key) {
  std::string flag = "--" + key;
  for (char& c : flag) {
    if (c == '_') c = '-';
  }
  return flag;
}

template <typename T>
T ParseInteger(const Settings& s, const std::string& key, T fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  T value{};
  const std::string& v = it->second;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError(key + ": expected an integer, got '" + v + "'");
  }
  return value;
}

double ParseReal(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  const std::string& v = it->second;
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno != 0 || !std::isfinite(value)) {
    throw UsageError(key + ": expected a number, got '" + v + "'");
  }
  return value;
}

std::string Get(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  return it == s.end() ? std::string() : it->second;
}

std::string FormatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Hash(const std::string& bytes) {
  char hex[65];
  Check(clcbn_digest_bytes(bytes.data(), bytes.size(), hex), "digest");
  return hex;
}

std::string Header(uint64_t seed, const std::string& config_hash) {
  return std::string("# clcbn ") + clcbn_version() + " seed=" + std::to_string(seed) +
         " config=" + config_hash.substr(0, 16) + "\n";
}

// Canonical dump of the settings that determine pipeline outputs.
std::string CanonicalConfig(const Options& o) {
  const auto& t = o.translit;
  const std::vector<std::pair<std::string, std::string>> entries = {
      {"english", o.english},
      {"target", o.target},
      {"ne_list", o.ne_list},
      {"aug_list", o.aug_list},
      {"mode", o.mode == CLCBN_MODE_TOKENIZED ? "tokenized" : "untokenized"},
      {"seed", std::to_string(o.seed)},
      {"max_fa", std::to_string(o.clcb.max_fa)},
      {"n_min", std::to_string(o.clcb.n_min)},
      {"n_max", std::to_string(o.clcb.n_max)},
      {"epochs", std::to_string(t.epochs)},
      {"batch_size", std::to_string(t.batch_size)},
      {"lr", FormatReal(t.learning_rate)},
      {"dropout", FormatReal(t.dropout)},
      {"embedding_dim", std::to_string(t.embedding_dim)},
      {"encoder_hidden", std::to_string(t.encoder_hidden_per_direction)},
      {"decoder_hidden", std::to_string(t.decoder_hidden)},
      {"grad_clip", FormatReal(t.grad_clip_norm)},
      {"optimizer", t.optimizer == CLCBN_OPTIMIZER_ADAM ? "adam" : "sgd"},
      {"init_range", FormatReal(t.init_range)},
      {"min_score", o.min_score ? FormatReal(*o.min_score) : "off"},
  };
  std::string out;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

Options Resolve(const Settings& s) {
  Options o;
  o.english = Get(s, "english");
  o.target = Get(s, "target");
  o.ne_list = Get(s, "ne_list");
  o.aug_list = Get(s, "aug_list");
  o.out = Get(s, "out");
  o.pairs = Get(s, "pairs");
  o.model = Get(s, "model");
  o.resource = Get(s, "resource");
  o.silver = Get(s, "silver");
  o.annotations = Get(s, "annotations");

  const std::string mode = Get(s, "mode");
  if (mode.empty() || mode == "tokenized") {
    o.mode = CLCBN_MODE_TOKENIZED;
  } else if (mode == "untokenized") {
    o.mode = CLCBN_MODE_UNTOKENIZED;
  } else {
    throw UsageError("mode: expected tokenized or untokenized, got '" + mode + "'");
  }
  o.seed = ParseInteger<uint64_t>(s, "seed", 1);

  clcbn_clcb_params_default(&o.clcb);
  o.clcb.max_fa = ParseInteger<size_t>(s, "max_fa", o.clcb.max_fa);
  o.clcb.n_min = ParseInteger<int>(s, "n_min", o.clcb.n_min);
  o.clcb.n_max = ParseInteger<int>(s, "n_max", o.clcb.n_max);
  if (o.clcb.n_min < 1 || o.clcb.n_max < o.clcb.n_min) {
    throw UsageError("n_min/n_max: expected 1 <= n_min <= n_max");
  }

  auto& t = o.translit;
  clcbn_translit_params_default(&t);
  t.seed = o.seed;
  t.epochs = ParseInteger<int>(s, "epochs", t.epochs);
  t.batch_size = ParseInteger<int>(s, "batch_size", t.batch_size);
  t.learning_rate = ParseReal(s, "lr", t.learning_rate);
  t.dropout = ParseReal(s, "dropout", t.dropout);
  t.embedding_dim = ParseInteger<int>(s, "embedding_dim", t.embedding_dim);
  t.encoder_hidden_per_direction =
      ParseInteger<int>(s, "encoder_hidden", t.encoder_hidden_per_direction);
  t.decoder_hidden = ParseInteger<int>(s, "decoder_hidden", t.decoder_hidden);
  t.grad_clip_norm = ParseReal(s, "grad_clip", t.grad_clip_norm);
  t.init_range = ParseReal(s, "init_range", t.init_range);
  const std::string optimizer = Get(s, "optimizer");
  if (optimizer == "adam") {
    t.optimizer = CLCBN_OPTIMIZER_ADAM;
  } else if (optimizer == "sgd") {
    t.optimizer = CLCBN_OPTIMIZER_SGD;
  } else if (!optimizer.empty()) {
    throw UsageError("optimizer: expected adam or sgd, got '" + optimizer + "'");
  }

  if (s.count("min_score")) o.min_score = ParseReal(s, "min_score", 0.0);
  o.threshold = ParseReal(s, "threshold", o.threshold);

  o.header = Header(o.seed, Hash(CanonicalConfig(o)));
  return o;
}

void RequireFile(const std::string& path, const char* field) {
  if (path.empty()) throw UsageError(std::string("missing required setting: ") + field);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw UsageError(std::string(field) + ": no such file: " + path);
  }
}

std::string OutPath(const Options& o, const char* name) { return (fs::path(o.out) / name).string(); }

void PrepareOut(const Options& o) {
  if (o.out.empty()) throw UsageError("missing required setting: out");
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out)) {
    throw UsageError("out: cannot create directory " + o.out);
  }
}

// Lists every artifact present in the output directory with its SHA-256.
void WriteManifest(const Options& o) {
  std::string body = o.header;
  for (const char* name : kArtifacts) {
    const std::string path = OutPath(o, name);
    if (!fs::is_regular_file(path)) continue;
    char hex[65];
    Check(clcbn_digest_file(path.c_str(), hex), "manifest");
    body += std::string(name) + "\t" + hex + "\n";
  }
  const std::string path = OutPath(o, kManifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out.flush()) throw StageError(kExitRuntime, "manifest: cannot write " + path);
}

struct Inputs {
  EditionHandle english;
  EditionHandle target;
  CorpusHandle corpus;
  NeListHandle nes;
};

Inputs LoadInputs(const Options& o) {
  RequireFile(o.english, "english");
  RequireFile(o.target, "target");
  RequireFile(o.ne_list, "ne_list");
  Inputs in;
  clcbn_edition* e = nullptr;
  Check(clcbn_edition_load(o.english.c_str(), "eng", &e), "english");
  in.english.reset(e);
  Check(clcbn_edition_load(o.target.c_str(), "tgt", &e), "target");
  in.target.reset(e);
  clcbn_corpus* c = nullptr;
  Check(clcbn_corpus_align(in.english.get(), in.target.get(), &c), "align");
  in.corpus.reset(c);
  clcbn_ne_list* n = nullptr;
  Check(clcbn_ne_list_load(o.ne_list.c_str(), in.english.get(), &n), "ne_list");
  in.nes.reset(n);

  const size_t shared = clcbn_corpus_shared_count(in.corpus.get());
  std::cout << "corpus: english=" << clcbn_edition_verse_count(in.english.get())
            << " target=" << clcbn_edition_verse_count(in.target.get()) << " shared=" << shared
            << "\n";
  std::cout << "nes: " << clcbn_ne_list_size(in.nes.get())
            << " absent=" << clcbn_ne_list_absent_count(in.nes.get())
            << " rejected=" << clcbn_ne_list_rejected_count(in.nes.get()) << "\n";
  if (shared == 0) std::cerr << "clcbn: warning: editions share no verse ids\n";
  return in;
}

void Bootstrap(const Options& o) {
  PrepareOut(o);
  const Inputs in = LoadInputs(o);
  clcbn_bootstrap* b = nullptr;
  Check(clcbn_bootstrap_run(in.corpus.get(), in.nes.get(), &o.clcb, &b), "bootstrap");
  const BootstrapHandle result(b);
  Check(clcbn_bootstrap_write(result.get(), OutPath(o, kBootstrapPairs).c_str(),
                              OutPath(o, kBootstrapSkipped).c_str(), o.header.c_str()),
        "bootstrap");
  std::cout << "bootstrap: pairs=" << clcbn_bootstrap_pair_count(result.get())
            << " skipped=" << clcbn_bootstrap_skipped_count(result.get()) << "\n";
  WriteManifest(o);
}

void Train(const Options& o) {
  PrepareOut(o);
  const std::string pairs = o.pairs.empty() ? OutPath(o, kBootstrapPairs) : o.pairs;
  RequireFile(pairs, "pairs");
  std::string aug = o.aug_list;
  if (!aug.empty()) {
    RequireFile(aug, "aug_list");
  } else if (!o.ne_list.empty()) {
    RequireFile(o.ne_list, "ne_list");
    aug = o.ne_list;
  }
  clcbn_model* m = nullptr;
  Check(clcbn_model_train(pairs.c_str(), aug.empty() ? nullptr : aug.c_str(), &o.translit, &m),
        "train");
  const ModelHandle model(m);
  Check(clcbn_model_save(model.get(), OutPath(o, kModel).c_str()), "train");
  Check(clcbn_model_write_loss_curve(model.get(), OutPath(o, kLoss).c_str(), o.header.c_str()),
        "train");
  const size_t epochs = clcbn_model_epoch_count(model.get());
  std::cout << "train: parameters=" << clcbn_model_parameter_count(model.get())
            << " epochs=" << epochs;
  if (epochs > 0) {
    std::cout << " first_loss=" << clcbn_model_epoch_loss(model.get(), 0)
              << " final_loss=" << clcbn_model_epoch_loss(model.get(), epochs - 1);
  }
  std::cout << "\n";
  WriteManifest(o);
}

void Mine(const Options& o) {
  PrepareOut(o);
  const std::string model_path = o.model.empty() ? OutPath(o, kModel) : o.model;
  RequireFile(model_path, "model");
  const Inputs in = LoadInputs(o);
  clcbn_model* m = nullptr;
  Check(clcbn_model_load(model_path.c_str(), &m), "model");
  const ModelHandle model(m);
  clcbn_mine_params params;
  clcbn_mine_params_default(&params);
  params.mode = o.mode;
  params.clcb = o.clcb;
  params.use_min_score = o.min_score.has_value();
  params.min_score = o.min_score.value_or(0.0);
  clcbn_mined* r = nullptr;
  Check(clcbn_mine(model.get(), in.corpus.get(), in.nes.get(), &params, &r), "mine");
  const MinedHandle mined(r);
  Check(clcbn_mined_write(mined.get(), OutPath(o, kResource).c_str(),
                          OutPath(o, kMineSkipped).c_str(), o.header.c_str()),
        "mine");
  std::cout << "mine: pairs=" << clcbn_mined_pair_count(mined.get())
            << " skipped=" << clcbn_mined_skipped_count(mined.get()) << "\n";
  WriteManifest(o);
}

void Eval(const Options& o) {
  PrepareOut(o);
  const std::string resource = o.resource.empty() ? OutPath(o, kResource) : o.resource;
  RequireFile(resource, "resource");
  if (o.silver.empty() == o.annotations.empty()) {
    throw UsageError("eval: give exactly one of --silver or --annotations");
  }
  const std::string report = OutPath(o, kEvalReport);
  clcbn_eval_summary summary{};
  if (!o.silver.empty()) {
    RequireFile(o.silver, "silver");
    Check(clcbn_eval_silver(resource.c_str(), o.silver.c_str(), o.threshold, report.c_str(),
                            o.header.c_str(), &summary),
          "eval");
  } else {
    RequireFile(o.annotations, "annotations");
    Check(clcbn_eval_gold(resource.c_str(), o.annotations.c_str(), report.c_str(),
                          o.header.c_str(), &summary),
          "eval");
  }
  std::cout << clcbn_eval_last_summary();
  WriteManifest(o);
}

void Synth(const std::string& spec, const std::string& out) {
  RequireFile(spec, "spec");
  if (out.empty()) throw UsageError("missing required setting: out");
  const Settings s = ReadKeyValueFile(spec, "spec");
  const uint64_t seed = ParseInteger<uint64_t>(s, "seed", 1);
  char hex[65];
  Check(clcbn_digest_file(spec.c_str(), hex), "spec");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw UsageError("out: cannot create directory " + out);
  Check(clcbn_synth(spec.c_str(), out.c_str(), Header(seed, hex).c_str()), "synth");
  std::cout << "synth: wrote corpus to " << out << "\n";
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"Extract named-entity lexicons from verse-aligned parallel corpora.", "clcbn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(clcbn_version()));

  Settings flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flag_options;
  std::string config_path;

  auto add_settings = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value settings file; flags override it");
    for (const Key& k : kKeys) {
      CLI::Option* opt = sub->add_option(FlagName(k.name), flag_values[k.name], k.help);
      flag_options.emplace_back(k.name, opt);
    }
  };

  CLI::App* bootstrap = app.add_subcommand("bootstrap", "extract noisy NE pairs from ngram statistics");
  CLI::App* train = app.add_subcommand("train", "train the transliteration model on bootstrapped pairs");
  CLI::App* mine = app.add_subcommand("mine", "select the best-scoring target for every NE");
  CLI::App* eval = app.add_subcommand("eval", "compare a mined resource with silver or gold data");
  CLI::App* run = app.add_subcommand("run", "bootstrap, train and mine into one output directory");
  for (CLI::App* sub : {bootstrap, train, mine, eval, run}) add_settings(sub);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with known gold pairs");
  std::string spec_path, synth_out;
  synth->add_option("--spec", spec_path, "key=value synthetic corpus spec")->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      Synth(spec_path, synth_out);
      return kExitOk;
    }
    Settings settings;
    if (!config_path.empty()) {
      settings = ReadKeyValueFile(config_path, "config");
      for (const auto& [key, value] : settings) {
        if (!IsKnownKey(key)) throw UsageError("config: unknown key '" + key + "'");
      }
    }
    for (const auto& [key, opt] : flag_options) {
      if (opt->count() > 0) settings[key] = flag_values[key];
    }
    const Options options = Resolve(settings);

    if (bootstrap->parsed()) {
      Bootstrap(options);
    } else if (train->parsed()) {
      Train(options);
    } else if (mine->parsed()) {
      Mine(options);
    } else if (eval->parsed()) {
      Eval(options);
    } else if (run->parsed()) {
      Bootstrap(options);
      Train(options);
      Mine(options);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "clcbn: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StageError& e) {
    std::cerr << "clcbn: error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "clcbn: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace clcbn_cli
