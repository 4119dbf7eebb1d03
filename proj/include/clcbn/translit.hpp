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

#ifndef CLCBN_TRANSLIT_HPP_
#define CLCBN_TRANSLIT_HPP_

// Character-level transliteration model: bidirectional GRU encoder, GRU
// decoder with bilinear attention restricted to positions at or right of the
// previously attended position. Inputs are target-language strings, outputs
// English NEs.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clcbn/clcb.hpp"

namespace clcbn::translit {

inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kUnk = 3;
inline constexpr int kNumReserved = 4;

class Vocab {
 public:
  Vocab();

  // Id of `c`, appending it if new.
  int Add(char32_t c);
  // Id of `c`, or kUnk.
  int Id(char32_t c) const;
  std::vector<int> Encode(std::string_view utf8) const;

  size_t size() const { return symbols_.size(); }
  // Reserved entries are "<pad>", "<s>", "</s>", "<unk>"; the rest are
  // single code points in UTF-8.
  const std::vector<std::string>& symbols() const { return symbols_; }

  static Vocab FromSymbols(const std::vector<std::string>& symbols);
  bool operator==(const Vocab& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<char32_t, int> index_;
};

// Input vocab from target strings, output vocab from English strings, each in
// first-occurrence order.
std::pair<Vocab, Vocab> BuildVocabs(const std::vector<TrainingPair>& pairs);

enum class Optimizer { kSgd = 0, kAdam = 1 };

struct TranslitConfig {
  int embedding_dim = 32;
  int encoder_hidden_per_direction = 16;
  int decoder_hidden = 32;
  // Applied to decoder input embeddings.
  double dropout = 0.4;
  int batch_size = 16;
  double learning_rate = 0.01;
  int epochs = 50;
  double grad_clip_norm = 5.0;
  uint64_t seed = 1;
  Optimizer optimizer = Optimizer::kAdam;
  double init_range = 0.2;

  // Throws Error(kInvalidArgument).
  void Validate() const;
  bool operator==(const TranslitConfig&) const = default;
};

struct Tensor {
  std::string name;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;  // row-major

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

// Named tensors in a fixed order; also addressable as one flat vector.
class ParameterSet {
 public:
  void Add(std::string name, size_t rows, size_t cols);
  Tensor& operator[](size_t i) { return tensors_[i]; }
  const Tensor& operator[](size_t i) const { return tensors_[i]; }
  size_t num_tensors() const { return tensors_.size(); }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  size_t TotalSize() const;
  double& Flat(size_t index);
  double Flat(size_t index) const;
  void SetZero();
  bool AllFinite() const;
  double SquaredNorm() const;
  void Scale(double factor);

 private:
  std::vector<Tensor> tensors_;
};

struct AttentionTrace {
  // One distribution over encoder positions per decode step. Masked
  // positions hold exactly 0.
  std::vector<std::vector<double>> weights;
  std::vector<size_t> argmax;
  // First attendable position per step.
  std::vector<size_t> mask_start;
};

struct ForwardResult {
  double loss = 0.0;  // summed negative log-likelihood incl. EOS
  AttentionTrace trace;
};

// Test fixture: deliberately wrong backward pass, used to show that the
// gradient check catches errors.
enum class GradientFault { kNone, kAttentionScores };

class TranslitModel {
 public:
  TranslitModel(Vocab input_vocab, Vocab output_vocab, TranslitConfig config);

  // Uniform in [-range, range] from a seeded generator.
  void InitializeUniform(uint64_t seed, double range);

  ForwardResult Forward(std::string_view input, std::string_view output,
                        bool train_mode = false,
                        std::mt19937_64* dropout_rng = nullptr) const;

  // Adds d(loss)/d(params) into `grad`, which must have this model's
  // layout. `pinned_mask` fixes each step's first attendable position
  // instead of deriving it from the previous argmax.
  double AccumulateGradient(const std::vector<int>& input_ids,
                            const std::vector<int>& output_ids, ParameterSet* grad,
                            bool train_mode = false,
                            std::mt19937_64* dropout_rng = nullptr,
                            const std::vector<size_t>* pinned_mask = nullptr,
                            GradientFault fault = GradientFault::kNone) const;

  double Loss(const std::vector<int>& input_ids, const std::vector<int>& output_ids,
              const std::vector<size_t>* pinned_mask = nullptr,
              AttentionTrace* trace = nullptr) const;

  // Mean log-likelihood per output symbol (EOS included); <= 0.
  double Score(std::string_view candidate, std::string_view english) const;

  // Encoder sequence: characters then EOS (empty input -> just EOS).
  std::vector<int> EncodeInput(std::string_view s) const;
  // Output characters without BOS/EOS; throws Error(kEmptyInput) if empty.
  std::vector<int> EncodeOutput(std::string_view s) const;

  const Vocab& input_vocab() const { return input_vocab_; }
  const Vocab& output_vocab() const { return output_vocab_; }
  const TranslitConfig& config() const { return config_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& mutable_parameters() { return params_; }
  // Zero-filled set with this model's layout.
  ParameterSet ZeroLike() const;

  size_t ParameterCount() const { return params_.TotalSize(); }

  // input_vocab*E + 2*(3h*E + 3h*h + 6h) + output_vocab*E
  //   + (3d*E + 3d*d + 6d) + d*2h + (d*(2h+d) + d) + (output_vocab*d + output_vocab)
  // with E = embedding_dim, h = encoder_hidden_per_direction, d = decoder_hidden.
  static size_t ParameterCountFormula(const TranslitConfig& config,
                                      size_t input_vocab, size_t output_vocab);

  const std::vector<double>& loss_curve() const { return loss_curve_; }
  void set_loss_curve(std::vector<double> curve) { loss_curve_ = std::move(curve); }

 private:
  double Run(const std::vector<int>& x, const std::vector<int>& y, bool train_mode,
             std::mt19937_64* rng, ParameterSet* grad,
             const std::vector<size_t>* pinned_mask, GradientFault fault,
             AttentionTrace* trace) const;

  Vocab input_vocab_;
  Vocab output_vocab_;
  TranslitConfig config_;
  ParameterSet params_;
  std::vector<double> loss_curve_;
};

// Oversamples the smaller of the two sources so their counts differ by at
// most one, then shuffles. Augmented pairs have an empty target.
std::vector<TrainingPair> Augment(const std::vector<TrainingPair>& bootstrapped,
                                  const std::vector<std::string>& english_nes,
                                  uint64_t seed);

struct TrainOptions {
  // Called after each epoch with (epoch starting at 1, mean loss).
  std::function<void(int, double)> on_epoch;
};

TranslitModel Train(const std::vector<TrainingPair>& bootstrapped,
                    const std::vector<std::string>& english_nes,
                    const TranslitConfig& config, const TrainOptions& options = {});

struct GradientCheckOptions {
  double epsilon = 1e-4;
  size_t sample = 50;  // >= parameter count checks every parameter
  uint64_t seed = 0;
  GradientFault fault = GradientFault::kNone;
};

// Max relative error |g - fd| / max(|g|, |fd|, 1e-6) between analytic
// gradients and central differences, dropout disabled. 0 for an empty sample.
double GradientCheck(const TranslitModel& model, const TrainingPair& pair,
                     const GradientCheckOptions& options = {});

inline constexpr uint32_t kModelFormatVersion = 1;

void SaveModel(const TranslitModel& model, const std::filesystem::path& path);
TranslitModel LoadModel(const std::filesystem::path& path);
std::string SerializeModel(const TranslitModel& model);
TranslitModel DeserializeModel(std::string_view bytes);

// `epoch,mean_loss` rows after `header`.
std::string FormatLossCurve(const std::vector<double>& curve, std::string_view header);

}  // namespace clcbn::translit

#endif  // CLCBN_TRANSLIT_HPP_
