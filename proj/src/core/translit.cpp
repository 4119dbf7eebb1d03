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

#include "clcbn/translit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include "clcbn/error.hpp"
#include "clcbn/io.hpp"
#include "clcbn/random.hpp"
#include "clcbn/text.hpp"

namespace clcbn::translit {

namespace {

const char* const kReservedSymbols[kNumReserved] = {"<pad>", "<s>", "</s>", "<unk>"};

// Tensor order inside ParameterSet.
enum TensorIndex : size_t {
  kInputEmbedding,
  kEncFwdWih, kEncFwdWhh, kEncFwdBih, kEncFwdBhh,
  kEncBwdWih, kEncBwdWhh, kEncBwdBih, kEncBwdBhh,
  kOutputEmbedding,
  kDecWih, kDecWhh, kDecBih, kDecBhh,
  kAttention,
  kCombineW, kCombineB,
  kProjectionW, kProjectionB,
  kNumTensors
};

using Vec = std::vector<double>;

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W x
void MatVecAdd(const Tensor& w, const double* x, double* y) {
  for (size_t r = 0; r < w.rows; ++r) {
    const double* row = &w.data[r * w.cols];
    double acc = 0.0;
    for (size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// dx += W^T dy
void MatTVecAdd(const Tensor& w, const double* dy, double* dx) {
  for (size_t r = 0; r < w.rows; ++r) {
    const double* row = &w.data[r * w.cols];
    const double g = dy[r];
    if (g == 0.0) continue;
    for (size_t c = 0; c < w.cols; ++c) dx[c] += row[c] * g;
  }
}

// dW += dy x^T
void OuterAdd(Tensor& dw, const double* dy, const double* x) {
  for (size_t r = 0; r < dw.rows; ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    double* row = &dw.data[r * dw.cols];
    for (size_t c = 0; c < dw.cols; ++c) row[c] += g * x[c];
  }
}

void VecAdd(const Tensor& b, double* y) {
  for (size_t i = 0; i < b.data.size(); ++i) y[i] += b.data[i];
}

void VecAccumulate(Tensor& db, const double* dy) {
  for (size_t i = 0; i < db.data.size(); ++i) db.data[i] += dy[i];
}

struct GruStep {
  Vec h_prev, r, z, n, ghn, h;
};

// PyTorch gate layout [r | z | n]:
//   r = s(Wx_r + b_r + Uh_r + c_r), z = s(...), n = tanh(Wx_n + b_n + r*(Uh_n + c_n))
//   h' = (1 - z) * n + z * h
void GruForward(const ParameterSet& p, size_t base, size_t hidden, const double* x,
                const Vec& h_prev, GruStep* st) {
  const Tensor& w_ih = p[base];
  const Tensor& w_hh = p[base + 1];
  Vec gi(3 * hidden, 0.0), gh(3 * hidden, 0.0);
  VecAdd(p[base + 2], gi.data());
  VecAdd(p[base + 3], gh.data());
  MatVecAdd(w_ih, x, gi.data());
  MatVecAdd(w_hh, h_prev.data(), gh.data());
  st->h_prev = h_prev;
  st->r.resize(hidden);
  st->z.resize(hidden);
  st->n.resize(hidden);
  st->ghn.resize(hidden);
  st->h.resize(hidden);
  for (size_t k = 0; k < hidden; ++k) {
    const double r = Sigmoid(gi[k] + gh[k]);
    const double z = Sigmoid(gi[hidden + k] + gh[hidden + k]);
    const double ghn = gh[2 * hidden + k];
    const double n = std::tanh(gi[2 * hidden + k] + r * ghn);
    st->r[k] = r;
    st->z[k] = z;
    st->n[k] = n;
    st->ghn[k] = ghn;
    st->h[k] = (1.0 - z) * n + z * h_prev[k];
  }
}

// dx and dh_prev are accumulated into.
void GruBackward(const ParameterSet& p, ParameterSet& g, size_t base, size_t hidden,
                 const double* x, const GruStep& st, const double* dh, double* dx,
                 double* dh_prev) {
  Vec dgi(3 * hidden, 0.0), dgh(3 * hidden, 0.0);
  for (size_t k = 0; k < hidden; ++k) {
    const double r = st.r[k], z = st.z[k], n = st.n[k];
    const double dn = dh[k] * (1.0 - z);
    const double dz = dh[k] * (st.h_prev[k] - n);
    dh_prev[k] += dh[k] * z;
    const double dn_pre = dn * (1.0 - n * n);
    const double dr = dn_pre * st.ghn[k];
    const double dz_pre = dz * z * (1.0 - z);
    const double dr_pre = dr * r * (1.0 - r);
    dgi[k] = dr_pre;
    dgh[k] = dr_pre;
    dgi[hidden + k] = dz_pre;
    dgh[hidden + k] = dz_pre;
    dgi[2 * hidden + k] = dn_pre;
    dgh[2 * hidden + k] = dn_pre * r;
  }
  OuterAdd(g[base], dgi.data(), x);
  OuterAdd(g[base + 1], dgh.data(), st.h_prev.data());
  VecAccumulate(g[base + 2], dgi.data());
  VecAccumulate(g[base + 3], dgh.data());
  MatTVecAdd(p[base], dgi.data(), dx);
  MatTVecAdd(p[base + 1], dgh.data(), dh_prev);
}

double DropoutScale(std::mt19937_64& rng, double keep) {
  return random::UniformUnit(rng) < keep ? 1.0 / keep : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocab

Vocab::Vocab() {
  for (const char* s : kReservedSymbols) symbols_.emplace_back(s);
}

int Vocab::Add(char32_t c) {
  auto it = index_.find(c);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(symbols_.size());
  index_.emplace(c, id);
  symbols_.push_back(text::ToUtf8(std::u32string_view(&c, 1)));
  return id;
}

int Vocab::Id(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::Encode(std::string_view utf8) const {
  std::vector<int> ids;
  for (char32_t c : text::ToU32(utf8)) ids.push_back(Id(c));
  return ids;
}

Vocab Vocab::FromSymbols(const std::vector<std::string>& symbols) {
  if (symbols.size() < kNumReserved) {
    throw Error(ErrorCode::kBadFormat, "vocabulary lacks reserved symbols");
  }
  for (int i = 0; i < kNumReserved; ++i) {
    if (symbols[i] != kReservedSymbols[i]) {
      throw Error(ErrorCode::kBadFormat, "vocabulary reserved symbols out of order");
    }
  }
  Vocab v;
  for (size_t i = kNumReserved; i < symbols.size(); ++i) {
    const std::u32string u = text::ToU32(symbols[i]);
    if (u.size() != 1) throw Error(ErrorCode::kBadFormat, "vocabulary symbol is not one character");
    if (v.Add(u[0]) != static_cast<int>(i)) {
      throw Error(ErrorCode::kBadFormat, "duplicate vocabulary symbol");
    }
  }
  return v;
}

std::pair<Vocab, Vocab> BuildVocabs(const std::vector<TrainingPair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no training pairs");
  Vocab in, out;
  for (const TrainingPair& p : pairs) {
    for (char32_t c : text::ToU32(p.target)) in.Add(c);
    for (char32_t c : text::ToU32(p.english)) out.Add(c);
  }
  return {std::move(in), std::move(out)};
}

// ---------------------------------------------------------------------------
// Config and parameters

void TranslitConfig::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  if (embedding_dim < 1) fail("embedding_dim must be positive");
  if (encoder_hidden_per_direction < 1) fail("encoder_hidden_per_direction must be positive");
  if (decoder_hidden != 2 * encoder_hidden_per_direction) {
    fail("decoder_hidden must equal 2 * encoder_hidden_per_direction");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (batch_size < 1) fail("batch_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (epochs < 0) fail("epochs must be non-negative");
  if (!(grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
  if (!(init_range > 0.0)) fail("init_range must be positive");
}

void ParameterSet::Add(std::string name, size_t rows, size_t cols) {
  tensors_.push_back({std::move(name), rows, cols, std::vector<double>(rows * cols, 0.0)});
}

size_t ParameterSet::TotalSize() const {
  size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

double& ParameterSet::Flat(size_t index) {
  for (auto& t : tensors_) {
    if (index < t.data.size()) return t.data[index];
    index -= t.data.size();
  }
  throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
}

double ParameterSet::Flat(size_t index) const {
  return const_cast<ParameterSet*>(this)->Flat(index);
}

void ParameterSet::SetZero() {
  for (auto& t : tensors_) std::fill(t.data.begin(), t.data.end(), 0.0);
}

bool ParameterSet::AllFinite() const {
  for (const auto& t : tensors_) {
    for (double v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

double ParameterSet::SquaredNorm() const {
  double s = 0.0;
  for (const auto& t : tensors_) {
    for (double v : t.data) s += v * v;
  }
  return s;
}

void ParameterSet::Scale(double factor) {
  for (auto& t : tensors_) {
    for (double& v : t.data) v *= factor;
  }
}

// ---------------------------------------------------------------------------
// Model

TranslitModel::TranslitModel(Vocab input_vocab, Vocab output_vocab, TranslitConfig config)
    : input_vocab_(std::move(input_vocab)),
      output_vocab_(std::move(output_vocab)),
      config_(config) {
  config_.Validate();
  const size_t e = config_.embedding_dim;
  const size_t h = config_.encoder_hidden_per_direction;
  const size_t d = config_.decoder_hidden;
  const size_t vin = input_vocab_.size();
  const size_t vout = output_vocab_.size();
  params_.Add("input_embedding", vin, e);
  for (const char* dir : {"encoder_fwd", "encoder_bwd"}) {
    const std::string p(dir);
    params_.Add(p + "_w_ih", 3 * h, e);
    params_.Add(p + "_w_hh", 3 * h, h);
    params_.Add(p + "_b_ih", 3 * h, 1);
    params_.Add(p + "_b_hh", 3 * h, 1);
  }
  params_.Add("output_embedding", vout, e);
  params_.Add("decoder_w_ih", 3 * d, e);
  params_.Add("decoder_w_hh", 3 * d, d);
  params_.Add("decoder_b_ih", 3 * d, 1);
  params_.Add("decoder_b_hh", 3 * d, 1);
  params_.Add("attention_w", d, 2 * h);
  params_.Add("combine_w", d, 2 * h + d);
  params_.Add("combine_b", d, 1);
  params_.Add("projection_w", vout, d);
  params_.Add("projection_b", vout, 1);
}

size_t TranslitModel::ParameterCountFormula(const TranslitConfig& c, size_t vin,
                                            size_t vout) {
  const size_t e = c.embedding_dim;
  const size_t h = c.encoder_hidden_per_direction;
  const size_t d = c.decoder_hidden;
  return vin * e + 2 * (3 * h * e + 3 * h * h + 6 * h) + vout * e +
         (3 * d * e + 3 * d * d + 6 * d) + d * 2 * h + (d * (2 * h + d) + d) +
         (vout * d + vout);
}

ParameterSet TranslitModel::ZeroLike() const {
  ParameterSet g;
  for (const auto& t : params_.tensors()) g.Add(t.name, t.rows, t.cols);
  return g;
}

void TranslitModel::InitializeUniform(uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < params_.num_tensors(); ++i) {
    for (double& v : params_[i].data) v = (2.0 * random::UniformUnit(rng) - 1.0) * range;
  }
}

std::vector<int> TranslitModel::EncodeInput(std::string_view s) const {
  std::vector<int> ids = input_vocab_.Encode(s);
  ids.push_back(kEos);
  return ids;
}

std::vector<int> TranslitModel::EncodeOutput(std::string_view s) const {
  if (s.empty()) throw Error(ErrorCode::kEmptyInput, "empty output string");
  return output_vocab_.Encode(s);
}

double TranslitModel::Run(const std::vector<int>& x, const std::vector<int>& y,
                          bool train_mode, std::mt19937_64* rng, ParameterSet* grad,
                          const std::vector<size_t>* pinned_mask, GradientFault fault,
                          AttentionTrace* trace) const {
  const size_t e_dim = config_.embedding_dim;
  const size_t he = config_.encoder_hidden_per_direction;
  const size_t hd = config_.decoder_hidden;
  const size_t enc_dim = 2 * he;
  const size_t vout = output_vocab_.size();
  const size_t src_len = x.size();
  const size_t steps = y.size() + 1;
  if (src_len == 0) throw Error(ErrorCode::kEmptyInput, "empty encoder sequence");
  if (y.empty()) throw Error(ErrorCode::kEmptyInput, "empty output string");
  if (pinned_mask != nullptr && pinned_mask->size() != steps) {
    throw Error(ErrorCode::kInvalidArgument, "pinned mask length mismatch");
  }
  const bool dropout = train_mode && config_.dropout > 0.0;
  if (dropout && rng == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "train mode requires a dropout generator");
  }
  const double keep = 1.0 - config_.dropout;
  const ParameterSet& p = params_;

  // Encoder.
  std::vector<Vec> emb_x(src_len, Vec(e_dim));
  for (size_t s = 0; s < src_len; ++s) {
    const double* row = &p[kInputEmbedding].data[static_cast<size_t>(x[s]) * e_dim];
    std::copy(row, row + e_dim, emb_x[s].begin());
  }
  const Vec zero_he(he, 0.0);
  std::vector<GruStep> fwd(src_len), bwd(src_len);
  for (size_t s = 0; s < src_len; ++s) {
    GruForward(p, kEncFwdWih, he, emb_x[s].data(), s ? fwd[s - 1].h : zero_he, &fwd[s]);
  }
  for (size_t s = src_len; s-- > 0;) {
    GruForward(p, kEncBwdWih, he, emb_x[s].data(),
               s + 1 < src_len ? bwd[s + 1].h : zero_he, &bwd[s]);
  }
  std::vector<Vec> enc(src_len, Vec(enc_dim));
  std::vector<Vec> keys(src_len, Vec(hd, 0.0));  // W_a * enc[s]
  for (size_t s = 0; s < src_len; ++s) {
    std::copy(fwd[s].h.begin(), fwd[s].h.end(), enc[s].begin());
    std::copy(bwd[s].h.begin(), bwd[s].h.end(), enc[s].begin() + he);
    MatVecAdd(p[kAttention], enc[s].data(), keys[s].data());
  }
  Vec dec_state(hd);
  std::copy(fwd[src_len - 1].h.begin(), fwd[src_len - 1].h.end(), dec_state.begin());
  std::copy(bwd[0].h.begin(), bwd[0].h.end(), dec_state.begin() + he);

  // Decoder.
  std::vector<Vec> emb_y(steps, Vec(e_dim)), mask_y(steps, Vec(e_dim, 1.0));
  std::vector<GruStep> dec(steps);
  std::vector<size_t> start(steps, 0);
  std::vector<Vec> alpha(steps, Vec(src_len, 0.0));
  std::vector<Vec> concat(steps, Vec(enc_dim + hd, 0.0));
  std::vector<Vec> combined(steps, Vec(hd));
  std::vector<Vec> probs(steps, Vec(vout));
  std::vector<int> targets(steps);
  if (trace != nullptr) *trace = AttentionTrace{};

  double loss = 0.0;
  size_t prev_argmax = 0;
  for (size_t t = 0; t < steps; ++t) {
    const int in_sym = t == 0 ? kBos : y[t - 1];
    targets[t] = t + 1 < steps ? y[t] : kEos;
    const double* row = &p[kOutputEmbedding].data[static_cast<size_t>(in_sym) * e_dim];
    for (size_t k = 0; k < e_dim; ++k) {
      if (dropout) mask_y[t][k] = DropoutScale(*rng, keep);
      emb_y[t][k] = row[k] * mask_y[t][k];
    }
    GruForward(p, kDecWih, hd, emb_y[t].data(), t ? dec[t - 1].h : dec_state, &dec[t]);
    const Vec& d = dec[t].h;

    // Positions left of the previous argmax are not attendable.
    start[t] = pinned_mask ? (*pinned_mask)[t] : (t == 0 ? 0 : prev_argmax);
    if (start[t] >= src_len) throw Error(ErrorCode::kInvalidArgument, "mask start out of range");
    double max_score = -std::numeric_limits<double>::infinity();
    for (size_t s = start[t]; s < src_len; ++s) {
      double sc = 0.0;
      for (size_t k = 0; k < hd; ++k) sc += d[k] * keys[s][k];
      alpha[t][s] = sc;
      max_score = std::max(max_score, sc);
    }
    double z = 0.0;
    for (size_t s = start[t]; s < src_len; ++s) {
      alpha[t][s] = std::exp(alpha[t][s] - max_score);
      z += alpha[t][s];
    }
    size_t best = start[t];
    for (size_t s = start[t]; s < src_len; ++s) {
      alpha[t][s] /= z;
      if (alpha[t][s] > alpha[t][best]) best = s;
    }
    prev_argmax = best;

    Vec& cat = concat[t];
    for (size_t s = start[t]; s < src_len; ++s) {
      const double a = alpha[t][s];
      for (size_t k = 0; k < enc_dim; ++k) cat[k] += a * enc[s][k];
    }
    std::copy(d.begin(), d.end(), cat.begin() + enc_dim);
    Vec pre(hd, 0.0);
    VecAdd(p[kCombineB], pre.data());
    MatVecAdd(p[kCombineW], cat.data(), pre.data());
    for (size_t k = 0; k < hd; ++k) {
      combined[t][k] = std::tanh(pre[k]);
    }
    Vec& pr = probs[t];
    std::fill(pr.begin(), pr.end(), 0.0);
    VecAdd(p[kProjectionB], pr.data());
    MatVecAdd(p[kProjectionW], combined[t].data(), pr.data());
    const double mx = *std::max_element(pr.begin(), pr.end());
    const double shifted_target = pr[targets[t]] - mx;
    double sum = 0.0;
    for (double& v : pr) {
      v = std::exp(v - mx);
      sum += v;
    }
    loss -= shifted_target - std::log(sum);
    for (double& v : pr) v /= sum;

    if (trace != nullptr) {
      trace->weights.push_back(alpha[t]);
      trace->argmax.push_back(best);
      trace->mask_start.push_back(start[t]);
    }
  }
  if (grad == nullptr) return loss;

  // Backward.
  ParameterSet& g = *grad;
  std::vector<Vec> d_enc(src_len, Vec(enc_dim, 0.0));
  std::vector<Vec> d_keys(src_len, Vec(hd, 0.0));
  Vec d_next(hd, 0.0);
  for (size_t t = steps; t-- > 0;) {
    Vec d_logit = probs[t];
    d_logit[targets[t]] -= 1.0;
    OuterAdd(g[kProjectionW], d_logit.data(), combined[t].data());
    VecAccumulate(g[kProjectionB], d_logit.data());
    Vec d_comb(hd, 0.0);
    MatTVecAdd(p[kProjectionW], d_logit.data(), d_comb.data());
    Vec d_pre(hd);
    for (size_t k = 0; k < hd; ++k) {
      const double c = combined[t][k];
      d_pre[k] = d_comb[k] * (1.0 - c * c);
    }
    OuterAdd(g[kCombineW], d_pre.data(), concat[t].data());
    VecAccumulate(g[kCombineB], d_pre.data());
    Vec d_cat(enc_dim + hd, 0.0);
    MatTVecAdd(p[kCombineW], d_pre.data(), d_cat.data());

    Vec d_state = d_next;
    for (size_t k = 0; k < hd; ++k) d_state[k] += d_cat[enc_dim + k];

    // Context and attention softmax.
    Vec d_alpha(src_len, 0.0);
    double dot = 0.0;
    for (size_t s = start[t]; s < src_len; ++s) {
      double da = 0.0;
      for (size_t k = 0; k < enc_dim; ++k) {
        da += d_cat[k] * enc[s][k];
        d_enc[s][k] += alpha[t][s] * d_cat[k];
      }
      d_alpha[s] = da;
      dot += alpha[t][s] * da;
    }
    const Vec& d = dec[t].h;
    for (size_t s = start[t]; s < src_len; ++s) {
      double d_score = alpha[t][s] * (d_alpha[s] - dot);
      if (fault == GradientFault::kAttentionScores) d_score = -d_score;
      for (size_t k = 0; k < hd; ++k) {
        d_state[k] += d_score * keys[s][k];
        d_keys[s][k] += d_score * d[k];
      }
    }

    Vec d_emb(e_dim, 0.0);
    Vec d_prev(hd, 0.0);
    GruBackward(p, g, kDecWih, hd, emb_y[t].data(), dec[t], d_state.data(), d_emb.data(),
                d_prev.data());
    const int in_sym = t == 0 ? kBos : y[t - 1];
    double* emb_row = &g[kOutputEmbedding].data[static_cast<size_t>(in_sym) * e_dim];
    for (size_t k = 0; k < e_dim; ++k) emb_row[k] += d_emb[k] * mask_y[t][k];
    d_next = std::move(d_prev);
  }

  for (size_t s = 0; s < src_len; ++s) {
    OuterAdd(g[kAttention], d_keys[s].data(), enc[s].data());
    MatTVecAdd(p[kAttention], d_keys[s].data(), d_enc[s].data());
  }
  // Initial decoder state = [fwd last ; bwd first].
  for (size_t k = 0; k < he; ++k) {
    d_enc[src_len - 1][k] += d_next[k];
    d_enc[0][he + k] += d_next[he + k];
  }

  std::vector<Vec> d_emb_x(src_len, Vec(e_dim, 0.0));
  Vec dh(he, 0.0);
  for (size_t s = src_len; s-- > 0;) {
    for (size_t k = 0; k < he; ++k) dh[k] += d_enc[s][k];
    Vec d_prev(he, 0.0);
    GruBackward(p, g, kEncFwdWih, he, emb_x[s].data(), fwd[s], dh.data(),
                d_emb_x[s].data(), d_prev.data());
    dh = std::move(d_prev);
  }
  dh.assign(he, 0.0);
  for (size_t s = 0; s < src_len; ++s) {
    for (size_t k = 0; k < he; ++k) dh[k] += d_enc[s][he + k];
    Vec d_prev(he, 0.0);
    GruBackward(p, g, kEncBwdWih, he, emb_x[s].data(), bwd[s], dh.data(),
                d_emb_x[s].data(), d_prev.data());
    dh = std::move(d_prev);
  }
  for (size_t s = 0; s < src_len; ++s) {
    double* emb_row = &g[kInputEmbedding].data[static_cast<size_t>(x[s]) * e_dim];
    for (size_t k = 0; k < e_dim; ++k) emb_row[k] += d_emb_x[s][k];
  }
  return loss;
}

ForwardResult TranslitModel::Forward(std::string_view input, std::string_view output,
                                     bool train_mode, std::mt19937_64* dropout_rng) const {
  ForwardResult r;
  r.loss = Run(EncodeInput(input), EncodeOutput(output), train_mode, dropout_rng, nullptr,
               nullptr, GradientFault::kNone, &r.trace);
  return r;
}

double TranslitModel::AccumulateGradient(const std::vector<int>& input_ids,
                                         const std::vector<int>& output_ids,
                                         ParameterSet* grad, bool train_mode,
                                         std::mt19937_64* dropout_rng,
                                         const std::vector<size_t>* pinned_mask,
                                         GradientFault fault) const {
  if (grad == nullptr || grad->TotalSize() != params_.TotalSize()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient buffer has the wrong layout");
  }
  return Run(input_ids, output_ids, train_mode, dropout_rng, grad, pinned_mask, fault,
             nullptr);
}

double TranslitModel::Loss(const std::vector<int>& input_ids,
                           const std::vector<int>& output_ids,
                           const std::vector<size_t>* pinned_mask,
                           AttentionTrace* trace) const {
  return Run(input_ids, output_ids, false, nullptr, nullptr, pinned_mask,
             GradientFault::kNone, trace);
}

double TranslitModel::Score(std::string_view candidate, std::string_view english) const {
  const auto y = EncodeOutput(english);
  const double loss = Run(EncodeInput(candidate), y, false, nullptr, nullptr, nullptr,
                          GradientFault::kNone, nullptr);
  return -loss / static_cast<double>(y.size() + 1);
}

// ---------------------------------------------------------------------------
// Augmentation and training

namespace {

// `count` items drawn from `src` by whole copies plus a seeded sample
// without replacement for the remainder.
void Oversample(const std::vector<TrainingPair>& src, size_t count, std::mt19937_64& rng,
                std::vector<TrainingPair>* out) {
  const size_t copies = count / src.size();
  for (size_t c = 0; c < copies; ++c) out->insert(out->end(), src.begin(), src.end());
  std::vector<size_t> idx(src.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  const size_t extra = count % src.size();
  for (size_t i = 0; i < extra; ++i) {
    const size_t j = i + random::UniformIndex(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
    out->push_back(src[idx[i]]);
  }
}

}  // namespace

std::vector<TrainingPair> Augment(const std::vector<TrainingPair>& bootstrapped,
                                  const std::vector<std::string>& english_nes,
                                  uint64_t seed) {
  if (bootstrapped.empty() || english_nes.empty()) {
    throw Error(ErrorCode::kEmptyInput, "augmentation needs bootstrapped pairs and English NEs");
  }
  std::vector<TrainingPair> augmented;
  augmented.reserve(english_nes.size());
  for (const std::string& ne : english_nes) {
    if (ne.empty()) throw Error(ErrorCode::kInvalidArgument, "empty augmentation NE");
    augmented.push_back({"", ne, PairSource::kAugmented});
  }
  std::mt19937_64 rng(seed);
  std::vector<TrainingPair> out;
  const size_t n = std::max(bootstrapped.size(), augmented.size());
  out.reserve(2 * n);
  Oversample(bootstrapped, n, rng, &out);
  Oversample(augmented, n, rng, &out);
  random::Shuffle(out, rng);
  return out;
}

TranslitModel Train(const std::vector<TrainingPair>& bootstrapped,
                    const std::vector<std::string>& english_nes,
                    const TranslitConfig& config, const TrainOptions& options) {
  config.Validate();
  if (bootstrapped.empty()) throw Error(ErrorCode::kEmptyInput, "no bootstrapped pairs to train on");
  std::vector<TrainingPair> data =
      english_nes.empty() ? bootstrapped : Augment(bootstrapped, english_nes, config.seed);
  auto [in_vocab, out_vocab] = BuildVocabs(data);
  TranslitModel model(std::move(in_vocab), std::move(out_vocab), config);
  model.InitializeUniform(config.seed, config.init_range);

  struct Example {
    std::vector<int> x, y;
    const TrainingPair* pair;
  };
  std::vector<Example> examples;
  examples.reserve(data.size());
  for (const TrainingPair& p : data) {
    examples.push_back({model.EncodeInput(p.target), model.EncodeOutput(p.english), &p});
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  ParameterSet grad = model.ZeroLike();
  ParameterSet m1 = model.ZeroLike(), m2 = model.ZeroLike();
  ParameterSet& params = model.mutable_parameters();
  const size_t batch = static_cast<size_t>(config.batch_size);
  uint64_t step = 0;
  std::vector<double> curve;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    random::Shuffle(order, rng);
    double epoch_loss = 0.0;
    for (size_t b = 0; b < order.size(); b += batch) {
      const size_t end = std::min(order.size(), b + batch);
      grad.SetZero();
      for (size_t i = b; i < end; ++i) {
        const Example& ex = examples[order[i]];
        const double l = model.AccumulateGradient(ex.x, ex.y, &grad, true, &rng);
        if (!std::isfinite(l)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", batch " << b / batch
              << ", pair (" << ex.pair->target << " -> " << ex.pair->english << ")";
          throw Error(ErrorCode::kNonFiniteLoss, msg.str());
        }
        epoch_loss += l;
      }
      grad.Scale(1.0 / static_cast<double>(end - b));
      const double norm = std::sqrt(grad.SquaredNorm());
      if (norm > config.grad_clip_norm) grad.Scale(config.grad_clip_norm / norm);
      ++step;
      if (config.optimizer == Optimizer::kSgd) {
        for (size_t ti = 0; ti < params.num_tensors(); ++ti) {
          auto& w = params[ti].data;
          const auto& gw = grad[ti].data;
          for (size_t k = 0; k < w.size(); ++k) w[k] -= config.learning_rate * gw[k];
        }
      } else {
        constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (size_t ti = 0; ti < params.num_tensors(); ++ti) {
          auto& w = params[ti].data;
          const auto& gw = grad[ti].data;
          auto& m = m1[ti].data;
          auto& v = m2[ti].data;
          for (size_t k = 0; k < w.size(); ++k) {
            m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * gw[k];
            v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * gw[k] * gw[k];
            w[k] -= config.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
          }
        }
      }
      if (!params.AllFinite()) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "non-finite parameters after update at epoch " + std::to_string(epoch));
      }
    }
    const double mean = epoch_loss / static_cast<double>(examples.size());
    curve.push_back(mean);
    if (options.on_epoch) options.on_epoch(epoch, mean);
  }
  model.set_loss_curve(std::move(curve));
  return model;
}

double GradientCheck(const TranslitModel& model, const TrainingPair& pair,
                     const GradientCheckOptions& options) {
  if (options.sample == 0) return 0.0;
  const auto x = model.EncodeInput(pair.target);
  const auto y = model.EncodeOutput(pair.english);
  // The argmax-driven mask is piecewise constant; pin it to the unperturbed
  // path so both sides of each difference see the same mask.
  AttentionTrace trace;
  model.Loss(x, y, nullptr, &trace);
  const std::vector<size_t> pinned = trace.mask_start;

  ParameterSet grad = model.ZeroLike();
  model.AccumulateGradient(x, y, &grad, false, nullptr, &pinned, options.fault);

  const size_t total = model.ParameterCount();
  std::vector<size_t> idx(total);
  std::iota(idx.begin(), idx.end(), size_t{0});
  size_t count = total;
  if (options.sample < total) {
    std::mt19937_64 rng(options.seed);
    for (size_t i = 0; i < options.sample; ++i) {
      std::swap(idx[i], idx[i + random::UniformIndex(rng, total - i)]);
    }
    count = options.sample;
  }

  TranslitModel probe = model;
  ParameterSet& p = probe.mutable_parameters();
  double worst = 0.0;
  for (size_t i = 0; i < count; ++i) {
    double& w = p.Flat(idx[i]);
    const double orig = w;
    w = orig + options.epsilon;
    const double up = probe.Loss(x, y, &pinned);
    w = orig - options.epsilon;
    const double down = probe.Loss(x, y, &pinned);
    w = orig;
    const double fd = (up - down) / (2.0 * options.epsilon);
    const double an = grad.Flat(idx[i]);
    const double denom = std::max({std::abs(an), std::abs(fd), 1e-6});
    worst = std::max(worst, std::abs(an - fd) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Serialization: magic, version, vocabs, config, loss curve, tensor table.
// Little-endian throughout.

namespace {

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'L', 'C', 'B', 'N', 'T', 'M', '\0'};

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    const auto* b = reinterpret_cast<const char*>(&v);
    out_.append(b, sizeof(T));
  }
  void PutString(std::string_view s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    out_.append(s);
  }
  void PutRaw(const void* p, size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T Get() {
    T v;
    Need(sizeof(T));
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string GetString() {
    const auto n = Get<uint32_t>();
    Need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void GetRaw(void* p, size_t n) {
    Need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool AtEnd() const { return pos_ == in_.size(); }

 private:
  void Need(size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "model file is truncated");
  }
  std::string_view in_;
  size_t pos_ = 0;
};

void PutVocab(Writer& w, const Vocab& v) {
  w.Put<uint32_t>(static_cast<uint32_t>(v.size()));
  for (const auto& s : v.symbols()) w.PutString(s);
}

Vocab GetVocab(Reader& r) {
  const auto n = r.Get<uint32_t>();
  std::vector<std::string> symbols;
  for (uint32_t i = 0; i < n; ++i) symbols.push_back(r.GetString());
  return Vocab::FromSymbols(symbols);
}

}  // namespace

std::string SerializeModel(const TranslitModel& model) {
  Writer w;
  w.PutRaw(kMagic, sizeof(kMagic));
  w.Put<uint32_t>(kModelFormatVersion);
  PutVocab(w, model.input_vocab());
  PutVocab(w, model.output_vocab());
  const TranslitConfig& c = model.config();
  w.Put<int32_t>(c.embedding_dim);
  w.Put<int32_t>(c.encoder_hidden_per_direction);
  w.Put<int32_t>(c.decoder_hidden);
  w.Put<double>(c.dropout);
  w.Put<int32_t>(c.batch_size);
  w.Put<double>(c.learning_rate);
  w.Put<int32_t>(c.epochs);
  w.Put<double>(c.grad_clip_norm);
  w.Put<uint64_t>(c.seed);
  w.Put<int32_t>(static_cast<int32_t>(c.optimizer));
  w.Put<double>(c.init_range);
  w.Put<uint32_t>(static_cast<uint32_t>(model.loss_curve().size()));
  for (double v : model.loss_curve()) w.Put<double>(v);
  const auto& tensors = model.parameters().tensors();
  w.Put<uint32_t>(static_cast<uint32_t>(tensors.size()));
  for (const Tensor& t : tensors) {
    w.PutString(t.name);
    w.Put<uint32_t>(static_cast<uint32_t>(t.rows));
    w.Put<uint32_t>(static_cast<uint32_t>(t.cols));
    w.PutRaw(t.data.data(), t.data.size() * sizeof(double));
  }
  return w.Take();
}

TranslitModel DeserializeModel(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kBadFormat, "not a transliteration model file");
  }
  Reader r(bytes.substr(sizeof(kMagic)));
  const auto version = r.Get<uint32_t>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "model format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  Vocab in = GetVocab(r);
  Vocab out = GetVocab(r);
  TranslitConfig c;
  c.embedding_dim = r.Get<int32_t>();
  c.encoder_hidden_per_direction = r.Get<int32_t>();
  c.decoder_hidden = r.Get<int32_t>();
  c.dropout = r.Get<double>();
  c.batch_size = r.Get<int32_t>();
  c.learning_rate = r.Get<double>();
  c.epochs = r.Get<int32_t>();
  c.grad_clip_norm = r.Get<double>();
  c.seed = r.Get<uint64_t>();
  const auto opt = r.Get<int32_t>();
  if (opt != 0 && opt != 1) throw Error(ErrorCode::kBadFormat, "unknown optimizer tag");
  c.optimizer = static_cast<Optimizer>(opt);
  c.init_range = r.Get<double>();
  try {
    c.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadFormat, std::string("invalid stored config: ") + e.what());
  }
  std::vector<double> curve(r.Get<uint32_t>());
  for (double& v : curve) v = r.Get<double>();

  TranslitModel model(std::move(in), std::move(out), c);
  model.set_loss_curve(std::move(curve));
  ParameterSet& params = model.mutable_parameters();
  const auto n = r.Get<uint32_t>();
  if (n != params.num_tensors()) {
    throw Error(ErrorCode::kDimensionMismatch, "unexpected tensor count " + std::to_string(n));
  }
  for (uint32_t i = 0; i < n; ++i) {
    Tensor& t = params[i];
    const std::string name = r.GetString();
    const auto rows = r.Get<uint32_t>();
    const auto cols = r.Get<uint32_t>();
    if (name != t.name || rows != t.rows || cols != t.cols) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "tensor " + name + " [" + std::to_string(rows) + "x" + std::to_string(cols) +
                      "] does not match expected " + t.name + " [" + std::to_string(t.rows) +
                      "x" + std::to_string(t.cols) + "]");
    }
    r.GetRaw(t.data.data(), t.data.size() * sizeof(double));
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kBadFormat, "trailing bytes after tensor table");
  return model;
}

void SaveModel(const TranslitModel& model, const std::filesystem::path& path) {
  io::WriteFile(path, SerializeModel(model));
}

TranslitModel LoadModel(const std::filesystem::path& path) {
  return DeserializeModel(io::ReadFile(path));
}

std::string FormatLossCurve(const std::vector<double>& curve, std::string_view header) {
  std::string out(header);
  out += "epoch,mean_loss\n";
  for (size_t i = 0; i < curve.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += io::FormatFixed(curve[i], 10);
    out += '\n';
  }
  return out;
}

}  // namespace clcbn::translit
