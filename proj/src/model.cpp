// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace plab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration and layout

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::config, "model config: " + what); };
  if (vocab_size <= special::kCount) fail("vocab_size must exceed the special tokens");
  if (d_model <= 0 || n_layers <= 0 || n_heads <= 0 || d_ff <= 0 || max_seq_len <= 0) {
    fail("dimensions must be positive");
  }
  if (d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
}

std::string config_to_json(const ModelConfig& c) {
  return json{{"vocab_size", c.vocab_size}, {"d_model", c.d_model},         {"n_layers", c.n_layers},
              {"n_heads", c.n_heads},       {"d_ff", c.d_ff},               {"max_seq_len", c.max_seq_len},
              {"tie_embeddings", c.tie_embeddings}}
      .dump();
}

ModelConfig config_from_json(std::string_view text) {
  json j = json::parse(text);
  ModelConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.d_model = j.value("d_model", c.d_model);
  c.n_layers = j.value("n_layers", c.n_layers);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.d_ff = j.value("d_ff", c.d_ff);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.tie_embeddings = j.value("tie_embeddings", c.tie_embeddings);
  return c;
}

ParamLayout ParamLayout::for_config(const ModelConfig& c) {
  c.validate();
  ParamLayout layout;
  auto add = [&](std::string name, Index rows, Index cols) {
    layout.tensors.push_back({std::move(name), rows, cols, layout.total});
    layout.total += rows * cols;
    return layout.tensors.size() - 1;
  };
  const Index d = c.d_model;
  layout.tok_emb = add("tok_emb", c.vocab_size, d);
  layout.pos_emb = add("pos_emb", c.max_seq_len, d);
  for (int l = 0; l < c.n_layers; ++l) {
    const std::string p = "layers." + std::to_string(l) + ".";
    LayerSlots s{};
    s.ln1_scale = add(p + "ln1.scale", 1, d);
    s.ln1_shift = add(p + "ln1.shift", 1, d);
    s.wq = add(p + "attn.wq", d, d);
    s.wk = add(p + "attn.wk", d, d);
    s.wv = add(p + "attn.wv", d, d);
    s.wo = add(p + "attn.wo", d, d);
    s.ln2_scale = add(p + "ln2.scale", 1, d);
    s.ln2_shift = add(p + "ln2.shift", 1, d);
    s.ff_in = add(p + "ffn.w_in", d, c.d_ff);
    s.ff_out = add(p + "ffn.w_out", c.d_ff, d);
    layout.layers.push_back(s);
  }
  layout.final_scale = add("final_norm.scale", 1, d);
  layout.final_shift = add("final_norm.shift", 1, d);
  if (!c.tie_embeddings) layout.lm_head = add("lm_head", d, c.vocab_size);
  return layout;
}

std::size_t ParamLayout::find(std::string_view name) const {
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].name == name) return i;
  }
  throw Error(Errc::invalid_argument, "no tensor named '" + std::string(name) + "'");
}

Index parameter_count(const ModelConfig& c) {
  const Index d = c.d_model, v = c.vocab_size, f = c.d_ff;
  Index per_layer = 4 * d * d + 2 * d * f + 4 * d;
  return v * d + Index{c.max_seq_len} * d + c.n_layers * per_layer + 2 * d + (c.tie_embeddings ? 0 : d * v);
}

// ---------------------------------------------------------------------------
// Batch

Batch Batch::from_sequences(std::span<const std::vector<TokenId>> seqs,
                            std::span<const std::vector<std::uint8_t>> masks) {
  if (seqs.empty()) throw Error(Errc::invalid_argument, "empty batch");
  if (masks.size() != seqs.size()) throw Error(Errc::invalid_argument, "mask count differs from sequences");
  std::size_t width = 0;
  for (const auto& s : seqs) width = std::max(width, s.size());
  Batch b;
  b.ids.setConstant(static_cast<Index>(seqs.size()), static_cast<Index>(width), special::kPad);
  b.loss_mask.setZero(static_cast<Index>(seqs.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].empty()) throw Error(Errc::invalid_argument, "empty sequence in batch");
    if (masks[i].size() != seqs[i].size()) throw Error(Errc::invalid_argument, "mask length differs");
    b.lengths.push_back(static_cast<int>(seqs[i].size()));
    for (std::size_t t = 0; t < seqs[i].size(); ++t) {
      b.ids(i, t) = seqs[i][t];
      b.loss_mask(i, t) = (t == 0 || seqs[i][t] == special::kPad) ? 0 : (masks[i][t] ? 1 : 0);
    }
  }
  return b;
}

Batch Batch::from_sequences(std::span<const std::vector<TokenId>> seqs) {
  std::vector<std::vector<std::uint8_t>> masks;
  for (const auto& s : seqs) masks.emplace_back(s.size(), 0);
  return from_sequences(seqs, masks);
}

Index Batch::total_tokens() const {
  Index n = 0;
  for (int l : lengths) n += l;
  return n;
}

std::vector<Index> Batch::row_offsets() const {
  std::vector<Index> offsets(lengths.size());
  Index acc = 0;
  for (std::size_t b = 0; b < lengths.size(); ++b) {
    offsets[b] = acc;
    acc += lengths[b];
  }
  return offsets;
}

std::uint64_t Batch::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(ids.rows()));
  mix(static_cast<std::uint64_t>(ids.cols()));
  for (Index i = 0; i < ids.size(); ++i) mix(static_cast<std::uint64_t>(ids.data()[i]));
  for (Index i = 0; i < loss_mask.size(); ++i) mix(loss_mask.data()[i]);
  for (int l : lengths) mix(static_cast<std::uint64_t>(l));
  return h;
}

Index Batch::mask_count() const {
  Index n = 0;
  for (Index b = 0; b < size(); ++b) {
    for (Index t = 1; t < lengths[b]; ++t) n += loss_mask(b, t) ? 1 : 0;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Building blocks

namespace {

constexpr double kLayerNormEps = 1e-5;

template <typename S>
void layer_norm(const RowMatrix<S>& x, ConstMatrixMap<S> scale, ConstMatrixMap<S> shift, RowMatrix<S>& xhat,
                Vector<S>& rstd, RowMatrix<S>& y) {
  const Index n = x.rows();
  xhat.resize(n, x.cols());
  rstd.resize(n);
  for (Index r = 0; r < n; ++r) {
    const S mean = x.row(r).mean();
    xhat.row(r) = x.row(r).array() - mean;
    const S var = xhat.row(r).squaredNorm() / static_cast<S>(x.cols());
    rstd(r) = S(1) / std::sqrt(var + static_cast<S>(kLayerNormEps));
    xhat.row(r) *= rstd(r);
  }
  y = (xhat.array().rowwise() * scale.row(0).array()).rowwise() + shift.row(0).array();
}

// Returns dx and accumulates the scale/shift gradients.
template <typename S>
RowMatrix<S> layer_norm_backward(const RowMatrix<S>& dy, const RowMatrix<S>& xhat, const Vector<S>& rstd,
                                 ConstMatrixMap<S> scale, MatrixMap<S> dscale, MatrixMap<S> dshift) {
  dshift.row(0) += dy.colwise().sum();
  dscale.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  RowMatrix<S> dxhat = dy.array().rowwise() * scale.row(0).array();
  const S inv_d = S(1) / static_cast<S>(dy.cols());
  for (Index r = 0; r < dy.rows(); ++r) {
    const S m1 = dxhat.row(r).sum() * inv_d;
    const S m2 = dxhat.row(r).dot(xhat.row(r)) * inv_d;
    dxhat.row(r) = rstd(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
  }
  return dxhat;
}

template <typename S>
constexpr S kGeluC = static_cast<S>(0.7978845608028654);  // sqrt(2 / pi)
template <typename S>
constexpr S kGeluA = static_cast<S>(0.044715);

template <typename S>
void gelu(const RowMatrix<S>& u, RowMatrix<S>& out) {
  const auto x = u.array();
  out = (S(0.5) * x * (S(1) + (kGeluC<S> * (x + kGeluA<S> * x.cube())).tanh())).matrix();
}

// d gelu(u) / du, elementwise.
template <typename S>
RowMatrix<S> gelu_grad(const RowMatrix<S>& u) {
  const auto x = u.array();
  const Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t =
      (kGeluC<S> * (x + kGeluA<S> * x.cube())).tanh();
  return (S(0.5) * (S(1) + t) +
          S(0.5) * x * (S(1) - t.square()) * kGeluC<S> * (S(1) + S(3) * kGeluA<S> * x.square()))
      .matrix();
}

// In-place causal softmax of a square score matrix.
template <typename S>
void causal_softmax(RowMatrix<S>& s) {
  const Index n = s.rows();
  for (Index i = 0; i < n; ++i) {
    auto row = s.row(i);
    const S m = row.head(i + 1).maxCoeff();
    row.head(i + 1) = (row.head(i + 1).array() - m).exp();
    row.head(i + 1) /= row.head(i + 1).sum();
    row.tail(n - i - 1).setZero();
  }
}

void check_batch(const ModelConfig& config, const Batch& batch) {
  for (Index b = 0; b < batch.size(); ++b) {
    if (batch.lengths[b] > config.max_seq_len) {
      throw Error(Errc::length_overflow, "sequence of length " + std::to_string(batch.lengths[b]) +
                                             " exceeds max_seq_len " + std::to_string(config.max_seq_len));
    }
    for (Index t = 0; t < batch.lengths[b]; ++t) {
      TokenId id = batch.ids(b, t);
      if (id < 0 || id >= config.vocab_size) {
        throw Error(Errc::unknown_id, "token id " + std::to_string(id) + " outside model vocabulary");
      }
    }
  }
}

// Embedding lookup plus all transformer blocks. Returns the residual stream
// before the final norm. When `caches` is null nothing is retained.
template <typename S>
RowMatrix<S> run_layers(const Params<S>& p, const Batch& batch, const std::vector<Index>& offsets,
                        std::vector<LayerCache<S>>* caches) {
  const ModelConfig& c = p.config();
  const ParamLayout& lay = p.layout();
  const Index n = batch.total_tokens();
  const Index d = c.d_model, heads = c.n_heads, dh = c.head_dim();
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));

  RowMatrix<S> x(n, d);
  auto tok = p.tensor(lay.tok_emb);
  auto pos = p.tensor(lay.pos_emb);
  for (Index b = 0; b < batch.size(); ++b) {
    for (Index t = 0; t < batch.lengths[b]; ++t) {
      x.row(offsets[b] + t) = tok.row(batch.ids(b, t)) + pos.row(t);
    }
  }

  LayerCache<S> scratch;
  for (const LayerSlots& s : lay.layers) {
    LayerCache<S>& lc = caches ? caches->emplace_back() : scratch;
    layer_norm<S>(x, p.tensor(s.ln1_scale), p.tensor(s.ln1_shift), lc.xhat1, lc.rstd1, lc.h1);
    lc.q.noalias() = lc.h1 * p.tensor(s.wq);
    lc.k.noalias() = lc.h1 * p.tensor(s.wk);
    lc.v.noalias() = lc.h1 * p.tensor(s.wv);
    lc.attn.resize(n, d);
    if (caches) lc.probs.resize(static_cast<std::size_t>(batch.size() * heads));
    for (Index b = 0; b < batch.size(); ++b) {
      const Index off = offsets[b], len = batch.lengths[b];
      for (Index h = 0; h < heads; ++h) {
        RowMatrix<S> probs =
            (lc.q.block(off, h * dh, len, dh) * lc.k.block(off, h * dh, len, dh).transpose()) * scale;
        causal_softmax(probs);
        lc.attn.block(off, h * dh, len, dh).noalias() = probs * lc.v.block(off, h * dh, len, dh);
        if (caches) lc.probs[static_cast<std::size_t>(b * heads + h)] = std::move(probs);
      }
    }
    x.noalias() += lc.attn * p.tensor(s.wo);

    layer_norm<S>(x, p.tensor(s.ln2_scale), p.tensor(s.ln2_shift), lc.xhat2, lc.rstd2, lc.h2);
    lc.pre_act.noalias() = lc.h2 * p.tensor(s.ff_in);
    gelu<S>(lc.pre_act, lc.act);
    x.noalias() += lc.act * p.tensor(s.ff_out);
  }
  return x;
}

template <typename S>
void apply_head(const Params<S>& p, const RowMatrix<S>& h, RowMatrix<S>& logits) {
  const ParamLayout& lay = p.layout();
  if (p.config().tie_embeddings) {
    logits.noalias() = h * p.tensor(lay.tok_emb).transpose();
  } else {
    logits.noalias() = h * p.tensor(lay.lm_head);
  }
}

template <typename S>
S log_sum_exp(const Eigen::Ref<const RowVector<S>>& row) {
  const S m = row.maxCoeff();
  return m + std::log((row.array() - m).exp().sum());
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations

template <typename S>
Params<S> init_params(const ModelConfig& config, std::uint64_t seed) {
  Params<S> p(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  const ParamLayout& lay = p.layout();
  for (std::size_t i = 0; i < lay.tensors.size(); ++i) {
    const std::string& name = lay.tensors[i].name;
    auto t = p.tensor(i);
    if (name.ends_with(".scale")) {
      t.setOnes();
    } else if (name.ends_with(".shift")) {
      t.setZero();
    } else {
      for (Index k = 0; k < t.size(); ++k) t.data()[k] = static_cast<S>(normal(rng));
    }
  }
  return p;
}

template <typename S>
ForwardCache<S> forward(const Params<S>& params, const Batch& batch) {
  check_batch(params.config(), batch);
  const ParamLayout& lay = params.layout();
  ForwardCache<S> cache;
  cache.batch_fingerprint = batch.fingerprint();
  cache.logits.offsets = batch.row_offsets();
  cache.logits.lengths = batch.lengths;
  cache.layers.reserve(lay.layers.size());
  RowMatrix<S> x = run_layers(params, batch, cache.logits.offsets, &cache.layers);
  layer_norm<S>(x, params.tensor(lay.final_scale), params.tensor(lay.final_shift), cache.final_xhat,
                cache.final_rstd, cache.final_out);
  apply_head(params, cache.final_out, cache.logits.values);
  return cache;
}

template <typename S>
RowMatrix<S> forward_rows(const Params<S>& params, const Batch& batch, std::span<const Index> rows) {
  check_batch(params.config(), batch);
  const ParamLayout& lay = params.layout();
  RowMatrix<S> x = run_layers<S>(params, batch, batch.row_offsets(), nullptr);
  RowMatrix<S> picked(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) picked.row(static_cast<Index>(i)) = x.row(rows[i]);
  RowMatrix<S> xhat, h, logits;
  Vector<S> rstd;
  layer_norm<S>(picked, params.tensor(lay.final_scale), params.tensor(lay.final_shift), xhat, rstd, h);
  apply_head(params, h, logits);
  return logits;
}

template <typename S>
LossValue nll_loss(const Logits<S>& logits, const Batch& batch) {
  double total = 0.0;
  Index count = 0;
  for (Index b = 0; b < batch.size(); ++b) {
    for (Index t = 1; t < batch.lengths[b]; ++t) {
      if (!batch.loss_mask(b, t)) continue;
      const Index r = logits.row(b, t - 1);
      const S lse = log_sum_exp<S>(logits.values.row(r));
      total += static_cast<double>(lse - logits.values(r, batch.ids(b, t)));
      ++count;
    }
  }
  if (count == 0) throw Error(Errc::all_masked, "loss mask selects no target");
  return {total / static_cast<double>(count), count};
}

template <typename S>
RowMatrix<S> loss_gradient(const Logits<S>& logits, const Batch& batch) {
  const Index count = batch.mask_count();
  RowMatrix<S> grad = RowMatrix<S>::Zero(logits.values.rows(), logits.values.cols());
  if (count == 0) return grad;
  const S weight = S(1) / static_cast<S>(count);
  for (Index b = 0; b < batch.size(); ++b) {
    for (Index t = 1; t < batch.lengths[b]; ++t) {
      if (!batch.loss_mask(b, t)) continue;
      const Index r = logits.row(b, t - 1);
      const S lse = log_sum_exp<S>(logits.values.row(r));
      grad.row(r) = (logits.values.row(r).array() - lse).exp() * weight;
      grad(r, batch.ids(b, t)) -= weight;
    }
  }
  return grad;
}

template <typename S>
Gradients<S> backward_from(const Params<S>& params, const ForwardCache<S>& cache, const Batch& batch,
                           const RowMatrix<S>& dlogits) {
  if (cache.batch_fingerprint != batch.fingerprint() || cache.layers.size() != params.layout().layers.size()) {
    throw Error(Errc::cache_mismatch, "forward cache was produced from a different batch or model");
  }
  const ModelConfig& c = params.config();
  const ParamLayout& lay = params.layout();
  const Index n = dlogits.rows();
  const Index d = c.d_model, heads = c.n_heads, dh = c.head_dim();
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));
  const std::vector<Index>& offsets = cache.logits.offsets;

  Gradients<S> g = params.zeros_like();
  RowMatrix<S> dh_final;
  if (c.tie_embeddings) {
    dh_final.noalias() = dlogits * params.tensor(lay.tok_emb);
    g.tensor(lay.tok_emb).noalias() += dlogits.transpose() * cache.final_out;
  } else {
    dh_final.noalias() = dlogits * params.tensor(lay.lm_head).transpose();
    g.tensor(lay.lm_head).noalias() += cache.final_out.transpose() * dlogits;
  }
  RowMatrix<S> dx = layer_norm_backward<S>(dh_final, cache.final_xhat, cache.final_rstd,
                                           params.tensor(lay.final_scale), g.tensor(lay.final_scale),
                                           g.tensor(lay.final_shift));

  RowMatrix<S> dact, dpre, dh2, dattn, dq, dk, dv, dh1;
  for (std::size_t l = lay.layers.size(); l-- > 0;) {
    const LayerSlots& s = lay.layers[l];
    const LayerCache<S>& lc = cache.layers[l];

    // Feed-forward block.
    g.tensor(s.ff_out).noalias() += lc.act.transpose() * dx;
    dact.noalias() = dx * params.tensor(s.ff_out).transpose();
    dpre = dact.cwiseProduct(gelu_grad<S>(lc.pre_act));
    g.tensor(s.ff_in).noalias() += lc.h2.transpose() * dpre;
    dh2.noalias() = dpre * params.tensor(s.ff_in).transpose();
    dx += layer_norm_backward<S>(dh2, lc.xhat2, lc.rstd2, params.tensor(s.ln2_scale), g.tensor(s.ln2_scale),
                                 g.tensor(s.ln2_shift));

    // Attention block.
    g.tensor(s.wo).noalias() += lc.attn.transpose() * dx;
    dattn.noalias() = dx * params.tensor(s.wo).transpose();
    dq.setZero(n, d);
    dk.setZero(n, d);
    dv.setZero(n, d);
    for (Index b = 0; b < batch.size(); ++b) {
      const Index off = offsets[b], len = batch.lengths[b];
      for (Index h = 0; h < heads; ++h) {
        const RowMatrix<S>& probs = lc.probs[static_cast<std::size_t>(b * heads + h)];
        auto da = dattn.block(off, h * dh, len, dh);
        RowMatrix<S> dprobs = da * lc.v.block(off, h * dh, len, dh).transpose();
        dv.block(off, h * dh, len, dh).noalias() += probs.transpose() * da;
        Vector<S> row_dot = (probs.array() * dprobs.array()).rowwise().sum();
        RowMatrix<S> dscores = probs.array() * (dprobs.array().colwise() - row_dot.array());
        dq.block(off, h * dh, len, dh).noalias() = (dscores * lc.k.block(off, h * dh, len, dh)) * scale;
        dk.block(off, h * dh, len, dh).noalias() =
            (dscores.transpose() * lc.q.block(off, h * dh, len, dh)) * scale;
      }
    }
    g.tensor(s.wq).noalias() += lc.h1.transpose() * dq;
    g.tensor(s.wk).noalias() += lc.h1.transpose() * dk;
    g.tensor(s.wv).noalias() += lc.h1.transpose() * dv;
    dh1.noalias() = dq * params.tensor(s.wq).transpose();
    dh1.noalias() += dk * params.tensor(s.wk).transpose();
    dh1.noalias() += dv * params.tensor(s.wv).transpose();
    dx += layer_norm_backward<S>(dh1, lc.xhat1, lc.rstd1, params.tensor(s.ln1_scale), g.tensor(s.ln1_scale),
                                 g.tensor(s.ln1_shift));
  }

  auto dtok = g.tensor(lay.tok_emb);
  auto dpos = g.tensor(lay.pos_emb);
  for (Index b = 0; b < batch.size(); ++b) {
    for (Index t = 0; t < batch.lengths[b]; ++t) {
      const Index r = offsets[b] + t;
      dtok.row(batch.ids(b, t)) += dx.row(r);
      dpos.row(t) += dx.row(r);
    }
  }
  return g;
}

template <typename S>
Gradients<S> backward(const Params<S>& params, const ForwardCache<S>& cache, const Batch& batch) {
  return backward_from(params, cache, batch, loss_gradient(cache.logits, batch));
}

template <typename S>
LossAndGrad<S> loss_and_grad(const Params<S>& params, const Batch& batch) {
  ForwardCache<S> cache = forward(params, batch);
  LossValue loss = nll_loss(cache.logits, batch);
  return {loss, backward(params, cache, batch)};
}

template <typename S>
std::vector<std::vector<TokenId>> generate_greedy_batch(const Params<S>& params,
                                                        std::span<const std::vector<TokenId>> prompts,
                                                        int max_new, std::span<const TokenId> stop_ids) {
  std::vector<std::vector<TokenId>> seqs(prompts.begin(), prompts.end());
  std::vector<std::vector<TokenId>> produced(prompts.size());
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (prompts[i].empty()) throw Error(Errc::invalid_argument, "empty prompt");
    active.push_back(i);
  }
  const auto max_len = static_cast<std::size_t>(params.config().max_seq_len);
  for (int step = 0; step < max_new && !active.empty(); ++step) {
    std::erase_if(active, [&](std::size_t i) { return seqs[i].size() >= max_len; });
    if (active.empty()) break;
    std::vector<std::vector<TokenId>> batch_seqs;
    batch_seqs.reserve(active.size());
    for (std::size_t i : active) batch_seqs.push_back(seqs[i]);
    Batch batch = Batch::from_sequences(batch_seqs);
    std::vector<Index> rows;
    Index acc = 0;
    for (int len : batch.lengths) {
      acc += len;
      rows.push_back(acc - 1);
    }
    RowMatrix<S> logits = forward_rows(params, batch, rows);
    std::vector<std::size_t> still;
    for (std::size_t k = 0; k < active.size(); ++k) {
      Index next = 0;
      logits.row(static_cast<Index>(k)).maxCoeff(&next);
      const auto tok = static_cast<TokenId>(next);
      seqs[active[k]].push_back(tok);
      produced[active[k]].push_back(tok);
      if (std::find(stop_ids.begin(), stop_ids.end(), tok) == stop_ids.end()) still.push_back(active[k]);
    }
    active = std::move(still);
  }
  return produced;
}

template <typename S>
std::vector<TokenId> generate_greedy(const Params<S>& params, std::span<const TokenId> prompt, int max_new,
                                     std::span<const TokenId> stop_ids) {
  if (prompt.empty()) throw Error(Errc::invalid_argument, "empty prompt");
  std::vector<std::vector<TokenId>> one{std::vector<TokenId>(prompt.begin(), prompt.end())};
  std::vector<TokenId> out(prompt.begin(), prompt.end());
  auto produced = generate_greedy_batch(params, std::span<const std::vector<TokenId>>(one), max_new, stop_ids);
  out.insert(out.end(), produced[0].begin(), produced[0].end());
  return out;
}

#define PLAB_MODEL_INSTANTIATE(S)                                                                          \
  template Params<S> init_params<S>(const ModelConfig&, std::uint64_t);                                    \
  template ForwardCache<S> forward<S>(const Params<S>&, const Batch&);                                     \
  template RowMatrix<S> forward_rows<S>(const Params<S>&, const Batch&, std::span<const Index>);           \
  template LossValue nll_loss<S>(const Logits<S>&, const Batch&);                                          \
  template RowMatrix<S> loss_gradient<S>(const Logits<S>&, const Batch&);                                  \
  template Gradients<S> backward<S>(const Params<S>&, const ForwardCache<S>&, const Batch&);               \
  template Gradients<S> backward_from<S>(const Params<S>&, const ForwardCache<S>&, const Batch&,           \
                                         const RowMatrix<S>&);                                             \
  template LossAndGrad<S> loss_and_grad<S>(const Params<S>&, const Batch&);                                \
  template std::vector<TokenId> generate_greedy<S>(const Params<S>&, std::span<const TokenId>, int,        \
                                                   std::span<const TokenId>);                              \
  template std::vector<std::vector<TokenId>> generate_greedy_batch<S>(                                     \
      const Params<S>&, std::span<const std::vector<TokenId>>, int, std::span<const TokenId>);

PLAB_MODEL_INSTANTIATE(float)
PLAB_MODEL_INSTANTIATE(double)

}  // namespace plab
