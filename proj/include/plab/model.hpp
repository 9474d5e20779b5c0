// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Decoder-only transformer with hand-written forward and backward passes.
//
// All parameters live in one flat Eigen vector; named tensors are row-major
// Eigen::Map views into it. Optimizers therefore work on plain vectors while
// the model code works on matrices. Everything is templated on the scalar so
// the same code runs in float for training and in double for gradient checks.
//
// Activations are packed: the rows of sequence b occupy
// [offsets[b], offsets[b] + lengths[b]) of every activation matrix, padding is
// never computed.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "plab/common.hpp"
#include "plab/tokenizer.hpp"

namespace plab {

template <typename S>
using RowMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using RowVector = Eigen::Matrix<S, 1, Eigen::Dynamic>;
template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatrixMap = Eigen::Map<RowMatrix<S>>;
template <typename S>
using ConstMatrixMap = Eigen::Map<const RowMatrix<S>>;

using Index = Eigen::Index;

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 128;
  int n_layers = 4;
  int n_heads = 4;
  int d_ff = 512;
  int max_seq_len = 256;
  bool tie_embeddings = true;

  void validate() const;
  int head_dim() const { return d_model / n_heads; }
  bool operator==(const ModelConfig&) const = default;
};

std::string config_to_json(const ModelConfig& c);
ModelConfig config_from_json(std::string_view text);

struct TensorInfo {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  Index offset = 0;  // into the flat parameter vector
  Index size() const { return rows * cols; }
};

struct LayerSlots {
  std::size_t ln1_scale, ln1_shift, wq, wk, wv, wo, ln2_scale, ln2_shift, ff_in, ff_out;
};

/// Names, shapes and flat offsets of every tensor; derived from the config alone.
struct ParamLayout {
  std::vector<TensorInfo> tensors;
  std::size_t tok_emb = 0;
  std::size_t pos_emb = 0;
  std::vector<LayerSlots> layers;
  std::size_t final_scale = 0;
  std::size_t final_shift = 0;
  std::size_t lm_head = 0;  // valid only when untied
  Index total = 0;

  static ParamLayout for_config(const ModelConfig& config);
  std::size_t find(std::string_view name) const;
};

/// Closed-form parameter count, kept independent of ParamLayout.
Index parameter_count(const ModelConfig& config);

template <typename S>
class Params {
 public:
  Params() = default;
  explicit Params(const ModelConfig& config)
      : config_(config),
        layout_(std::make_shared<const ParamLayout>(ParamLayout::for_config(config))),
        flat_(Vector<S>::Zero(layout_->total)) {}

  const ModelConfig& config() const { return config_; }
  const ParamLayout& layout() const { return *layout_; }
  Vector<S>& flat() { return flat_; }
  const Vector<S>& flat() const { return flat_; }

  MatrixMap<S> tensor(std::size_t i) {
    const TensorInfo& t = layout_->tensors[i];
    return MatrixMap<S>(flat_.data() + t.offset, t.rows, t.cols);
  }
  ConstMatrixMap<S> tensor(std::size_t i) const {
    const TensorInfo& t = layout_->tensors[i];
    return ConstMatrixMap<S>(flat_.data() + t.offset, t.rows, t.cols);
  }
  MatrixMap<S> tensor(std::string_view name) { return tensor(layout_->find(name)); }
  ConstMatrixMap<S> tensor(std::string_view name) const { return tensor(layout_->find(name)); }

  /// Zero-valued tensor set with the same layout (gradient buffers).
  Params zeros_like() const {
    Params p = *this;
    p.flat_.setZero();
    return p;
  }

  template <typename T>
  Params<T> cast() const {
    Params<T> out(config_);
    out.flat() = flat_.template cast<T>();
    return out;
  }

 private:
  ModelConfig config_;
  std::shared_ptr<const ParamLayout> layout_;
  Vector<S> flat_;
};

template <typename S>
using Gradients = Params<S>;

/// Padded token matrix plus target mask. mask(b, t) == 1 makes ids(b, t) a
/// prediction target (predicted from positions < t), so column 0 is always 0.
struct Batch {
  Eigen::Array<TokenId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ids;
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> loss_mask;
  std::vector<int> lengths;

  static Batch from_sequences(std::span<const std::vector<TokenId>> seqs,
                              std::span<const std::vector<std::uint8_t>> masks);
  static Batch from_sequences(std::span<const std::vector<TokenId>> seqs);  // all-zero mask

  Index size() const { return static_cast<Index>(lengths.size()); }
  Index total_tokens() const;
  std::vector<Index> row_offsets() const;
  std::uint64_t fingerprint() const;
  Index mask_count() const;
};

/// Logits for every real (non-pad) position, packed as described above.
template <typename S>
struct Logits {
  RowMatrix<S> values;
  std::vector<Index> offsets;
  std::vector<int> lengths;

  Index row(Index b, Index t) const { return offsets[b] + t; }
};

template <typename S>
struct LayerCache {
  RowMatrix<S> xhat1, h1, q, k, v, attn, xhat2, h2, pre_act, act;
  Vector<S> rstd1, rstd2;
  std::vector<RowMatrix<S>> probs;  // [sequence * n_heads + head], causal T x T
};

template <typename S>
struct ForwardCache {
  Logits<S> logits;
  std::vector<LayerCache<S>> layers;
  RowMatrix<S> final_xhat, final_out;
  Vector<S> final_rstd;
  std::uint64_t batch_fingerprint = 0;
};

struct LossValue {
  double loss = 0.0;
  Index count = 0;
};

template <typename S>
Params<S> init_params(const ModelConfig& config, std::uint64_t seed);

template <typename S>
ForwardCache<S> forward(const Params<S>& params, const Batch& batch);

/// Logits at the selected packed rows only; same layer stack as forward().
template <typename S>
RowMatrix<S> forward_rows(const Params<S>& params, const Batch& batch, std::span<const Index> rows);

/// Mean masked negative log-likelihood; throws all_masked when nothing is a target.
template <typename S>
LossValue nll_loss(const Logits<S>& logits, const Batch& batch);

/// d loss / d logits, zero on rows whose next target is masked out.
template <typename S>
RowMatrix<S> loss_gradient(const Logits<S>& logits, const Batch& batch);

template <typename S>
Gradients<S> backward(const Params<S>& params, const ForwardCache<S>& cache, const Batch& batch);

/// Backward pass from an explicit logits gradient (lets tests inject one).
template <typename S>
Gradients<S> backward_from(const Params<S>& params, const ForwardCache<S>& cache, const Batch& batch,
                           const RowMatrix<S>& dlogits);

template <typename S>
struct LossAndGrad {
  LossValue loss;
  Gradients<S> grads;
};

template <typename S>
LossAndGrad<S> loss_and_grad(const Params<S>& params, const Batch& batch);

/// Appends argmax tokens until a stop id is produced or max_new tokens exist.
/// The returned vector starts with the prompt.
template <typename S>
std::vector<TokenId> generate_greedy(const Params<S>& params, std::span<const TokenId> prompt, int max_new,
                                     std::span<const TokenId> stop_ids);

/// Greedy continuation of many prompts at once; returns only the new tokens.
template <typename S>
std::vector<std::vector<TokenId>> generate_greedy_batch(const Params<S>& params,
                                                        std::span<const std::vector<TokenId>> prompts,
                                                        int max_new, std::span<const TokenId> stop_ids);

// Checkpoint: "PLAB1\0", NUL-terminated JSON header, little-endian float32 data.
void save_checkpoint(const Params<float>& params, const std::string& path);
Params<float> load_checkpoint(const std::string& path);

#define PLAB_MODEL_EXTERN(S)                                                                              \
  extern template Params<S> init_params<S>(const ModelConfig&, std::uint64_t);                            \
  extern template ForwardCache<S> forward<S>(const Params<S>&, const Batch&);                             \
  extern template RowMatrix<S> forward_rows<S>(const Params<S>&, const Batch&, std::span<const Index>);   \
  extern template LossValue nll_loss<S>(const Logits<S>&, const Batch&);                                  \
  extern template RowMatrix<S> loss_gradient<S>(const Logits<S>&, const Batch&);                          \
  extern template Gradients<S> backward<S>(const Params<S>&, const ForwardCache<S>&, const Batch&);       \
  extern template Gradients<S> backward_from<S>(const Params<S>&, const ForwardCache<S>&, const Batch&,   \
                                                const RowMatrix<S>&);                                     \
  extern template LossAndGrad<S> loss_and_grad<S>(const Params<S>&, const Batch&);                        \
  extern template std::vector<TokenId> generate_greedy<S>(const Params<S>&, std::span<const TokenId>, int, \
                                                          std::span<const TokenId>);                      \
  extern template std::vector<std::vector<TokenId>> generate_greedy_batch<S>(                             \
      const Params<S>&, std::span<const std::vector<TokenId>>, int, std::span<const TokenId>);

PLAB_MODEL_EXTERN(float)
PLAB_MODEL_EXTERN(double)
#undef PLAB_MODEL_EXTERN

}  // namespace plab
