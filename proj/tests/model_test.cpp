// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/model.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>

namespace plab {
namespace {

ModelConfig tiny_config(bool tied = true) {
  ModelConfig c;
  c.vocab_size = 11;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_seq_len = 8;
  c.tie_embeddings = tied;
  return c;
}

Batch random_batch(const ModelConfig& c, std::mt19937_64& rng, bool answer_only) {
  std::uniform_int_distribution<int> n_seq(1, 3), len(2, c.max_seq_len), tok(0, c.vocab_size - 1);
  std::vector<std::vector<TokenId>> seqs(n_seq(rng));
  std::vector<std::vector<std::uint8_t>> masks;
  for (auto& s : seqs) {
    const int n = len(rng);
    for (int t = 0; t < n; ++t) s.push_back(t == 0 ? special::kBos : tok(rng));
    std::vector<std::uint8_t> m(n, 1);
    // answer-only masks keep a suffix, as instruction tuning does
    if (answer_only) {
      const int cut = std::uniform_int_distribution<int>(1, n - 1)(rng);
      for (int t = 0; t < cut; ++t) m[t] = 0;
    }
    masks.push_back(std::move(m));
  }
  return Batch::from_sequences(seqs, masks);
}

double loss_at(const Params<double>& p, const Batch& b) { return nll_loss(forward(p, b).logits, b).loss; }

TEST(ModelTest, ParameterCountMatchesLayout) {
  for (bool tied : {true, false}) {
    ModelConfig c;
    c.vocab_size = 300;
    c.tie_embeddings = tied;
    EXPECT_EQ(ParamLayout::for_config(c).total, parameter_count(c));
  }
  ModelConfig c;
  c.vocab_size = 100;
  // 100*128 + 256*128 + 4*(4*128*128 + 2*128*512 + 4*128) + 2*128
  EXPECT_EQ(parameter_count(c), 45568 + 4 * 197120 + 256);
}

TEST(ModelTest, InitStatistics) {
  ModelConfig c;
  c.vocab_size = 500;
  auto p = init_params<float>(c, 3);
  auto w = p.tensor("layers.0.attn.wq");
  double mean = w.cast<double>().mean();
  double sd = std::sqrt((w.cast<double>().array() - mean).square().mean());
  EXPECT_NEAR(mean, 0.0, 2e-3);
  EXPECT_NEAR(sd, 0.02, 5e-4);
  EXPECT_TRUE((p.tensor("layers.2.ln1.scale").array() == 1.0f).all());
  EXPECT_TRUE((p.tensor("final_norm.shift").array() == 0.0f).all());
  EXPECT_EQ(init_params<float>(c, 3).flat(), p.flat());
}

TEST(ModelTest, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig c = tiny_config(trial % 2 == 0);
    auto p = init_params<double>(c, 100 + trial);
    // larger weights make the check sensitive to every term
    p.flat() *= 10.0;
    Batch b = random_batch(c, rng, trial % 3 == 0);
    if (b.mask_count() == 0) continue;
    auto g = loss_and_grad(p, b).grads;
    std::uniform_int_distribution<Index> pick(0, p.flat().size() - 1);
    for (int k = 0; k < 40; ++k) {
      const Index i = pick(rng);
      const double h = 1e-5, saved = p.flat()(i);
      p.flat()(i) = saved + h;
      const double up = loss_at(p, b);
      p.flat()(i) = saved - h;
      const double down = loss_at(p, b);
      p.flat()(i) = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = std::abs(numeric - g.flat()(i)) / std::max(1e-6, std::abs(numeric) + std::abs(g.flat()(i)));
      worst = std::max(worst, err);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(ModelTest, CausalPrefixLogitsAreUnchanged) {
  ModelConfig c = tiny_config();
  auto p = init_params<double>(c, 5);
  std::vector<std::vector<TokenId>> a{{0, 6, 7, 8, 9}}, b{{0, 6, 7, 10, 6}};
  auto la = forward(p, Batch::from_sequences(a)).logits.values;
  auto lb = forward(p, Batch::from_sequences(b)).logits.values;
  EXPECT_EQ(la.topRows(3), lb.topRows(3));
  EXPECT_NE(la.row(3), lb.row(3));
}

TEST(ModelTest, PaddingDoesNotLeakAcrossSequences) {
  ModelConfig c = tiny_config();
  auto p = init_params<double>(c, 5);
  std::vector<std::vector<TokenId>> alone{{0, 6, 7}}, both{{0, 6, 7}, {0, 8, 9, 10, 6, 7}};
  auto la = forward(p, Batch::from_sequences(alone)).logits.values;
  auto lb = forward(p, Batch::from_sequences(both)).logits.values;
  EXPECT_TRUE(la.isApprox(lb.topRows(3), 1e-14));
}

TEST(ModelTest, ForwardRowsAgreesWithForward) {
  ModelConfig c = tiny_config();
  auto p = init_params<float>(c, 9);
  std::vector<std::vector<TokenId>> s{{0, 6, 7}, {0, 8, 9, 10}};
  Batch b = Batch::from_sequences(s);
  auto full = forward(p, b).logits.values;
  std::vector<Index> rows{2, 6};
  auto some = forward_rows(p, b, rows);
  // GEMM blocking differs with the row count, so equality is up to rounding
  EXPECT_TRUE(some.row(0).isApprox(full.row(2), 1e-5f));
  EXPECT_TRUE(some.row(1).isApprox(full.row(6), 1e-5f));
}

TEST(ModelTest, UnusedRowsGetZeroGradientWhenUntied) {
  ModelConfig c = tiny_config(false);
  auto p = init_params<double>(c, 2);
  std::vector<std::vector<TokenId>> s{{0, 6, 7}};
  std::vector<std::vector<std::uint8_t>> m{{0, 1, 1}};
  auto g = loss_and_grad(p, Batch::from_sequences(s, m)).grads;
  auto emb = g.tensor("tok_emb");
  for (Index r = 0; r < c.vocab_size; ++r) {
    // the last input position feeds no target, so token 7 only appears as a label
    const bool used = r == 0 || r == 6;
    EXPECT_EQ(emb.row(r).isZero(0.0), !used) << "row " << r;
  }
  EXPECT_TRUE(g.tensor("pos_emb").bottomRows(c.max_seq_len - 2).isZero(0.0));
}

TEST(ModelTest, ErrorsAreTyped) {
  ModelConfig c = tiny_config();
  auto p = init_params<float>(c, 1);
  std::vector<std::vector<TokenId>> too_long{std::vector<TokenId>(9, 6)};
  try {
    forward(p, Batch::from_sequences(too_long));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::length_overflow);
  }
  std::vector<std::vector<TokenId>> bad{{0, 99}};
  try {
    forward(p, Batch::from_sequences(bad));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_id);
  }
  std::vector<std::vector<TokenId>> ok{{0, 6}};
  Batch unmasked = Batch::from_sequences(ok);
  try {
    nll_loss(forward(p, unmasked).logits, unmasked);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::all_masked);
  }
  std::vector<std::vector<TokenId>> other{{0, 7}};
  auto cache = forward(p, unmasked);
  try {
    backward(p, cache, Batch::from_sequences(other));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::cache_mismatch);
  }
}

TEST(ModelTest, UniformLogitsGiveLogVocabLoss) {
  ModelConfig c = tiny_config();
  Params<double> p(c);  // all zeros: norms output zero, logits are uniform
  std::vector<std::vector<TokenId>> s{{0, 6, 7, 8}};
  std::vector<std::vector<std::uint8_t>> m{{0, 1, 1, 1}};
  Batch b = Batch::from_sequences(s, m);
  EXPECT_NEAR(nll_loss(forward(p, b).logits, b).loss, std::log(11.0), 1e-12);
}

TEST(ModelTest, GreedyGenerationStops) {
  ModelConfig c = tiny_config();
  auto p = init_params<float>(c, 4);
  std::vector<TokenId> prompt{0, 6};
  std::vector<TokenId> none;
  auto out = generate_greedy(p, prompt, 3, none);
  EXPECT_EQ(out.size(), 5u);
  EXPECT_EQ(out[0], 0);
  std::vector<TokenId> stop{out[2]};
  EXPECT_EQ(generate_greedy(p, prompt, 3, stop).size(), 3u);
  // never exceeds the context window
  EXPECT_EQ(generate_greedy(p, prompt, 50, none).size(), 8u);
  std::vector<std::vector<TokenId>> prompts{{0, 6}, {0, 7, 8}};
  auto batch = generate_greedy_batch(p, prompts, 3, none);
  EXPECT_EQ(batch[0], std::vector<TokenId>(out.begin() + 2, out.end()));
}

TEST(ModelTest, CheckpointRoundTrip) {
  ModelConfig c = tiny_config(false);
  auto p = init_params<float>(c, 8);
  auto path = (std::filesystem::temp_directory_path() / "plab_model_test.ckpt").string();
  save_checkpoint(p, path);
  auto q = load_checkpoint(path);
  EXPECT_EQ(q.config(), c);
  EXPECT_EQ(q.flat(), p.flat());
  std::FILE* f = std::fopen(path.c_str(), "rb");
  char magic[6];
  ASSERT_EQ(std::fread(magic, 1, 6, f), 6u);
  std::fclose(f);
  EXPECT_EQ(std::string(magic, 6), std::string("PLAB1\0", 6));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace plab
