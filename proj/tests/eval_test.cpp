// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "plab/corpus.hpp"
#include "plab/eval.hpp"
#include "plab/tokenizer.hpp"

namespace plab {
namespace {

template <typename F>
void expect_code(Errc code, F&& f) {
  try {
    f();
    FAIL() << "expected " << errc_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

ModelConfig small_config(int vocab) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = 16;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 32;
  c.max_seq_len = 64;
  return c;
}

// Logits are the final-norm shift projected through the head, whatever the
// input, so the argmax is always `gold`.
Params<float> constant_model(int vocab, TokenId gold) {
  ModelConfig c = small_config(vocab);
  c.tie_embeddings = false;
  Params<float> p(c);
  p.tensor("final_norm.shift").setOnes();
  p.tensor("lm_head").col(gold).setOnes();
  return p;
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_answer("Santa Clarita."), "santa clarita");
  EXPECT_EQ(normalize_answer("  SANTA   Clarita "), "santa clarita");
  EXPECT_EQ(normalize_answer(""), "");
  EXPECT_EQ(normalize_answer("\"Intel\""), "intel");
}

TEST(ExactMatch, Examples) {
  EXPECT_EQ(exact_match("Santa Clarita.", "santa clarita"), 1);
  EXPECT_EQ(exact_match("Santa", "Santa Clarita"), 0);
}

TEST(TokenPrf, Oracles) {
  PRF p = token_prf("santa clarita", "santa clarita california");
  EXPECT_NEAR(p.recall, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(p.precision, 1.0, 1e-9);
  EXPECT_NEAR(p.f1, 0.8, 1e-9);
  PRF same = token_prf("Rice University", "rice university");
  EXPECT_NEAR(same.precision, 1.0, 1e-9);
  EXPECT_NEAR(same.recall, 1.0, 1e-9);
  EXPECT_NEAR(same.f1, 1.0, 1e-9);
  PRF disjoint = token_prf("Intel", "Rice University");
  EXPECT_EQ(disjoint.precision, 0.0);
  EXPECT_EQ(disjoint.recall, 0.0);
  EXPECT_EQ(disjoint.f1, 0.0);
  PRF empty = token_prf("", "");
  EXPECT_EQ(empty.f1, 1.0);
  PRF miss = token_prf("", "x");
  EXPECT_EQ(miss.recall, 0.0);
  EXPECT_EQ(miss.f1, 0.0);
  // Multiset overlap: a repeated token only counts as often as in gold.
  PRF rep = token_prf("a a a", "a b");
  EXPECT_NEAR(rep.precision, 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(rep.recall, 0.5, 1e-9);
  EXPECT_NEAR(rep.f1, 0.4, 1e-9);
}

TEST(ScorePredictions, OracleAnswersScoreHundred) {
  Corpus c = build_corpus(20, 1);
  std::vector<Prediction> preds;
  for (const QAPair& q : c.qa_for(Split::eval)) {
    Prediction p;
    p.qa = q;
    p.pred = q.answer;
    p.em = exact_match(p.pred, q.answer);
    p.prf = token_prf(p.pred, q.answer);
    preds.push_back(p);
  }
  EvalReport r = score_predictions(preds);
  EXPECT_NEAR(r.em, 100.0, 1e-9);
  EXPECT_NEAR(r.recall, 100.0, 1e-9);
  EXPECT_NEAR(r.f1, 100.0, 1e-9);
  EXPECT_EQ(r.n_examples, 10 * 25);
}

TEST(Correlation, HandCases) {
  std::vector<double> x = {1, 2, 3}, y = {2, 4, 6};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-9);
  EXPECT_NEAR(spearman(x, y), 1.0, 1e-9);
  std::vector<double> neg = {-1, -2, -3};
  EXPECT_NEAR(pearson(x, neg), -1.0, 1e-9);
  // 1 - 6 * sum(d^2) / (n (n^2 - 1)) with d = (0, 0, 0, 1, 1): 1 - 12 / 120.
  std::vector<double> a = {1, 2, 3, 4, 5}, b = {1, 2, 3, 5, 4};
  EXPECT_NEAR(spearman(a, b), 0.9, 1e-9);
  std::vector<double> flat = {2, 2, 2};
  expect_code(Errc::degenerate_variance, [&] { pearson(x, flat); });
  std::vector<double> one = {1};
  expect_code(Errc::insufficient_points, [&] { pearson(one, one); });
}

TEST(Correlation, AverageRanksShareTies) {
  std::vector<double> x = {10, 20, 20, 5};
  EXPECT_EQ(average_ranks(x), (std::vector<double>{2, 3.5, 3.5, 1}));
}

EvalReport report_with(const PerAttribute<double>& doc, const PerAttribute<double>& q) {
  EvalReport r;
  r.has_first_token = true;
  r.doc_acc.acc = doc;
  r.question_acc.acc = q;
  return r;
}

TEST(Correlation, Reports) {
  std::vector<EvalReport> same = {report_with({0.1, 0.2, 0.3, 0.4, 0.5}, {0.1, 0.2, 0.3, 0.4, 0.5}),
                                  report_with({0.2, 0.3, 0.4, 0.5, 0.6}, {0.2, 0.3, 0.4, 0.5, 0.6})};
  CorrelationResult c = correlate_reports(same);
  EXPECT_NEAR(c.pearson, 1.0, 1e-12);
  EXPECT_NEAR(c.spearman, 1.0, 1e-12);
  EXPECT_EQ(c.n_points, 10);
  std::vector<EvalReport> flat = {report_with({0.3, 0.3, 0.3, 0.3, 0.3}, {0.1, 0.2, 0.3, 0.4, 0.5}),
                                  report_with({0.3, 0.3, 0.3, 0.3, 0.3}, {0.2, 0.3, 0.4, 0.5, 0.6})};
  expect_code(Errc::degenerate_variance, [&] { correlate_reports(flat); });
  std::vector<EvalReport> single(same.begin(), same.begin() + 1);
  expect_code(Errc::insufficient_points, [&] { correlate_reports(single); });
}

TEST(FirstTokenAccuracy, ConstantModelHitsGold) {
  const int vocab = 20;
  const TokenId gold = 9;
  Params<float> p = constant_model(vocab, gold);
  std::vector<FirstTokenContext> ctx;
  for (int i = 0; i < 100; ++i) {
    std::vector<TokenId> prefix = {special::kBos};
    for (int t = 0; t <= i % 7; ++t) prefix.push_back(6 + (i + t) % 14);
    ctx.push_back({prefix, gold, kAttributes[i % kNumAttributes]});
  }
  AccuracyTable t = first_token_accuracy(p, ctx);
  for (std::size_t a = 0; a < kNumAttributes; ++a) {
    EXPECT_EQ(t.acc[a], 1.0);
    EXPECT_EQ(t.count[a], 20);
  }
  for (auto& c : ctx) c.gold = gold + 1;
  EXPECT_EQ(first_token_accuracy(p, ctx).mean(), 0.0);
}

TEST(FirstTokenAccuracy, UntrainedModelNearChance) {
  // Gold ids drawn uniformly and independently of the model: the hit count
  // over all seeds is Binomial(N, 1/V).
  const int vocab = 40;
  const int seeds = 10;
  const int per_seed = 600;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<TokenId> any(0, vocab - 1), word(special::kCount, vocab - 1);
  std::uniform_int_distribution<int> len(1, 12);
  double hits = 0;
  for (int s = 0; s < seeds; ++s) {
    Params<float> p = init_params<float>(small_config(vocab), static_cast<std::uint64_t>(s) + 1);
    std::vector<FirstTokenContext> ctx;
    for (int i = 0; i < per_seed; ++i) {
      std::vector<TokenId> prefix = {special::kBos};
      for (int t = len(rng); t > 0; --t) prefix.push_back(word(rng));
      ctx.push_back({prefix, any(rng), kAttributes[i % kNumAttributes]});
    }
    AccuracyTable t = first_token_accuracy(p, ctx);
    for (std::size_t a = 0; a < kNumAttributes; ++a) hits += t.acc[a] * static_cast<double>(t.count[a]);
  }
  const double n = seeds * per_seed;
  const double pr = 1.0 / vocab;
  const double sigma = std::sqrt(n * pr * (1 - pr));
  EXPECT_NEAR(hits, n * pr, 3 * sigma);
}

TEST(Contexts, DocPrefixEndsBeforeValue) {
  Corpus c = build_corpus(10, 3);
  std::vector<std::string> texts;
  for (const Document& d : c.train_docs) texts.push_back(d.text);
  for (const Document& d : c.eval_docs) texts.push_back(d.text);
  Vocab v = build_vocab(texts);
  auto docs = c.eval_docs_for(Split::eval);
  auto ctx = doc_contexts(docs, v);
  ASSERT_EQ(ctx.size(), docs.size() * kNumAttributes);
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const Document& d = docs[i / kNumAttributes];
    const FirstTokenContext& x = ctx[i];
    EXPECT_EQ(x.prefix.front(), special::kBos);
    const Span& s = d.span(x.attr);
    TokenSequence seq = encode(d.text, v);
    auto [lo, hi] = map_span(s.start, s.end, seq);
    EXPECT_EQ(x.prefix.size(), lo + 1);
    EXPECT_EQ(x.gold, seq.ids[lo]);
  }
}

TEST(Prompts, Layout) {
  QAPair ex{1, Attribute::college, "Where did A B study?", "Rice University", Split::it_train};
  std::vector<QAPair> exs = {ex};
  EXPECT_EQ(format_prompt(exs, "Where did C D study?"),
            "Question: Where did A B study?\nAnswer: Rice University\nQuestion: Where did C D study?\nAnswer:");
  EXPECT_EQ(format_qa("q?", "a"), "Question: q?\nAnswer: a");
}

TEST(Prompts, ExemplarsShareAttributeAndRotate) {
  Corpus c = build_corpus(20, 3);
  auto pool = c.qa_for(Split::it_train);
  for (Attribute a : kAttributes) {
    auto e0 = pick_exemplars(pool, a, 0, 2);
    auto e1 = pick_exemplars(pool, a, 1, 2);
    ASSERT_EQ(e0.size(), 2u);
    for (const auto& e : e0) EXPECT_EQ(e.attr, a);
    EXPECT_NE(e0[0].profile_id, e1[0].profile_id);
  }
  EXPECT_TRUE(pick_exemplars(pool, Attribute::major, 3, 0).empty());
}

TEST(Suite, FullEvalSplitSize) {
  Corpus c = build_corpus(1000, 42);
  std::vector<std::string> texts;
  for (const Document& d : c.train_docs) texts.push_back(d.text);
  for (const QAPair& q : c.qa) texts.push_back(format_qa(q.question, q.answer));
  Vocab v = build_vocab(texts);
  EvalSuite s = build_eval_suite(c, v, 1);
  EXPECT_EQ(s.qa.size(), 12500u);
  EXPECT_EQ(s.prompts.size(), 12500u);
  EXPECT_EQ(s.question.size(), 12500u);
  EXPECT_EQ(s.doc.size(), 500u * 5 * kNumAttributes);
}

TEST(Report, JsonRoundTrip) {
  EvalReport r = report_with({0.1, 0.25, 1.0 / 3.0, 0.4, 0.5}, {0.0, 0.2, 0.3, 0.4, 1e-17});
  r.doc_acc.count = {1, 2, 3, 4, 5};
  r.question_acc.count = {6, 7, 8, 9, 10};
  r.has_qa = true;
  r.em = 12.5;
  r.recall = 1.0 / 7.0;
  r.f1 = 99.99;
  r.n_examples = 12500;
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
}

TEST(GenerateAnswers, StopsAtNewline) {
  std::vector<std::string> texts = {"a b\nc"};
  Vocab v = build_vocab(texts);
  Params<float> p = constant_model(static_cast<int>(v.size()), v.newline());
  std::vector<std::vector<TokenId>> prompts = {{special::kBos, v.id("a")}, {special::kBos}};
  auto out = generate_answers(p, prompts, v);
  EXPECT_EQ(out, (std::vector<std::string>{"", ""}));
  Params<float> q = constant_model(static_cast<int>(v.size()), v.id("b"));
  auto long_out = generate_answers(q, prompts, v);
  std::string expect = "b";
  for (int i = 1; i < kMaxAnswerTokens; ++i) expect += " b";
  EXPECT_EQ(long_out[0], expect);
}

}  // namespace
}  // namespace plab
