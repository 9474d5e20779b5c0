// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Measurement: first-knowledge-token accuracy, greedy QA with EM/Recall/F1,
// and correlation statistics.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plab/corpus.hpp"
#include "plab/model.hpp"
#include "plab/tokenizer.hpp"

namespace plab {

inline constexpr int kMaxAnswerTokens = 24;

/// "Question: {q}\nAnswer: {a}", the one QA layout used for training and prompting.
std::string format_qa(std::string_view question, std::string_view answer);
/// "Question: {q}\nAnswer:" preceded by exemplars, one per line.
std::string format_prompt(std::span<const QAPair> exemplars, std::string_view question);

struct FirstTokenContext {
  std::vector<TokenId> prefix;  // starts with BOS
  TokenId gold = special::kUnk;
  Attribute attr = Attribute::birth_date;
};

/// One context per (document, attribute): the tokens before the value.
std::vector<FirstTokenContext> doc_contexts(std::span<const Document> docs, const Vocab& vocab);

/// One context per QA pair: the prompt up to "Answer:", gold = first answer token.
std::vector<FirstTokenContext> question_contexts(std::span<const QAPair> qa, std::span<const QAPair> exemplar_pool,
                                                 int fewshot_k, const Vocab& vocab);

/// Deterministic exemplars for qa[index]: same attribute, rotated through the pool.
std::vector<QAPair> pick_exemplars(std::span<const QAPair> pool, Attribute attr, std::size_t index, int k);

struct AccuracyTable {
  PerAttribute<double> acc{};
  PerAttribute<long> count{};
  double mean() const;
};

/// Fraction of contexts whose argmax next token is the gold id, per attribute.
AccuracyTable first_token_accuracy(const Params<float>& params, std::span<const FirstTokenContext> contexts);

std::string normalize_answer(std::string_view text);
int exact_match(std::string_view pred, std::string_view gold);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
PRF token_prf(std::string_view pred, std::string_view gold);

struct Prediction {
  QAPair qa;
  std::string pred;
  int em = 0;
  PRF prf;
};

struct EvalReport {
  AccuracyTable doc_acc;
  AccuracyTable question_acc;
  bool has_first_token = false;
  bool has_qa = false;
  double em = 0.0;  // aggregates scaled to [0, 100]
  double recall = 0.0;
  double f1 = 0.0;
  long n_examples = 0;

  bool operator==(const EvalReport&) const;
};

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(std::string_view text);

/// Prompts and contexts prepared once per corpus and reused at every eval point.
struct EvalSuite {
  std::vector<FirstTokenContext> doc;
  std::vector<FirstTokenContext> question;
  std::vector<QAPair> qa;
  std::vector<std::vector<TokenId>> prompts;  // BOS + format_prompt(...)
  int fewshot_k = 0;
};

EvalSuite build_eval_suite(const Corpus& corpus, const Vocab& vocab, int fewshot_k);

/// Greedy answers for every prompt, stopping at newline, EOS or kMaxAnswerTokens.
std::vector<std::string> generate_answers(const Params<float>& params, std::span<const std::vector<TokenId>> prompts,
                                          const Vocab& vocab);

/// EM/Recall/F1 of greedy answers to the suite's eval questions.
EvalReport evaluate_qa(const Params<float>& params, const EvalSuite& suite, const Vocab& vocab,
                       std::vector<Prediction>* predictions = nullptr);

/// Aggregates already-generated predictions (exposed for oracle tests).
EvalReport score_predictions(std::span<const Prediction> predictions);

/// First-token accuracies in both modes, plus QA metrics when `with_qa`.
EvalReport evaluate(const Params<float>& params, const EvalSuite& suite, const Vocab& vocab, bool with_qa,
                    std::vector<Prediction>* predictions = nullptr);

std::string to_json_line(const Prediction& p);
void write_eval_outputs(const std::filesystem::path& dir, const EvalReport& report,
                        std::span<const Prediction> predictions);

double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);
/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

struct CorrelationResult {
  double pearson = 0.0;
  double spearman = 0.0;
  long n_points = 0;
};

/// Pools (doc accuracy, question accuracy) over attributes and checkpoints.
CorrelationResult correlate_reports(std::span<const EvalReport> checkpoints);

}  // namespace plab
