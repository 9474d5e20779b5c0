// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace plab {

using nlohmann::json;

namespace {

constexpr std::size_t kEvalBatch = 64;

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

json table_to_json(const AccuracyTable& t) {
  json j = json::object();
  for (Attribute a : kAttributes) {
    j[std::string(attribute_name(a))] = {{"acc", t.acc[index_of(a)]}, {"n", t.count[index_of(a)]}};
  }
  return j;
}

AccuracyTable table_from_json(const json& j) {
  AccuracyTable t;
  for (Attribute a : kAttributes) {
    const json& e = j.at(std::string(attribute_name(a)));
    t.acc[index_of(a)] = e.at("acc").get<double>();
    t.count[index_of(a)] = e.at("n").get<long>();
  }
  return t;
}

}  // namespace

std::string format_qa(std::string_view question, std::string_view answer) {
  std::string s = "Question: ";
  s += question;
  s += "\nAnswer: ";
  s += answer;
  return s;
}

std::string format_prompt(std::span<const QAPair> exemplars, std::string_view question) {
  std::string s;
  for (const QAPair& e : exemplars) {
    s += format_qa(e.question, e.answer);
    s += '\n';
  }
  s += "Question: ";
  s += question;
  s += "\nAnswer:";
  return s;
}

std::vector<FirstTokenContext> doc_contexts(std::span<const Document> docs, const Vocab& vocab) {
  std::vector<FirstTokenContext> out;
  out.reserve(docs.size() * kNumAttributes);
  for (const Document& d : docs) {
    TokenSequence seq = encode(d.text, vocab);
    for (const Span& s : d.spans) {
      auto [first, last] = map_span(s.start, s.end, seq);
      FirstTokenContext c;
      c.prefix.reserve(first + 1);
      c.prefix.push_back(special::kBos);
      c.prefix.insert(c.prefix.end(), seq.ids.begin(), seq.ids.begin() + static_cast<std::ptrdiff_t>(first));
      c.gold = seq.ids[first];
      c.attr = s.attr;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<QAPair> pick_exemplars(std::span<const QAPair> pool, Attribute attr, std::size_t index, int k) {
  std::vector<const QAPair*> same;
  for (const QAPair& q : pool) {
    if (q.attr == attr) same.push_back(&q);
  }
  std::vector<QAPair> out;
  if (same.empty()) return out;
  for (int i = 0; i < k && i < static_cast<int>(same.size()); ++i) {
    out.push_back(*same[(index + static_cast<std::size_t>(i)) % same.size()]);
  }
  return out;
}

namespace {

// Index of each QA pair among the pairs sharing its attribute.
std::vector<std::size_t> per_attribute_index(std::span<const QAPair> qa) {
  PerAttribute<std::size_t> seen{};
  std::vector<std::size_t> idx;
  idx.reserve(qa.size());
  for (const QAPair& q : qa) idx.push_back(seen[index_of(q.attr)]++);
  return idx;
}

std::vector<TokenId> with_bos(const TokenSequence& seq) {
  std::vector<TokenId> ids;
  ids.reserve(seq.size() + 1);
  ids.push_back(special::kBos);
  ids.insert(ids.end(), seq.ids.begin(), seq.ids.end());
  return ids;
}

}  // namespace

std::vector<FirstTokenContext> question_contexts(std::span<const QAPair> qa, std::span<const QAPair> exemplar_pool,
                                                 int fewshot_k, const Vocab& vocab) {
  std::vector<FirstTokenContext> out;
  out.reserve(qa.size());
  const auto idx = per_attribute_index(qa);
  for (std::size_t i = 0; i < qa.size(); ++i) {
    auto ex = pick_exemplars(exemplar_pool, qa[i].attr, idx[i], fewshot_k);
    FirstTokenContext c;
    c.prefix = with_bos(encode(format_prompt(ex, qa[i].question), vocab));
    TokenSequence answer = encode(qa[i].answer, vocab);
    if (answer.ids.empty()) throw Error(Errc::invalid_argument, "empty answer");
    c.gold = answer.ids.front();
    c.attr = qa[i].attr;
    out.push_back(std::move(c));
  }
  return out;
}

double AccuracyTable::mean() const {
  double sum = 0.0;
  int n = 0;
  for (std::size_t a = 0; a < kNumAttributes; ++a) {
    if (count[a] > 0) {
      sum += acc[a];
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

AccuracyTable first_token_accuracy(const Params<float>& params, std::span<const FirstTokenContext> contexts) {
  AccuracyTable t;
  PerAttribute<long> hits{};
  for (std::size_t start = 0; start < contexts.size(); start += kEvalBatch) {
    const std::size_t end = std::min(contexts.size(), start + kEvalBatch);
    std::vector<std::vector<TokenId>> seqs;
    std::vector<Index> rows;
    Index acc = 0;
    for (std::size_t i = start; i < end; ++i) {
      seqs.push_back(contexts[i].prefix);
      acc += static_cast<Index>(contexts[i].prefix.size());
      rows.push_back(acc - 1);
    }
    RowMatrix<float> logits = forward_rows(params, Batch::from_sequences(seqs), rows);
    for (std::size_t i = start; i < end; ++i) {
      Index arg = 0;
      logits.row(static_cast<Index>(i - start)).maxCoeff(&arg);
      const std::size_t a = index_of(contexts[i].attr);
      t.count[a] += 1;
      hits[a] += arg == contexts[i].gold ? 1 : 0;
    }
  }
  for (std::size_t a = 0; a < kNumAttributes; ++a) {
    t.acc[a] = t.count[a] ? static_cast<double>(hits[a]) / static_cast<double>(t.count[a]) : 0.0;
  }
  return t;
}

std::string normalize_answer(std::string_view text) {
  constexpr std::string_view kMarks = "\"'*#[]()";
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (kMarks.find(c) != std::string_view::npos) continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == ' ')) out.pop_back();
  return out;
}

int exact_match(std::string_view pred, std::string_view gold) {
  return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

PRF token_prf(std::string_view pred, std::string_view gold) {
  const auto p = split_ws(normalize_answer(pred));
  const auto g = split_ws(normalize_answer(gold));
  if (p.empty() && g.empty()) return {1.0, 1.0, 1.0};
  if (p.empty() || g.empty()) return {};
  std::map<std::string, int> counts;
  for (const auto& w : g) ++counts[w];
  long overlap = 0;
  for (const auto& w : p) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return {};
  PRF r;
  r.precision = static_cast<double>(overlap) / static_cast<double>(p.size());
  r.recall = static_cast<double>(overlap) / static_cast<double>(g.size());
  r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

bool EvalReport::operator==(const EvalReport& o) const {
  return doc_acc.acc == o.doc_acc.acc && doc_acc.count == o.doc_acc.count && question_acc.acc == o.question_acc.acc &&
         question_acc.count == o.question_acc.count && has_first_token == o.has_first_token && has_qa == o.has_qa &&
         em == o.em && recall == o.recall && f1 == o.f1 && n_examples == o.n_examples;
}

std::string report_to_json(const EvalReport& r) {
  json j;
  if (r.has_first_token) {
    j["doc_context_first_token_acc"] = table_to_json(r.doc_acc);
    j["question_first_token_acc"] = table_to_json(r.question_acc);
    j["doc_acc_mean"] = r.doc_acc.mean();
    j["question_acc_mean"] = r.question_acc.mean();
  }
  if (r.has_qa) {
    j["em"] = r.em;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["n_examples"] = r.n_examples;
  }
  return j.dump();
}

EvalReport report_from_json(std::string_view text) {
  json j = json::parse(text);
  EvalReport r;
  if (j.contains("doc_context_first_token_acc")) {
    r.has_first_token = true;
    r.doc_acc = table_from_json(j["doc_context_first_token_acc"]);
    r.question_acc = table_from_json(j["question_first_token_acc"]);
  }
  if (j.contains("em")) {
    r.has_qa = true;
    r.em = j["em"].get<double>();
    r.recall = j["recall"].get<double>();
    r.f1 = j["f1"].get<double>();
    r.n_examples = j["n_examples"].get<long>();
  }
  return r;
}

EvalSuite build_eval_suite(const Corpus& corpus, const Vocab& vocab, int fewshot_k) {
  if (fewshot_k < 0) throw Error(Errc::config, "fewshot must be non-negative");
  EvalSuite s;
  s.fewshot_k = fewshot_k;
  const auto eval_docs = corpus.eval_docs_for(Split::eval);
  s.doc = doc_contexts(eval_docs, vocab);
  s.qa = corpus.qa_for(Split::eval);
  const auto pool = corpus.qa_for(Split::it_train);
  s.question = question_contexts(s.qa, pool, fewshot_k, vocab);
  const auto idx = per_attribute_index(s.qa);
  s.prompts.reserve(s.qa.size());
  for (std::size_t i = 0; i < s.qa.size(); ++i) {
    auto ex = pick_exemplars(pool, s.qa[i].attr, idx[i], fewshot_k);
    s.prompts.push_back(with_bos(encode(format_prompt(ex, s.qa[i].question), vocab)));
  }
  return s;
}

std::vector<std::string> generate_answers(const Params<float>& params, std::span<const std::vector<TokenId>> prompts,
                                          const Vocab& vocab) {
  const std::vector<TokenId> stops{vocab.newline(), special::kEos};
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (std::size_t start = 0; start < prompts.size(); start += kEvalBatch) {
    const std::size_t end = std::min(prompts.size(), start + kEvalBatch);
    auto produced = generate_greedy_batch(params, prompts.subspan(start, end - start), kMaxAnswerTokens, stops);
    for (auto& ids : produced) {
      if (!ids.empty() && std::find(stops.begin(), stops.end(), ids.back()) != stops.end()) ids.pop_back();
      out.push_back(decode(ids, vocab));
    }
  }
  return out;
}

EvalReport score_predictions(std::span<const Prediction> predictions) {
  EvalReport r;
  r.has_qa = true;
  r.n_examples = static_cast<long>(predictions.size());
  if (predictions.empty()) return r;
  double em = 0, recall = 0, f1 = 0;
  for (const Prediction& p : predictions) {
    em += p.em;
    recall += p.prf.recall;
    f1 += p.prf.f1;
  }
  const double n = static_cast<double>(predictions.size());
  r.em = 100.0 * em / n;
  r.recall = 100.0 * recall / n;
  r.f1 = 100.0 * f1 / n;
  return r;
}

EvalReport evaluate_qa(const Params<float>& params, const EvalSuite& suite, const Vocab& vocab,
                       std::vector<Prediction>* predictions) {
  const auto answers = generate_answers(params, suite.prompts, vocab);
  std::vector<Prediction> preds;
  preds.reserve(answers.size());
  for (std::size_t i = 0; i < answers.size(); ++i) {
    Prediction p;
    p.qa = suite.qa[i];
    p.pred = answers[i];
    p.em = exact_match(p.pred, p.qa.answer);
    p.prf = token_prf(p.pred, p.qa.answer);
    preds.push_back(std::move(p));
  }
  EvalReport r = score_predictions(preds);
  if (predictions) *predictions = std::move(preds);
  return r;
}

EvalReport evaluate(const Params<float>& params, const EvalSuite& suite, const Vocab& vocab, bool with_qa,
                    std::vector<Prediction>* predictions) {
  EvalReport r;
  if (with_qa) r = evaluate_qa(params, suite, vocab, predictions);
  r.has_first_token = true;
  r.doc_acc = first_token_accuracy(params, suite.doc);
  r.question_acc = first_token_accuracy(params, suite.question);
  return r;
}

std::string to_json_line(const Prediction& p) {
  return json{{"profile_id", p.qa.profile_id},
              {"attr", attribute_name(p.qa.attr)},
              {"question", p.qa.question},
              {"gold", p.qa.answer},
              {"pred", p.pred},
              {"em", p.em},
              {"recall", p.prf.recall},
              {"f1", p.prf.f1}}
      .dump();
}

void write_eval_outputs(const std::filesystem::path& dir, const EvalReport& report,
                        std::span<const Prediction> predictions) {
  std::filesystem::create_directories(dir);
  write_lines(dir / "eval_report.json", {json::parse(report_to_json(report)).dump(2)});
  std::vector<std::string> lines;
  lines.reserve(predictions.size());
  for (const Prediction& p : predictions) lines.push_back(to_json_line(p));
  write_lines(dir / "predictions.jsonl", lines);
}

// ---------------------------------------------------------------------------
// Correlation

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(Errc::invalid_argument, "series lengths differ");
  if (xs.size() < 2) throw Error(Errc::insufficient_points, "correlation needs at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::degenerate_variance, "a series has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(Errc::invalid_argument, "series lengths differ");
  const auto rx = average_ranks(xs), ry = average_ranks(ys);
  return pearson(rx, ry);
}

CorrelationResult correlate_reports(std::span<const EvalReport> checkpoints) {
  std::vector<double> doc, q;
  for (const EvalReport& r : checkpoints) {
    if (!r.has_first_token) continue;
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
      doc.push_back(r.doc_acc.acc[a]);
      q.push_back(r.question_acc.acc[a]);
    }
  }
  if (doc.size() < 2 * kNumAttributes) {
    throw Error(Errc::insufficient_points, "correlation needs at least two evaluated checkpoints");
  }
  CorrelationResult c;
  c.pearson = pearson(doc, q);
  c.spearman = spearman(doc, q);
  c.n_points = static_cast<long>(doc.size());
  return c;
}

}  // namespace plab
