// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// plab command-line entry point.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "plab/augment.hpp"
#include "plab/corpus.hpp"
#include "plab/eval.hpp"
#include "plab/harness.hpp"
#include "plab/trainer.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kCheckFailed = 3 };

int gen_data(std::size_t n, std::uint64_t seed, const fs::path& out) {
  const plab::Corpus corpus = plab::build_corpus(n, seed);
  plab::write_corpus(corpus, out);
  plab::corpus_vocab(corpus).save(out / "vocab.json");
  std::cout << "wrote " << corpus.profiles.size() << " profiles, " << corpus.train_docs.size() + corpus.eval_docs.size()
            << " documents, " << corpus.qa.size() << " QA pairs to " << out.string() << "\n";
  return kOk;
}

int augment(const fs::path& in, const fs::path& out, const std::string& kind, int k, std::uint64_t seed,
            double space_prob) {
  const auto docs = plab::read_documents(in);
  const plab::AugmentKind only = plab::parse_augment_kind(kind);
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::uint64_t s = plab::derive_seed(seed, {i});
    std::vector<plab::AugmentedDocument> variants;
    if (only == plab::AugmentKind::eda_lite) {
      variants.push_back(plab::identity(docs[i]));
      std::mt19937_64 rng(s);
      for (int j = 0; j < k; ++j) variants.push_back(plab::eda_lite(docs[i], {}, 0.1, rng()));
    } else {
      variants = plab::augment_set(docs[i], k, s, space_prob, only);
    }
    for (const auto& v : variants) lines.push_back(plab::to_json_line(v));
  }
  plab::write_lines(out, lines);
  std::cout << "wrote " << lines.size() << " documents to " << out.string() << "\n";
  return kOk;
}

int train(const fs::path& config, const fs::path& data, const fs::path& out) {
  const plab::TrainConfig cfg = plab::load_train_config(config);
  const plab::RunRecord r = plab::train_from_data(cfg, data, out);
  const auto& last = r.evals.back();
  std::cout << "trained " << r.optimizer_steps << " steps (" << r.grad_evals << " gradient evaluations), final loss "
            << last.train_loss << "\n";
  if (last.report.has_qa) std::cout << "EM " << last.report.em << "  F1 " << last.report.f1 << "\n";
  return kOk;
}

int eval(const fs::path& ckpt, const fs::path& data, int fewshot, const fs::path& out) {
  const plab::Corpus corpus = plab::read_corpus(data);
  const plab::Vocab vocab =
      fs::exists(data / "vocab.json") ? plab::Vocab::load(data / "vocab.json") : plab::corpus_vocab(corpus);
  const auto params = plab::load_checkpoint(ckpt.string());
  if (params.config().vocab_size != static_cast<int>(vocab.size())) {
    throw plab::Error(plab::Errc::config, "checkpoint vocabulary differs from the data directory's");
  }
  const plab::EvalSuite suite = plab::build_eval_suite(corpus, vocab, fewshot);
  std::vector<plab::Prediction> preds;
  const plab::EvalReport report = plab::evaluate(params, suite, vocab, true, &preds);
  plab::write_eval_outputs(out, report, preds);
  std::cout << plab::report_to_json(report) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plab: knowledge-learning laboratory"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "Generate profiles, documents, QA pairs and vocabulary");
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  fs::path out;
  gen->add_option("--n", n, "Number of profiles")->capture_default_str();
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out, "Output directory")->required();

  auto* aug = app.add_subcommand("augment", "Augment a docs.jsonl file");
  fs::path in;
  std::string kind = "wrap";
  int k = plab::kDefaultAugmentCount;
  double space_prob = plab::kDefaultSpaceProb;
  aug->add_option("--in", in, "Input docs.jsonl")->required();
  aug->add_option("--out", out, "Output augmented.jsonl")->required();
  aug->add_option("--kind", kind, "wrap|pad|space|eda|format")->capture_default_str();
  aug->add_option("--k", k, "Variants per document")->capture_default_str();
  aug->add_option("--seed", seed, "Seed")->capture_default_str();
  aug->add_option("--space-prob", space_prob, "Space insertion probability")->capture_default_str();

  auto* tr = app.add_subcommand("train", "Run one training phase");
  fs::path config, data;
  tr->add_option("--config", config, "config.json")->required();
  tr->add_option("--data", data, "Data directory from gen-data")->required();
  tr->add_option("--out", out, "Run directory")->required();

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  fs::path ckpt;
  int fewshot = 1;
  ev->add_option("--ckpt", ckpt, "Checkpoint file")->required();
  ev->add_option("--data", data, "Data directory")->required();
  ev->add_option("--fewshot", fewshot, "QA exemplars per prompt")->capture_default_str();
  ev->add_option("--out", out, "Output directory")->required();

  auto* ex = app.add_subcommand("experiment", "Run an experiment matrix");
  fs::path matrix;
  int parallel = 1;
  ex->add_option("--matrix", matrix, "matrix.json")->required();
  ex->add_option("--out", out, "Output directory")->required();
  ex->add_option("--parallel", parallel, "Cells run in parallel processes")->capture_default_str();
  std::string cell;
  int cell_seed = 0;
  ex->add_option("--cell", cell, "Run a single cell (used by --parallel workers)");
  ex->add_option("--cell-seed", cell_seed, "Seed of the single cell");

  auto* rep = app.add_subcommand("report", "Tabulate finished runs");
  fs::path runs;
  std::string format = "csv";
  bool check = false;
  rep->add_option("--runs", runs, "Experiment output directory")->required();
  rep->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  rep->add_flag("--check", check, "Exit 3 unless the directional checks hold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return gen_data(n, seed, out);
    if (*aug) return augment(in, out, kind, k, seed, space_prob);
    if (*tr) return train(config, data, out);
    if (*ev) return eval(ckpt, data, fewshot, out);
    if (*ex) {
      const plab::ExperimentMatrix m = plab::load_matrix(matrix);
      if (!cell.empty()) {
        plab::run_cell(m, cell, cell_seed, out);
        return kOk;
      }
      const plab::ReportTable table = plab::run_matrix(m, out, parallel, argv[0]);
      plab::emit_report(table, out, "csv");
      std::cout << table.rows.size() << " runs tabulated in " << out.string() << "\n";
      return table.failures.empty() ? kOk : kRuntime;
    }
    if (*rep) {
      const plab::ReportTable table = plab::collect_report(runs);
      plab::emit_report(table, runs, format);
      if (check) {
        bool ok = true;
        for (const auto& c : plab::directional_checks(table)) {
          std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
          ok = ok && c.passed;
        }
        return ok ? kOk : kCheckFailed;
      }
      return kOk;
    }
  } catch (const plab::Error& e) {
    std::cerr << "plab: " << e.what() << "\n";
    return e.code() == plab::Errc::config ? kConfig : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "plab: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
