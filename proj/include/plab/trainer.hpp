// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Continued pre-training and instruction-tuning loops over fixed step budgets.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plab/augment.hpp"
#include "plab/corpus.hpp"
#include "plab/eval.hpp"
#include "plab/model.hpp"
#include "plab/optim.hpp"
#include "plab/tokenizer.hpp"

namespace plab {

enum class Phase { cpt, it };
enum class AugmentMode { none, format, eda };

std::string_view phase_name(Phase p);
Phase parse_phase(std::string_view s);
std::string_view augment_mode_name(AugmentMode m);
AugmentMode parse_augment_mode(std::string_view s);

struct DataOptions {
  bool paraphrase = false;  // all train templates instead of template 0 only
  AugmentMode augment = AugmentMode::none;
  int k_aug = kDefaultAugmentCount;
  double space_prob = kDefaultSpaceProb;
  double eda_rate = 0.1;
  bool operator==(const DataOptions&) const = default;
};

struct TrainConfig {
  Phase phase = Phase::cpt;
  DataOptions data;
  OptimConfig optim;
  long steps = 3000;
  int batch_size = 32;
  long eval_every = 500;
  std::uint64_t seed = 1;
  ModelConfig model;              // vocab_size is filled from the vocabulary
  std::string init_checkpoint;    // empty: random init from seed
  int eval_fewshot = 1;           // exemplars in QA prompts during evaluation
  bool eval_qa = true;            // greedy QA at the final eval point
  bool keep_checkpoints = true;   // ckpt_<step> at every eval point, else final only

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

std::string train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(std::string_view text);
TrainConfig load_train_config(const std::filesystem::path& file);

struct Example {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;
};

/// BOS + encode(text) + EOS with every target in the loss.
Example lm_example(std::string_view text, const Vocab& vocab);
/// BOS + encode(format_qa(q, a)) + EOS; targets are the answer tokens and EOS.
Example qa_example(std::string_view question, std::string_view answer, const Vocab& vocab);

/// Endless shuffled stream of batches; epochs are rebuilt by `make_epoch`,
/// which is where per-epoch augmentation happens.
class BatchStream {
 public:
  using EpochFn = std::function<std::vector<Example>(long epoch)>;

  BatchStream(EpochFn make_epoch, int batch_size, std::uint64_t seed);

  Batch next();
  long epoch() const { return epoch_; }
  std::size_t epoch_size() const { return current_.size(); }
  const std::vector<Example>& current_epoch() const { return current_; }

 private:
  void start_epoch();

  EpochFn make_epoch_;
  int batch_size_;
  std::uint64_t seed_;
  long epoch_ = -1;
  std::vector<Example> current_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// Training documents for CPT: template 0 or all train templates, every profile.
std::vector<Document> cpt_documents(const Corpus& corpus, bool paraphrase);

BatchStream build_cpt_stream(const Corpus& corpus, const TrainConfig& config, const Vocab& vocab);
BatchStream build_it_stream(std::span<const QAPair> qa_pairs, const TrainConfig& config, const Vocab& vocab);

/// Examples of one epoch, without batching (exposed for counting checks).
std::vector<Example> cpt_epoch(const Corpus& corpus, const TrainConfig& config, const Vocab& vocab, long epoch);
std::vector<Example> it_epoch(std::span<const QAPair> qa_pairs, const TrainConfig& config, const Vocab& vocab,
                              long epoch);

struct EvalPoint {
  long step = 0;
  double train_loss = 0.0;  // mean over steps since the previous point
  EvalReport report;
};

struct RunRecord {
  TrainConfig config;
  std::optional<EvalPoint> initial;  // step 0, before any update
  std::vector<EvalPoint> evals;      // one per eval_every steps plus the final step
  std::string final_checkpoint;
  long optimizer_steps = 0;
  long grad_evals = 0;
};

using EvalHook = std::function<EvalReport(const Params<float>& params, long step, bool final)>;

/// Runs exactly config.steps optimizer steps. Writes config.json, metrics.jsonl
/// and checkpoints into run_dir when it is non-empty. Throws non_finite after
/// writing abort.json if the loss diverges.
RunRecord run(const TrainConfig& config, Params<float>& params, BatchStream& stream, const EvalHook& hook,
              const std::filesystem::path& run_dir);

std::string eval_point_to_json(const EvalPoint& p);
EvalPoint eval_point_from_json(std::string_view line);
/// Rebuilds a RunRecord from a run directory written by run().
RunRecord load_run_record(const std::filesystem::path& run_dir);

/// Vocabulary over the training documents and the QA texts in training layout.
Vocab corpus_vocab(const Corpus& corpus);

/// End-to-end training from a data directory: loads corpus and vocab, builds the
/// stream and the eval suite, initializes or loads parameters, and calls run().
RunRecord train_from_data(const TrainConfig& config, const std::filesystem::path& data_dir,
                          const std::filesystem::path& run_dir);

}  // namespace plab
