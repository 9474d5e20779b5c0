// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace plab {

using nlohmann::json;

namespace {

// Marks introduced by formatting augmentation; always in the vocabulary.
constexpr std::string_view kAugmentMarks = "\" ' * # [ ] ( )";

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view phase_name(Phase p) { return p == Phase::it ? "it" : "cpt"; }

Phase parse_phase(std::string_view s) {
  if (s == "cpt") return Phase::cpt;
  if (s == "it") return Phase::it;
  throw Error(Errc::config, "unknown phase '" + std::string(s) + "'");
}

std::string_view augment_mode_name(AugmentMode m) {
  switch (m) {
    case AugmentMode::none: return "none";
    case AugmentMode::format: return "format";
    case AugmentMode::eda: return "eda";
  }
  return "none";
}

AugmentMode parse_augment_mode(std::string_view s) {
  if (s == "none") return AugmentMode::none;
  if (s == "format") return AugmentMode::format;
  if (s == "eda") return AugmentMode::eda;
  throw Error(Errc::config, "unknown augment mode '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (steps <= 0) throw Error(Errc::config, "steps must be positive");
  if (eval_every <= 0 || eval_every > steps) throw Error(Errc::config, "eval_every must lie in [1, steps]");
  if (batch_size <= 0) throw Error(Errc::config, "batch_size must be positive");
  if (data.k_aug < 0) throw Error(Errc::config, "k_aug must be non-negative");
  if (!(data.space_prob >= 0 && data.space_prob <= 1)) throw Error(Errc::config, "space_prob must lie in [0, 1]");
  if (!(data.eda_rate >= 0 && data.eda_rate <= 1)) throw Error(Errc::config, "eda_rate must lie in [0, 1]");
  if (eval_fewshot < 0) throw Error(Errc::config, "eval_fewshot must be non-negative");
  optim.validate();
}

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["phase"] = phase_name(c.phase);
  j["data"] = {{"paraphrase", c.data.paraphrase},
               {"augment", augment_mode_name(c.data.augment)},
               {"k_aug", c.data.k_aug},
               {"space_prob", c.data.space_prob},
               {"eda_rate", c.data.eda_rate}};
  j["optimizer"] = json::parse(optim_to_json(c.optim));
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["eval_every"] = c.eval_every;
  j["seed"] = c.seed;
  j["model"] = json::parse(config_to_json(c.model));
  j["init_checkpoint"] = c.init_checkpoint;
  j["eval_fewshot"] = c.eval_fewshot;
  j["eval_qa"] = c.eval_qa;
  j["keep_checkpoints"] = c.keep_checkpoints;
  return j.dump(2);
}

TrainConfig train_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("config is not valid JSON: ") + e.what());
  }
  TrainConfig c;
  try {
    c.phase = parse_phase(j.value("phase", std::string("cpt")));
    if (j.contains("data")) {
      const json& d = j["data"];
      c.data.paraphrase = d.value("paraphrase", c.data.paraphrase);
      c.data.augment = parse_augment_mode(d.value("augment", std::string("none")));
      c.data.k_aug = d.value("k_aug", c.data.k_aug);
      c.data.space_prob = d.value("space_prob", c.data.space_prob);
      c.data.eda_rate = d.value("eda_rate", c.data.eda_rate);
    }
    if (j.contains("optimizer")) {
      const json& o = j["optimizer"];
      c.optim = optim_from_json(o.is_string() ? json{{"optimizer", o}}.dump() : o.dump());
    }
    c.steps = j.value("steps", c.steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.seed = j.value("seed", c.seed);
    if (j.contains("model")) c.model = config_from_json(j["model"].dump());
    c.init_checkpoint = j.value("init_checkpoint", c.init_checkpoint);
    c.eval_fewshot = j.value("eval_fewshot", c.eval_fewshot);
    c.eval_qa = j.value("eval_qa", c.eval_qa);
    c.keep_checkpoints = j.value("keep_checkpoints", c.keep_checkpoints);
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("bad config field: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& file) { return train_config_from_json(read_file(file)); }

Example lm_example(std::string_view text, const Vocab& vocab) {
  TokenSequence seq = encode(text, vocab);
  Example e;
  e.ids.reserve(seq.size() + 2);
  e.ids.push_back(special::kBos);
  e.ids.insert(e.ids.end(), seq.ids.begin(), seq.ids.end());
  e.ids.push_back(special::kEos);
  e.mask.assign(e.ids.size(), 1);
  e.mask[0] = 0;
  return e;
}

Example qa_example(std::string_view question, std::string_view answer, const Vocab& vocab) {
  const std::string text = format_qa(question, answer);
  const std::size_t answer_start = text.size() - answer.size();
  TokenSequence seq = encode(text, vocab);
  Example e;
  e.ids.push_back(special::kBos);
  e.mask.push_back(0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    e.ids.push_back(seq.ids[i]);
    e.mask.push_back(seq.offsets[i].start >= answer_start ? 1 : 0);
  }
  e.ids.push_back(special::kEos);
  e.mask.push_back(1);
  return e;
}

BatchStream::BatchStream(EpochFn make_epoch, int batch_size, std::uint64_t seed)
    : make_epoch_(std::move(make_epoch)), batch_size_(batch_size), seed_(seed) {
  if (batch_size_ <= 0) throw Error(Errc::config, "batch_size must be positive");
  start_epoch();
}

void BatchStream::start_epoch() {
  ++epoch_;
  current_ = make_epoch_(epoch_);
  if (current_.empty()) throw Error(Errc::empty_corpus, "training stream has no examples");
  order_.resize(current_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::mt19937_64 rng(derive_seed(seed_, {0x5348, static_cast<std::uint64_t>(epoch_)}));
  std::shuffle(order_.begin(), order_.end(), rng);
  cursor_ = 0;
}

Batch BatchStream::next() {
  std::vector<std::vector<TokenId>> ids;
  std::vector<std::vector<std::uint8_t>> masks;
  while (static_cast<int>(ids.size()) < batch_size_) {
    if (cursor_ == order_.size()) start_epoch();
    const Example& e = current_[order_[cursor_++]];
    ids.push_back(e.ids);
    masks.push_back(e.mask);
  }
  return Batch::from_sequences(ids, masks);
}

std::vector<Document> cpt_documents(const Corpus& corpus, bool paraphrase) {
  if (paraphrase) return corpus.train_docs;
  return corpus.train_docs_for_template(0);
}

std::vector<Example> cpt_epoch(const Corpus& corpus, const TrainConfig& config, const Vocab& vocab, long epoch) {
  const auto docs = cpt_documents(corpus, config.data.paraphrase);
  std::vector<Example> out;
  const auto e = static_cast<std::uint64_t>(epoch);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::uint64_t s = derive_seed(config.seed, {0x4350, e, i});
    switch (config.data.augment) {
      case AugmentMode::none:
        out.push_back(lm_example(docs[i].text, vocab));
        break;
      case AugmentMode::format:
        for (const auto& v : augment_set(docs[i], config.data.k_aug, s, config.data.space_prob)) {
          out.push_back(lm_example(v.text, vocab));
        }
        break;
      case AugmentMode::eda: {
        out.push_back(lm_example(docs[i].text, vocab));
        std::mt19937_64 rng(s);
        for (int k = 0; k < config.data.k_aug; ++k) {
          out.push_back(lm_example(eda_lite(docs[i], EdaOps{}, config.data.eda_rate, rng()).text, vocab));
        }
        break;
      }
    }
  }
  return out;
}

std::vector<Example> it_epoch(std::span<const QAPair> qa_pairs, const TrainConfig& config, const Vocab& vocab,
                              long epoch) {
  std::vector<Example> out;
  out.reserve(qa_pairs.size());
  const auto e = static_cast<std::uint64_t>(epoch);
  for (std::size_t i = 0; i < qa_pairs.size(); ++i) {
    const QAPair& qa = qa_pairs[i];
    if (qa.split != Split::it_train) throw Error(Errc::invalid_argument, "instruction tuning uses it_train pairs only");
    std::string question = qa.question;
    if (config.data.augment == AugmentMode::format) {
      // the canonical question keeps the share it has in an augment_set
      std::mt19937_64 rng(derive_seed(config.seed, {0x4954, e, i}));
      const auto draw = std::uniform_int_distribution<int>(0, config.data.k_aug)(rng);
      if (draw != 0) question = augment_question(qa, sample_format_spec(rng(), config.data.space_prob)).question;
    } else if (config.data.augment == AugmentMode::eda) {
      throw Error(Errc::config, "eda augmentation applies to documents, not questions");
    }
    out.push_back(qa_example(question, qa.answer, vocab));
  }
  return out;
}

BatchStream build_cpt_stream(const Corpus& corpus, const TrainConfig& config, const Vocab& vocab) {
  const bool fixed = config.data.augment == AugmentMode::none;
  auto cache = std::make_shared<std::vector<Example>>();
  return BatchStream(
      [&corpus, config, &vocab, fixed, cache](long epoch) {
        if (!fixed) return cpt_epoch(corpus, config, vocab, epoch);
        if (cache->empty()) *cache = cpt_epoch(corpus, config, vocab, 0);
        return *cache;
      },
      config.batch_size, derive_seed(config.seed, {0x5354}));
}

BatchStream build_it_stream(std::span<const QAPair> qa_pairs, const TrainConfig& config, const Vocab& vocab) {
  std::vector<QAPair> pairs(qa_pairs.begin(), qa_pairs.end());
  return BatchStream([pairs, config, &vocab](long epoch) { return it_epoch(pairs, config, vocab, epoch); },
                     config.batch_size, derive_seed(config.seed, {0x5354}));
}

// ---------------------------------------------------------------------------
// Training loop

std::string eval_point_to_json(const EvalPoint& p) {
  json j{{"step", p.step}, {"metrics", json::parse(report_to_json(p.report))}};
  j["loss"] = std::isfinite(p.train_loss) ? json(p.train_loss) : json(nullptr);
  return j.dump();
}

EvalPoint eval_point_from_json(std::string_view line) {
  json j = json::parse(line);
  EvalPoint p;
  p.step = j.at("step").get<long>();
  p.train_loss = j.at("loss").is_null() ? std::nan("") : j.at("loss").get<double>();
  p.report = report_from_json(j.at("metrics").dump());
  return p;
}

RunRecord run(const TrainConfig& config, Params<float>& params, BatchStream& stream, const EvalHook& hook,
              const std::filesystem::path& run_dir) {
  config.validate();
  RunRecord record;
  record.config = config;
  const bool persist = !run_dir.empty();
  std::ofstream metrics;
  if (persist) {
    std::filesystem::create_directories(run_dir);
    write_lines(run_dir / "config.json", {train_config_to_json(config)});
    metrics.open(run_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics) throw Error(Errc::io, "cannot write metrics in " + run_dir.string());
  }
  auto emit = [&](const EvalPoint& p) {
    if (persist) metrics << eval_point_to_json(p) << '\n' << std::flush;
  };

  if (hook) {
    record.initial = EvalPoint{0, std::nan(""), hook(params, 0, false)};
    emit(*record.initial);
  }

  Batch batch;
  GradientOracle<float> oracle = [&](const Vector<float>& theta, Vector<float>& grad) {
    const Params<float>* at = &params;
    Params<float> copy;
    if (&theta != &params.flat()) {
      copy = params;
      copy.flat() = theta;
      at = &copy;
    }
    LossAndGrad<float> lg = loss_and_grad(*at, batch);
    grad = std::move(lg.grads.flat());
    return lg.loss.loss;
  };

  auto state = OptimState<float>::zeros(params.flat().size());
  double loss_sum = 0.0;
  long loss_count = 0;
  for (long step = 1; step <= config.steps; ++step) {
    batch = stream.next();
    OptimConfig oc = config.optim;
    oc.lr = scheduled_lr(config.optim, step - 1, config.steps);
    StepResult r;
    try {
      r = config.optim.use_sam ? sam_step(params.flat(), state, oc, oracle)
                               : adamw_oracle_step(params.flat(), state, oc, oracle);
    } catch (const Error& e) {
      if (e.code() == Errc::non_finite && persist) {
        write_lines(run_dir / "abort.json",
                    {json{{"step", step}, {"reason", e.what()}, {"epoch", stream.epoch()}}.dump()});
      }
      throw;
    }
    loss_sum += r.loss;
    ++loss_count;
    record.optimizer_steps = step;

    const bool final = step == config.steps;
    if (step % config.eval_every == 0 || final) {
      EvalPoint p{step, loss_sum / static_cast<double>(loss_count), {}};
      if (hook) p.report = hook(params, step, final);
      loss_sum = 0.0;
      loss_count = 0;
      record.evals.push_back(p);
      emit(p);
      if (persist && (config.keep_checkpoints || final)) {
        const auto path = run_dir / ("ckpt_" + std::to_string(step));
        save_checkpoint(params, path.string());
        if (final) record.final_checkpoint = path.string();
      }
    }
  }
  record.grad_evals = state.grad_evals;
  if (persist) {
    write_lines(run_dir / "record.json", {json{{"optimizer_steps", record.optimizer_steps},
                                               {"grad_evals", record.grad_evals},
                                               {"final_checkpoint", record.final_checkpoint}}
                                              .dump()});
  }
  return record;
}

RunRecord load_run_record(const std::filesystem::path& run_dir) {
  RunRecord r;
  r.config = load_train_config(run_dir / "config.json");
  std::ifstream in(run_dir / "metrics.jsonl");
  if (!in) throw Error(Errc::io, "no metrics.jsonl in " + run_dir.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EvalPoint p = eval_point_from_json(line);
    if (p.step == 0) {
      r.initial = p;
    } else {
      r.evals.push_back(p);
    }
  }
  if (std::filesystem::exists(run_dir / "record.json")) {
    json j = json::parse(read_file(run_dir / "record.json"));
    r.optimizer_steps = j.at("optimizer_steps").get<long>();
    r.grad_evals = j.at("grad_evals").get<long>();
    r.final_checkpoint = j.at("final_checkpoint").get<std::string>();
  }
  return r;
}

Vocab corpus_vocab(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.train_docs.size() + corpus.qa.size() + 1);
  for (const Document& d : corpus.train_docs) texts.push_back(d.text);
  for (const QAPair& q : corpus.qa) texts.push_back(format_qa(q.question, q.answer));
  texts.emplace_back(kAugmentMarks);
  return build_vocab(texts);
}

RunRecord train_from_data(const TrainConfig& config, const std::filesystem::path& data_dir,
                          const std::filesystem::path& run_dir) {
  const Corpus corpus = read_corpus(data_dir);
  const Vocab vocab =
      std::filesystem::exists(data_dir / "vocab.json") ? Vocab::load(data_dir / "vocab.json") : corpus_vocab(corpus);
  TrainConfig cfg = config;
  cfg.model.vocab_size = static_cast<int>(vocab.size());

  Params<float> params;
  if (cfg.init_checkpoint.empty()) {
    params = init_params<float>(cfg.model, derive_seed(cfg.seed, {0x494e4954}));
  } else {
    params = load_checkpoint(cfg.init_checkpoint);
    if (params.config().vocab_size != cfg.model.vocab_size) {
      throw Error(Errc::config, "checkpoint vocabulary differs from the data directory's");
    }
    cfg.model = params.config();
  }

  const std::vector<QAPair> it_pairs = corpus.qa_for(Split::it_train);
  BatchStream stream = cfg.phase == Phase::cpt ? build_cpt_stream(corpus, cfg, vocab)
                                               : build_it_stream(it_pairs, cfg, vocab);
  const EvalSuite suite = build_eval_suite(corpus, vocab, cfg.eval_fewshot);
  std::vector<Prediction> predictions;
  EvalReport final_report;
  EvalHook hook = [&](const Params<float>& p, long, bool final) {
    const bool qa = final && cfg.eval_qa;
    EvalReport r = evaluate(p, suite, vocab, qa, qa ? &predictions : nullptr);
    if (final) final_report = r;
    return r;
  };
  RunRecord record = run(cfg, params, stream, hook, run_dir);
  if (!run_dir.empty() && cfg.eval_qa) write_eval_outputs(run_dir / "eval", final_report, predictions);
  return record;
}

}  // namespace plab
