// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/harness.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

extern char** environ;

namespace plab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json cell_to_json(const CellSpec& c) {
  return {{"name", c.name},
          {"paraphrase", c.paraphrase},
          {"augment", augment_mode_name(c.augment)},
          {"optimizer", optimizer_name(c.optimizer)},
          {"it", c.it},
          {"it_augment", augment_mode_name(c.it_augment)},
          {"it_optimizer", optimizer_name(c.it_optimizer)},
          {"cpt_from", c.cpt_from}};
}

CellSpec cell_from_json(const json& j) {
  CellSpec c;
  c.name = j.at("name").get<std::string>();
  c.paraphrase = j.value("paraphrase", false);
  c.augment = parse_augment_mode(j.value("augment", std::string("none")));
  c.optimizer = parse_optimizer(j.value("optimizer", std::string("adamw")));
  c.it = j.value("it", false);
  c.it_augment = parse_augment_mode(j.value("it_augment", std::string("none")));
  c.it_optimizer = parse_optimizer(j.value("it_optimizer", std::string("adamw")));
  c.cpt_from = j.value("cpt_from", std::string());
  return c;
}

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

void ExperimentMatrix::validate() const {
  if (cells.empty()) throw Error(Errc::config, "matrix has no cells");
  if (budget.seeds.empty()) throw Error(Errc::config, "matrix has no seeds");
  if (budget.cpt_steps <= 0 || budget.batch <= 0 || budget.eval_every <= 0) {
    throw Error(Errc::config, "budget steps, batch and eval_every must be positive");
  }
  if (profiles < 2 || profiles % 2 != 0) throw Error(Errc::config, "profiles must be even and at least 2");
  std::set<std::string> names;
  for (const CellSpec& c : cells) {
    if (c.name.empty()) throw Error(Errc::config, "cell without a name");
    if (!names.insert(c.name).second) throw Error(Errc::config, "duplicate cell name '" + c.name + "'");
    if (c.it && budget.it_steps <= 0) throw Error(Errc::config, "cell '" + c.name + "' needs it_steps > 0");
    if (c.it_augment == AugmentMode::eda) throw Error(Errc::config, "eda does not apply to questions");
  }
  for (const CellSpec& c : cells) {
    if (c.cpt_from.empty()) continue;
    if (!c.it) throw Error(Errc::config, "cell '" + c.name + "' reuses a CPT checkpoint but has no IT phase");
    const CellSpec& src = cell(c.cpt_from);
    if (!src.cpt_from.empty()) throw Error(Errc::config, "cpt_from chains are not supported");
  }
  optim.validate();
}

const CellSpec& ExperimentMatrix::cell(std::string_view name) const {
  for (const CellSpec& c : cells) {
    if (c.name == name) return c;
  }
  throw Error(Errc::config, "no cell named '" + std::string(name) + "'");
}

std::string matrix_to_json(const ExperimentMatrix& m) {
  json cells = json::array();
  for (const CellSpec& c : m.cells) cells.push_back(cell_to_json(c));
  json j;
  j["name"] = m.name;
  j["profiles"] = m.profiles;
  j["data_seed"] = m.data_seed;
  j["model"] = json::parse(config_to_json(m.model));
  j["optimizer"] = json::parse(optim_to_json(m.optim));
  j["data"] = {{"k_aug", m.data.k_aug}, {"space_prob", m.data.space_prob}, {"eda_rate", m.data.eda_rate}};
  j["fewshot"] = m.fewshot;
  j["budget"] = {{"cpt_steps", m.budget.cpt_steps},
                 {"it_steps", m.budget.it_steps},
                 {"batch", m.budget.batch},
                 {"eval_every", m.budget.eval_every},
                 {"seeds", m.budget.seeds}};
  j["cells"] = cells;
  return j.dump(2);
}

ExperimentMatrix matrix_from_json(std::string_view text) {
  ExperimentMatrix m;
  try {
    json j = json::parse(text);
    m.name = j.value("name", m.name);
    m.profiles = j.value("profiles", m.profiles);
    m.data_seed = j.value("data_seed", m.data_seed);
    if (j.contains("model")) m.model = config_from_json(j["model"].dump());
    if (j.contains("optimizer")) m.optim = optim_from_json(j["optimizer"].dump());
    if (j.contains("data")) {
      m.data.k_aug = j["data"].value("k_aug", m.data.k_aug);
      m.data.space_prob = j["data"].value("space_prob", m.data.space_prob);
      m.data.eda_rate = j["data"].value("eda_rate", m.data.eda_rate);
    }
    m.fewshot = j.value("fewshot", m.fewshot);
    if (j.contains("budget")) {
      const json& b = j["budget"];
      m.budget.cpt_steps = b.value("cpt_steps", m.budget.cpt_steps);
      m.budget.it_steps = b.value("it_steps", m.budget.it_steps);
      m.budget.batch = b.value("batch", m.budget.batch);
      m.budget.eval_every = b.value("eval_every", m.budget.eval_every);
      if (b.contains("seeds")) m.budget.seeds = b["seeds"].get<std::vector<std::uint64_t>>();
    }
    m.cells.clear();
    if (j.contains("cells")) {
      for (const json& c : j["cells"]) m.cells.push_back(cell_from_json(c));
    } else {
      m.cells = default_cells();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("bad matrix: ") + e.what());
  }
  m.validate();
  return m;
}

ExperimentMatrix load_matrix(const fs::path& file) { return matrix_from_json(read_file(file)); }

std::vector<CellSpec> default_cells() {
  std::vector<CellSpec> cells;
  for (bool paraphrase : {false, true}) {
    const std::string base = paraphrase ? "paraphrase_cpt" : "cpt";
    for (int variant = 0; variant < 4; ++variant) {
      CellSpec c;
      c.paraphrase = paraphrase;
      c.augment = (variant & 1) ? AugmentMode::format : AugmentMode::none;
      c.optimizer = (variant & 2) ? OptimizerKind::sam : OptimizerKind::adamw;
      c.name = base + ((variant & 1) ? "_format" : "") + ((variant & 2) ? "_sam" : "");
      cells.push_back(c);
    }
  }
  return cells;
}

TrainConfig cpt_config(const ExperimentMatrix& m, const CellSpec& c, std::uint64_t seed) {
  TrainConfig t;
  t.phase = Phase::cpt;
  t.data = m.data;
  t.data.paraphrase = c.paraphrase;
  t.data.augment = c.augment;
  t.optim = m.optim;
  t.optim.use_sam = c.optimizer == OptimizerKind::sam;
  t.steps = m.budget.cpt_steps;
  t.batch_size = m.budget.batch;
  t.eval_every = std::min(m.budget.eval_every, m.budget.cpt_steps);
  t.seed = seed;
  t.model = m.model;
  t.eval_fewshot = m.fewshot;
  t.eval_qa = true;
  t.keep_checkpoints = false;
  return t;
}

TrainConfig it_config(const ExperimentMatrix& m, const CellSpec& c, std::uint64_t seed) {
  TrainConfig t = cpt_config(m, c, seed);
  t.phase = Phase::it;
  t.data.paraphrase = false;
  t.data.augment = c.it_augment;
  t.optim.use_sam = c.it_optimizer == OptimizerKind::sam;
  t.steps = m.budget.it_steps;
  t.eval_every = std::min(m.budget.eval_every, m.budget.it_steps);
  t.eval_fewshot = 0;
  return t;
}

// ---------------------------------------------------------------------------
// Running

fs::path cell_dir(const fs::path& out, std::string_view cell, std::uint64_t seed) {
  return out / "runs" / std::string(cell) / ("seed_" + std::to_string(seed));
}

namespace {

fs::path data_dir(const fs::path& out) { return out / "data"; }

void ensure_data(const ExperimentMatrix& m, const fs::path& out) {
  const fs::path dir = data_dir(out);
  if (fs::exists(dir / "vocab.json")) return;
  const Corpus corpus = build_corpus(m.profiles, m.data_seed);
  write_corpus(corpus, dir);
  corpus_vocab(corpus).save(dir / "vocab.json");
}

void write_matrix_copy(const ExperimentMatrix& m, const fs::path& out) {
  fs::create_directories(out);
  const fs::path file = out / "matrix.json";
  const std::string text = matrix_to_json(m);
  if (fs::exists(file) && matrix_from_json(read_file(file)).cells != m.cells) {
    throw Error(Errc::config, out.string() + " holds runs of a different matrix");
  }
  write_lines(file, {text});
}

}  // namespace

void run_cell(const ExperimentMatrix& m, std::string_view name, std::uint64_t seed, const fs::path& out) {
  const CellSpec& c = m.cell(name);
  const fs::path dir = cell_dir(out, name, seed);
  if (fs::exists(dir / "done")) return;
  ensure_data(m, out);
  fs::create_directories(dir);
  fs::remove(dir / "error.txt");
  try {
    std::string cpt_ckpt;
    if (c.cpt_from.empty()) {
      cpt_ckpt = train_from_data(cpt_config(m, c, seed), data_dir(out), dir / "cpt").final_checkpoint;
    } else {
      const fs::path src = cell_dir(out, c.cpt_from, seed);
      if (!fs::exists(src / "done")) {
        throw Error(Errc::io, "cell '" + c.cpt_from + "' has not finished for seed " + std::to_string(seed));
      }
      cpt_ckpt = load_run_record(src / "cpt").final_checkpoint;
    }
    if (c.it) {
      TrainConfig t = it_config(m, c, seed);
      t.init_checkpoint = cpt_ckpt;
      train_from_data(t, data_dir(out), dir / "it");
    }
  } catch (const std::exception& e) {
    write_lines(dir / "error.txt", {e.what()});
    throw;
  }
  write_lines(dir / "done", {"ok"});
}

ReportTable run_matrix(const ExperimentMatrix& m, const fs::path& out, int parallel, const std::string& self_exe) {
  m.validate();
  write_matrix_copy(m, out);
  ensure_data(m, out);

  // Cells that reuse a CPT checkpoint run in a second wave.
  std::vector<std::vector<std::pair<std::string, std::uint64_t>>> waves(2);
  for (const CellSpec& c : m.cells) {
    for (std::uint64_t s : m.budget.seeds) waves[c.cpt_from.empty() ? 0 : 1].emplace_back(c.name, s);
  }

  const bool spawn = parallel > 1 && !self_exe.empty();
  for (const auto& wave : waves) {
    if (!spawn) {
      for (const auto& [name, seed] : wave) {
        try {
          run_cell(m, name, seed, out);
        } catch (const std::exception& e) {
          std::cerr << "cell " << name << " seed " << seed << " failed: " << e.what() << "\n";
        }
      }
      continue;
    }
    std::size_t next = 0;
    int running = 0;
    const std::string matrix_arg = (out / "matrix.json").string();
    while (next < wave.size() || running > 0) {
      while (running < parallel && next < wave.size()) {
        const auto& [name, seed] = wave[next++];
        if (fs::exists(cell_dir(out, name, seed) / "done")) continue;
        std::vector<std::string> args{self_exe, "experiment", "--matrix", matrix_arg, "--out", out.string(),
                                      "--cell", name, "--cell-seed", std::to_string(seed)};
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        pid_t pid = 0;
        if (posix_spawn(&pid, self_exe.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
          throw Error(Errc::io, "cannot start worker " + self_exe);
        }
        ++running;
      }
      if (running > 0) {
        int status = 0;
        if (::wait(&status) > 0) --running;
      }
    }
  }
  return collect_report(out);
}

// ---------------------------------------------------------------------------
// Report

bool ReportRow::operator==(const ReportRow& o) const {
  return cell == o.cell && seed == o.seed && cpt_steps == o.cpt_steps && it_steps == o.it_steps &&
         same_number(em, o.em) && same_number(recall, o.recall) && same_number(f1, o.f1) &&
         same_number(doc_acc, o.doc_acc) && same_number(q_acc, o.q_acc) && same_number(pearson, o.pearson) &&
         same_number(spearman, o.spearman);
}

std::vector<const ReportRow*> ReportTable::rows_for(std::string_view cell) const {
  std::vector<const ReportRow*> out;
  for (const ReportRow& r : rows) {
    if (r.cell == cell) out.push_back(&r);
  }
  return out;
}

Aggregate aggregate(std::span<const ReportRow* const> rows) {
  Aggregate a;
  if (rows.empty()) return a;
  a.mean.cell = a.std.cell = rows.front()->cell;
  auto stat = [&](auto field, double& mean, double& sd) {
    std::vector<double> xs;
    for (const ReportRow* r : rows) {
      const double x = (*r).*field;
      if (!std::isnan(x)) xs.push_back(x);
    }
    if (xs.empty()) {
      mean = sd = std::nan("");
      return;
    }
    double sum = 0;
    for (double x : xs) sum += x;
    mean = sum / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  };
  stat(&ReportRow::em, a.mean.em, a.std.em);
  stat(&ReportRow::recall, a.mean.recall, a.std.recall);
  stat(&ReportRow::f1, a.mean.f1, a.std.f1);
  stat(&ReportRow::doc_acc, a.mean.doc_acc, a.std.doc_acc);
  stat(&ReportRow::q_acc, a.mean.q_acc, a.std.q_acc);
  stat(&ReportRow::pearson, a.mean.pearson, a.std.pearson);
  stat(&ReportRow::spearman, a.mean.spearman, a.std.spearman);
  a.mean.cpt_steps = a.std.cpt_steps = rows.front()->cpt_steps;
  a.mean.it_steps = a.std.it_steps = rows.front()->it_steps;
  return a;
}

namespace {

void add_curve(ReportTable& t, const std::string& cell, std::uint64_t seed, const std::string& phase,
               const RunRecord& r) {
  Curve c{cell, seed, phase, {}};
  auto add = [&](const EvalPoint& p) {
    if (!p.report.has_first_token) return;
    for (Attribute a : kAttributes) {
      c.points.push_back({p.step, a, p.report.doc_acc.acc[index_of(a)], p.report.question_acc.acc[index_of(a)]});
    }
  };
  if (r.initial) add(*r.initial);
  for (const EvalPoint& p : r.evals) add(p);
  t.curves.push_back(std::move(c));
}

}  // namespace

ReportTable collect_report(const fs::path& out) {
  const ExperimentMatrix m = load_matrix(out / "matrix.json");
  ReportTable t;
  for (const CellSpec& c : m.cells) {
    for (std::uint64_t seed : m.budget.seeds) {
      const fs::path dir = cell_dir(out, c.name, seed);
      if (!fs::exists(dir / "done")) {
        const std::string why = fs::exists(dir / "error.txt") ? read_file(dir / "error.txt") : "not run";
        t.failures.push_back({c.name, seed, why.substr(0, why.find('\n'))});
        continue;
      }
      const fs::path cpt_dir = c.cpt_from.empty() ? dir / "cpt" : cell_dir(out, c.cpt_from, seed) / "cpt";
      const RunRecord cpt = load_run_record(cpt_dir);
      ReportRow row;
      row.cell = c.name;
      row.seed = seed;
      row.cpt_steps = cpt.optimizer_steps;
      std::vector<EvalReport> points;
      if (cpt.initial) points.push_back(cpt.initial->report);
      for (const EvalPoint& p : cpt.evals) points.push_back(p.report);
      try {
        const CorrelationResult corr = correlate_reports(points);
        row.pearson = corr.pearson;
        row.spearman = corr.spearman;
      } catch (const Error&) {
        row.pearson = row.spearman = std::nan("");
      }
      const RunRecord* last = &cpt;
      RunRecord it;
      if (c.it) {
        it = load_run_record(dir / "it");
        row.it_steps = it.optimizer_steps;
        last = &it;
      }
      const EvalReport& fin = last->evals.back().report;
      row.em = fin.em;
      row.recall = fin.recall;
      row.f1 = fin.f1;
      row.doc_acc = fin.doc_acc.mean();
      row.q_acc = fin.question_acc.mean();
      t.rows.push_back(row);
      if (c.cpt_from.empty()) add_curve(t, c.name, seed, "cpt", cpt);
      if (c.it) add_curve(t, c.name, seed, "it", it);
    }
  }
  return t;
}

namespace {

constexpr const char* kCsvHeader = "cell,seed,cpt_steps,it_steps,em,recall,f1,doc_acc,q_acc,pearson,spearman";

std::string csv_row(const ReportRow& r, const std::string& seed) {
  std::ostringstream os;
  os << r.cell << ',' << seed << ',' << r.cpt_steps << ',' << r.it_steps << ',' << fmt(r.em) << ',' << fmt(r.recall)
     << ',' << fmt(r.f1) << ',' << fmt(r.doc_acc) << ',' << fmt(r.q_acc) << ',' << fmt(r.pearson) << ','
     << fmt(r.spearman);
  return os.str();
}

std::vector<std::string> cell_order(const ReportTable& t) {
  std::vector<std::string> names;
  for (const ReportRow& r : t.rows) {
    if (std::find(names.begin(), names.end(), r.cell) == names.end()) names.push_back(r.cell);
  }
  return names;
}

json row_json(const ReportRow& r) {
  auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
  return {{"cell", r.cell},     {"seed", r.seed},         {"cpt_steps", r.cpt_steps},
          {"it_steps", r.it_steps}, {"em", num(r.em)},    {"recall", num(r.recall)},
          {"f1", num(r.f1)},    {"doc_acc", num(r.doc_acc)}, {"q_acc", num(r.q_acc)},
          {"pearson", num(r.pearson)}, {"spearman", num(r.spearman)}};
}

}  // namespace

std::string results_csv(const ReportTable& table) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const ReportRow& r : table.rows) os << csv_row(r, std::to_string(r.seed)) << '\n';
  for (const std::string& name : cell_order(table)) {
    const auto rows = table.rows_for(name);
    const Aggregate a = aggregate(rows);
    os << csv_row(a.mean, "mean") << '\n' << csv_row(a.std, "std") << '\n';
  }
  return os.str();
}

std::vector<ReportRow> parse_results_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(Errc::io, "results.csv has an unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw Error(Errc::io, "results.csv row has " + std::to_string(f.size()) + " fields");
    if (f[1] == "mean" || f[1] == "std") continue;
    ReportRow r;
    r.cell = f[0];
    r.seed = std::stoull(f[1]);
    r.cpt_steps = std::stol(f[2]);
    r.it_steps = std::stol(f[3]);
    double* nums[] = {&r.em, &r.recall, &r.f1, &r.doc_acc, &r.q_acc, &r.pearson, &r.spearman};
    for (int i = 0; i < 7; ++i) *nums[i] = std::strtod(f[4 + i].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

std::string figdata_json(const ReportTable& table) {
  json curves = json::array();
  for (const Curve& c : table.curves) {
    std::vector<CurvePoint> pts = c.points;
    std::stable_sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.step < b.step; });
    json points = json::array();
    for (const CurvePoint& p : pts) {
      points.push_back(
          {{"step", p.step}, {"attribute", attribute_name(p.attr)}, {"doc_acc", p.doc_acc}, {"q_acc", p.q_acc}});
    }
    curves.push_back({{"cell", c.cell}, {"seed", c.seed}, {"phase", c.phase}, {"points", points}});
  }
  return json{{"curves", curves}}.dump(2);
}

void emit_report(const ReportTable& table, const fs::path& dir, std::string_view format) {
  if (table.rows.empty()) throw Error(Errc::io, "no finished runs to report");
  fs::create_directories(dir);
  if (format == "csv") {
    std::string csv = results_csv(table);
    csv.pop_back();  // write_lines terminates the last line
    write_lines(dir / "results.csv", {csv});
  } else if (format == "json") {
    json rows = json::array(), aggregates = json::array(), failures = json::array();
    for (const ReportRow& r : table.rows) rows.push_back(row_json(r));
    for (const std::string& name : cell_order(table)) {
      const Aggregate a = aggregate(table.rows_for(name));
      aggregates.push_back({{"cell", name}, {"mean", row_json(a.mean)}, {"std", row_json(a.std)}});
    }
    for (const CellFailure& f : table.failures) {
      failures.push_back({{"cell", f.cell}, {"seed", f.seed}, {"message", f.message}});
    }
    write_lines(dir / "results.json",
                {json{{"rows", rows}, {"aggregates", aggregates}, {"failures", failures}}.dump(2)});
  } else {
    throw Error(Errc::config, "unknown report format '" + std::string(format) + "'");
  }
  write_lines(dir / "figdata.json", {figdata_json(table)});
}

std::vector<CheckResult> directional_checks(const ReportTable& table, double margin) {
  std::vector<CheckResult> out;
  auto mean_em = [&](std::string_view cell) -> std::optional<double> {
    const auto rows = table.rows_for(cell);
    if (rows.empty()) return std::nullopt;
    return aggregate(rows).mean.em;
  };
  auto compare = [&](std::string_view hi, std::string_view lo, double need, bool strict) {
    const auto a = mean_em(hi), b = mean_em(lo);
    if (!a || !b) return;
    CheckResult c;
    c.name = std::string(hi) + (strict ? " > " : " >= ") + std::string(lo);
    c.passed = strict ? (*a - *b > need) : (*a - *b >= need);
    std::ostringstream os;
    os << "mean EM " << *a << " vs " << *b;
    if (need > 0) os << " (margin " << need << ")";
    c.detail = os.str();
    out.push_back(c);
  };
  compare("paraphrase_cpt", "cpt", margin, true);
  compare("cpt_format", "cpt", margin, true);
  compare("cpt_format_sam", "cpt_format", margin, true);
  compare("cpt_format", "cpt_eda", 0.0, false);
  compare("it_format_sam", "it", 0.0, false);
  return out;
}

}  // namespace plab
