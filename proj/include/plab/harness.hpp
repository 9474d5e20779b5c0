// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment matrices: each cell is a CPT setting with an optional IT phase,
// trained under one shared step budget and repeated over seeds.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plab/trainer.hpp"

namespace plab {

struct CellSpec {
  std::string name;
  bool paraphrase = false;
  AugmentMode augment = AugmentMode::none;
  OptimizerKind optimizer = OptimizerKind::adamw;
  bool it = false;
  AugmentMode it_augment = AugmentMode::none;
  OptimizerKind it_optimizer = OptimizerKind::adamw;
  std::string cpt_from;  // reuse this cell's CPT checkpoint instead of training CPT

  bool operator==(const CellSpec&) const = default;
};

struct Budget {
  long cpt_steps = 3000;
  long it_steps = 1000;
  int batch = 32;
  long eval_every = 500;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  bool operator==(const Budget&) const = default;
};

struct ExperimentMatrix {
  std::string name = "matrix";
  std::size_t profiles = 1000;
  std::uint64_t data_seed = 0;
  ModelConfig model;
  OptimConfig optim;     // lr, rho and weight decay shared by every cell
  DataOptions data;      // k_aug, space_prob, eda_rate
  int fewshot = 1;       // exemplars in pre-IT QA prompts
  Budget budget;
  std::vector<CellSpec> cells;

  void validate() const;
  const CellSpec& cell(std::string_view name) const;
};

std::string matrix_to_json(const ExperimentMatrix& m);
ExperimentMatrix matrix_from_json(std::string_view text);
ExperimentMatrix load_matrix(const std::filesystem::path& file);

/// The 8-cell grid {CPT, Paraphrase CPT} x {baseline, +format, +SAM, +format+SAM}.
std::vector<CellSpec> default_cells();

/// Training configs a cell runs for one seed.
TrainConfig cpt_config(const ExperimentMatrix& m, const CellSpec& c, std::uint64_t seed);
TrainConfig it_config(const ExperimentMatrix& m, const CellSpec& c, std::uint64_t seed);

struct ReportRow {
  std::string cell;
  std::uint64_t seed = 0;
  long cpt_steps = 0;  // optimizer steps of the CPT phase
  long it_steps = 0;   // optimizer steps of the IT phase, 0 without IT
  double em = 0, recall = 0, f1 = 0;
  double doc_acc = 0, q_acc = 0;
  double pearson = 0, spearman = 0;  // NaN when undefined for the run

  bool operator==(const ReportRow&) const;
};

struct CurvePoint {
  long step = 0;
  Attribute attr = Attribute::birth_date;
  double doc_acc = 0, q_acc = 0;
};

struct Curve {
  std::string cell;
  std::uint64_t seed = 0;
  std::string phase;
  std::vector<CurvePoint> points;
};

struct CellFailure {
  std::string cell;
  std::uint64_t seed = 0;
  std::string message;
};

struct ReportTable {
  std::vector<ReportRow> rows;  // matrix cell order, then seed order
  std::vector<Curve> curves;
  std::vector<CellFailure> failures;

  std::vector<const ReportRow*> rows_for(std::string_view cell) const;
};

struct Aggregate {
  ReportRow mean;
  ReportRow std;  // sample standard deviation
};
Aggregate aggregate(std::span<const ReportRow* const> rows);

std::filesystem::path cell_dir(const std::filesystem::path& out, std::string_view cell, std::uint64_t seed);

/// Generates data if needed, runs the CPT phase and optional IT phase of one cell,
/// then writes the done-marker. Skips work when the marker exists.
void run_cell(const ExperimentMatrix& m, std::string_view cell, std::uint64_t seed, const std::filesystem::path& out);

/// Runs every cell x seed. With parallel > 1, cells run as child processes of
/// `self_exe`; cells that reuse another cell's CPT wait for it.
ReportTable run_matrix(const ExperimentMatrix& m, const std::filesystem::path& out, int parallel = 1,
                       const std::string& self_exe = {});

/// Rebuilds the table from the run directories under `out`.
ReportTable collect_report(const std::filesystem::path& out);

/// results.csv (or results.json) plus figdata.json.
void emit_report(const ReportTable& table, const std::filesystem::path& dir, std::string_view format);
std::string results_csv(const ReportTable& table);
std::vector<ReportRow> parse_results_csv(std::string_view text);
std::string figdata_json(const ReportTable& table);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Mean-over-seeds orderings between the named cells that are present.
std::vector<CheckResult> directional_checks(const ReportTable& table, double margin = 1.0);

}  // namespace plab
