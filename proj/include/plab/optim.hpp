// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0
//
// AdamW and the sharpness-aware wrapper. Both act on the flat parameter
// vector; the model layout is irrelevant here.

#pragma once

#include <functional>
#include <string>

#include "plab/model.hpp"

namespace plab {

enum class OptimizerKind { adamw, sam };

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view s);

struct OptimConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double rho = 0.05;
  bool use_sam = false;
  double warmup_frac = 0.05;

  void validate() const;
  bool operator==(const OptimConfig&) const = default;
};

std::string optim_to_json(const OptimConfig& c);
OptimConfig optim_from_json(std::string_view text);

/// Learning rate at 0-based `step` of `total`: linear warmup, then constant.
double scheduled_lr(const OptimConfig& c, long step, long total);

template <typename S>
struct OptimState {
  Vector<S> m;
  Vector<S> v;
  long step = 0;
  long grad_evals = 0;  // gradient oracle calls, for cost bookkeeping

  static OptimState zeros(Index n) { return {Vector<S>::Zero(n), Vector<S>::Zero(n), 0, 0}; }
};

/// Decoupled decay θ ← θ(1 − lr·λ), then the bias-corrected Adam term.
/// Throws non_finite when the gradient holds NaN or Inf.
template <typename S>
void adamw_step(Vector<S>& theta, const Vector<S>& grad, OptimState<S>& state, const OptimConfig& c);

template <typename S>
struct SamPerturbation {
  Vector<S> saved;  // θ before the ascent step
  double grad_norm = 0.0;
  Vector<S> epsilon;
};

/// θ ← θ + ρ g / ‖g‖₂ with one global norm. Throws zero_gradient when ‖g‖ = 0.
template <typename S>
SamPerturbation<S> sam_perturb(Vector<S>& theta, const Vector<S>& grad, double rho);

/// Restores θ bit-exactly from a perturbation record.
template <typename S>
void sam_restore(Vector<S>& theta, const SamPerturbation<S>& p);

/// Gradient oracle: fills grad at theta and returns the loss.
template <typename S>
using GradientOracle = std::function<double(const Vector<S>& theta, Vector<S>& grad)>;

/// Parameter update applied with the descent gradient.
template <typename S>
using UpdateRule = std::function<void(Vector<S>& theta, const Vector<S>& grad)>;

struct StepResult {
  double loss = 0.0;       // loss at the unperturbed θ
  int grad_evals = 0;
  bool perturbed = false;  // false when the first gradient vanished
};

/// One sharpness-aware step: g₁ at θ, ascend by ε̂, g₂ at θ + ε̂, restore θ,
/// then `update(θ, g₂)`. A zero g₁ falls back to `update(θ, g₁)`.
template <typename S>
StepResult sam_step_with(Vector<S>& theta, double rho, const GradientOracle<S>& oracle, const UpdateRule<S>& update);

/// sam_step_with using adamw_step as the update; counts gradient evaluations in state.
template <typename S>
StepResult sam_step(Vector<S>& theta, OptimState<S>& state, const OptimConfig& c, const GradientOracle<S>& oracle);

/// Plain AdamW step through the same oracle interface (one evaluation).
template <typename S>
StepResult adamw_oracle_step(Vector<S>& theta, OptimState<S>& state, const OptimConfig& c,
                             const GradientOracle<S>& oracle);

/// θ ← θ − lr·g, the test hook that exposes the SAM closed form.
template <typename S>
UpdateRule<S> sgd_rule(double lr);

/// Oracle over a model and a fixed batch, built on loss_and_grad.
template <typename S>
GradientOracle<S> model_oracle(const ModelConfig& config, const Batch& batch);

}  // namespace plab
