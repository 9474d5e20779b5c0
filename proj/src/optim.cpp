// Copyright 2026 The plab Authors
// SPDX-License-Identifier: Apache-2.0

#include "plab/optim.hpp"

#include <cmath>

#include "json.hpp"

namespace plab {

using nlohmann::json;

std::string_view optimizer_name(OptimizerKind k) { return k == OptimizerKind::sam ? "sam" : "adamw"; }

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "adamw") return OptimizerKind::adamw;
  if (s == "sam") return OptimizerKind::sam;
  throw Error(Errc::config, "unknown optimizer '" + std::string(s) + "'");
}

void OptimConfig::validate() const {
  if (!(lr > 0)) throw Error(Errc::config, "lr must be positive");
  if (!(rho >= 0)) throw Error(Errc::config, "rho must be non-negative");
  if (!(weight_decay >= 0)) throw Error(Errc::config, "weight_decay must be non-negative");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw Error(Errc::config, "betas must lie in [0, 1)");
  if (!(eps > 0)) throw Error(Errc::config, "eps must be positive");
  if (!(warmup_frac >= 0 && warmup_frac <= 1)) throw Error(Errc::config, "warmup_frac must lie in [0, 1]");
}

std::string optim_to_json(const OptimConfig& c) {
  return json{{"optimizer", c.use_sam ? "sam" : "adamw"},
              {"lr", c.lr},
              {"betas", {c.beta1, c.beta2}},
              {"eps", c.eps},
              {"weight_decay", c.weight_decay},
              {"rho", c.rho},
              {"warmup_frac", c.warmup_frac}}
      .dump();
}

OptimConfig optim_from_json(std::string_view text) {
  json j = json::parse(text);
  OptimConfig c;
  c.use_sam = parse_optimizer(j.value("optimizer", std::string("adamw"))) == OptimizerKind::sam;
  c.lr = j.value("lr", c.lr);
  if (j.contains("betas")) {
    c.beta1 = j["betas"].at(0).get<double>();
    c.beta2 = j["betas"].at(1).get<double>();
  }
  c.eps = j.value("eps", c.eps);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.rho = j.value("rho", c.rho);
  c.warmup_frac = j.value("warmup_frac", c.warmup_frac);
  c.validate();
  return c;
}

double scheduled_lr(const OptimConfig& c, long step, long total) {
  const long warmup = static_cast<long>(std::ceil(c.warmup_frac * static_cast<double>(total)));
  if (warmup <= 0 || step >= warmup) return c.lr;
  return c.lr * static_cast<double>(step + 1) / static_cast<double>(warmup);
}

template <typename S>
void adamw_step(Vector<S>& theta, const Vector<S>& grad, OptimState<S>& state, const OptimConfig& c) {
  if (grad.size() != theta.size() || state.m.size() != theta.size() || state.v.size() != theta.size()) {
    throw Error(Errc::invalid_argument, "optimizer shapes do not match the parameters");
  }
  if (!grad.allFinite()) throw Error(Errc::non_finite, "non-finite gradient");
  state.step += 1;
  const S lr = static_cast<S>(c.lr);
  const S b1 = static_cast<S>(c.beta1), b2 = static_cast<S>(c.beta2);
  const S bc1 = static_cast<S>(1.0 - std::pow(c.beta1, static_cast<double>(state.step)));
  const S bc2 = static_cast<S>(1.0 - std::pow(c.beta2, static_cast<double>(state.step)));
  const S eps = static_cast<S>(c.eps);

  if (c.weight_decay > 0) theta *= static_cast<S>(1.0 - c.lr * c.weight_decay);
  state.m = b1 * state.m + (S(1) - b1) * grad;
  state.v = b2 * state.v + (S(1) - b2) * grad.cwiseProduct(grad);
  theta.array() -= lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + eps);
}

template <typename S>
SamPerturbation<S> sam_perturb(Vector<S>& theta, const Vector<S>& grad, double rho) {
  // accumulate the norm in double so float gradients keep ‖ε̂‖ accurate
  const double norm = grad.template cast<double>().norm();
  if (!std::isfinite(norm)) throw Error(Errc::non_finite, "non-finite gradient norm");
  if (norm == 0.0) throw Error(Errc::zero_gradient, "zero gradient; perturbation direction undefined");
  SamPerturbation<S> p;
  p.saved = theta;
  p.grad_norm = norm;
  p.epsilon = (grad.template cast<double>() * (rho / norm)).template cast<S>();
  theta += p.epsilon;
  return p;
}

template <typename S>
void sam_restore(Vector<S>& theta, const SamPerturbation<S>& p) {
  theta = p.saved;
}

template <typename S>
StepResult sam_step_with(Vector<S>& theta, double rho, const GradientOracle<S>& oracle, const UpdateRule<S>& update) {
  StepResult r;
  Vector<S> g1(theta.size());
  r.loss = oracle(theta, g1);
  r.grad_evals = 1;
  if (!std::isfinite(r.loss)) throw Error(Errc::non_finite, "non-finite loss");
  SamPerturbation<S> p;
  try {
    p = sam_perturb(theta, g1, rho);
  } catch (const Error& e) {
    if (e.code() != Errc::zero_gradient) throw;
    update(theta, g1);
    return r;
  }
  Vector<S> g2(theta.size());
  const double perturbed_loss = oracle(theta, g2);
  r.grad_evals = 2;
  r.perturbed = true;
  sam_restore(theta, p);
  if (!std::isfinite(perturbed_loss)) throw Error(Errc::non_finite, "non-finite loss at perturbed point");
  update(theta, g2);
  return r;
}

template <typename S>
StepResult sam_step(Vector<S>& theta, OptimState<S>& state, const OptimConfig& c, const GradientOracle<S>& oracle) {
  UpdateRule<S> rule = [&](Vector<S>& t, const Vector<S>& g) { adamw_step(t, g, state, c); };
  StepResult r = sam_step_with(theta, c.rho, oracle, rule);
  state.grad_evals += r.grad_evals;
  return r;
}

template <typename S>
StepResult adamw_oracle_step(Vector<S>& theta, OptimState<S>& state, const OptimConfig& c,
                             const GradientOracle<S>& oracle) {
  StepResult r;
  Vector<S> g(theta.size());
  r.loss = oracle(theta, g);
  r.grad_evals = 1;
  if (!std::isfinite(r.loss)) throw Error(Errc::non_finite, "non-finite loss");
  adamw_step(theta, g, state, c);
  state.grad_evals += 1;
  return r;
}

template <typename S>
UpdateRule<S> sgd_rule(double lr) {
  return [lr](Vector<S>& theta, const Vector<S>& grad) { theta -= static_cast<S>(lr) * grad; };
}

template <typename S>
GradientOracle<S> model_oracle(const ModelConfig& config, const Batch& batch) {
  auto params = std::make_shared<Params<S>>(config);
  return [params, &batch](const Vector<S>& theta, Vector<S>& grad) {
    params->flat() = theta;
    LossAndGrad<S> lg = loss_and_grad(*params, batch);
    grad = std::move(lg.grads.flat());
    return lg.loss.loss;
  };
}

#define PLAB_OPTIM_INSTANTIATE(S)                                                                        \
  template void adamw_step<S>(Vector<S>&, const Vector<S>&, OptimState<S>&, const OptimConfig&);       \
  template SamPerturbation<S> sam_perturb<S>(Vector<S>&, const Vector<S>&, double);                    \
  template void sam_restore<S>(Vector<S>&, const SamPerturbation<S>&);                                 \
  template StepResult sam_step_with<S>(Vector<S>&, double, const GradientOracle<S>&, const UpdateRule<S>&); \
  template StepResult sam_step<S>(Vector<S>&, OptimState<S>&, const OptimConfig&, const GradientOracle<S>&); \
  template StepResult adamw_oracle_step<S>(Vector<S>&, OptimState<S>&, const OptimConfig&,             \
                                           const GradientOracle<S>&);                                  \
  template UpdateRule<S> sgd_rule<S>(double);                                                          \
  template GradientOracle<S> model_oracle<S>(const ModelConfig&, const Batch&);

PLAB_OPTIM_INSTANTIATE(float)
PLAB_OPTIM_INSTANTIATE(double)

}  // namespace plab
