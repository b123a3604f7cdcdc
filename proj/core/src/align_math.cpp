// SPDX-License-Identifier: Apache-2.0
#include "rankarena/align_math.hpp"

#include <cmath>
#include <string>

#include "rankarena/error.hpp"

namespace rankarena {
namespace {

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ValidationError("beta must be a positive finite number, got " + std::to_string(beta));
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void PreferenceLogProbs::validate() const {
  for (double v : {logp_policy_chosen, logp_policy_rejected, logp_ref_chosen, logp_ref_rejected}) {
    if (!std::isfinite(v)) throw ValidationError("log-probabilities must be finite");
  }
  check_beta(beta);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double dpo_margin(const PreferenceLogProbs& p) {
  p.validate();
  return (p.logp_policy_chosen - p.logp_ref_chosen) -
         (p.logp_policy_rejected - p.logp_ref_rejected);
}

double dpo_loss_from_margin(double margin, double beta) {
  check_beta(beta);
  if (!std::isfinite(margin)) throw ValidationError("margin must be finite");
  return softplus(-beta * margin);
}

double dpo_loss(const PreferenceLogProbs& p) { return dpo_loss_from_margin(dpo_margin(p), p.beta); }

double dpo_loss_batch(std::span<const PreferenceLogProbs> batch) {
  if (batch.empty()) throw ValidationError("dpo_loss_batch: empty batch");
  double sum = 0.0;
  for (const auto& p : batch) sum += dpo_loss(p);
  return sum / static_cast<double>(batch.size());
}

double dpo_loss_grad_margin(double margin, double beta) {
  check_beta(beta);
  if (!std::isfinite(margin)) throw ValidationError("margin must be finite");
  return -beta * sigmoid(-beta * margin);
}

}  // namespace rankarena
