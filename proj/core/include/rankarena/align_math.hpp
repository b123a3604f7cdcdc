// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace rankarena {

inline constexpr double kDefaultDpoBeta = 0.1;

/// Sequence log-likelihoods (natural log) under the policy and the frozen
/// reference model for one preference pair.
struct PreferenceLogProbs {
  double logp_policy_chosen = 0.0;
  double logp_policy_rejected = 0.0;
  double logp_ref_chosen = 0.0;
  double logp_ref_rejected = 0.0;
  double beta = kDefaultDpoBeta;

  /// Throws ValidationError on non-finite fields or beta <= 0.
  void validate() const;
};

/// ln(1 + e^x) without overflow.
double softplus(double x);

/// (policy - ref) log-ratio of chosen minus that of rejected.
double dpo_margin(const PreferenceLogProbs& p);

/// -ln sigmoid(beta * margin).
double dpo_loss(const PreferenceLogProbs& p);

/// Mean loss; throws ValidationError on an empty batch.
double dpo_loss_batch(std::span<const PreferenceLogProbs> batch);

/// d loss / d margin = -beta * sigmoid(-beta * margin).
double dpo_loss_grad_margin(double margin, double beta = kDefaultDpoBeta);

/// Loss as a function of the margin alone.
double dpo_loss_from_margin(double margin, double beta = kDefaultDpoBeta);

}  // namespace rankarena
