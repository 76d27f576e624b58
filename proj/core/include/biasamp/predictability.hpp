#pragma once

#include <cstdint>
#include <optional>

#include "biasamp/attacker.hpp"
#include "biasamp/joint.hpp"
#include "biasamp/labels.hpp"

namespace biasamp {

/// Dataset and model predictability for one direction.
struct BiasScores {
  double psi_d = 0.0;
  double psi_m = 0.0;
};

enum class DpaMode { Trained, Exact };

struct DpaConfig {
  AttackerConfig attacker;
  QualityKind quality = QualityKind::InverseCrossEntropy;
  int iterations = 30;
  std::uint64_t master_seed = 42;
  DpaMode mode = DpaMode::Trained;
  bool equalize = true;
};

/// Throws on iterations < 1 or exact mode combined with equalization
/// (the oracle consumes distributions, not flippable instances).
void validate_config(const DpaConfig& cfg);

/// Returns a copy of `labels` where exactly n - round(target_accuracy * n)
/// positions, chosen uniformly without replacement from `seed`, are
/// replaced by a uniformly random *different* class. Agreement with the
/// original is exactly round(target_accuracy * n) / n.
CategoricalLabels equalize_accuracy(const CategoricalLabels& labels,
                                    double target_accuracy,
                                    std::uint64_t seed);

/// (psi_m - psi_d) / (psi_m + psi_d); defined as 0 when both biases are 0
/// (nothing to amplify). Bounded in [-1, 1] for nonnegative inputs.
double dpa_formula(double psi_m, double psi_d);

/// Absolute change psi_m - psi_d (unbounded).
double la_formula(double psi_m, double psi_d);

/// Predictability of the ground-truth target from the direction's prior
/// channel. Trained mode runs the attacker pipeline on cfg.master_seed;
/// exact mode returns the Bayes-optimal quality of the empirical joint.
/// `equalize_to`, when set, flips the target channel to that agreement
/// level first (trained mode only).
double dataset_bias(const PairedDataset& data, Direction direction,
                    const DpaConfig& cfg,
                    std::optional<double> equalize_to = std::nullopt);

/// Same with the prediction channel as the target. Predictions are never
/// equalized; they define the accuracy being matched.
double model_bias(const PairedDataset& data, Direction direction,
                  const DpaConfig& cfg);

/// Directional predictability amplification with confidence interval over
/// cfg.iterations independent equalize/train repetitions. Deterministic
/// for a fixed master seed; iterations derive their own seed streams, so
/// evaluation order cannot change the result.
MetricResult dpa(const PairedDataset& data, Direction direction,
                 const DpaConfig& cfg);

/// Leakage amplification: attribute predictability from task labels,
/// model minus dataset. Non-directional; requires t_hat.
MetricResult leakage_amplification(const PairedDataset& data,
                                   const DpaConfig& cfg);

/// Oracle routes used by simulations: both joints are (task x attribute)
/// distributions; the truth joint gives psi_d, the prediction joint psi_m.
double dpa_exact_from_joints(const JointTable& truth,
                             const JointTable& prediction, Direction direction,
                             QualityKind quality);
double la_exact_from_joints(const JointTable& truth,
                            const JointTable& prediction, QualityKind quality);

}  // namespace biasamp
