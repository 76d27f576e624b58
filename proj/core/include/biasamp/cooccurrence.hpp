#pragma once

#include <vector>

#include "biasamp/joint.hpp"
#include "biasamp/labels.hpp"

namespace biasamp {

/// One (attribute, task) cell of the directional co-occurrence analysis.
/// y = 1 iff the ground-truth joint strictly exceeds the product of its
/// marginals for this pair. delta is the prediction-vs-truth difference of
/// conditionals with the direction's prior variable held fixed, so it lies
/// in [-1, 1].
struct DeltaCell {
  int attribute = 0;
  int task = 0;
  int y = 0;
  double delta = 0.0;
};

/// Cells for every (a, t) pair, with y from the ground-truth joint and
/// delta from the prediction joint. The two tables must share shape; the
/// prior-axis marginal of the truth table must be strictly positive.
/// A zero prior marginal on the prediction side treats the missing class
/// as probability zero instead of erroring (predictions may collapse
/// classes).
std::vector<DeltaCell> delta_matrix(const JointTable& truth,
                                    const JointTable& prediction,
                                    Direction direction);

/// Dataset route: truth joint from (a, t); prediction joint from
/// (a, t_hat) for AtoT or (a_hat, t) for TtoA. Throws if the needed
/// prediction channel is missing.
std::vector<DeltaCell> delta_matrix(const PairedDataset& data,
                                    Direction direction);

/// Directional co-occurrence amplification: mean over cells of
/// y*delta + (1-y)*(-delta). Deterministic, so the confidence interval
/// collapses to the value. Evaluated with per-prior common denominators
/// so a factorizing ground-truth joint yields exactly 0.
MetricResult ba_directional(const JointTable& truth,
                            const JointTable& prediction,
                            Direction direction);
MetricResult ba_directional(const PairedDataset& data, Direction direction);

/// Multi-attribute directional score: X = mean |delta| plus the population
/// variance of the delta values. X is nonnegative by construction.
struct MultiResult {
  MetricResult result;
  double variance = 0.0;
};

MultiResult multi_directional(const JointTable& truth,
                              const JointTable& prediction,
                              Direction direction);
MultiResult multi_directional(const PairedDataset& data, Direction direction);

/// Uncollapsed two-branch evaluation y|d| + (1-y)|-d| of the same score;
/// kept separate so tests can assert it agrees with the collapsed form.
double multi_two_branch(const std::vector<DeltaCell>& cells);

/// Non-directional baseline over positively correlated pairs. Bias score
/// b(t, a) = count(t, a) / count(t); pairs with b_train > 1/|A| qualify;
/// the result is the mean of b_pred - b_train over qualifying pairs.
/// b_pred uses (a_hat, t_hat) when both prediction channels exist, else
/// (a, t_hat). With no qualifying pairs the value is 0 and the result is
/// flagged "no positively correlated pairs".
MetricResult ba_mals(const PairedDataset& train,
                     const PairedDataset& predictions);

}  // namespace biasamp
