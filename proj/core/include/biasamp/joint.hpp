#pragma once

#include <vector>

#include "biasamp/labels.hpp"
#include "biasamp/rng.hpp"

namespace biasamp {

/// Axis of a JointTable. Task indexes rows, Attribute indexes columns.
enum class Axis { Task, Attribute };

/// |T| x |A| co-occurrence table, either raw counts or probabilities.
/// Counts sum to the instance count; probabilities sum to 1 within 1e-12.
struct JointTable {
  enum class Kind { Counts, Probabilities };

  std::vector<double> cells;  // row-major, cells[t * attribute_count + a]
  int task_count = 0;
  int attribute_count = 0;
  Kind kind = Kind::Counts;

  double at(int t, int a) const { return cells[t * attribute_count + a]; }
  double& at(int t, int a) { return cells[t * attribute_count + a]; }
  double total() const;
};

/// Counts table from paired labels: cell(t, a) = #{i : t_i = t, a_i = a}.
JointTable build_joint(const CategoricalLabels& a, const CategoricalLabels& t);

/// Normalizes a counts table to probabilities (no-op on probability kind).
JointTable to_probabilities(const JointTable& table);

/// Sums over the other axis: marginal(x, Axis::Task)[t] = sum_a cell(t, a).
std::vector<double> marginal(const JointTable& table, Axis axis);

/// P(other axis | given axis = value). Throws on a zero conditioning
/// marginal: a missing class is an error the caller must handle, never a
/// silent zero vector.
std::vector<double> conditional(const JointTable& table, Axis given, int value);

/// Draws n (a, t) pairs from a joint distribution. Accepts either kind;
/// counts are normalized internally. Deterministic in rng state.
std::pair<CategoricalLabels, CategoricalLabels> sample_joint(
    const JointTable& table, std::size_t n, Rng& rng);

}  // namespace biasamp
