#pragma once

#include <optional>
#include <string>
#include <vector>

namespace biasamp {

/// Dense integer class codes. Every code lies in [0, cardinality) and the
/// mathematics below never sees string labels; mapping happens at ingestion.
struct CategoricalLabels {
  std::vector<int> codes;
  int cardinality = 0;

  std::size_t size() const { return codes.size(); }
};

/// Validating factory. Throws std::invalid_argument on empty input,
/// cardinality < 2, or out-of-range codes.
CategoricalLabels make_labels(std::vector<int> codes, int cardinality);

/// Which variable drives the other when measuring amplification.
enum class Direction { AtoT, TtoA };

const char* direction_name(Direction d);

/// Per-instance attribute labels, task labels, and optional model
/// predictions for either channel. All present channels share length n.
struct PairedDataset {
  CategoricalLabels a;
  CategoricalLabels t;
  std::optional<CategoricalLabels> a_hat;
  std::optional<CategoricalLabels> t_hat;

  std::size_t size() const { return a.codes.size(); }
};

/// Non-throwing structural check: returns one message per violation
/// (length mismatches, out-of-range codes, cardinality problems).
/// An empty result means the dataset is usable.
std::vector<std::string> validate(const PairedDataset& data);

/// Throws std::invalid_argument listing all violations.
void ensure_valid(const PairedDataset& data);

/// One computed metric value with its confidence interval.
/// Deterministic for a fixed master seed. `flag` is empty unless the
/// metric had to report a degenerate situation (e.g. no positively
/// correlated pairs).
struct MetricResult {
  std::string metric_id;
  std::optional<Direction> direction;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int iterations = 1;
  std::string flag;
};

/// Fraction of positions where the two label sequences agree.
double agreement(const CategoricalLabels& prediction,
                 const CategoricalLabels& truth);

}  // namespace biasamp
