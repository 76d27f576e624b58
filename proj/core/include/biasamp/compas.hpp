#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biasamp/io.hpp"
#include "biasamp/joint.hpp"
#include "biasamp/predictability.hpp"
#include "biasamp/tree.hpp"

namespace biasamp {

/// Recidivism table restricted to two race values. The reader keeps the
/// five numeric features and maps race strings to codes (Caucasian -> 0,
/// African-American -> 1); other races are dropped so the public export
/// loads without preprocessing.
struct RecidivismTable {
  FeatureMatrix features;
  CategoricalLabels race;        // attribute channel
  CategoricalLabels recidivism;  // task channel
  std::vector<std::string> race_names;
};

extern const std::vector<std::string> kRecidivismFeatureColumns;

RecidivismTable read_recidivism_csv(std::istream& in,
                                    const std::string& source_name);
RecidivismTable read_recidivism_file(const std::string& path);

struct TabularPipelineConfig {
  TreeParams tree;
  DpaConfig dpa;  // attacker defaults are set by default_pipeline_config()
  std::uint64_t seed = 42;
};

/// Attacker and metric settings used for the recidivism experiments:
/// one hidden layer of 4 sigmoid units, Adam at 0.005, 50 epochs,
/// batch 512, inverse cross-entropy quality.
TabularPipelineConfig default_pipeline_config();

/// One dataset variant after tree training: per-instance labels plus both
/// prediction channels, the ground-truth counts, and every metric in both
/// directions.
struct VariantResult {
  std::string name;
  PredictionsFile predictions;
  JointTable counts;
  std::string tree_task_json;
  std::string tree_attribute_json;
  std::vector<MetricResult> metrics;
};

struct PipelineResult {
  VariantResult unbalanced;
  VariantResult balanced;
  std::vector<std::string> race_names;
};

/// Equal-count subsample across the four (race, recidivism) cells, chosen
/// deterministically from the seed. Throws when any cell is empty.
std::vector<std::size_t> balanced_rows(const RecidivismTable& table,
                                       std::uint64_t seed);

/// Full tabular experiment: builds the unbalanced and balanced variants,
/// trains one decision tree per prediction channel on each variant,
/// predicts in-sample, and evaluates ba-dir, multi-dir, ba-mals, dpa and
/// la (directional metrics in both directions).
PipelineResult run_tabular_pipeline(const RecidivismTable& table,
                                    const TabularPipelineConfig& cfg);

}  // namespace biasamp
