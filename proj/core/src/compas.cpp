#include "biasamp/compas.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "biasamp/cooccurrence.hpp"
#include "biasamp/rng.hpp"

namespace biasamp {

const std::vector<std::string> kRecidivismFeatureColumns = {
    "age", "juv_fel_count", "juv_misd_count", "juv_other_count",
    "priors_count"};

namespace {

constexpr const char* kRaceColumn = "race";
constexpr const char* kRecidColumn = "two_year_recid";

double parse_number(const std::string& field, std::size_t line_no,
                    const std::string& column, const std::string& source) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (field.empty() || consumed != field.size()) {
    throw ValidationError(source + ": line " + std::to_string(line_no) +
                          ": column '" + column + "' must be numeric, got '" +
                          field + "'");
  }
  return value;
}

}  // namespace

RecidivismTable read_recidivism_csv(std::istream& in,
                                    const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(source_name + ": empty file");
  }
  auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };

  std::vector<int> feature_cols;
  for (const auto& name : kRecidivismFeatureColumns) {
    int c = column(name);
    if (c < 0) {
      throw ValidationError(source_name + ": line 1: missing column '" + name +
                            "'");
    }
    feature_cols.push_back(c);
  }
  int col_race = column(kRaceColumn);
  int col_recid = column(kRecidColumn);
  if (col_race < 0 || col_recid < 0) {
    throw ValidationError(std::string(source_name) + ": line 1: missing column '" +
                          (col_race < 0 ? kRaceColumn : kRecidColumn) + "'");
  }

  RecidivismTable table;
  table.race_names = {"Caucasian", "African-American"};
  table.features.feature_names = kRecidivismFeatureColumns;
  table.features.cols = kRecidivismFeatureColumns.size();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    const std::string& race = fields[static_cast<std::size_t>(col_race)];
    int race_code;
    if (race == table.race_names[0]) {
      race_code = 0;
    } else if (race == table.race_names[1]) {
      race_code = 1;
    } else {
      continue;  // two-race analysis; other rows are dropped
    }
    double recid = parse_number(fields[static_cast<std::size_t>(col_recid)],
                                line_no, kRecidColumn, source_name);
    if (recid != 0.0 && recid != 1.0) {
      throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                            ": column '" + kRecidColumn + "' must be 0 or 1");
    }
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      table.features.values.push_back(
          parse_number(fields[static_cast<std::size_t>(feature_cols[f])],
                       line_no, kRecidivismFeatureColumns[f], source_name));
    }
    table.race.codes.push_back(race_code);
    table.recidivism.codes.push_back(recid == 1.0 ? 1 : 0);
    ++table.features.rows;
  }

  if (table.features.rows == 0) {
    throw ValidationError(source_name + ": no rows for the two analyzed races");
  }
  table.race.cardinality = 2;
  table.recidivism.cardinality = 2;
  return table;
}

RecidivismTable read_recidivism_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  return read_recidivism_csv(in, path);
}

TabularPipelineConfig default_pipeline_config() {
  TabularPipelineConfig cfg;
  cfg.tree.max_depth = 5;
  cfg.tree.min_leaf = 8;
  cfg.dpa.attacker.depth = 1;
  cfg.dpa.attacker.width = 4;
  cfg.dpa.attacker.activation = Activation::Sigmoid;
  cfg.dpa.attacker.optimizer = Optimizer::Adam;
  cfg.dpa.attacker.learning_rate = 0.005;
  cfg.dpa.attacker.epochs = 50;
  cfg.dpa.attacker.batch_size = 512;
  cfg.dpa.quality = QualityKind::InverseCrossEntropy;
  cfg.dpa.iterations = 30;
  cfg.dpa.equalize = true;
  return cfg;
}

std::vector<std::size_t> balanced_rows(const RecidivismTable& table,
                                       std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> cells(4);
  for (std::size_t i = 0; i < table.features.rows; ++i) {
    int cell = table.race.codes[i] * 2 + table.recidivism.codes[i];
    cells[static_cast<std::size_t>(cell)].push_back(i);
  }
  std::size_t quota = table.features.rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) {
      throw ValidationError(
          "balancing requires every (race, recidivism) cell to be populated; "
          "cell (" + std::to_string(c / 2) + ", " + std::to_string(c % 2) +
          ") is empty");
    }
    quota = std::min(quota, cells[c].size());
  }

  std::vector<std::size_t> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Rng rng(derive_seed(seed, 0xba1a0u + c));
    auto order = shuffled_indices(cells[c].size(), rng);
    for (std::size_t k = 0; k < quota; ++k) {
      rows.push_back(cells[c][order[k]]);
    }
  }
  std::sort(rows.begin(), rows.end());  // keep file order in outputs
  return rows;
}

namespace {

RecidivismTable subset(const RecidivismTable& table,
                       const std::vector<std::size_t>& rows) {
  RecidivismTable out;
  out.race_names = table.race_names;
  out.features.feature_names = table.features.feature_names;
  out.features.cols = table.features.cols;
  out.features.rows = rows.size();
  out.race.cardinality = 2;
  out.recidivism.cardinality = 2;
  for (auto r : rows) {
    for (std::size_t c = 0; c < table.features.cols; ++c) {
      out.features.values.push_back(table.features.at(r, c));
    }
    out.race.codes.push_back(table.race.codes[r]);
    out.recidivism.codes.push_back(table.recidivism.codes[r]);
  }
  return out;
}

VariantResult run_variant(std::string name, const RecidivismTable& table,
                          const TabularPipelineConfig& cfg,
                          std::uint64_t variant_stream) {
  VariantResult out;
  out.name = std::move(name);

  TreeNode task_tree = train_tree(table.features, table.recidivism, cfg.tree);
  TreeNode attribute_tree = train_tree(table.features, table.race, cfg.tree);
  out.tree_task_json = tree_to_json(task_tree);
  out.tree_attribute_json = tree_to_json(attribute_tree);

  out.predictions.data.a = table.race;
  out.predictions.data.t = table.recidivism;
  out.predictions.data.a_hat =
      tree_predict(attribute_tree, table.features, table.race.cardinality);
  out.predictions.data.t_hat =
      tree_predict(task_tree, table.features, table.recidivism.cardinality);
  out.predictions.ids.resize(table.features.rows);
  for (std::size_t i = 0; i < table.features.rows; ++i) {
    out.predictions.ids[i] = static_cast<long>(i);
  }

  out.counts = build_joint(table.race, table.recidivism);

  DpaConfig dpa_cfg = cfg.dpa;
  dpa_cfg.master_seed = derive_seed(cfg.seed, variant_stream);
  const PairedDataset& data = out.predictions.data;
  for (Direction dir : {Direction::TtoA, Direction::AtoT}) {
    out.metrics.push_back(ba_directional(data, dir));
    out.metrics.push_back(multi_directional(data, dir).result);
    out.metrics.push_back(dpa(data, dir, dpa_cfg));
  }
  out.metrics.push_back(ba_mals(data, data));
  out.metrics.push_back(leakage_amplification(data, dpa_cfg));
  return out;
}

}  // namespace

PipelineResult run_tabular_pipeline(const RecidivismTable& table,
                                    const TabularPipelineConfig& cfg) {
  validate_config(cfg.dpa);
  // balancing feasibility is the pipeline's entry contract; check before
  // any training so a single-race input fails as an input problem
  RecidivismTable balanced = subset(table, balanced_rows(table, cfg.seed));
  PipelineResult result;
  result.race_names = table.race_names;
  result.unbalanced = run_variant("unbalanced", table, cfg, 0x0bu);
  result.balanced = run_variant("balanced", balanced, cfg, 0x1bu);
  return result;
}

}  // namespace biasamp
