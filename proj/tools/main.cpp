// biasamp: bias amplification metrics for classification data.
//
// Subcommands: compute (metrics over a predictions CSV), pipeline-compas
// (tabular recidivism experiment), heatmap (alpha_d x alpha_m metric
// grids), robustness (attacker-width sweep on synthetic data), curves
// (amplification-vs-model-bias formula curves).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "biasamp/compas.hpp"
#include "biasamp/cooccurrence.hpp"
#include "biasamp/io.hpp"
#include "biasamp/predictability.hpp"
#include "biasamp/synthetic.hpp"

using nlohmann::json;
using namespace biasamp;

namespace {

constexpr const char* kSeedEnvVar = "BIASAMP_SEED";

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnvVar)) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string(kSeedEnvVar) +
                            " must be an unsigned integer, got '" + env + "'");
    }
  }
  return 42;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

QualityKind parse_quality(const std::string& name) {
  if (name == "accuracy") return QualityKind::Accuracy;
  if (name == "inv-ce") return QualityKind::InverseCrossEntropy;
  if (name == "one-minus-ce") return QualityKind::OneMinusCrossEntropy;
  if (name == "inv-rmse") return QualityKind::InverseRmse;
  throw ValidationError("unknown quality '" + name + "'");
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw ValidationError("unknown activation '" + name + "'");
}

Optimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return Optimizer::Adam;
  if (name == "sgd") return Optimizer::Sgd;
  throw ValidationError("unknown optimizer '" + name + "'");
}

// Shared attacker/metric options for compute and pipeline-compas.
struct MetricOptions {
  std::string quality = "inv-ce";
  std::string mode = "trained";
  std::string equalize = "on";
  int iterations = 30;
  int attacker_depth = 2;
  int attacker_width = 16;
  std::string attacker_activation = "relu";
  std::string attacker_optimizer = "adam";
  double attacker_lr = 1e-3;
  int attacker_epochs = 100;
  int attacker_batch = 64;

  void register_flags(CLI::App* cmd) {
    cmd->add_option("--quality", quality,
                    "Quality function: accuracy|inv-ce|one-minus-ce|inv-rmse");
    cmd->add_option("--mode", mode,
                    "trained (attacker networks) or exact (Bayes oracle)");
    cmd->add_option("--equalize", equalize,
                    "Flip ground-truth targets to the model accuracy: on|off");
    cmd->add_option("--iterations", iterations,
                    "Equalize/train repetitions behind the confidence interval");
    cmd->add_option("--attacker-depth", attacker_depth, "Hidden layers");
    cmd->add_option("--attacker-width", attacker_width, "Neurons per hidden layer");
    cmd->add_option("--attacker-activation", attacker_activation,
                    "relu|tanh|sigmoid");
    cmd->add_option("--attacker-optimizer", attacker_optimizer, "adam|sgd");
    cmd->add_option("--attacker-lr", attacker_lr, "Learning rate");
    cmd->add_option("--attacker-epochs", attacker_epochs, "Training epochs");
    cmd->add_option("--attacker-batch", attacker_batch, "Minibatch size");
  }

  DpaConfig to_config(std::uint64_t seed) const {
    DpaConfig cfg;
    cfg.attacker.depth = attacker_depth;
    cfg.attacker.width = attacker_width;
    cfg.attacker.activation = parse_activation(attacker_activation);
    cfg.attacker.optimizer = parse_optimizer(attacker_optimizer);
    cfg.attacker.learning_rate = attacker_lr;
    cfg.attacker.epochs = attacker_epochs;
    cfg.attacker.batch_size = attacker_batch;
    cfg.quality = parse_quality(quality);
    cfg.iterations = iterations;
    cfg.master_seed = seed;
    if (mode == "exact") {
      cfg.mode = DpaMode::Exact;
    } else if (mode != "trained") {
      throw ValidationError("unknown mode '" + mode + "'");
    }
    if (equalize == "off") {
      cfg.equalize = false;
    } else if (equalize != "on") {
      throw ValidationError("--equalize must be on or off");
    }
    if (cfg.mode == DpaMode::Exact) cfg.equalize = false;
    try {
      validate_config(cfg);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    return cfg;
  }
};

json result_to_json(const MetricResult& r, std::uint64_t seed) {
  json j;
  j["metric"] = r.metric_id;
  if (r.direction) {
    j["direction"] = direction_name(*r.direction);
  } else {
    j["direction"] = nullptr;
  }
  j["value"] = r.value;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["iterations"] = r.iterations;
  j["seed"] = seed;
  if (!r.flag.empty()) j["flag"] = r.flag;
  return j;
}

void write_result_csv(std::ostream& out, const std::vector<MetricResult>& results,
                      std::uint64_t seed) {
  out << "metric,direction,value,ci_low,ci_high,iterations,seed\n";
  for (const auto& r : results) {
    out << r.metric_id << ','
        << (r.direction ? direction_name(*r.direction) : "") << ','
        << format_double(r.value) << ',' << format_double(r.ci_low) << ','
        << format_double(r.ci_high) << ',' << r.iterations << ',' << seed
        << '\n';
  }
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  write_text_file(output_path, text);
}

// ---------------------------------------------------------------------------
// compute

struct ComputeOptions {
  std::string input;
  std::vector<std::string> metrics = {"dpa", "la", "ba-dir", "multi-dir",
                                      "ba-mals"};
  std::string direction = "both";
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 0;
  bool seed_set = false;
  MetricOptions metric_options;
};

int run_compute(const ComputeOptions& opt) {
  std::uint64_t seed = opt.seed_set ? opt.seed : default_seed();
  auto file = read_predictions_file(opt.input);
  const PairedDataset& data = file.data;

  std::vector<Direction> directions;
  if (opt.direction == "both") {
    directions = {Direction::AtoT, Direction::TtoA};
  } else if (opt.direction == "a-to-t") {
    directions = {Direction::AtoT};
  } else if (opt.direction == "t-to-a") {
    directions = {Direction::TtoA};
  } else {
    throw ValidationError("unknown direction '" + opt.direction + "'");
  }

  // channel availability checked up front so problems name the column
  for (const auto& metric : opt.metrics) {
    bool directional = metric == "dpa" || metric == "ba-dir" || metric == "multi-dir";
    if (directional) {
      for (Direction d : directions) {
        if (d == Direction::AtoT && !data.t_hat) {
          throw ValidationError(opt.input + ": metric '" + metric +
                                "' with direction a-to-t needs column 't_hat'");
        }
        if (d == Direction::TtoA && !data.a_hat) {
          throw ValidationError(opt.input + ": metric '" + metric +
                                "' with direction t-to-a needs column 'a_hat'");
        }
      }
    } else if (metric == "la" || metric == "ba-mals") {
      if (!data.t_hat) {
        throw ValidationError(opt.input + ": metric '" + metric +
                              "' needs column 't_hat'");
      }
    } else {
      throw ValidationError("unknown metric '" + metric + "'");
    }
  }

  DpaConfig cfg = opt.metric_options.to_config(seed);

  std::vector<MetricResult> results;
  std::vector<double> multi_variances;
  for (const auto& metric : opt.metrics) {
    if (metric == "dpa") {
      for (Direction d : directions) results.push_back(dpa(data, d, cfg));
    } else if (metric == "ba-dir") {
      for (Direction d : directions) results.push_back(ba_directional(data, d));
    } else if (metric == "multi-dir") {
      for (Direction d : directions) {
        auto m = multi_directional(data, d);
        results.push_back(m.result);
        multi_variances.push_back(m.variance);
      }
    } else if (metric == "la") {
      results.push_back(leakage_amplification(data, cfg));
    } else if (metric == "ba-mals") {
      results.push_back(ba_mals(data, data));
    }
  }

  if (opt.format == "csv") {
    std::ostringstream out;
    write_result_csv(out, results, seed);
    emit(out.str(), opt.output);
  } else if (opt.format == "json") {
    json report;
    report["command"] = "compute";
    report["input"] = opt.input;
    report["seed"] = seed;
    report["labels"] = {{"a_cardinality", data.a.cardinality},
                        {"t_cardinality", data.t.cardinality},
                        {"encoding", "dense integer codes from the input file"}};
    report["results"] = json::array();
    std::size_t variance_index = 0;
    for (const auto& r : results) {
      json jr = result_to_json(r, seed);
      if (r.metric_id == "multi-dir") {
        jr["variance"] = multi_variances[variance_index++];
      }
      report["results"].push_back(std::move(jr));
    }
    emit(report.dump(2) + "\n", opt.output);
  } else {
    throw ValidationError("unknown format '" + opt.format + "'");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline-compas

struct PipelineOptions {
  std::string input;
  std::string outdir = ".";
  int max_depth = 5;
  int min_leaf = 8;
  std::uint64_t seed = 0;
  bool seed_set = false;
  MetricOptions metric_options;
};

json variant_to_json(const VariantResult& v, std::uint64_t seed) {
  json j;
  j["name"] = v.name;
  j["counts"] = {{"t0", {v.counts.at(0, 0), v.counts.at(0, 1)}},
                 {"t1", {v.counts.at(1, 0), v.counts.at(1, 1)}}};
  j["results"] = json::array();
  for (const auto& r : v.metrics) {
    j["results"].push_back(result_to_json(r, seed));
  }
  return j;
}

int run_pipeline(PipelineOptions& opt) {
  std::uint64_t seed = opt.seed_set ? opt.seed : default_seed();
  auto table = read_recidivism_file(opt.input);

  TabularPipelineConfig cfg = default_pipeline_config();
  cfg.tree.max_depth = opt.max_depth;
  cfg.tree.min_leaf = opt.min_leaf;
  cfg.seed = seed;
  // metric options are pre-seeded with the tabular defaults; flags override
  cfg.dpa = opt.metric_options.to_config(seed);

  auto result = run_tabular_pipeline(table, cfg);

  std::filesystem::create_directories(opt.outdir);
  auto path = [&](const std::string& name) {
    return (std::filesystem::path(opt.outdir) / name).string();
  };
  for (const VariantResult* v : {&result.unbalanced, &result.balanced}) {
    write_predictions_file(v->predictions, path(v->name + "_predictions.csv"));
    write_text_file(path(v->name + "_tree_task.json"), v->tree_task_json);
    write_text_file(path(v->name + "_tree_attribute.json"),
                    v->tree_attribute_json);
  }

  json report;
  report["command"] = "pipeline-compas";
  report["input"] = opt.input;
  report["seed"] = seed;
  report["attribute_mapping"] = {{result.race_names[0], 0},
                                 {result.race_names[1], 1}};
  report["task_mapping"] = {{"no_recidivism", 0}, {"recidivism", 1}};
  report["variants"] = {variant_to_json(result.unbalanced, seed),
                        variant_to_json(result.balanced, seed)};
  write_text_file(path("report.json"), report.dump(2) + "\n");

  for (const VariantResult* v : {&result.unbalanced, &result.balanced}) {
    std::cout << v->name << ": n=" << v->counts.total()
              << " counts=[" << v->counts.at(0, 0) << ',' << v->counts.at(0, 1)
              << ';' << v->counts.at(1, 0) << ',' << v->counts.at(1, 1) << "]\n";
    for (const auto& r : v->metrics) {
      std::cout << "  " << r.metric_id;
      if (r.direction) std::cout << ' ' << direction_name(*r.direction);
      std::cout << " = " << format_double(r.value) << "  ["
                << format_double(r.ci_low) << ", " << format_double(r.ci_high)
                << "]";
      if (!r.flag.empty()) std::cout << "  (" << r.flag << ")";
      std::cout << '\n';
    }
  }
  std::cout << "report: " << path("report.json") << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// heatmap

struct HeatmapOptions {
  std::string metric = "dpa";
  std::string direction = "a-to-t";
  std::string quality = "accuracy";
  std::string mode = "exact";
  double alpha_min = -0.25;
  double alpha_max = 0.25;
  double step = 0.005;
  int samples = 10000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "heatmap";
};

int run_heatmap_cmd(const HeatmapOptions& opt) {
  HeatmapConfig cfg;
  cfg.metric_id = opt.metric;
  cfg.alpha_min = opt.alpha_min;
  cfg.alpha_max = opt.alpha_max;
  cfg.step = opt.step;
  cfg.quality = parse_quality(opt.quality);
  cfg.samples = opt.samples;
  cfg.seed = opt.seed_set ? opt.seed : default_seed();
  if (opt.direction == "a-to-t") {
    cfg.direction = Direction::AtoT;
  } else if (opt.direction == "t-to-a") {
    cfg.direction = Direction::TtoA;
  } else {
    throw ValidationError("unknown direction '" + opt.direction + "'");
  }
  if (opt.mode == "sampled") {
    cfg.mode = HeatmapMode::Sampled;
  } else if (opt.mode != "exact") {
    throw ValidationError("unknown mode '" + opt.mode + "'");
  }

  auto grid = run_heatmap(cfg);

  std::ostringstream csv;
  write_grid_csv(grid, csv);
  write_text_file(opt.out + ".csv", csv.str());
  std::ostringstream pgm;
  write_grid_pgm(grid, pgm);
  write_text_file(opt.out + ".pgm", pgm.str());

  double lo = grid.values[0], hi = grid.values[0], mean = 0.0;
  for (double v : grid.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mean += v;
  }
  mean /= static_cast<double>(grid.values.size());
  std::cout << "metric=" << opt.metric << " grid=" << grid.size() << "x"
            << grid.size() << " min=" << format_double(lo)
            << " max=" << format_double(hi) << " mean=" << format_double(mean)
            << '\n'
            << "wrote " << opt.out << ".csv and " << opt.out << ".pgm\n";
  return 0;
}

// ---------------------------------------------------------------------------
// robustness

struct RobustnessOptions {
  std::vector<int> widths = {5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<int> depths = {2};
  int degree = 2;
  double alpha1 = 2.0;
  double alpha2 = 1.0;
  int samples = 2000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  MetricOptions metric_options;
};

int run_robustness_cmd(const RobustnessOptions& opt) {
  PolySynthConfig data_cfg;
  data_cfg.degree = opt.degree;
  data_cfg.alpha1 = opt.alpha1;
  data_cfg.alpha2 = opt.alpha2;
  data_cfg.samples = opt.samples;
  data_cfg.seed = opt.seed_set ? opt.seed : default_seed();

  DpaConfig metric_cfg = opt.metric_options.to_config(data_cfg.seed);
  AttackerConfig base = metric_cfg.attacker;
  base.seed = data_cfg.seed;

  auto table = run_robustness(opt.widths, opt.depths, data_cfg, base);

  std::ostringstream csv;
  csv << "width,depth,psi_d,psi_m,relative,absolute\n";
  for (const auto& row : table.rows) {
    csv << row.width << ',' << row.depth << ',' << format_double(row.psi_d)
        << ',' << format_double(row.psi_m) << ',' << format_double(row.relative)
        << ',' << format_double(row.absolute) << '\n';
  }
  emit(csv.str(), opt.out);
  std::cerr << "sd(relative)=" << format_double(table.relative_sd)
            << " sd(absolute)=" << format_double(table.absolute_sd) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// curves

struct CurvesOptions {
  std::vector<double> psi_d = {0.1, 1.0, 2.0};
  double psi_m_min = 0.01;
  double psi_m_max = 3.0;
  double step = 0.01;
  std::string out;
};

int run_curves_cmd(const CurvesOptions& opt) {
  auto points = relative_curves(opt.psi_d, opt.psi_m_min, opt.psi_m_max, opt.step);
  std::ostringstream csv;
  csv << "psi_d,psi_m,dpa,la\n";
  for (const auto& p : points) {
    csv << format_double(p.psi_d) << ',' << format_double(p.psi_m) << ','
        << format_double(p.dpa) << ',' << format_double(p.la) << '\n';
  }
  emit(csv.str(), opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bias amplification metrics for classification data"};
  app.require_subcommand(1);

  ComputeOptions compute_opt;
  auto* compute = app.add_subcommand(
      "compute", "Evaluate metrics over an instance-level predictions CSV");
  compute->add_option("--input", compute_opt.input, "Predictions CSV")
      ->required();
  compute->add_option("--metrics", compute_opt.metrics,
                      "dpa,la,ba-dir,multi-dir,ba-mals")
      ->delimiter(',');
  compute->add_option("--direction", compute_opt.direction,
                      "a-to-t, t-to-a, or both");
  compute->add_option("--format", compute_opt.format, "json or csv");
  compute->add_option("--output", compute_opt.output,
                      "Write the report here instead of stdout");
  compute->add_option("--seed", compute_opt.seed, "Master seed")
      ->each([&](const std::string&) { compute_opt.seed_set = true; });
  compute_opt.metric_options.register_flags(compute);

  PipelineOptions pipeline_opt;
  auto* pipeline = app.add_subcommand(
      "pipeline-compas",
      "Two-race recidivism experiment: balance, train trees, run all metrics");
  pipeline->add_option("--input", pipeline_opt.input, "Recidivism CSV")
      ->required();
  pipeline->add_option("--outdir", pipeline_opt.outdir, "Output directory");
  pipeline->add_option("--max-depth", pipeline_opt.max_depth, "Tree depth cap");
  pipeline->add_option("--min-leaf", pipeline_opt.min_leaf, "Minimum leaf size");
  pipeline->add_option("--seed", pipeline_opt.seed, "Master seed")
      ->each([&](const std::string&) { pipeline_opt.seed_set = true; });
  pipeline_opt.metric_options.quality = "inv-ce";
  pipeline_opt.metric_options.attacker_depth = 1;
  pipeline_opt.metric_options.attacker_width = 4;
  pipeline_opt.metric_options.attacker_activation = "sigmoid";
  pipeline_opt.metric_options.attacker_lr = 0.005;
  pipeline_opt.metric_options.attacker_epochs = 50;
  pipeline_opt.metric_options.attacker_batch = 512;
  pipeline_opt.metric_options.register_flags(pipeline);

  HeatmapOptions heatmap_opt;
  auto* heatmap = app.add_subcommand(
      "heatmap", "Metric values over the (alpha_d, alpha_m) simulation grid");
  heatmap->add_option("--metric", heatmap_opt.metric,
                      "dpa, ba-dir, multi-dir, or la");
  heatmap->add_option("--direction", heatmap_opt.direction, "a-to-t or t-to-a");
  heatmap->add_option("--quality", heatmap_opt.quality,
                      "Oracle quality: accuracy or inv-ce");
  heatmap->add_option("--mode", heatmap_opt.mode, "exact or sampled");
  heatmap->add_option("--alpha-min", heatmap_opt.alpha_min, "Grid start");
  heatmap->add_option("--alpha-max", heatmap_opt.alpha_max, "Grid end (excluded)");
  heatmap->add_option("--step,--steps", heatmap_opt.step, "Grid step");
  heatmap->add_option("--samples", heatmap_opt.samples,
                      "Sampled mode: draws per joint per cell");
  heatmap->add_option("--seed", heatmap_opt.seed, "Master seed")
      ->each([&](const std::string&) { heatmap_opt.seed_set = true; });
  heatmap->add_option("--out", heatmap_opt.out, "Output path prefix");

  RobustnessOptions robustness_opt;
  auto* robustness = app.add_subcommand(
      "robustness",
      "Attacker width/depth sweep on the polynomial synthetic data");
  robustness->add_option("--widths", robustness_opt.widths, "Hidden widths")
      ->delimiter(',');
  robustness->add_option("--depths", robustness_opt.depths, "Hidden depths")
      ->delimiter(',');
  robustness->add_option("--degree", robustness_opt.degree, "Polynomial degree");
  robustness->add_option("--alpha1", robustness_opt.alpha1,
                         "Noise scale on ground-truth targets");
  robustness->add_option("--alpha2", robustness_opt.alpha2,
                         "Noise scale on predicted targets");
  robustness->add_option("--samples", robustness_opt.samples, "Instances");
  robustness->add_option("--seed", robustness_opt.seed, "Master seed")
      ->each([&](const std::string&) { robustness_opt.seed_set = true; });
  robustness->add_option("--out", robustness_opt.out,
                         "CSV path (stdout when omitted)");
  robustness_opt.metric_options.attacker_epochs = 40;
  robustness_opt.metric_options.attacker_lr = 0.005;
  robustness_opt.metric_options.register_flags(robustness);

  CurvesOptions curves_opt;
  auto* curves = app.add_subcommand(
      "curves", "Amplification formulas across a model-bias range");
  curves->add_option("--psi-d", curves_opt.psi_d, "Dataset bias values")
      ->delimiter(',');
  curves->add_option("--psi-m-min", curves_opt.psi_m_min, "Model bias start");
  curves->add_option("--psi-m-max", curves_opt.psi_m_max, "Model bias end");
  curves->add_option("--step", curves_opt.step, "Model bias step");
  curves->add_option("--out", curves_opt.out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compute->parsed()) return run_compute(compute_opt);
    if (pipeline->parsed()) return run_pipeline(pipeline_opt);
    if (heatmap->parsed()) return run_heatmap_cmd(heatmap_opt);
    if (robustness->parsed()) return run_robustness_cmd(robustness_opt);
    if (curves->parsed()) return run_curves_cmd(curves_opt);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
