#include "biasamp/predictability.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "biasamp/rng.hpp"

namespace biasamp {

namespace {

constexpr std::uint64_t kFlipStream = 0xf11fu;
constexpr std::uint64_t kAttackerStream = 0xa77au;

struct DirectionChannels {
  const CategoricalLabels* prior;
  const CategoricalLabels* truth_target;
  const CategoricalLabels* predicted_target;
};

DirectionChannels channels_for(const PairedDataset& data, Direction direction) {
  if (direction == Direction::AtoT) {
    if (!data.t_hat) {
      throw std::invalid_argument("a_to_t requires the t_hat channel");
    }
    return {&data.a, &data.t, &*data.t_hat};
  }
  if (!data.a_hat) {
    throw std::invalid_argument("t_to_a requires the a_hat channel");
  }
  return {&data.t, &data.a, &*data.a_hat};
}

// Joint over (prior channel, target channel) laid out as task x attribute.
JointTable channel_joint(const CategoricalLabels& prior,
                         const CategoricalLabels& target,
                         Direction direction) {
  return direction == Direction::AtoT ? build_joint(prior, target)
                                      : build_joint(target, prior);
}

double require_finite(double psi, const char* which) {
  if (!std::isfinite(psi) || psi < 0.0) {
    throw std::runtime_error(std::string("dpa: non-finite or negative ") + which);
  }
  return psi;
}

MetricResult aggregate(std::string id, std::optional<Direction> direction,
                       const std::vector<double>& values) {
  MetricResult r;
  r.metric_id = std::move(id);
  r.direction = direction;
  r.iterations = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sd = 0.0;
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    sd = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  double half = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  r.value = mean;
  r.ci_low = mean - half;
  r.ci_high = mean + half;
  return r;
}

}  // namespace

void validate_config(const DpaConfig& cfg) {
  validate_config(cfg.attacker);
  if (cfg.iterations < 1) {
    throw std::invalid_argument("dpa: iterations must be >= 1");
  }
  if (cfg.mode == DpaMode::Exact && cfg.equalize) {
    throw std::invalid_argument("dpa: exact mode requires equalize = off");
  }
}

CategoricalLabels equalize_accuracy(const CategoricalLabels& labels,
                                    double target_accuracy,
                                    std::uint64_t seed) {
  if (!(target_accuracy >= 0.0 && target_accuracy <= 1.0)) {
    throw std::invalid_argument("equalize_accuracy: target must be in [0, 1]");
  }
  auto n = labels.codes.size();
  if (n == 0) throw std::invalid_argument("equalize_accuracy: empty labels");

  // flip count chosen so agreement is exactly round(a * n) / n
  auto keep = static_cast<std::size_t>(
      std::llround(target_accuracy * static_cast<double>(n)));
  std::size_t flips = n - keep;
  if (flips == 0) return labels;
  if (labels.cardinality < 2) {
    throw std::invalid_argument("equalize_accuracy: no different class exists");
  }

  Rng rng(seed);
  auto order = shuffled_indices(n, rng);
  CategoricalLabels out = labels;
  for (std::size_t k = 0; k < flips; ++k) {
    std::size_t pos = order[k];
    int offset = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(labels.cardinality - 1)));
    int replacement = offset >= out.codes[pos] ? offset + 1 : offset;
    out.codes[pos] = replacement;
  }
  return out;
}

double dpa_formula(double psi_m, double psi_d) {
  double sum = psi_m + psi_d;
  if (sum == 0.0) return 0.0;
  return (psi_m - psi_d) / sum;
}

double la_formula(double psi_m, double psi_d) { return psi_m - psi_d; }

double dataset_bias(const PairedDataset& data, Direction direction,
                    const DpaConfig& cfg, std::optional<double> equalize_to) {
  ensure_valid(data);
  validate_config(cfg);
  auto ch = channels_for(data, direction);
  if (cfg.mode == DpaMode::Exact) {
    auto joint = to_probabilities(channel_joint(*ch.prior, *ch.truth_target, direction));
    return bayes_optimal_quality(joint, direction, cfg.quality);
  }
  CategoricalLabels target = *ch.truth_target;
  if (equalize_to) {
    target = equalize_accuracy(target, *equalize_to,
                               derive_seed(cfg.master_seed, kFlipStream));
  }
  return predictability_quality(series_from(*ch.prior), series_from(target),
                                cfg.attacker, cfg.quality,
                                derive_seed(cfg.master_seed, kAttackerStream));
}

double model_bias(const PairedDataset& data, Direction direction,
                  const DpaConfig& cfg) {
  ensure_valid(data);
  validate_config(cfg);
  auto ch = channels_for(data, direction);
  if (cfg.mode == DpaMode::Exact) {
    auto joint =
        to_probabilities(channel_joint(*ch.prior, *ch.predicted_target, direction));
    return bayes_optimal_quality(joint, direction, cfg.quality);
  }
  return predictability_quality(series_from(*ch.prior),
                                series_from(*ch.predicted_target), cfg.attacker,
                                cfg.quality,
                                derive_seed(cfg.master_seed, kAttackerStream));
}

MetricResult dpa(const PairedDataset& data, Direction direction,
                 const DpaConfig& cfg) {
  ensure_valid(data);
  validate_config(cfg);
  auto ch = channels_for(data, direction);

  if (cfg.mode == DpaMode::Exact) {
    double value = dpa_exact_from_joints(
        channel_joint(*ch.prior, *ch.truth_target, direction),
        channel_joint(*ch.prior, *ch.predicted_target, direction), direction,
        cfg.quality);
    MetricResult r = aggregate("dpa", direction, {value});
    return r;
  }

  double model_accuracy = agreement(*ch.predicted_target, *ch.truth_target);
  Series prior = series_from(*ch.prior);
  Series predicted = series_from(*ch.predicted_target);

  std::vector<double> values(static_cast<std::size_t>(cfg.iterations));
  for (int i = 0; i < cfg.iterations; ++i) {
    std::uint64_t iter_seed =
        derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    // shared attacker seed: identical targets must give identical psi
    std::uint64_t attacker_seed = derive_seed(iter_seed, kAttackerStream);

    CategoricalLabels truth = *ch.truth_target;
    if (cfg.equalize) {
      truth = equalize_accuracy(truth, model_accuracy,
                                derive_seed(iter_seed, kFlipStream));
    }
    double psi_d = require_finite(
        predictability_quality(prior, series_from(truth), cfg.attacker,
                               cfg.quality, attacker_seed),
        "dataset bias");
    double psi_m = require_finite(
        predictability_quality(prior, predicted, cfg.attacker, cfg.quality,
                               attacker_seed),
        "model bias");
    values[static_cast<std::size_t>(i)] = dpa_formula(psi_m, psi_d);
  }
  return aggregate("dpa", direction, values);
}

MetricResult leakage_amplification(const PairedDataset& data,
                                   const DpaConfig& cfg) {
  ensure_valid(data);
  validate_config(cfg);
  if (!data.t_hat) {
    throw std::invalid_argument("leakage amplification requires the t_hat channel");
  }

  if (cfg.mode == DpaMode::Exact) {
    double value = la_exact_from_joints(build_joint(data.a, data.t),
                                        build_joint(data.a, *data.t_hat),
                                        cfg.quality);
    return aggregate("la", std::nullopt, {value});
  }

  double model_accuracy = agreement(*data.t_hat, data.t);
  Series attribute = series_from(data.a);
  Series predicted_task = series_from(*data.t_hat);

  std::vector<double> values(static_cast<std::size_t>(cfg.iterations));
  for (int i = 0; i < cfg.iterations; ++i) {
    std::uint64_t iter_seed =
        derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    std::uint64_t attacker_seed = derive_seed(iter_seed, kAttackerStream);

    CategoricalLabels task = data.t;
    if (cfg.equalize) {
      task = equalize_accuracy(task, model_accuracy,
                               derive_seed(iter_seed, kFlipStream));
    }
    double lambda_d = require_finite(
        predictability_quality(series_from(task), attribute, cfg.attacker,
                               cfg.quality, attacker_seed),
        "dataset leakage");
    double lambda_m = require_finite(
        predictability_quality(predicted_task, attribute, cfg.attacker,
                               cfg.quality, attacker_seed),
        "model leakage");
    values[static_cast<std::size_t>(i)] = la_formula(lambda_m, lambda_d);
  }
  return aggregate("la", std::nullopt, values);
}

double dpa_exact_from_joints(const JointTable& truth,
                             const JointTable& prediction, Direction direction,
                             QualityKind quality) {
  double psi_d =
      bayes_optimal_quality(to_probabilities(truth), direction, quality);
  double psi_m =
      bayes_optimal_quality(to_probabilities(prediction), direction, quality);
  return dpa_formula(psi_m, psi_d);
}

double la_exact_from_joints(const JointTable& truth,
                            const JointTable& prediction, QualityKind quality) {
  double lambda_d =
      bayes_optimal_quality(to_probabilities(truth), Direction::TtoA, quality);
  double lambda_m = bayes_optimal_quality(to_probabilities(prediction),
                                          Direction::TtoA, quality);
  return la_formula(lambda_m, lambda_d);
}

}  // namespace biasamp
