#include "biasamp/cooccurrence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biasamp {

namespace {

void check_shapes(const JointTable& truth, const JointTable& prediction) {
  if (truth.task_count != prediction.task_count ||
      truth.attribute_count != prediction.attribute_count) {
    throw std::invalid_argument("delta_matrix: table shapes differ");
  }
  if (truth.task_count < 1 || truth.attribute_count < 1) {
    throw std::invalid_argument("delta_matrix: empty table");
  }
}

JointTable prediction_joint(const PairedDataset& data, Direction direction) {
  if (direction == Direction::AtoT) {
    if (!data.t_hat) {
      throw std::invalid_argument("a_to_t requires the t_hat channel");
    }
    return build_joint(data.a, *data.t_hat);
  }
  if (!data.a_hat) {
    throw std::invalid_argument("t_to_a requires the a_hat channel");
  }
  return build_joint(*data.a_hat, data.t);
}

MetricResult deterministic_result(std::string id, Direction direction,
                                  double value) {
  MetricResult r;
  r.metric_id = std::move(id);
  r.direction = direction;
  r.value = value;
  r.ci_low = value;
  r.ci_high = value;
  r.iterations = 1;
  return r;
}

// Shared cell walk. For each prior value p the deltas of all cells share
// the denominator m_truth(p) * m_pred(p); numerators are exact integers
// whenever both tables hold counts, which is what lets the signed sums
// cancel exactly on factorizing joints.
struct CellTerms {
  std::vector<DeltaCell> cells;
  // signed numerator sums per prior value, over the shared denominator
  std::vector<double> signed_numerators;
  std::vector<double> denominators;
  int prior_size = 0;
};

CellTerms compute_terms(const JointTable& truth, const JointTable& prediction,
                        Direction direction) {
  check_shapes(truth, prediction);

  Axis prior_axis = direction == Direction::AtoT ? Axis::Attribute : Axis::Task;
  auto m_truth = marginal(truth, prior_axis);
  auto m_pred = marginal(prediction, prior_axis);
  auto truth_task = marginal(truth, Axis::Task);
  auto truth_attr = marginal(truth, Axis::Attribute);
  double n_truth = truth.total();

  CellTerms out;
  out.prior_size = static_cast<int>(m_truth.size());
  out.signed_numerators.assign(m_truth.size(), 0.0);
  out.denominators.assign(m_truth.size(), 0.0);
  for (std::size_t p = 0; p < m_truth.size(); ++p) {
    if (m_truth[p] <= 0.0) {
      throw std::domain_error(
          "delta_matrix: degenerate ground-truth marginal for " +
          std::string(prior_axis == Axis::Attribute ? "attribute " : "task ") +
          std::to_string(p));
    }
    out.denominators[p] =
        m_pred[p] > 0.0 ? m_truth[p] * m_pred[p] : m_truth[p];
  }

  for (int t = 0; t < truth.task_count; ++t) {
    for (int a = 0; a < truth.attribute_count; ++a) {
      DeltaCell cell;
      cell.attribute = a;
      cell.task = t;
      cell.y = truth.at(t, a) * n_truth > truth_attr[a] * truth_task[t] ? 1 : 0;

      int p = prior_axis == Axis::Attribute ? a : t;
      double numerator;
      if (m_pred[p] > 0.0) {
        numerator =
            prediction.at(t, a) * m_truth[p] - truth.at(t, a) * m_pred[p];
      } else {
        // prediction never emits this prior value: conditional treated as 0
        numerator = -truth.at(t, a);
      }
      cell.delta = numerator / out.denominators[p];
      out.signed_numerators[p] += cell.y == 1 ? numerator : -numerator;
      out.cells.push_back(cell);
    }
  }
  return out;
}

}  // namespace

std::vector<DeltaCell> delta_matrix(const JointTable& truth,
                                    const JointTable& prediction,
                                    Direction direction) {
  return compute_terms(truth, prediction, direction).cells;
}

std::vector<DeltaCell> delta_matrix(const PairedDataset& data,
                                    Direction direction) {
  ensure_valid(data);
  return delta_matrix(build_joint(data.a, data.t),
                      prediction_joint(data, direction), direction);
}

MetricResult ba_directional(const JointTable& truth,
                            const JointTable& prediction,
                            Direction direction) {
  auto terms = compute_terms(truth, prediction, direction);
  double sum = 0.0;
  for (int p = 0; p < terms.prior_size; ++p) {
    sum += terms.signed_numerators[p] / terms.denominators[p];
  }
  double value = sum / static_cast<double>(terms.cells.size());
  return deterministic_result("ba-dir", direction, value);
}

MetricResult ba_directional(const PairedDataset& data, Direction direction) {
  ensure_valid(data);
  return ba_directional(build_joint(data.a, data.t),
                        prediction_joint(data, direction), direction);
}

MultiResult multi_directional(const JointTable& truth,
                              const JointTable& prediction,
                              Direction direction) {
  auto cells = delta_matrix(truth, prediction, direction);
  double sum_abs = 0.0;
  double sum = 0.0;
  for (const auto& c : cells) {
    sum_abs += std::fabs(c.delta);
    sum += c.delta;
  }
  auto count = static_cast<double>(cells.size());
  double mean = sum / count;
  double var = 0.0;
  for (const auto& c : cells) {
    var += (c.delta - mean) * (c.delta - mean);
  }
  MultiResult out;
  out.result = deterministic_result("multi-dir", direction, sum_abs / count);
  out.variance = var / count;
  return out;
}

MultiResult multi_directional(const PairedDataset& data, Direction direction) {
  ensure_valid(data);
  return multi_directional(build_joint(data.a, data.t),
                           prediction_joint(data, direction), direction);
}

double multi_two_branch(const std::vector<DeltaCell>& cells) {
  double sum = 0.0;
  for (const auto& c : cells) {
    sum += c.y * std::fabs(c.delta) + (1 - c.y) * std::fabs(-c.delta);
  }
  return sum / static_cast<double>(cells.size());
}

MetricResult ba_mals(const PairedDataset& train,
                     const PairedDataset& predictions) {
  ensure_valid(train);
  ensure_valid(predictions);
  if (train.a.cardinality != predictions.a.cardinality ||
      train.t.cardinality != predictions.t.cardinality) {
    throw std::invalid_argument("ba_mals: datasets must share cardinalities");
  }
  if (!predictions.t_hat) {
    throw std::invalid_argument("ba_mals: predictions require t_hat");
  }

  JointTable joint_train = build_joint(train.a, train.t);
  JointTable joint_pred =
      predictions.a_hat ? build_joint(*predictions.a_hat, *predictions.t_hat)
                        : build_joint(predictions.a, *predictions.t_hat);

  auto train_task = marginal(joint_train, Axis::Task);
  auto pred_task = marginal(joint_pred, Axis::Task);
  double attr_count = train.a.cardinality;

  double sum = 0.0;
  int qualifying = 0;
  for (int t = 0; t < joint_train.task_count; ++t) {
    if (train_task[t] <= 0.0) {
      throw std::domain_error("ba_mals: task " + std::to_string(t) +
                              " absent from training data");
    }
    for (int a = 0; a < joint_train.attribute_count; ++a) {
      // strict: b_train(t, a) > 1/|A|, evaluated on exact integer counts
      if (joint_train.at(t, a) * attr_count <= train_task[t]) continue;
      double b_train = joint_train.at(t, a) / train_task[t];
      double b_pred =
          pred_task[t] > 0.0 ? joint_pred.at(t, a) / pred_task[t] : 0.0;
      sum += b_pred - b_train;
      ++qualifying;
    }
  }

  MetricResult r;
  r.metric_id = "ba-mals";
  r.iterations = 1;
  if (qualifying == 0) {
    r.flag = "no positively correlated pairs";
  } else {
    r.value = sum / qualifying;
  }
  r.ci_low = r.value;
  r.ci_high = r.value;
  return r;
}

}  // namespace biasamp
