#include "biasamp/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "biasamp/rng.hpp"

namespace biasamp {

namespace {

constexpr std::uint64_t kSplitStream = 0x5714u;
constexpr std::uint64_t kInitStream = 0x1217u;
constexpr std::uint64_t kEpochStream = 0xe000u;

double activate(Activation act, double x) {
  switch (act) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activate_grad(Activation act, double pre, double post) {
  switch (act) {
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - post * post;
    case Activation::Sigmoid: return post * (1.0 - post);
  }
  return 1.0;
}

}  // namespace

void validate_config(const AttackerConfig& cfg) {
  if (cfg.depth < 0) throw std::invalid_argument("attacker: depth must be >= 0");
  if (cfg.width < 1) throw std::invalid_argument("attacker: width must be >= 1");
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("attacker: learning_rate must be > 0");
  }
  if (cfg.epochs < 1) throw std::invalid_argument("attacker: epochs must be >= 1");
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("attacker: batch_size must be >= 1");
  }
  if (!cfg.layer_activations.empty() &&
      cfg.layer_activations.size() != static_cast<std::size_t>(cfg.depth)) {
    throw std::invalid_argument(
        "attacker: layer_activations must have one entry per hidden layer");
  }
}

Series series_from(const CategoricalLabels& labels) {
  Series s;
  s.kind = Series::Kind::Categorical;
  s.codes = labels.codes;
  s.cardinality = labels.cardinality;
  return s;
}

Series series_from(std::vector<double> values) {
  Series s;
  s.kind = Series::Kind::Scalar;
  s.values = std::move(values);
  return s;
}

Attacker::Attacker(const AttackerConfig& cfg, Series::Kind input_kind,
                   int input_card, Head head, int output_card)
    : head_(head), input_kind_(input_kind) {
  validate_config(cfg);
  input_dim_ = input_kind == Series::Kind::Categorical ? input_card : 1;
  output_dim_ = head == Head::Categorical ? output_card : 1;
  if (input_dim_ < 1 || output_dim_ < 1) {
    throw std::invalid_argument("attacker: invalid input/output shape");
  }

  std::vector<int> dims;
  dims.push_back(input_dim_);
  for (int i = 0; i < cfg.depth; ++i) dims.push_back(cfg.width);
  dims.push_back(output_dim_);

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    LayerShape shape;
    shape.in = dims[l];
    shape.out = dims[l + 1];
    shape.w_offset = offset;
    offset += static_cast<std::size_t>(shape.in) * shape.out;
    shape.b_offset = offset;
    offset += shape.out;
    shape.is_output = l + 2 == dims.size();
    if (!shape.is_output) {
      shape.activation = cfg.layer_activations.empty()
                             ? cfg.activation
                             : cfg.layer_activations[l];
    }
    layers_.push_back(shape);
  }

  params_.assign(offset, 0.0);
  Rng rng(derive_seed(cfg.seed, kInitStream));
  for (const auto& layer : layers_) {
    double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::size_t count = static_cast<std::size_t>(layer.in) * layer.out + layer.out;
    for (std::size_t i = 0; i < count; ++i) {
      params_[layer.w_offset + i] = (2.0 * rng.next_double() - 1.0) * bound;
    }
  }
}

std::vector<double> Attacker::run_layers(
    std::span<const double> encoded, std::vector<std::vector<double>>* pre,
    std::vector<std::vector<double>>* post) const {
  std::vector<double> current(encoded.begin(), encoded.end());
  for (const auto& layer : layers_) {
    std::vector<double> z(layer.out);
    for (int o = 0; o < layer.out; ++o) {
      double acc = params_[layer.b_offset + o];
      const double* w = &params_[layer.w_offset + static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) acc += w[i] * current[i];
      z[o] = acc;
    }
    if (pre) pre->push_back(z);
    if (!layer.is_output) {
      for (int o = 0; o < layer.out; ++o) z[o] = activate(layer.activation, z[o]);
    }
    if (post) post->push_back(z);
    current = std::move(z);
  }
  return current;
}

std::vector<double> Attacker::forward(std::span<const double> encoded) const {
  if (static_cast<int>(encoded.size()) != input_dim_) {
    throw std::invalid_argument("attacker: encoded input has wrong dimension");
  }
  return run_layers(encoded, nullptr, nullptr);
}

std::vector<double> Attacker::encode_input(const Series& input,
                                           std::size_t row) const {
  if (input.kind != input_kind_) {
    throw std::invalid_argument("attacker: input kind mismatch");
  }
  if (input_kind_ == Series::Kind::Categorical) {
    std::vector<double> x(input_dim_, 0.0);
    int code = input.codes[row];
    if (code < 0 || code >= input_dim_) {
      throw std::invalid_argument("attacker: input code out of range");
    }
    x[code] = 1.0;
    return x;
  }
  return {(input.values[row] - input_mean_) / input_sd_};
}

std::vector<double> Attacker::predict_proba(const Series& input,
                                            std::size_t row) const {
  if (head_ != Head::Categorical) {
    throw std::invalid_argument("attacker: predict_proba needs a categorical head");
  }
  auto logits = forward(encode_input(input, row));
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max_logit);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

int Attacker::predict_class(const Series& input, std::size_t row) const {
  auto logits = forward(encode_input(input, row));
  int best = 0;
  for (int k = 1; k < output_dim_; ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return best;
}

double Attacker::predict_value(const Series& input, std::size_t row) const {
  if (head_ != Head::Scalar) {
    throw std::invalid_argument("attacker: predict_value needs a scalar head");
  }
  return decode_target(forward(encode_input(input, row))[0]);
}

void Attacker::fit_encoders(const Series& input, const Series& target) {
  if (input_kind_ == Series::Kind::Scalar) {
    double mean = 0.0;
    for (double v : input.values) mean += v;
    mean /= static_cast<double>(input.values.size());
    double var = 0.0;
    for (double v : input.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(input.values.size());
    input_mean_ = mean;
    input_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  if (head_ == Head::Scalar) {
    double mean = 0.0;
    for (double v : target.values) mean += v;
    mean /= static_cast<double>(target.values.size());
    double var = 0.0;
    for (double v : target.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(target.values.size());
    target_mean_ = mean;
    target_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
  }
}

double Attacker::encode_target(double raw) const {
  return (raw - target_mean_) / target_sd_;
}

double Attacker::decode_target(double standardized) const {
  return standardized * target_sd_ + target_mean_;
}

double Attacker::loss(const Batch& batch) const {
  std::vector<double> grad;
  return loss_and_gradients(batch, grad);
}

double Attacker::loss_and_gradients(const Batch& batch,
                                    std::vector<double>& grad) const {
  std::size_t batch_n = batch.inputs.size();
  if (batch_n == 0) throw std::invalid_argument("attacker: empty batch");
  grad.assign(params_.size(), 0.0);

  double total_loss = 0.0;
  std::vector<std::vector<double>> pre, post;
  for (std::size_t i = 0; i < batch_n; ++i) {
    pre.clear();
    post.clear();
    auto out = run_layers(batch.inputs[i], &pre, &post);

    // dL/d(output pre-activation), averaged over the batch
    std::vector<double> delta(output_dim_);
    if (head_ == Head::Categorical) {
      int target = batch.class_targets[i];
      double max_logit = *std::max_element(out.begin(), out.end());
      double sum = 0.0;
      for (double v : out) sum += std::exp(v - max_logit);
      double lse = max_logit + std::log(sum);
      total_loss += lse - out[target];
      for (int k = 0; k < output_dim_; ++k) {
        double p = std::exp(out[k] - lse);
        delta[k] = (p - (k == target ? 1.0 : 0.0)) / static_cast<double>(batch_n);
      }
    } else {
      double residual = out[0] - batch.scalar_targets[i];
      total_loss += residual * residual;
      delta[0] = 2.0 * residual / static_cast<double>(batch_n);
    }

    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& layer = layers_[l];
      std::span<const double> below =
          l == 0 ? std::span<const double>(batch.inputs[i])
                 : std::span<const double>(post[l - 1]);
      std::vector<double> next_delta(layer.in, 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double d = delta[o];
        grad[layer.b_offset + o] += d;
        double* gw = &grad[layer.w_offset + static_cast<std::size_t>(o) * layer.in];
        const double* w = &params_[layer.w_offset + static_cast<std::size_t>(o) * layer.in];
        for (int in = 0; in < layer.in; ++in) {
          gw[in] += d * below[in];
          next_delta[in] += d * w[in];
        }
      }
      if (l > 0) {
        const auto& lower = layers_[l - 1];
        for (int in = 0; in < lower.out; ++in) {
          next_delta[in] *=
              activate_grad(lower.activation, pre[l - 1][in], post[l - 1][in]);
        }
      }
      delta = std::move(next_delta);
    }
  }
  return total_loss / static_cast<double>(batch_n);
}

Attacker init_attacker(const AttackerConfig& cfg, const Series& input,
                       const Series& target) {
  auto head = target.kind == Series::Kind::Categorical
                  ? Attacker::Head::Categorical
                  : Attacker::Head::Scalar;
  return Attacker(cfg, input.kind, input.cardinality, head, target.cardinality);
}

namespace {

Series take_rows(const Series& s, const std::vector<std::size_t>& rows) {
  Series out;
  out.kind = s.kind;
  out.cardinality = s.cardinality;
  if (s.kind == Series::Kind::Categorical) {
    out.codes.reserve(rows.size());
    for (auto r : rows) out.codes.push_back(s.codes[r]);
  } else {
    out.values.reserve(rows.size());
    for (auto r : rows) out.values.push_back(s.values[r]);
  }
  return out;
}

}  // namespace

void train_attacker(Attacker& net, const Series& input, const Series& target,
                    const AttackerConfig& cfg) {
  validate_config(cfg);
  std::size_t n = input.size();
  if (n == 0 || n != target.size()) {
    throw std::invalid_argument("train_attacker: input/target sizes must match");
  }

  net.fit_encoders(input, target);
  std::vector<std::vector<double>> encoded(n);
  for (std::size_t i = 0; i < n; ++i) encoded[i] = net.encode_input(input, i);

  std::vector<int> class_targets;
  std::vector<double> scalar_targets;
  if (net.head() == Attacker::Head::Categorical) {
    if (target.kind != Series::Kind::Categorical) {
      throw std::invalid_argument("train_attacker: target kind mismatch");
    }
    class_targets = target.codes;
  } else {
    scalar_targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      scalar_targets[i] = net.encode_target(target.values[i]);
    }
  }

  auto& params = net.parameters();
  std::vector<double> grad(params.size());
  std::vector<double> adam_m(params.size(), 0.0);
  std::vector<double> adam_v(params.size(), 0.0);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double adam_eps = 1e-8;
  long step = 0;

  auto batch_count = static_cast<std::size_t>(cfg.batch_size);
  Batch batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, kEpochStream + static_cast<std::uint64_t>(epoch)));
    auto order = shuffled_indices(n, shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch_count) {
      std::size_t end = std::min(n, start + batch_count);
      batch.inputs.clear();
      batch.class_targets.clear();
      batch.scalar_targets.clear();
      for (std::size_t k = start; k < end; ++k) {
        std::size_t row = order[k];
        batch.inputs.push_back(encoded[row]);
        if (net.head() == Attacker::Head::Categorical) {
          batch.class_targets.push_back(class_targets[row]);
        } else {
          batch.scalar_targets.push_back(scalar_targets[row]);
        }
      }

      double loss = net.loss_and_gradients(batch, grad);
      if (!std::isfinite(loss)) {
        throw std::runtime_error(
            "train_attacker: non-finite loss at epoch " + std::to_string(epoch) +
            ", batch offset " + std::to_string(start));
      }

      ++step;
      if (cfg.optimizer == Optimizer::Sgd) {
        for (std::size_t p = 0; p < params.size(); ++p) {
          params[p] -= cfg.learning_rate * grad[p];
        }
      } else {
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t p = 0; p < params.size(); ++p) {
          adam_m[p] = beta1 * adam_m[p] + (1.0 - beta1) * grad[p];
          adam_v[p] = beta2 * adam_v[p] + (1.0 - beta2) * grad[p] * grad[p];
          double m_hat = adam_m[p] / bc1;
          double v_hat = adam_v[p] / bc2;
          params[p] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + adam_eps);
        }
      }
    }
  }
}

double attacker_quality(const Attacker& net, const Series& input,
                        const Series& target, QualityKind quality) {
  std::size_t n = input.size();
  if (n == 0 || n != target.size()) {
    throw std::invalid_argument("attacker_quality: empty or mismatched evaluation set");
  }

  switch (quality) {
    case QualityKind::Accuracy: {
      if (net.head() != Attacker::Head::Categorical) {
        throw std::invalid_argument("accuracy quality needs a categorical head");
      }
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (net.predict_class(input, i) == target.codes[i]) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(n);
    }
    case QualityKind::InverseCrossEntropy:
    case QualityKind::OneMinusCrossEntropy: {
      if (net.head() != Attacker::Head::Categorical) {
        throw std::invalid_argument("cross-entropy quality needs a categorical head");
      }
      double ce = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        auto logits = net.forward(net.encode_input(input, i));
        double max_logit = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double v : logits) sum += std::exp(v - max_logit);
        ce += max_logit + std::log(sum) - logits[target.codes[i]];
      }
      ce /= static_cast<double>(n);
      if (quality == QualityKind::InverseCrossEntropy) {
        return 1.0 / std::max(ce, kQualityEpsilon);
      }
      return std::max(1.0 - ce, 0.0);
    }
    case QualityKind::InverseRmse: {
      if (net.head() != Attacker::Head::Scalar) {
        throw std::invalid_argument("inverse-rmse quality needs a scalar head");
      }
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = net.predict_value(input, i) - target.values[i];
        sq += r * r;
      }
      double rmse = std::sqrt(sq / static_cast<double>(n));
      return 1.0 / std::max(rmse, kQualityEpsilon);
    }
  }
  throw std::invalid_argument("attacker_quality: unknown quality kind");
}

double predictability_quality(const Series& input, const Series& target,
                              const AttackerConfig& cfg, QualityKind quality,
                              std::uint64_t seed) {
  std::size_t n = input.size();
  if (n < 2 || n != target.size()) {
    throw std::invalid_argument("predictability_quality: need >= 2 aligned instances");
  }
  std::size_t eval_n = std::max<std::size_t>(1, n / 5);
  std::size_t train_n = n - eval_n;

  Rng split_rng(derive_seed(seed, kSplitStream));
  auto perm = shuffled_indices(n, split_rng);
  std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + train_n);
  std::vector<std::size_t> eval_rows(perm.begin() + train_n, perm.end());

  Series train_in = take_rows(input, train_rows);
  Series train_target = take_rows(target, train_rows);
  Series eval_in = take_rows(input, eval_rows);
  Series eval_target = take_rows(target, eval_rows);

  AttackerConfig run_cfg = cfg;
  run_cfg.seed = derive_seed(seed, 0x7124u);
  Attacker net = init_attacker(run_cfg, train_in, train_target);
  train_attacker(net, train_in, train_target, run_cfg);
  return attacker_quality(net, eval_in, eval_target, quality);
}

double bayes_optimal_quality(const JointTable& joint, Direction direction,
                             QualityKind quality) {
  if (joint.kind != JointTable::Kind::Probabilities) {
    throw std::invalid_argument("bayes_optimal_quality: probability-kind table required");
  }
  Axis prior_axis = direction == Direction::AtoT ? Axis::Attribute : Axis::Task;
  int prior_size =
      prior_axis == Axis::Attribute ? joint.attribute_count : joint.task_count;
  int target_size =
      prior_axis == Axis::Attribute ? joint.task_count : joint.attribute_count;
  auto cell = [&](int p, int v) {
    return prior_axis == Axis::Attribute ? joint.at(v, p) : joint.at(p, v);
  };

  switch (quality) {
    case QualityKind::Accuracy: {
      // sum_p P(p) max_v P(v|p) == sum_p max_v P(v, p)
      double acc = 0.0;
      for (int p = 0; p < prior_size; ++p) {
        double best = 0.0;
        for (int v = 0; v < target_size; ++v) best = std::max(best, cell(p, v));
        acc += best;
      }
      return acc;
    }
    case QualityKind::InverseCrossEntropy: {
      // conditional entropy H(target | prior) in nats
      double h = 0.0;
      for (int p = 0; p < prior_size; ++p) {
        double m = 0.0;
        for (int v = 0; v < target_size; ++v) m += cell(p, v);
        if (m <= 0.0) continue;
        for (int v = 0; v < target_size; ++v) {
          double q = cell(p, v);
          if (q > 0.0) h -= q * std::log(q / m);
        }
      }
      return 1.0 / std::max(h, kQualityEpsilon);
    }
    default:
      throw std::invalid_argument(
          "bayes_optimal_quality: only accuracy and inverse cross-entropy are supported");
  }
}

}  // namespace biasamp
