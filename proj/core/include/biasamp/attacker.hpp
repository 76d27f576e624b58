#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "biasamp/joint.hpp"
#include "biasamp/labels.hpp"

namespace biasamp {

enum class Activation { Relu, Tanh, Sigmoid };
enum class Optimizer { Sgd, Adam };

/// Nonnegative attacker performance score; 0 is worst possible.
/// Inverse kinds are clamped at 1/epsilon (epsilon = 1e-6) so a perfect
/// attacker still yields a finite score.
enum class QualityKind {
  Accuracy,
  InverseCrossEntropy,
  OneMinusCrossEntropy,
  InverseRmse,
};

constexpr double kQualityEpsilon = 1e-6;

struct AttackerConfig {
  int depth = 2;   // hidden layers; 0 collapses to a linear map
  int width = 16;  // neurons per hidden layer
  Activation activation = Activation::Relu;
  /// Optional per-hidden-layer activations; empty means `activation`
  /// everywhere.
  std::vector<Activation> layer_activations;
  Optimizer optimizer = Optimizer::Adam;
  double learning_rate = 1e-3;
  int epochs = 100;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

void validate_config(const AttackerConfig& cfg);

/// A column of either dense class codes or raw scalars: the input or
/// target of an attacker.
struct Series {
  enum class Kind { Categorical, Scalar };
  Kind kind = Kind::Categorical;
  std::vector<int> codes;
  int cardinality = 0;
  std::vector<double> values;

  std::size_t size() const {
    return kind == Kind::Categorical ? codes.size() : values.size();
  }
};

Series series_from(const CategoricalLabels& labels);
Series series_from(std::vector<double> values);

/// Already-encoded minibatch; used internally by training and directly by
/// the gradient tests.
struct Batch {
  std::vector<std::vector<double>> inputs;
  std::vector<int> class_targets;     // categorical head
  std::vector<double> scalar_targets;  // scalar head
};

/// Dense feed-forward attacker. Categorical inputs are one-hot encoded;
/// scalar inputs and scalar targets are standardized with statistics
/// captured from the training data, so quality scores stay in original
/// units.
class Attacker {
 public:
  enum class Head { Categorical, Scalar };

  Attacker(const AttackerConfig& cfg, Series::Kind input_kind, int input_card,
           Head head, int output_card);

  Head head() const { return head_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  const std::vector<double>& parameters() const { return params_; }
  std::vector<double>& parameters() { return params_; }

  /// Raw network output for an encoded input: logits for a categorical
  /// head, a standardized value for a scalar head.
  std::vector<double> forward(std::span<const double> encoded) const;

  std::vector<double> encode_input(const Series& input, std::size_t row) const;
  std::vector<double> predict_proba(const Series& input, std::size_t row) const;
  int predict_class(const Series& input, std::size_t row) const;
  /// Scalar prediction mapped back to original units.
  double predict_value(const Series& input, std::size_t row) const;

  /// Captures input/target standardization statistics from training data.
  void fit_encoders(const Series& input, const Series& target);
  double encode_target(double raw) const;
  double decode_target(double standardized) const;

  double loss(const Batch& batch) const;
  /// Mean batch loss and its gradient w.r.t. the flat parameter vector.
  double loss_and_gradients(const Batch& batch, std::vector<double>& grad) const;

 private:
  struct LayerShape {
    int in = 0;
    int out = 0;
    std::size_t w_offset = 0;
    std::size_t b_offset = 0;
    Activation activation = Activation::Relu;
    bool is_output = false;
  };

  std::vector<double> run_layers(std::span<const double> encoded,
                                 std::vector<std::vector<double>>* pre,
                                 std::vector<std::vector<double>>* post) const;

  std::vector<LayerShape> layers_;
  std::vector<double> params_;
  Head head_;
  Series::Kind input_kind_;
  int input_dim_ = 0;
  int output_dim_ = 0;
  double input_mean_ = 0.0;
  double input_sd_ = 1.0;
  double target_mean_ = 0.0;
  double target_sd_ = 1.0;
};

/// Deterministic construction: weights and biases uniform in
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)] from cfg.seed.
Attacker init_attacker(const AttackerConfig& cfg, const Series& input,
                       const Series& target);

/// Runs exactly cfg.epochs passes of minibatch gradient descent
/// (cross-entropy for categorical heads, mean squared error for scalar
/// heads). Batch order is reshuffled every epoch from cfg.seed. Throws on
/// non-finite loss.
void train_attacker(Attacker& net, const Series& input, const Series& target,
                    const AttackerConfig& cfg);

/// Evaluates one of the quality kinds on the given rows.
double attacker_quality(const Attacker& net, const Series& input,
                        const Series& target, QualityKind quality);

/// Full predictability pipeline: deterministic 80/20 split from `seed`,
/// train on the 80%, score the held-out 20%.
double predictability_quality(const Series& input, const Series& target,
                              const AttackerConfig& cfg, QualityKind quality,
                              std::uint64_t seed);

/// Closed-form best attainable quality for a joint distribution:
/// accuracy -> sum over prior values of max joint cell; inverse cross
/// entropy -> 1 / max(H(target|prior) in nats, epsilon). Probability-kind
/// tables only.
double bayes_optimal_quality(const JointTable& joint, Direction direction,
                             QualityKind quality);

}  // namespace biasamp
