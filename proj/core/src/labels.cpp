#include "biasamp/labels.hpp"

#include <stdexcept>

namespace biasamp {

CategoricalLabels make_labels(std::vector<int> codes, int cardinality) {
  if (codes.empty()) {
    throw std::invalid_argument("labels: sequence must be nonempty");
  }
  if (cardinality < 2) {
    throw std::invalid_argument("labels: cardinality must be >= 2");
  }
  for (int c : codes) {
    if (c < 0 || c >= cardinality) {
      throw std::invalid_argument("labels: code " + std::to_string(c) +
                                  " out of range for cardinality " +
                                  std::to_string(cardinality));
    }
  }
  return CategoricalLabels{std::move(codes), cardinality};
}

const char* direction_name(Direction d) {
  return d == Direction::AtoT ? "a_to_t" : "t_to_a";
}

namespace {

void check_channel(const CategoricalLabels& labels, const char* name,
                   std::size_t expected_n, std::vector<std::string>& out) {
  if (labels.codes.empty()) {
    out.push_back(std::string(name) + ": empty label sequence");
  }
  if (labels.cardinality < 2) {
    out.push_back(std::string(name) + ": cardinality must be >= 2");
  }
  if (labels.codes.size() != expected_n) {
    out.push_back(std::string(name) + ": length mismatch (" +
                  std::to_string(labels.codes.size()) + " vs " +
                  std::to_string(expected_n) + ")");
  }
  for (std::size_t i = 0; i < labels.codes.size(); ++i) {
    int c = labels.codes[i];
    if (c < 0 || c >= labels.cardinality) {
      out.push_back(std::string(name) + "[" + std::to_string(i) + "]: code " +
                    std::to_string(c) + " out of range");
      break;  // one representative per channel keeps reports readable
    }
  }
}

}  // namespace

std::vector<std::string> validate(const PairedDataset& data) {
  std::vector<std::string> violations;
  std::size_t n = data.a.codes.size();
  check_channel(data.a, "a", n, violations);
  check_channel(data.t, "t", n, violations);
  if (data.a_hat) {
    check_channel(*data.a_hat, "a_hat", n, violations);
    if (data.a_hat->cardinality != data.a.cardinality) {
      violations.push_back("a_hat: cardinality differs from a");
    }
  }
  if (data.t_hat) {
    check_channel(*data.t_hat, "t_hat", n, violations);
    if (data.t_hat->cardinality != data.t.cardinality) {
      violations.push_back("t_hat: cardinality differs from t");
    }
  }
  return violations;
}

void ensure_valid(const PairedDataset& data) {
  auto violations = validate(data);
  if (violations.empty()) return;
  std::string msg = "invalid dataset:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

double agreement(const CategoricalLabels& prediction,
                 const CategoricalLabels& truth) {
  if (prediction.codes.size() != truth.codes.size() ||
      prediction.codes.empty()) {
    throw std::invalid_argument("agreement: sequences must match and be nonempty");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.codes.size(); ++i) {
    if (prediction.codes[i] == truth.codes[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.codes.size());
}

}  // namespace biasamp
