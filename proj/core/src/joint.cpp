#include "biasamp/joint.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace biasamp {

double JointTable::total() const {
  return std::accumulate(cells.begin(), cells.end(), 0.0);
}

JointTable build_joint(const CategoricalLabels& a, const CategoricalLabels& t) {
  if (a.codes.empty() || t.codes.empty()) {
    throw std::invalid_argument("build_joint: empty input");
  }
  if (a.codes.size() != t.codes.size()) {
    throw std::invalid_argument("build_joint: length mismatch (" +
                                std::to_string(a.codes.size()) + " vs " +
                                std::to_string(t.codes.size()) + ")");
  }
  JointTable table;
  table.task_count = t.cardinality;
  table.attribute_count = a.cardinality;
  table.kind = JointTable::Kind::Counts;
  table.cells.assign(static_cast<std::size_t>(t.cardinality) * a.cardinality, 0.0);
  for (std::size_t i = 0; i < a.codes.size(); ++i) {
    int av = a.codes[i];
    int tv = t.codes[i];
    if (av < 0 || av >= a.cardinality || tv < 0 || tv >= t.cardinality) {
      throw std::invalid_argument("build_joint: code out of range at row " +
                                  std::to_string(i));
    }
    table.at(tv, av) += 1.0;
  }
  return table;
}

JointTable to_probabilities(const JointTable& table) {
  if (table.kind == JointTable::Kind::Probabilities) return table;
  JointTable out = table;
  double n = table.total();
  if (n <= 0.0) throw std::invalid_argument("to_probabilities: empty table");
  for (double& c : out.cells) c /= n;
  out.kind = JointTable::Kind::Probabilities;
  return out;
}

std::vector<double> marginal(const JointTable& table, Axis axis) {
  if (axis == Axis::Task) {
    std::vector<double> m(table.task_count, 0.0);
    for (int t = 0; t < table.task_count; ++t) {
      for (int a = 0; a < table.attribute_count; ++a) m[t] += table.at(t, a);
    }
    return m;
  }
  std::vector<double> m(table.attribute_count, 0.0);
  for (int a = 0; a < table.attribute_count; ++a) {
    for (int t = 0; t < table.task_count; ++t) m[a] += table.at(t, a);
  }
  return m;
}

std::vector<double> conditional(const JointTable& table, Axis given, int value) {
  int axis_size = given == Axis::Task ? table.task_count : table.attribute_count;
  if (value < 0 || value >= axis_size) {
    throw std::invalid_argument("conditional: value out of range");
  }
  auto m = marginal(table, given);
  if (m[value] <= 0.0) {
    throw std::domain_error("conditional: degenerate conditioning marginal for value " +
                            std::to_string(value));
  }
  if (given == Axis::Attribute) {
    std::vector<double> p(table.task_count);
    for (int t = 0; t < table.task_count; ++t) p[t] = table.at(t, value) / m[value];
    return p;
  }
  std::vector<double> p(table.attribute_count);
  for (int a = 0; a < table.attribute_count; ++a) p[a] = table.at(value, a) / m[value];
  return p;
}

std::pair<CategoricalLabels, CategoricalLabels> sample_joint(
    const JointTable& table, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_joint: n must be > 0");
  double total = table.total();
  if (total <= 0.0) throw std::invalid_argument("sample_joint: empty table");

  std::vector<double> cumulative(table.cells.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    if (table.cells[i] < 0.0) {
      throw std::invalid_argument("sample_joint: negative cell");
    }
    acc += table.cells[i] / total;
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;

  CategoricalLabels a{std::vector<int>(n), table.attribute_count};
  CategoricalLabels t{std::vector<int>(n), table.task_count};
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.next_double();
    std::size_t cell = 0;
    while (cell + 1 < cumulative.size() && u >= cumulative[cell]) ++cell;
    t.codes[i] = static_cast<int>(cell) / table.attribute_count;
    a.codes[i] = static_cast<int>(cell) % table.attribute_count;
  }
  return {std::move(a), std::move(t)};
}

}  // namespace biasamp
