#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "biasamp/rng.hpp"
#include "biasamp/tree.hpp"

using namespace biasamp;

namespace {

FeatureMatrix matrix_from(std::vector<std::vector<double>> rows) {
  FeatureMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (auto& r : rows) {
    for (double v : r) m.values.push_back(v);
  }
  for (std::size_t c = 0; c < m.cols; ++c) {
    m.feature_names.push_back("f" + std::to_string(c));
  }
  return m;
}

// exhaustive threshold scan over one feature, the oracle for separability
double best_stump_accuracy(const FeatureMatrix& x, const CategoricalLabels& y,
                           std::size_t feature, double* threshold_out) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      double threshold = (x.at(i, feature) + x.at(j, feature)) / 2.0;
      for (int flip = 0; flip < 2; ++flip) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < x.rows; ++r) {
          int predicted = (x.at(r, feature) <= threshold) == (flip == 0) ? 0 : 1;
          if (predicted == y.codes[r]) ++hits;
        }
        double accuracy = static_cast<double>(hits) / static_cast<double>(x.rows);
        if (accuracy > best) {
          best = accuracy;
          if (threshold_out) *threshold_out = threshold;
        }
      }
    }
  }
  return best;
}

double gini_of_rows(const std::vector<std::size_t>& rows,
                    const CategoricalLabels& y) {
  std::vector<double> counts(static_cast<std::size_t>(y.cardinality), 0.0);
  for (auto r : rows) counts[static_cast<std::size_t>(y.codes[r])] += 1.0;
  double g = 1.0;
  for (double c : counts) {
    double p = c / static_cast<double>(rows.size());
    g -= p * p;
  }
  return g;
}

// routes the training rows through the tree and asserts every kept split
// strictly decreases the weighted impurity
void check_strict_impurity_decrease(const TreeNode& node,
                                    const FeatureMatrix& x,
                                    const CategoricalLabels& y,
                                    std::vector<std::size_t> rows) {
  if (node.is_leaf) return;
  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows) {
    if (x.at(r, static_cast<std::size_t>(node.feature)) <= node.threshold) {
      left_rows.push_back(r);
    } else {
      right_rows.push_back(r);
    }
  }
  REQUIRE(!left_rows.empty());
  REQUIRE(!right_rows.empty());
  double parent = gini_of_rows(rows, y);
  double weighted =
      (static_cast<double>(left_rows.size()) * gini_of_rows(left_rows, y) +
       static_cast<double>(right_rows.size()) * gini_of_rows(right_rows, y)) /
      static_cast<double>(rows.size());
  CHECK(weighted < parent);
  check_strict_impurity_decrease(*node.left, x, y, std::move(left_rows));
  check_strict_impurity_decrease(*node.right, x, y, std::move(right_rows));
}

}  // namespace

TEST_CASE("single-class targets produce a depth-0 leaf") {
  auto x = matrix_from({{1.0}, {2.0}, {3.0}, {4.0}});
  CategoricalLabels y{{1, 1, 1, 1}, 2};
  auto tree = train_tree(x, y, {5, 1});
  CHECK(tree.is_leaf);
  CHECK(tree_depth(tree) == 0);
  auto predictions = tree_predict(tree, x, 2);
  for (int code : predictions.codes) CHECK(code == 1);
}

TEST_CASE("max_depth 0 yields the majority-class leaf") {
  auto x = matrix_from({{1.0}, {2.0}, {3.0}, {4.0}, {5.0}});
  CategoricalLabels y{{0, 0, 0, 1, 1}, 2};
  auto tree = train_tree(x, y, {0, 1});
  CHECK(tree.is_leaf);
  auto predictions = tree_predict(tree, x, 2);
  for (int code : predictions.codes) CHECK(code == 0);
}

TEST_CASE("separable 1-D data trains to the oracle accuracy of 1") {
  auto x = matrix_from({{1.0}, {2.0}, {3.0}, {4.0}, {6.0}, {7.0}, {8.0}, {9.0}});
  CategoricalLabels y{{0, 0, 0, 0, 1, 1, 1, 1}, 2};

  double oracle_threshold = 0.0;
  REQUIRE(best_stump_accuracy(x, y, 0, &oracle_threshold) == 1.0);
  REQUIRE(oracle_threshold >= 4.0);
  REQUIRE(oracle_threshold < 6.0);

  auto tree = train_tree(x, y, {5, 1});
  REQUIRE(!tree.is_leaf);
  CHECK(tree.feature == 0);
  CHECK(tree.threshold == 5.0);  // midpoint of the straddling values
  CHECK(tree_depth(tree) == 1);

  auto predictions = tree_predict(tree, x, 2);
  CHECK(agreement(predictions, y) == 1.0);
}

TEST_CASE("training is deterministic, bit-for-bit serialized") {
  Rng rng(66);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    rows.push_back({rng.next_double() * 10.0, rng.next_double() * 5.0,
                    rng.next_normal()});
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  auto x = matrix_from(rows);
  CategoricalLabels y{labels, 3};
  auto one = train_tree(x, y, {4, 2});
  auto two = train_tree(x, y, {4, 2});
  CHECK(tree_to_json(one) == tree_to_json(two));
}

TEST_CASE("splits strictly decrease impurity and respect max depth") {
  Rng rng(31);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    double a = rng.next_double() * 4.0;
    double b = rng.next_normal();
    rows.push_back({a, b});
    labels.push_back(a + b > 2.0 ? 1 : 0);
  }
  auto x = matrix_from(rows);
  CategoricalLabels y{labels, 2};
  auto tree = train_tree(x, y, {3, 4});
  CHECK(tree_depth(tree) <= 3);
  std::vector<std::size_t> all_rows(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) all_rows[i] = i;
  check_strict_impurity_decrease(tree, x, y, all_rows);
}

TEST_CASE("unlimited depth memorizes distinct-featured data") {
  Rng rng(13);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 64; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(static_cast<int>(rng.below(2)));
  }
  auto x = matrix_from(rows);
  CategoricalLabels y{labels, 2};
  auto tree = train_tree(x, y, {kUnlimitedDepth, 1});
  CHECK(agreement(tree_predict(tree, x, 2), y) == 1.0);
}

TEST_CASE("prediction validates dimensions and empty input") {
  auto x = matrix_from({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}});
  CategoricalLabels y{{0, 0, 1, 1}, 2};
  auto tree = train_tree(x, y, {2, 1});

  FeatureMatrix empty;
  CHECK_THROWS_AS(tree_predict(tree, empty, 2), std::invalid_argument);
  CHECK_THROWS_AS(train_tree(empty, y, {2, 1}), std::invalid_argument);

  FeatureMatrix bad = x;
  bad.values.push_back(std::nan(""));
  bad.rows += 1;  // also breaks rectangularity downstream
  CHECK_THROWS_AS(train_tree(bad, y, {2, 1}), std::invalid_argument);
}

TEST_CASE("json round-trip preserves structure and predictions") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({rng.next_normal(), rng.next_normal()});
    labels.push_back(rows.back()[0] > rows.back()[1] ? 1 : 0);
  }
  auto x = matrix_from(rows);
  CategoricalLabels y{labels, 2};
  auto tree = train_tree(x, y, {4, 2});

  auto text = tree_to_json(tree);
  CHECK(text.find("biasamp-tree/1") != std::string::npos);
  auto restored = tree_from_json(text);
  CHECK(tree_to_json(restored) == text);
  CHECK(tree_predict(restored, x, 2).codes == tree_predict(tree, x, 2).codes);

  CHECK_THROWS_AS(tree_from_json("{\"format\":\"other\",\"nodes\":[]}"),
                  std::invalid_argument);
}
