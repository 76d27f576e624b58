#pragma once

#include <memory>
#include <string>
#include <vector>

#include "biasamp/labels.hpp"

namespace biasamp {

/// n x k matrix of finite real-valued features.
struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<double> values;  // row-major
  std::size_t rows = 0;
  std::size_t cols = 0;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Gini-impurity CART node. Leaves carry the class distribution of their
/// training rows (sums to 1); splits send x[feature] <= threshold left.
struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;
  std::vector<double> distribution;
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;
};

struct TreeParams {
  /// Depth 0 means a single leaf; kUnlimitedDepth removes the cap.
  int max_depth = 5;
  int min_leaf = 8;
};

constexpr int kUnlimitedDepth = -1;

/// Greedy CART training. Candidate thresholds are midpoints of sorted
/// unique feature values; ties break toward (lowest impurity, lowest
/// feature index, lowest threshold); every kept split strictly decreases
/// weighted Gini impurity. Fully deterministic.
TreeNode train_tree(const FeatureMatrix& x, const CategoricalLabels& y,
                    const TreeParams& params);

/// Per-row majority class of the reached leaf (ties go to the lowest
/// class index).
CategoricalLabels tree_predict(const TreeNode& tree, const FeatureMatrix& x,
                               int cardinality);

int tree_depth(const TreeNode& tree);

/// Versioned JSON document (format "biasamp-tree/1", explicit node list)
/// for reproducibility audits.
std::string tree_to_json(const TreeNode& tree);
TreeNode tree_from_json(const std::string& text);

}  // namespace biasamp
