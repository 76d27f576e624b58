#include "biasamp/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace biasamp {

namespace {

using nlohmann::json;

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (std::size_t c : counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double weighted_impurity = 0.0;
};

struct Builder {
  const FeatureMatrix& x;
  const CategoricalLabels& y;
  TreeParams params;

  TreeNode build(std::vector<std::size_t>& rows, int depth) const {
    TreeNode node;
    std::vector<std::size_t> counts(static_cast<std::size_t>(y.cardinality), 0);
    for (auto r : rows) ++counts[static_cast<std::size_t>(y.codes[r])];

    node.distribution.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
      node.distribution[k] =
          static_cast<double>(counts[k]) / static_cast<double>(rows.size());
    }

    double node_impurity = gini(counts, rows.size());
    bool depth_allows =
        params.max_depth == kUnlimitedDepth || depth < params.max_depth;
    if (node_impurity == 0.0 || !depth_allows ||
        rows.size() < 2 * static_cast<std::size_t>(params.min_leaf)) {
      return node;
    }

    Split best = find_split(rows, node_impurity);
    if (!best.found) return node;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      if (x.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    node.is_leaf = false;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = std::make_unique<TreeNode>(build(left_rows, depth + 1));
    node.right = std::make_unique<TreeNode>(build(right_rows, depth + 1));
    return node;
  }

  Split find_split(const std::vector<std::size_t>& rows,
                   double node_impurity) const {
    Split best;
    auto total = rows.size();
    auto min_leaf = static_cast<std::size_t>(params.min_leaf);
    std::vector<std::pair<double, int>> column(total);
    std::vector<std::size_t> left_counts(static_cast<std::size_t>(y.cardinality));
    std::vector<std::size_t> right_counts(static_cast<std::size_t>(y.cardinality));

    for (std::size_t f = 0; f < x.cols; ++f) {
      for (std::size_t i = 0; i < total; ++i) {
        column[i] = {x.at(rows[i], f), y.codes[rows[i]]};
      }
      std::sort(column.begin(), column.end());

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::fill(right_counts.begin(), right_counts.end(), 0);
      for (const auto& [value, cls] : column) {
        ++right_counts[static_cast<std::size_t>(cls)];
      }

      for (std::size_t i = 0; i + 1 < total; ++i) {
        auto cls = static_cast<std::size_t>(column[i].second);
        ++left_counts[cls];
        --right_counts[cls];
        if (column[i].first == column[i + 1].first) continue;  // no boundary
        std::size_t left_n = i + 1;
        std::size_t right_n = total - left_n;
        if (left_n < min_leaf || right_n < min_leaf) continue;

        double weighted =
            (static_cast<double>(left_n) * gini(left_counts, left_n) +
             static_cast<double>(right_n) * gini(right_counts, right_n)) /
            static_cast<double>(total);
        if (weighted >= node_impurity) continue;  // splits must strictly improve

        double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
        bool better =
            !best.found || weighted < best.weighted_impurity ||
            (weighted == best.weighted_impurity &&
             (static_cast<int>(f) < best.feature ||
              (static_cast<int>(f) == best.feature && threshold < best.threshold)));
        if (better) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = threshold;
          best.weighted_impurity = weighted;
        }
      }
    }
    return best;
  }
};

const TreeNode* descend(const TreeNode& tree, const FeatureMatrix& x,
                        std::size_t row) {
  const TreeNode* node = &tree;
  while (!node->is_leaf) {
    node = x.at(row, static_cast<std::size_t>(node->feature)) <= node->threshold
               ? node->left.get()
               : node->right.get();
  }
  return node;
}

void collect_nodes(const TreeNode& node, json& nodes) {
  json entry;
  if (node.is_leaf) {
    entry["leaf"] = true;
    entry["distribution"] = node.distribution;
  } else {
    entry["leaf"] = false;
    entry["feature"] = node.feature;
    entry["threshold"] = node.threshold;
    entry["distribution"] = node.distribution;
  }
  auto index = nodes.size();
  nodes.push_back(std::move(entry));
  if (!node.is_leaf) {
    nodes[index]["left"] = nodes.size();
    collect_nodes(*node.left, nodes);
    nodes[index]["right"] = nodes.size();
    collect_nodes(*node.right, nodes);
  }
}

TreeNode parse_node(const json& nodes, std::size_t index) {
  const json& entry = nodes.at(index);
  TreeNode node;
  node.is_leaf = entry.at("leaf").get<bool>();
  node.distribution = entry.at("distribution").get<std::vector<double>>();
  if (!node.is_leaf) {
    node.feature = entry.at("feature").get<int>();
    node.threshold = entry.at("threshold").get<double>();
    node.left = std::make_unique<TreeNode>(
        parse_node(nodes, entry.at("left").get<std::size_t>()));
    node.right = std::make_unique<TreeNode>(
        parse_node(nodes, entry.at("right").get<std::size_t>()));
  }
  return node;
}

}  // namespace

TreeNode train_tree(const FeatureMatrix& x, const CategoricalLabels& y,
                    const TreeParams& params) {
  if (x.rows == 0 || x.cols == 0) {
    throw std::invalid_argument("train_tree: empty feature matrix");
  }
  if (x.rows != y.codes.size()) {
    throw std::invalid_argument("train_tree: feature/label length mismatch");
  }
  if (params.min_leaf < 1) {
    throw std::invalid_argument("train_tree: min_leaf must be >= 1");
  }
  if (x.rows < static_cast<std::size_t>(params.min_leaf)) {
    throw std::invalid_argument("train_tree: fewer rows than min_leaf");
  }
  for (double v : x.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("train_tree: non-finite feature value");
    }
  }

  std::vector<std::size_t> rows(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) rows[i] = i;
  Builder builder{x, y, params};
  return builder.build(rows, 0);
}

CategoricalLabels tree_predict(const TreeNode& tree, const FeatureMatrix& x,
                               int cardinality) {
  if (x.rows == 0) throw std::invalid_argument("tree_predict: empty input");
  CategoricalLabels out;
  out.cardinality = cardinality;
  out.codes.resize(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const TreeNode* leaf = descend(tree, x, r);
    if (leaf->distribution.size() != static_cast<std::size_t>(cardinality)) {
      throw std::invalid_argument("tree_predict: cardinality mismatch");
    }
    int best = 0;
    for (int k = 1; k < cardinality; ++k) {
      if (leaf->distribution[static_cast<std::size_t>(k)] >
          leaf->distribution[static_cast<std::size_t>(best)]) {
        best = k;
      }
    }
    out.codes[r] = best;
  }
  return out;
}

int tree_depth(const TreeNode& tree) {
  if (tree.is_leaf) return 0;
  return 1 + std::max(tree_depth(*tree.left), tree_depth(*tree.right));
}

std::string tree_to_json(const TreeNode& tree) {
  json doc;
  doc["format"] = "biasamp-tree/1";
  doc["nodes"] = json::array();
  collect_nodes(tree, doc["nodes"]);
  return doc.dump();
}

TreeNode tree_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.at("format").get<std::string>() != "biasamp-tree/1") {
    throw std::invalid_argument("tree_from_json: unsupported format");
  }
  return parse_node(doc.at("nodes"), 0);
}

}  // namespace biasamp
