/*
 * Copyright 2026 The qsep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qsep/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsep::learn {

namespace {

constexpr double kWeightSumTol = 1e-9;

// W * Gini(W0, W1) = 2 W0 W1 / W.
double gini_mass(double w0, double w1) {
  const double w = w0 + w1;
  return w > 0.0 ? 2.0 * w0 * w1 / w : 0.0;
}

class Builder {
 public:
  Builder(const TrainingSet& data, const TreeParams& params)
      : x_(data.features()), y_(data.labels()), w_(data.weights()), params_(params) {}

  std::vector<DecisionTree::Node> run() {
    const Eigen::Index k = x_.cols();
    std::vector<std::vector<int>> sorted(static_cast<std::size_t>(k));
    for (Eigen::Index f = 0; f < k; ++f) {
      auto& order = sorted[static_cast<std::size_t>(f)];
      order.resize(y_.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return x_(a, f) < x_(b, f); });
    }
    if (k == 0) sorted.push_back(all_rows());
    build(sorted, 0);
    return std::move(nodes_);
  }

 private:
  std::vector<int> all_rows() const {
    std::vector<int> rows(y_.size());
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
  }

  int build(std::vector<std::vector<int>>& sorted, int depth) {
    const std::vector<int>& rows = sorted.front();
    double w0 = 0.0, w1 = 0.0;
    std::size_t n1 = 0;
    for (int r : rows) {
      if (y_[r] == 1) {
        w1 += w_(r);
        ++n1;
      } else {
        w0 += w_(r);
      }
    }
    const std::size_t n = rows.size();
    const double total = w0 + w1;
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].p1 = total > 0.0 ? w1 / total : static_cast<double>(n1) / static_cast<double>(n);

    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
    if (depth >= params_.max_depth || n1 == 0 || n1 == n || n < 2 * min_leaf || x_.cols() == 0) {
      return id;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = 0.0;
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      const std::vector<int>& order = sorted[static_cast<std::size_t>(f)];
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const int r = order[i];
        (y_[r] == 1 ? l1 : l0) += w_(r);
        const std::size_t left = i + 1;
        if (left < min_leaf || n - left < min_leaf) continue;
        const double a = x_(r, f);
        const double b = x_(order[i + 1], f);
        if (!(a < b)) continue;
        const double score = gini_mass(l0, l1) + gini_mass(w0 - l0, w1 - l1);
        if (best_feature < 0 || score < best_score - 1e-12) {
          best_feature = static_cast<int>(f);
          best_score = score;
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::vector<int>> left(sorted.size()), right(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      for (int r : sorted[f]) {
        (x_(r, best_feature) <= best_threshold ? left[f] : right[f]).push_back(r);
      }
    }
    sorted.clear();
    sorted.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int l = build(left, depth + 1);
    nodes_[id].left = l;
    const int rr = build(right, depth + 1);
    nodes_[id].right = rr;
    return id;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  const Eigen::VectorXd& w_;
  TreeParams params_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

TrainingSet::TrainingSet(Eigen::MatrixXd features, std::vector<int> labels,
                         Eigen::VectorXd weights)
    : features_(std::move(features)), labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.empty()) throw InvalidInput("training set is empty");
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (features_.rows() != n || weights_.size() != n) {
    throw InvalidInput("features, labels and weights must have the same number of rows");
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) throw InvalidInput("labels must be 0 or 1");
  }
  if (weights_.minCoeff() < 0.0) throw InvalidInput("weights must be nonnegative");
  if (std::abs(weights_.sum() - 1.0) > kWeightSumTol) {
    throw InvalidInput("weights must sum to 1");
  }
}

TrainingSet TrainingSet::uniform(Eigen::MatrixXd features, std::vector<int> labels) {
  if (labels.empty()) throw InvalidInput("training set is empty");
  const auto n = static_cast<Eigen::Index>(labels.size());
  return TrainingSet(std::move(features), std::move(labels),
                     Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

std::size_t TrainingSet::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

TrainingSet TrainingSet::subset(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw InvalidInput("empty subset");
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd x(m, features_.cols());
  std::vector<int> y(indices.size());
  Eigen::VectorXd w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto src = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]);
    if (src >= features_.rows()) throw InvalidInput("subset index out of range");
    x.row(i) = features_.row(src);
    y[static_cast<std::size_t>(i)] = labels_[static_cast<std::size_t>(src)];
    w(i) = weights_(src);
  }
  const double sum = w.sum();
  if (sum > 0.0) {
    w /= sum;
  } else {
    w.setConstant(1.0 / static_cast<double>(m));
  }
  return TrainingSet(std::move(x), std::move(y), std::move(w));
}

TrainingSet TrainingSet::reweighted(Eigen::VectorXd weights) const {
  return TrainingSet(features_, labels_, std::move(weights));
}

DecisionTree::DecisionTree(std::vector<Node> nodes, Eigen::Index num_features, TreeParams params)
    : nodes_(std::move(nodes)), k_(num_features), params_(params) {
  if (nodes_.empty()) throw InvalidInput("tree has no nodes");
  const int count = static_cast<int>(nodes_.size());
  for (int i = 0; i < count; ++i) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (!(node.p1 >= 0.0 && node.p1 <= 1.0)) {
      throw InvalidInput("leaf probability outside [0, 1] at node " + std::to_string(i));
    }
    if (node.feature < 0) continue;
    if (node.feature >= k_) throw InvalidInput("split feature out of range at node " + std::to_string(i));
    // Children come after their parent, which also rules out cycles.
    if (node.left <= i || node.right <= i || node.left >= count || node.right >= count) {
      throw InvalidInput("bad child index at node " + std::to_string(i));
    }
  }
}

int DecisionTree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    deepest = std::max(deepest, depth[i]);
    if (node.feature < 0) continue;
    depth[static_cast<std::size_t>(node.left)] = depth[i] + 1;
    depth[static_cast<std::size_t>(node.right)] = depth[i] + 1;
  }
  return deepest;
}

std::size_t DecisionTree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

Prediction DecisionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != k_) {
    throw InvalidInput("feature row has length " + std::to_string(x.size()) + ", tree expects " +
                       std::to_string(k_));
  }
  const Node* node = &nodes_.front();
  while (node->feature >= 0) {
    node = &nodes_[static_cast<std::size_t>(x(node->feature) <= node->threshold ? node->left
                                                                                : node->right)];
  }
  return {node->p1 > 0.5 ? 1 : 0, node->p1};
}

DecisionTree train_tree(const TrainingSet& data, const TreeParams& params) {
  if (params.max_depth < 0) throw InvalidParameter("max_depth must be >= 0");
  if (params.min_leaf < 1) throw InvalidParameter("min_leaf must be >= 1");
  return DecisionTree(Builder(data, params).run(), data.num_features(), params);
}

Prediction tree_predict(const DecisionTree& tree, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return tree.predict(x);
}

double weighted_error(const DecisionTree& tree, const TrainingSet& data) {
  double err = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (tree.predict(data.features().row(r).transpose()).label != data.labels()[i]) {
      err += data.weights()(r);
    }
  }
  return err;
}

}  // namespace qsep::learn
