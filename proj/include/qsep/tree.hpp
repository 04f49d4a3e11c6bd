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

// Weighted binary training sets and the CART base learner.

#ifndef QSEP_TREE_HPP_
#define QSEP_TREE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "qsep/common.hpp"

namespace qsep::learn {

// n rows of k real features, binary labels and a weight distribution.
class TrainingSet {
 public:
  // Throws InvalidInput when n == 0, row counts disagree, a label is not 0/1,
  // a weight is negative or the weights do not sum to 1 within 1e-9.
  TrainingSet(Eigen::MatrixXd features, std::vector<int> labels, Eigen::VectorXd weights);

  // Uniform weights 1/n.
  static TrainingSet uniform(Eigen::MatrixXd features, std::vector<int> labels);

  std::size_t size() const { return labels_.size(); }
  Eigen::Index num_features() const { return features_.cols(); }
  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  std::size_t count(int label) const;

  // Rows at `indices` (repeats allowed) with their weights renormalized, or
  // uniform if the selected weights sum to zero.
  TrainingSet subset(const std::vector<std::size_t>& indices) const;

  // Same rows with a new weight distribution.
  TrainingSet reweighted(Eigen::VectorXd weights) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  Eigen::VectorXd weights_;
};

struct TreeParams {
  int max_depth = 8;
  // Minimum number of rows on each side of a split.
  int min_leaf = 5;
};

struct Prediction {
  int label;
  double p1;  // positive-class probability of the leaf
};

// Binary tree stored as a flat node list; node 0 is the root. A leaf has
// feature == -1. Rows with x[feature] <= threshold go left.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p1 = 0.0;
  };

  // Throws InvalidInput if the nodes do not form a valid tree over k features.
  DecisionTree(std::vector<Node> nodes, Eigen::Index num_features, TreeParams params);

  const std::vector<Node>& nodes() const { return nodes_; }
  Eigen::Index num_features() const { return k_; }
  const TreeParams& params() const { return params_; }
  int depth() const;
  std::size_t num_leaves() const;

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<Node> nodes_;
  Eigen::Index k_;
  TreeParams params_;
};

// Greedy CART: each split minimizes the weighted Gini impurity of the
// children. Splits with zero gain are still taken, so XOR-like structure can
// be found two levels down. Leaves hold the weighted positive fraction and
// predict 1 iff it exceeds 1/2.
DecisionTree train_tree(const TrainingSet& data, const TreeParams& params = {});

// Throws InvalidInput on a length mismatch.
Prediction tree_predict(const DecisionTree& tree, const Eigen::Ref<const Eigen::VectorXd>& x);

// Weighted share of rows the tree gets wrong.
double weighted_error(const DecisionTree& tree, const TrainingSet& data);

}  // namespace qsep::learn

#endif  // QSEP_TREE_HPP_
