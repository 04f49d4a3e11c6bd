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

// Bagging, AdaBoost and RUSBoost over CART learners.

#ifndef QSEP_ENSEMBLE_HPP_
#define QSEP_ENSEMBLE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsep/tree.hpp"

namespace qsep::learn {

enum class EnsembleKind { kBagging, kBoosting, kRusBoost };
enum class Aggregation { kMajorityVote, kWeightedVote };

std::string to_string(EnsembleKind kind);
std::string to_string(Aggregation aggregation);

// Weight given to a learner with zero weighted error: ln(1 / kPerfectTol).
inline constexpr double kPerfectTol = 1e-10;

class EnsembleModel {
 public:
  // Throws InvalidInput if learners and weights differ in length, a weight is
  // negative, the learners disagree on the feature count, or kind and
  // aggregation do not match (bagging = majority vote with unit weights).
  EnsembleModel(EnsembleKind kind, std::vector<DecisionTree> learners,
                std::vector<double> learner_weights, TreeParams params, std::uint64_t seed,
                bool use_smote = false);

  EnsembleKind kind() const { return kind_; }
  Aggregation aggregation() const {
    return kind_ == EnsembleKind::kBagging ? Aggregation::kMajorityVote : Aggregation::kWeightedVote;
  }
  const std::vector<DecisionTree>& learners() const { return learners_; }
  const std::vector<double>& learner_weights() const { return weights_; }
  const TreeParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  bool use_smote() const { return use_smote_; }
  Eigen::Index num_features() const { return learners_.front().num_features(); }

 private:
  EnsembleKind kind_;
  std::vector<DecisionTree> learners_;
  std::vector<double> weights_;
  TreeParams params_;
  std::uint64_t seed_;
  bool use_smote_;
};

// What happened in one boosting round.
struct BoostRound {
  enum class Outcome {
    kAccepted,  // 0 < epsilon < 1/2, learner kept
    kPerfect,   // epsilon == 0, learner kept with weight ln(1/kPerfectTol), training stops
    kReset,     // epsilon >= 1/2, learner dropped and weights reset to uniform
  };
  Outcome outcome;
  double epsilon;
  double learner_weight;    // 0 for kReset
  Eigen::VectorXd weights;  // sample weights after the round's update
};

// Bootstrap replicate of size n for learner i, drawn from rng.substream(i).
EnsembleModel train_bagging(const TrainingSet& data, int n_learners, const TreeParams& params,
                            Rng& rng);

// Reweighting AdaBoost. Round t fits a tree on the current weights, takes
// epsilon_t as its weighted error on them and w_t = 1/2 ln((1 - eps) / eps),
// then scales correct rows by exp(-w_t) and wrong rows by exp(w_t) and
// renormalizes. After a kReset round the next tree is fitted on a bootstrap
// resample drawn with the reset weights. Reset rounds count toward n_rounds;
// if every round resets, the last tree is kept with unit weight.
EnsembleModel train_adaboost(const TrainingSet& data, int n_rounds, const TreeParams& params,
                             Rng& rng, std::vector<BoostRound>* trace = nullptr);

struct RusBoostOptions {
  bool use_smote = false;
  int smote_k = 5;
  // Synthetic minority rows per round, as a percentage of the minority count.
  int smote_percent = 100;
};

// AdaBoost whose trees are fitted on a balanced view of the weighted data:
// optional SMOTE rows (weight = mean minority weight) are appended, then
// random_undersample is applied. Errors and weight updates use the full
// original data. Throws PolicyError unless both classes are present.
EnsembleModel train_rusboost(const TrainingSet& data, int n_rounds, const TreeParams& params,
                             Rng& rng, const RusBoostOptions& options = {},
                             std::vector<BoostRound>* trace = nullptr);

// Majority vote (tie -> 0) or sign of sum w_t h_t with h_t in {-1, +1} (zero -> 0).
// Throws InvalidInput on a length mismatch.
int ensemble_predict(const EnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// One label per row of x.
std::vector<int> ensemble_predict_rows(const EnsembleModel& model, const Eigen::MatrixXd& x);

// Text persistence. Layout, one item per line:
//   qsep-ensemble 1
//   kind=<BAGGING|BOOSTING|RUSBOOST>
//   aggregation=<MAJORITY_VOTE|WEIGHTED_VOTE>
//   learners=<T>
//   features=<k>
//   max_depth=<int>
//   min_leaf=<int>
//   seed=<uint64>
//   use_smote=<0|1>
// then per learner "learner <index> weight=<w> nodes=<count>" followed by
// <count> lines "feature,threshold,left,right,p1" (leaves have feature -1).
void save_model(const EnsembleModel& model, std::ostream& out);
void save_model(const EnsembleModel& model, const std::string& path);
EnsembleModel load_model(std::istream& in);
EnsembleModel load_model(const std::string& path);

}  // namespace qsep::learn

#endif  // QSEP_ENSEMBLE_HPP_
