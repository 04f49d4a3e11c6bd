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

#include "qsep/ensemble.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "qsep/metrics.hpp"
#include "qsep/resampling.hpp"

namespace qsep::learn {
namespace {

// Class 1 ~ N(shift, I), class 0 ~ N(0, I).
TrainingSet two_gaussians(std::size_t n_pos, std::size_t n_neg, double shift, Rng& rng) {
  const std::size_t n = n_pos + n_neg;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n_pos ? 1 : 0;
    for (int c = 0; c < 2; ++c) {
      x(static_cast<Eigen::Index>(i), c) = rng.normal() + (y[i] ? shift : 0.0);
    }
  }
  return TrainingSet::uniform(std::move(x), std::move(y));
}

TrainingSet xor_general() {
  Eigen::MatrixXd x(4, 2);
  x << -1, -2, 2, 1, -2, 2, 1, -3;
  return TrainingSet::uniform(x, {0, 0, 1, 1});
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  return metrics::compute_metrics(metrics::confusion(pred, truth)).oa;
}

double average_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  return metrics::compute_metrics(metrics::confusion(pred, truth)).aa;
}

std::vector<int> tree_labels(const DecisionTree& tree, const Eigen::MatrixXd& x) {
  std::vector<int> out;
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.push_back(tree.predict(x.row(r).transpose()).label);
  return out;
}

DecisionTree constant_tree(int label, Eigen::Index k) {
  DecisionTree::Node leaf;
  leaf.p1 = label;
  return DecisionTree({leaf}, k, {});
}

TEST(Bagging, SingleLearnerIsTreeOnItsReplicate) {
  Rng data_rng(1);
  const TrainingSet data = two_gaussians(60, 60, 1.0, data_rng);
  Rng rng(2);
  const EnsembleModel model = train_bagging(data, 1, {}, rng);
  EXPECT_EQ(model.kind(), EnsembleKind::kBagging);
  EXPECT_EQ(model.aggregation(), Aggregation::kMajorityVote);

  Rng sub = Rng(2).substream(0);
  std::vector<std::size_t> rows(data.size());
  for (auto& r : rows) r = sub.index(data.size());
  const DecisionTree tree = train_tree(data.subset(rows), {});
  EXPECT_EQ(ensemble_predict_rows(model, data.features()), tree_labels(tree, data.features()));
}

TEST(Bagging, DeterministicAndOrderFree) {
  Rng data_rng(3);
  const TrainingSet data = two_gaussians(80, 80, 1.0, data_rng);
  Rng a(4), b(4);
  const EnsembleModel ma = train_bagging(data, 15, {}, a);
  const EnsembleModel mb = train_bagging(data, 15, {}, b);
  const auto pa = ensemble_predict_rows(ma, data.features());
  EXPECT_EQ(pa, ensemble_predict_rows(mb, data.features()));

  std::vector<DecisionTree> reversed(ma.learners().rbegin(), ma.learners().rend());
  const EnsembleModel mr(EnsembleKind::kBagging, reversed, std::vector<double>(15, 1.0), {}, 4);
  EXPECT_EQ(pa, ensemble_predict_rows(mr, data.features()));
}

TEST(Bagging, NoWorseThanASingleTree) {
  Rng data_rng(5);
  const TrainingSet train = two_gaussians(250, 250, 1.0, data_rng);
  const TrainingSet test = two_gaussians(2000, 2000, 1.0, data_rng);
  Rng rng(6);
  const EnsembleModel bag = train_bagging(train, 200, {}, rng);
  const double bagged = accuracy(ensemble_predict_rows(bag, test.features()), test.labels());
  const double single = accuracy(tree_labels(train_tree(train, {}), test.features()), test.labels());
  EXPECT_GE(bagged, single - 0.02) << "bagged " << bagged << " single " << single;
}

TEST(AdaBoost, PerfectLearnerStopsAtRoundOne) {
  Eigen::MatrixXd x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  const TrainingSet data = TrainingSet::uniform(x, {0, 0, 0, 1, 1, 1});
  Rng rng(7);
  std::vector<BoostRound> trace;
  const EnsembleModel model = train_adaboost(data, 10, {.max_depth = 1, .min_leaf = 1}, rng, &trace);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].outcome, BoostRound::Outcome::kPerfect);
  ASSERT_EQ(model.learners().size(), 1u);
  EXPECT_NEAR(model.learner_weights()[0], std::log(1.0 / kPerfectTol), 1e-12);
  EXPECT_EQ(ensemble_predict_rows(model, x), data.labels());
}

TEST(AdaBoost, ReweightingIdentity) {
  Rng data_rng(8);
  const TrainingSet data = two_gaussians(200, 300, 1.0, data_rng);
  Rng rng(9);
  std::vector<BoostRound> trace;
  const EnsembleModel model = train_adaboost(data, 25, {.max_depth = 2, .min_leaf = 5}, rng, &trace);
  std::size_t learner = 0;
  for (const BoostRound& round : trace) {
    EXPECT_GE(round.weights.minCoeff(), 0.0);
    EXPECT_NEAR(round.weights.sum(), 1.0, 1e-9);
    if (round.outcome != BoostRound::Outcome::kAccepted) continue;
    const DecisionTree& tree = model.learners()[learner++];
    EXPECT_NEAR(weighted_error(tree, data.reweighted(round.weights)), 0.5, 1e-9);
    EXPECT_NEAR(round.learner_weight, 0.5 * std::log((1 - round.epsilon) / round.epsilon), 1e-12);
  }
  EXPECT_EQ(learner, model.learners().size());
  EXPECT_GT(learner, 10u);
}

TEST(AdaBoost, StumpsBeatTheStumpCeilingOnXor) {
  const TrainingSet data = xor_general();
  const TreeParams stump{.max_depth = 1, .min_leaf = 1};
  const double single = 1.0 - weighted_error(train_tree(data, stump), data);
  EXPECT_NEAR(single, 0.75, 1e-15);
  Rng rng(10);
  const EnsembleModel model = train_adaboost(data, 30, stump, rng);
  EXPECT_GT(accuracy(ensemble_predict_rows(model, data.features()), data.labels()), 0.75);
}

TEST(AdaBoost, ResetRoundsAreRecordedAndCounted) {
  // Identical features with mixed labels: every tree is a constant and the
  // weighted error hits 1/2 once the weights balance.
  const TrainingSet data = TrainingSet::uniform(Eigen::MatrixXd::Zero(4, 1), {0, 1, 1, 0});
  Rng rng(11);
  std::vector<BoostRound> trace;
  const EnsembleModel model = train_adaboost(data, 5, {}, rng, &trace);
  EXPECT_EQ(trace.size(), 5u);
  for (const auto& r : trace) {
    EXPECT_EQ(r.outcome, BoostRound::Outcome::kReset);
    EXPECT_EQ(r.weights, Eigen::VectorXd::Constant(4, 0.25));
  }
  EXPECT_EQ(model.learners().size(), 1u);
}

TEST(AdaBoost, Deterministic) {
  Rng data_rng(12);
  const TrainingSet data = two_gaussians(100, 100, 1.0, data_rng);
  Rng a(13), b(13);
  std::stringstream sa, sb;
  save_model(train_adaboost(data, 20, {.max_depth = 3}, a), sa);
  save_model(train_adaboost(data, 20, {.max_depth = 3}, b), sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(RusBoost, StructureOnBalancedData) {
  Rng data_rng(14);
  const TrainingSet data = two_gaussians(100, 100, 1.0, data_rng);
  Rng rng(15);
  std::vector<BoostRound> trace;
  const EnsembleModel model = train_rusboost(data, 10, {.max_depth = 3}, rng, {}, &trace);
  EXPECT_EQ(model.kind(), EnsembleKind::kRusBoost);
  EXPECT_EQ(model.aggregation(), Aggregation::kWeightedVote);
  EXPECT_FALSE(model.use_smote());
  for (const auto& r : trace) EXPECT_NEAR(r.weights.sum(), 1.0, 1e-9);
}

TEST(RusBoost, UpdateIdentityHoldsOnFullData) {
  Rng data_rng(16);
  const TrainingSet data = two_gaussians(50, 450, 1.0, data_rng);
  for (bool use_smote : {false, true}) {
    Rng rng(17);
    std::vector<BoostRound> trace;
    const EnsembleModel model =
        train_rusboost(data, 20, {.max_depth = 3}, rng, {.use_smote = use_smote}, &trace);
    EXPECT_EQ(model.use_smote(), use_smote);
    std::size_t learner = 0;
    for (const BoostRound& round : trace) {
      if (round.outcome != BoostRound::Outcome::kAccepted) continue;
      EXPECT_NEAR(weighted_error(model.learners()[learner++], data.reweighted(round.weights)), 0.5,
                  1e-9);
    }
    EXPECT_GT(learner, 0u);
  }
}

TEST(RusBoost, SingleClassIsPolicyError) {
  const TrainingSet data = TrainingSet::uniform(Eigen::MatrixXd::Zero(4, 1), {0, 0, 0, 0});
  Rng rng(18);
  EXPECT_THROW(train_rusboost(data, 3, {}, rng), PolicyError);
}

TEST(RusBoost, BeatsAdaBoostOnAverageAccuracyUnderImbalance) {
  double rus = 0.0, ada = 0.0;
  const int reps = 10;
  for (int rep = 0; rep < reps; ++rep) {
    Rng data_rng(derive_seed(100, {static_cast<std::uint64_t>(rep)}));
    const TrainingSet train = two_gaussians(100, 900, 1.0, data_rng);
    const TrainingSet test = two_gaussians(500, 4500, 1.0, data_rng);
    Rng r1(derive_seed(200, {static_cast<std::uint64_t>(rep)}));
    Rng r2(derive_seed(200, {static_cast<std::uint64_t>(rep)}));
    rus += average_accuracy(ensemble_predict_rows(train_rusboost(train, 50, {}, r1), test.features()),
                            test.labels());
    ada += average_accuracy(ensemble_predict_rows(train_adaboost(train, 50, {}, r2), test.features()),
                            test.labels());
  }
  EXPECT_GE(rus / reps, ada / reps) << "RUSBoost AA " << rus / reps << " AdaBoost AA " << ada / reps;
}

TEST(EnsemblePredict, VotingRules) {
  const DecisionTree one = constant_tree(1, 2);
  const DecisionTree zero = constant_tree(0, 2);
  const Eigen::Vector2d x(0.3, -0.2);
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kBagging, {one, one, one}, {1, 1, 1}, {}, 0), x), 1);
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kBoosting, {zero, zero}, {0.3, 0.2}, {}, 0), x), 0);
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kBoosting, {one, zero}, {0.9, 0.1}, {}, 0), x), 1);
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kBoosting, {zero, one}, {0.9, 0.1}, {}, 0), x), 0);
  // Exact ties go to 0.
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kBagging, {one, zero}, {1, 1}, {}, 0), x), 0);
  EXPECT_EQ(ensemble_predict(EnsembleModel(EnsembleKind::kRusBoost, {one, zero}, {0.5, 0.5}, {}, 0), x), 0);
  EXPECT_THROW(ensemble_predict(EnsembleModel(EnsembleKind::kBagging, {one}, {1}, {}, 0), Eigen::Vector3d::Zero()),
               InvalidInput);
}

TEST(EnsembleModel, ValidatesInvariants) {
  const DecisionTree one = constant_tree(1, 2);
  EXPECT_THROW(EnsembleModel(EnsembleKind::kBoosting, {one, one}, {1.0}, {}, 0), InvalidInput);
  EXPECT_THROW(EnsembleModel(EnsembleKind::kBoosting, {one}, {-1.0}, {}, 0), InvalidInput);
  EXPECT_THROW(EnsembleModel(EnsembleKind::kBagging, {one}, {0.5}, {}, 0), InvalidInput);
  EXPECT_THROW(EnsembleModel(EnsembleKind::kBagging, {one, constant_tree(1, 3)}, {1, 1}, {}, 0),
               InvalidInput);
}

TEST(ModelPersistence, RoundTrip) {
  Rng data_rng(19);
  const TrainingSet data = two_gaussians(120, 200, 1.0, data_rng);
  Rng rng(20);
  const EnsembleModel model = train_rusboost(data, 12, {.max_depth = 4, .min_leaf = 3}, rng,
                                             {.use_smote = true});
  std::stringstream buf;
  save_model(model, buf);
  const EnsembleModel back = load_model(buf);
  EXPECT_EQ(back.kind(), model.kind());
  EXPECT_EQ(back.seed(), model.seed());
  EXPECT_TRUE(back.use_smote());
  EXPECT_EQ(back.params().max_depth, 4);
  EXPECT_EQ(back.learner_weights(), model.learner_weights());
  EXPECT_EQ(ensemble_predict_rows(back, data.features()), ensemble_predict_rows(model, data.features()));
  std::stringstream again;
  save_model(back, again);
  EXPECT_EQ(again.str(), buf.str());
}

TEST(ModelPersistence, MalformedNodeNamesLine) {
  std::stringstream buf;
  save_model(EnsembleModel(EnsembleKind::kBagging, {constant_tree(1, 2)}, {1}, {}, 0), buf);
  std::string text = buf.str();
  text.replace(text.rfind("-1,"), 3, "x,");
  std::stringstream bad(text);
  try {
    load_model(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 11u);
  }
}

}  // namespace
}  // namespace qsep::learn
