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

#include "qsep/resampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace qsep::learn {
namespace {

TrainingSet gaussian_set(std::size_t n_pos, std::size_t n_neg, int k, Rng& rng) {
  const std::size_t n = n_pos + n_neg;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n_pos ? 1 : 0;
    for (int c = 0; c < k; ++c) x(static_cast<Eigen::Index>(i), c) = rng.normal() + (y[i] ? 1.0 : 0.0);
  }
  return TrainingSet::uniform(std::move(x), std::move(y));
}

// Distance from p to the segment [a, b].
double segment_residual(const Eigen::VectorXd& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

TEST(RandomUndersample, BalancesAndKeepsMinority) {
  Rng data_rng(1);
  const TrainingSet data = gaussian_set(10, 90, 2, data_rng);
  Rng rng(2);
  const auto kept = undersample_indices(data.labels(), rng);
  EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));
  EXPECT_EQ(std::set<std::size_t>(kept.begin(), kept.end()).size(), kept.size());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_TRUE(std::binary_search(kept.begin(), kept.end(), i));

  Rng rng2(2);
  const TrainingSet out = random_undersample(data, rng2);
  EXPECT_EQ(out.count(1), 10u);
  EXPECT_EQ(out.count(0), 10u);
  EXPECT_NEAR(out.weights().sum(), 1.0, 1e-12);
}

TEST(RandomUndersample, BalancedInputUnchanged) {
  Rng data_rng(3);
  const TrainingSet data = gaussian_set(50, 50, 2, data_rng);
  Rng rng(4);
  const TrainingSet out = random_undersample(data, rng);
  EXPECT_EQ(out.features(), data.features());
  EXPECT_EQ(out.labels(), data.labels());
}

TEST(RandomUndersample, DeterministicAndSeedSensitive) {
  Rng data_rng(5);
  const TrainingSet data = gaussian_set(20, 200, 2, data_rng);
  Rng a(6), b(6), c(7);
  const auto ka = undersample_indices(data.labels(), a);
  EXPECT_EQ(ka, undersample_indices(data.labels(), b));
  EXPECT_NE(ka, undersample_indices(data.labels(), c));
}

TEST(RandomUndersample, WeightedViewRenormalizes) {
  Rng data_rng(8);
  const TrainingSet base = gaussian_set(100, 1000, 3, data_rng);
  Eigen::VectorXd w(1100);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 1.0 + data_rng.uniform();
  Rng rng(9);
  const TrainingSet view = random_undersample(base.reweighted(w / w.sum()), rng);
  EXPECT_EQ(view.count(1), 100u);
  EXPECT_EQ(view.count(0), 100u);
  EXPECT_NEAR(view.weights().sum(), 1.0, 1e-12);
}

TEST(RandomUndersample, SingleClassIsPolicyError) {
  const TrainingSet data = TrainingSet::uniform(Eigen::MatrixXd::Zero(4, 1), {1, 1, 1, 1});
  Rng rng(10);
  EXPECT_THROW(random_undersample(data, rng), PolicyError);
}

TEST(Smote, TwoPointsStayOnTheirSegment) {
  Eigen::MatrixXd x(5, 3);
  x << 0, 0, 0, 1, 2, 3, 9, 9, 9, 8, 8, 8, 7, 7, 7;
  const TrainingSet data = TrainingSet::uniform(x, {1, 1, 0, 0, 0});
  Rng rng(11);
  const Eigen::MatrixXd s = smote(data, 5, 200, rng);
  ASSERT_EQ(s.rows(), 200);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    EXPECT_LE(segment_residual(s.row(i).transpose(), x.row(0).transpose(), x.row(1).transpose()), 1e-9);
  }
  Rng rng2(11);
  EXPECT_EQ(smote(data, 5, 0, rng2).rows(), 0);
}

TEST(Smote, StaysInMinorityBoundingBox) {
  Rng data_rng(12);
  const TrainingSet data = gaussian_set(10, 40, 2, data_rng);
  const Eigen::MatrixXd minority = data.features().topRows(10);
  const Eigen::RowVectorXd lo = minority.colwise().minCoeff();
  const Eigen::RowVectorXd hi = minority.colwise().maxCoeff();
  Rng rng(13);
  const Eigen::MatrixXd s = smote(data, 3, 500, rng);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) {
      EXPECT_GE(s(i, c), lo(c));
      EXPECT_LE(s(i, c), hi(c));
    }
  }
}

TEST(Smote, SyntheticsLieOnNeighbourSegments) {
  Rng data_rng(14);
  const TrainingSet data = gaussian_set(30, 100, 4, data_rng);
  const SmoteSampler sampler(data.features().topRows(30), 5);
  EXPECT_EQ(sampler.k(), 5);
  Rng rng(15);
  const Eigen::MatrixXd s = sampler.draw(300, rng);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double best = 1e300;
    for (std::size_t a = 0; a < 30; ++a) {
      for (int b : sampler.neighbors(a)) {
        best = std::min(best, segment_residual(s.row(i).transpose(),
                                               sampler.minority().row(static_cast<Eigen::Index>(a)).transpose(),
                                               sampler.minority().row(b).transpose()));
      }
    }
    EXPECT_LE(best, 1e-9);
  }
}

TEST(Smote, NeighboursAreNearest) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 3, 10;
  const SmoteSampler sampler(x, 2);
  EXPECT_EQ(sampler.neighbors(0), (std::vector<int>{1, 2}));
  EXPECT_EQ(sampler.neighbors(3), (std::vector<int>{2, 1}));
  EXPECT_EQ(SmoteSampler(x, 10).k(), 3);
}

TEST(Smote, NeedsTwoMinoritySamples) {
  const TrainingSet data = TrainingSet::uniform(Eigen::MatrixXd::Zero(4, 1), {1, 0, 0, 0});
  Rng rng(16);
  EXPECT_THROW(smote(data, 5, 10, rng), PolicyError);
  EXPECT_THROW(SmoteSampler(Eigen::MatrixXd::Zero(3, 1), 0), InvalidParameter);
}

}  // namespace
}  // namespace qsep::learn
