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

#include "qsep/chacore.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <sstream>

#include "qsep/labeling.hpp"

namespace qsep::cha {
namespace {

const BipartiteDims kQubits(2, 2);
const BipartiteDims kQutrits(3, 3);

FeatureVector bell_feature() { return state::to_feature(state::bell_phi_plus()); }

TEST(SampleHull, ShapeAndPurity) {
  const HullModel hull = sample_hull(kQubits, 1000, 1);
  EXPECT_EQ(hull.size(), 1000);
  EXPECT_EQ(hull.vertices().rows(), 15);
  EXPECT_FALSE(hull.undersized());
  for (Eigen::Index i = 0; i < 20; ++i) {
    const state::DensityMatrix rho = state::from_feature(hull.vertex(i));
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
    EXPECT_TRUE(state::is_ppt(rho));
  }
}

TEST(SampleHull, SmallQutritHullIsFlagged) {
  const HullModel hull = sample_hull(kQutrits, 10, 2);
  EXPECT_EQ(hull.size(), 10);
  EXPECT_EQ(hull.vertices().rows(), 80);
  EXPECT_TRUE(hull.undersized());
}

TEST(SampleHull, DeterministicAndNested) {
  const HullModel a = sample_hull(kQubits, 300, 5);
  const HullModel b = sample_hull(kQubits, 300, 5);
  const HullModel big = sample_hull(kQubits, 700, 5);
  EXPECT_EQ(a.vertices(), b.vertices());
  EXPECT_EQ(big.prefix(300).vertices(), a.vertices());
  EXPECT_NE(sample_hull(kQubits, 300, 6).vertices(), a.vertices());
  EXPECT_THROW(big.prefix(701), InvalidParameter);
}

TEST(AlphaMax, VertexIsMember) {
  const HullModel hull = sample_hull(kQubits, 200, 3);
  for (Eigen::Index i = 0; i < 10; ++i) {
    const ChaScore s = alpha_max(hull.vertex(i), hull);
    EXPECT_TRUE(s.feasible);
    EXPECT_GE(s.alpha, 1.0 - 1e-9);
    EXPECT_EQ(cha_classify(s), 1);
  }
}

TEST(AlphaMax, OriginIsCapped) {
  const HullModel hull = sample_hull(kQubits, 100, 3);
  const ChaScore s = alpha_max({kQubits, Eigen::VectorXd::Zero(15)}, hull);
  EXPECT_EQ(s.alpha, 100.0);
  EXPECT_TRUE(s.capped);
  EXPECT_EQ(cha_classify(s), 1);
}

TEST(AlphaMax, NearOriginHitsTheCap) {
  const HullModel hull = sample_hull(kQubits, 500, 3);
  FeatureVector x = bell_feature();
  x.coords *= 1e-4;
  const ChaScore s = alpha_max(x, hull, {.alpha_cap = 50.0});
  EXPECT_NEAR(s.alpha, 50.0, 1e-9);
  EXPECT_TRUE(s.capped);
}

TEST(AlphaMax, BellStateBoundedByWernerThreshold) {
  // alpha * x_Bell is the Werner-type state alpha |phi+><phi+| + (1-alpha) I/4,
  // which is separable iff alpha <= 1/3 (its PT minimum eigenvalue is
  // (1 - 3 alpha) / 4). Any product-state hull must respect that.
  const HullModel hull = sample_hull(kQubits, 1000, 4);
  const ChaScore s = alpha_max(bell_feature(), hull);
  EXPECT_TRUE(s.feasible);
  EXPECT_GT(s.alpha, 0.0);
  EXPECT_LE(s.alpha, 1.0 / 3.0 + 1e-6);
  EXPECT_EQ(cha_classify(s), 0);

  FeatureVector scaled = bell_feature();
  scaled.coords *= s.alpha;
  EXPECT_GE(state::min_partial_transpose_eigenvalue(state::from_feature(scaled)), -1e-6);
}

TEST(AlphaMax, WitnessReproducesScaledPoint) {
  const HullModel hull = sample_hull(kQubits, 400, 8);
  Rng rng(8);
  const ChaOptions opts;
  for (int i = 0; i < 10; ++i) {
    const FeatureVector x = state::to_feature(state::random_density_matrix(kQubits, 0.5, rng));
    const ChaScore s = alpha_max(x, hull, opts);
    ASSERT_TRUE(s.feasible);
    ASSERT_EQ(s.lambda.size(), hull.size());
    EXPECT_GE(s.lambda.minCoeff(), -opts.tol);
    EXPECT_NEAR(s.lambda.sum(), 1.0, opts.tol);
    const Eigen::VectorXd residual = s.alpha * x.coords - hull.vertices() * s.lambda;
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), opts.relaxation + opts.tol);
  }
}

TEST(AlphaMax, ScaleCovariance) {
  const HullModel hull = sample_hull(kQubits, 400, 9);
  Rng rng(9);
  for (int i = 0; i < 5; ++i) {
    const FeatureVector x = state::to_feature(state::random_density_matrix(kQubits, 0.5, rng));
    const double base = alpha_max(x, hull).alpha;
    for (double k : {0.5, 2.0, 3.0}) {
      FeatureVector kx = x;
      kx.coords *= k;
      const double scaled = alpha_max(kx, hull).alpha;
      EXPECT_NEAR(scaled, base / k, 1e-6 * base / k);
    }
  }
}

TEST(AlphaMax, MonotoneInNestedHulls) {
  const HullModel big = sample_hull(kQubits, 800, 10);
  Rng rng(10);
  for (int i = 0; i < 5; ++i) {
    const FeatureVector x = state::to_feature(state::random_density_matrix(kQubits, 0.5, rng));
    double previous = 0.0;
    for (Eigen::Index m : {50, 100, 200, 400, 800}) {
      const double a = alpha_max(x, big.prefix(m)).alpha;
      EXPECT_GE(a, previous - 1e-9);
      previous = a;
    }
  }
}

TEST(AlphaMax, InfeasibleReturnsZero) {
  // A single vertex only represents multiples of itself.
  const HullModel hull = sample_hull(kQubits, 1, 11);
  const ChaScore s = alpha_max(bell_feature(), hull);
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_EQ(cha_classify(s), 0);
}

TEST(AlphaMax, Deterministic) {
  const HullModel hull = sample_hull(kQubits, 300, 12);
  EXPECT_EQ(alpha_max(bell_feature(), hull).alpha, alpha_max(bell_feature(), hull).alpha);
}

TEST(AlphaMax, RejectsMismatchedInput) {
  const HullModel hull = sample_hull(kQubits, 20, 13);
  EXPECT_THROW(alpha_max({kQutrits, Eigen::VectorXd::Zero(80)}, hull), InvalidInput);
  EXPECT_THROW(alpha_max(bell_feature(), hull, {.alpha_cap = 1.0}), InvalidParameter);
}

TEST(ChaClassify, ThresholdIsInclusive) {
  EXPECT_EQ(cha_classify(1.0), 1);
  EXPECT_EQ(cha_classify(0.33), 0);
  EXPECT_EQ(cha_classify(ChaScore{.alpha = 100.0, .capped = true}), 1);
}

TEST(HullCsv, RoundTrip) {
  const HullModel hull = sample_hull(kQubits, 25, 14);
  std::stringstream buf;
  save_hull_csv(hull, buf);
  const HullModel back = load_hull_csv(buf);
  EXPECT_EQ(back.dims(), hull.dims());
  EXPECT_EQ(back.seed(), hull.seed());
  EXPECT_EQ(back.vertices(), hull.vertices());
}

TEST(HullCsv, MalformedRowNamesLine) {
  std::stringstream buf;
  save_hull_csv(sample_hull(kQubits, 3, 15), buf);
  std::string text = buf.str();
  text.insert(text.rfind('\n', text.size() - 2) + 1, "1,2,3\n");
  std::stringstream bad(text);
  try {
    load_hull_csv(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(LabelState, PptExactForQubits) {
  const state::Labeler ppt = state::PptExact{};
  EXPECT_EQ(state::label_state(state::bell_phi_plus(), ppt).y, 0);
  Rng rng(16);
  const auto product = state::label_state(state::random_pure_product(kQubits, rng), ppt);
  EXPECT_EQ(product.y, 1);
  EXPECT_EQ(product.source, state::LabelSource::kPptExact);
}

TEST(LabelState, PptExactRefusedAboveSixDimensions) {
  Rng rng(17);
  EXPECT_THROW(state::label_state(state::random_density_matrix(kQutrits, 0.5, rng), state::PptExact{}),
               PolicyError);
}

TEST(LabelState, ChaApproxRejectsNptQutrits) {
  auto hull = std::make_shared<const HullModel>(sample_hull(kQutrits, 5, 18));
  const state::Labeler cha = state::ChaApprox{hull, {}};
  Rng rng(19);
  int seen = 0;
  for (int i = 0; i < 50 && seen < 5; ++i) {
    const state::DensityMatrix rho = state::random_density_matrix(kQutrits, 0.5, rng);
    if (state::is_ppt(rho)) continue;
    ++seen;
    const auto label = state::label_state(rho, cha);
    EXPECT_EQ(label.y, 0);
    EXPECT_EQ(label.source, state::LabelSource::kChaApprox);
  }
  EXPECT_EQ(seen, 5);
}

TEST(LabelState, ChaApproxCertifiesHullMembers) {
  auto hull = std::make_shared<const HullModel>(sample_hull(kQutrits, 200, 20));
  const state::Labeler cha = state::ChaApprox{hull, {}};
  const auto label = state::label_state(state::from_feature(hull->vertex(0)), cha);
  EXPECT_EQ(label.y, 1);
  EXPECT_EQ(state::label_state(state::maximally_mixed(kQutrits), cha).y, 1);
}

}  // namespace
}  // namespace qsep::cha
