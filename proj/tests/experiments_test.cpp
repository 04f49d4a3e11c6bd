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

#include "qsep/experiments.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "qsep/csv_util.hpp"

namespace qsep::exp {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 400;
  cfg.m_grid = {40, 80, 160};
  cfg.m = 100;
  cfg.reps = 3;
  cfg.learners = 5;
  cfg.tree.max_depth = 4;
  cfg.seed = 11;
  return cfg;
}

std::size_t rep_rows(const ResultTable& t) {
  std::size_t n = 0;
  for (const auto& r : t.rows) n += r.rep ? 1 : 0;
  return n;
}

std::string csv_text(const ResultTable& t) {
  std::stringstream s;
  write_results_csv(t, s);
  return s.str();
}

TEST(Classifier, NamesRoundTrip) {
  for (auto c : {Classifier::kBagging, Classifier::kBoosting, Classifier::kCha, Classifier::kBcha,
                 Classifier::kRusbcha}) {
    EXPECT_EQ(parse_classifier(to_string(c)), c);
  }
  EXPECT_EQ(parse_classifier("rusbcha"), Classifier::kRusbcha);
  EXPECT_THROW(parse_classifier("svm"), ConfigError);
}

TEST(Config, ValidationAndPresets) {
  ExperimentConfig cfg;
  cfg.reps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.fraction_grid = {0.5, 1.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ExperimentConfig{};
  cfg.m_grid = {0};
  EXPECT_THROW(cfg.validate(), ConfigError);

  const ExperimentConfig desk = preset("desk", BipartiteDims(2, 2));
  EXPECT_EQ(desk.n, 8000u);
  EXPECT_EQ(desk.m_grid, (std::vector<Eigen::Index>{250, 500, 1000, 2000}));
  EXPECT_EQ(desk.learners, 50);
  EXPECT_EQ(desk.reps, 10);
  const ExperimentConfig big = preset("paper", BipartiteDims(3, 3));
  EXPECT_EQ(big.n, 20000u);
  EXPECT_EQ(big.m, 20000);
  EXPECT_EQ(big.reps, 30);
  EXPECT_EQ(big.m_grid.back(), 100000);
  EXPECT_THROW(preset("huge", BipartiteDims(2, 2)), ConfigError);
}

TEST(Ladder, StoredLaddersMatchReferencePrevalence) {
  const std::vector<double> qubit_pd{0.907, 0.842, 0.729, 0.665, 0.560, 0.479, 0.323, 0.230, 0.108, 0.031};
  const auto q = table_ladder(BipartiteDims(2, 2));
  ASSERT_EQ(q.size(), qubit_pd.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    // Reference values carry three truncated decimals.
    EXPECT_NEAR(metrics::prevalence_difference(q[i].n_separable, q[i].n_entangled), qubit_pd[i], 1e-3);
  }
  const std::vector<double> qutrit_pd{0.913, 0.811, 0.715, 0.610, 0.518, 0.413, 0.316, 0.217, 0.114, 0.018};
  const auto t = table_ladder(BipartiteDims(3, 3));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(metrics::prevalence_difference(t[i].n_separable, t[i].n_entangled), qutrit_pd[i], 1e-3);
  }
}

TEST(Ladder, ScalingKeepsPrevalenceAndFits) {
  const auto table = table_ladder(BipartiteDims(2, 2));
  const auto scaled = scale_ladder(table, 2842, 5158);
  ASSERT_EQ(scaled.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_LE(scaled[i].n_separable, 2842u);
    EXPECT_LE(scaled[i].n_entangled, 5158u);
    const double want = metrics::prevalence_difference(table[i].n_separable, table[i].n_entangled);
    EXPECT_NEAR(metrics::prevalence_difference(scaled[i].n_separable, scaled[i].n_entangled), want, 2e-3);
  }
  EXPECT_EQ(scaled.front().n_entangled, 5158u);
  EXPECT_EQ(scaled.back().n_separable, 2842u);
  // Exact availability reproduces the table.
  EXPECT_EQ(scale_ladder({{2814, 3000}}, 2814, 37186), (std::vector<LadderEntry>{{2814, 3000}}));
}

TEST(Baseline, RowCountsAndMeans) {
  const ExperimentConfig cfg = small_config();
  const ResultTable t = run_baseline(cfg);
  EXPECT_EQ(rep_rows(t), 2u * 3u);
  EXPECT_EQ(t.rows.size(), 2u * 3u + 2u);
  // Mean rows are the arithmetic mean of their repetitions.
  for (Classifier c : {Classifier::kBagging, Classifier::kBoosting}) {
    double oa = 0.0, g = 0.0;
    for (const auto& r : t.rows) {
      if (r.rep && r.classifier == c) {
        oa += r.report.oa;
        g += r.report.g_mean;
      }
    }
    EXPECT_NEAR(t.mean(c, "0.5").oa, oa / 3, 1e-12);
    EXPECT_NEAR(t.mean(c, "0.5").g_mean, g / 3, 1e-12);
  }
  ExperimentConfig bad = cfg;
  bad.classifiers = {Classifier::kBcha};
  EXPECT_THROW(run_baseline(bad), ConfigError);
}

TEST(Baseline, DeterministicBytes) {
  const ExperimentConfig cfg = small_config();
  EXPECT_EQ(csv_text(run_baseline(cfg)), csv_text(run_baseline(cfg)));
  ExperimentConfig other = cfg;
  other.seed = 12;
  EXPECT_NE(csv_text(run_baseline(cfg)), csv_text(run_baseline(other)));
}

TEST(Experiment1, RowsAndNestedHullMonotonicity) {
  const ExperimentConfig cfg = small_config();
  const ResultTable t = run_experiment1(cfg);
  EXPECT_EQ(rep_rows(t), 3u * 3u * 3u);
  EXPECT_EQ(t.params(), (std::vector<std::string>{"40", "80", "160"}));
  ExperimentConfig bad = cfg;
  bad.classifiers = {Classifier::kBagging};
  EXPECT_THROW(run_experiment1(bad), ConfigError);

  // Per-sample alpha never decreases along the nested m grid.
  const data::LabeledDataset ds = prepare_dataset(cfg);
  const cha::HullModel big = prepare_hull(cfg, 160);
  Eigen::VectorXd previous = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ds.size()));
  for (Eigen::Index m : cfg.m_grid) {
    const Eigen::VectorXd a = data::alpha_scores(ds.features(), ds.dims(), big.prefix(m));
    EXPECT_GE((a - previous).minCoeff(), -1e-7);
    previous = a;
  }
  EXPECT_EQ(prepare_hull(cfg, 80).vertices(), big.prefix(80).vertices());
}

TEST(Experiment1, ChaNeedsNoTraining) {
  const ExperimentConfig cfg = small_config();
  const data::LabeledDataset ds = data::attach_alpha(prepare_dataset(cfg), prepare_hull(cfg, 80));
  Rng rng(3);
  const auto [train, test] = data::split_train_test(ds, 0.5, rng);
  const auto a = train_and_score(Classifier::kCha, train, test, cfg, 1);
  const auto b = train_and_score(Classifier::kCha, train, test, cfg, 2);
  EXPECT_EQ(a.report.oa, b.report.oa);
  EXPECT_FALSE(a.model.has_value());
  EXPECT_THROW(train_and_score(Classifier::kBcha, prepare_dataset(cfg), prepare_dataset(cfg), cfg, 1),
               InvalidInput);
}

TEST(Experiment2, RowsPerFraction) {
  ExperimentConfig cfg = small_config();
  cfg.reps = 2;
  const ResultTable t = run_experiment2(cfg);
  EXPECT_EQ(rep_rows(t), 2u * 5u * 2u);
  EXPECT_EQ(t.params().front(), "0.1");
}

TEST(Experiment3, LadderRowsAndErrors) {
  ExperimentConfig cfg = small_config();
  cfg.reps = 2;
  const ResultTable t = run_experiment3(cfg);
  EXPECT_EQ(rep_rows(t), 2u * 10u * 2u);
  bool resolved = false;
  for (const auto& [k, v] : t.header) resolved |= k == "resolved_ladder";
  EXPECT_TRUE(resolved);

  cfg.ladder_mode = LadderMode::kExact;  // table counts exceed a 400-row dataset
  EXPECT_THROW(run_experiment3(cfg), ConfigError);
  cfg.ladder = {{20, 40}, {30, 30}};
  const ResultTable small = run_experiment3(cfg);
  EXPECT_EQ(small.params(), (std::vector<std::string>{csv::format_double(20.0 / 60.0), "0"}));
}

TEST(ResultsCsv, HeaderAndColumns) {
  const std::string text = csv_text(run_baseline(small_config()));
  std::istringstream in(text);
  std::string line;
  std::size_t comments = 0;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) ++comments;
  EXPECT_GT(comments, 10u);
  EXPECT_EQ(line,
            "experiment,classifier,param,rep,oa,oe,aa,ae,sensitivity,specificity,precision,"
            "f_measure,g_mean");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("baseline,BAGGING,0.5,0,", 0), 0u);
  EXPECT_NE(text.find("\nbaseline,BOOSTING,0.5,mean,"), std::string::npos);
}

}  // namespace
}  // namespace qsep::exp
