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

// Baseline and Experiments 1-3: configuration, runners and the results CSV.

#ifndef QSEP_EXPERIMENTS_HPP_
#define QSEP_EXPERIMENTS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsep/datakit.hpp"
#include "qsep/ensemble.hpp"
#include "qsep/metrics.hpp"
#include "qsep/tree.hpp"

namespace qsep::exp {

using state::BipartiteDims;

// BAGGING/BOOSTING see the raw d^2-1 features; BCHA (bagging) and RUSBCHA
// (RUSBoost) also see alpha; CHA thresholds alpha at 1.
enum class Classifier { kBagging, kBoosting, kCha, kBcha, kRusbcha };

std::string to_string(Classifier c);
// Case-insensitive; throws ConfigError on unknown names.
Classifier parse_classifier(const std::string& name);

enum class Experiment { kBaseline, kExp1, kExp2, kExp3 };
std::string to_string(Experiment e);

struct LadderEntry {
  std::size_t n_separable;
  std::size_t n_entangled;
  friend bool operator==(const LadderEntry&, const LadderEntry&) = default;
};

enum class LadderMode {
  kScaled,  // keep each entry's prevalence difference, fit the counts to the dataset
  kExact,   // use the counts as given
};

struct ExperimentConfig {
  BipartiteDims dims{2, 2};
  std::size_t n = 8000;
  double theta = 0.5;
  std::uint64_t seed = 1;
  // Empty selects the experiment's default set.
  std::vector<Classifier> classifiers;
  std::vector<Eigen::Index> m_grid{250, 500, 1000, 2000};
  // Hull size of Experiments 2 and 3.
  Eigen::Index m = 1000;
  // Size of the labeling hull when PPT is not exact (d_a * d_b > 6).
  Eigen::Index reference_m = 2000;
  double train_fraction = 0.5;
  std::vector<double> fraction_grid{0.1, 0.2, 0.3, 0.4, 0.5};
  // Empty selects the table ladder for dims.
  std::vector<LadderEntry> ladder;
  LadderMode ladder_mode = LadderMode::kScaled;
  int reps = 10;
  int learners = 50;
  learn::TreeParams tree;
  bool use_smote = false;
  double alpha_cap = 100.0;
  bool stratified = false;
  bool literal_specificity = false;
  // Optional inputs; generated from the seed when empty.
  std::string data_path;
  std::string hull_path;

  // Throws ConfigError.
  void validate() const;
  // key=value pairs echoed into the results header, in a fixed order.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

// "desk" or "paper" defaults for the given dims. Throws ConfigError.
ExperimentConfig preset(const std::string& name, const BipartiteDims& dims);

// Imbalanced subsets of the original datasets (two-qubit or two-qutrit).
std::vector<LadderEntry> table_ladder(const BipartiteDims& dims);

// Each entry keeps its prevalence difference p and majority class; the
// majority count is the available majority E unless the matching minority
// count round(E (1-p)/(1+p)) exceeds the available minority S, in which case
// the minority count is S and the majority round(S (1+p)/(1-p)).
std::vector<LadderEntry> scale_ladder(const std::vector<LadderEntry>& ladder,
                                      std::size_t available_separable,
                                      std::size_t available_entangled);

struct ResultRow {
  Experiment experiment;
  Classifier classifier;
  std::string param;       // m, train fraction or prevalence difference
  std::optional<int> rep;  // empty for the mean row
  metrics::MetricsReport report;
};

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<ResultRow> rows;

  // Mean row of (classifier, param); throws InvalidInput if absent.
  const metrics::MetricsReport& mean(Classifier c, const std::string& param) const;
  // Distinct params in row order.
  std::vector<std::string> params() const;
};

// Raw features only; classifiers must be BAGGING/BOOSTING.
ResultTable run_baseline(const ExperimentConfig& cfg);
// Sweep over m_grid with nested hulls.
ResultTable run_experiment1(const ExperimentConfig& cfg);
// Sweep over fraction_grid at fixed m.
ResultTable run_experiment2(const ExperimentConfig& cfg);
// Sweep over the prevalence ladder at fixed m; a fresh subset per repetition.
ResultTable run_experiment3(const ExperimentConfig& cfg);
ResultTable run_experiment(Experiment e, const ExperimentConfig& cfg);

// "# key=value" header lines, then
// experiment,classifier,param,rep,oa,oe,aa,ae,sensitivity,specificity,precision,f_measure,g_mean
void write_results_csv(const ResultTable& table, std::ostream& out);
void write_results_csv(const ResultTable& table, const std::string& path);

struct Scored {
  metrics::MetricsReport report;
  std::optional<learn::EnsembleModel> model;  // empty for CHA
};

// Fits classifier c on `train` with cfg's ensemble settings and a generator
// seeded with `seed`, then scores it on `test`. Alpha classifiers need alpha
// attached to both sets.
Scored train_and_score(Classifier c, const data::LabeledDataset& train,
                       const data::LabeledDataset& test, const ExperimentConfig& cfg,
                       std::uint64_t seed);

// The dataset and hull an experiment would use for cfg.
data::LabeledDataset prepare_dataset(const ExperimentConfig& cfg);
cha::HullModel prepare_hull(const ExperimentConfig& cfg, Eigen::Index m);

}  // namespace qsep::exp

#endif  // QSEP_EXPERIMENTS_HPP_
