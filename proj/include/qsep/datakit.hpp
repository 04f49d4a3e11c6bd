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

// Labeled state datasets: generation, the alpha feature, splits, prevalence
// subsets and CSV persistence.

#ifndef QSEP_DATAKIT_HPP_
#define QSEP_DATAKIT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsep/chacore.hpp"
#include "qsep/labeling.hpp"
#include "qsep/tree.hpp"

namespace qsep::data {

using state::BipartiteDims;

struct DatasetMetadata {
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::string labeler;  // state::describe() of the labeler
  std::string hull;     // HullModel::id() once alpha is attached
  // Any other "# key=value" lines, written back in key order.
  std::map<std::string, std::string> extra;

  friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

class LabeledDataset {
 public:
  // `features` is n x (d^2 - 1); `alpha` is empty or has n entries. Throws
  // InvalidInput on shape mismatches or labels outside {0, 1}.
  LabeledDataset(BipartiteDims dims, Eigen::MatrixXd features, std::optional<Eigen::VectorXd> alpha,
                 std::vector<int> labels, DatasetMetadata metadata = {});

  const BipartiteDims& dims() const { return dims_; }
  std::size_t size() const { return labels_.size(); }
  const Eigen::MatrixXd& features() const { return features_; }
  bool has_alpha() const { return alpha_.has_value(); }
  const Eigen::VectorXd& alpha() const;
  const std::vector<int>& labels() const { return labels_; }
  const DatasetMetadata& metadata() const { return metadata_; }
  std::size_t count(int label) const;

  // d^2 - 1, or d^2 with alpha attached.
  Eigen::Index width() const { return features_.cols() + (has_alpha() ? 1 : 0); }
  // n x width(): the base features followed by alpha when present.
  Eigen::MatrixXd design_matrix() const;
  // Uniformly weighted training set over design_matrix().
  learn::TrainingSet training_set() const;

  // Rows at `indices` in the given order; metadata is kept.
  LabeledDataset subset(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&);

 private:
  BipartiteDims dims_;
  Eigen::MatrixXd features_;
  std::optional<Eigen::VectorXd> alpha_;
  std::vector<int> labels_;
  DatasetMetadata metadata_;
};

// n random states (state i from rng.substream(i)) labeled by `labeler`.
// Under ChaApprox, NPT states are kept and labeled 0.
LabeledDataset generate_dataset(std::size_t n, const BipartiteDims& dims, double theta,
                                const state::Labeler& labeler, Rng& rng);

// Appends alpha_max against `hull` to every row. Throws InvalidInput on a dims
// mismatch and InvalidState if alpha is already attached.
LabeledDataset attach_alpha(const LabeledDataset& ds, const cha::HullModel& hull,
                            const cha::ChaOptions& options = {});

// Per-row CHA scores, computed in parallel.
Eigen::VectorXd alpha_scores(const Eigen::MatrixXd& features, const BipartiteDims& dims,
                             const cha::HullModel& hull, const cha::ChaOptions& options = {});

struct SplitIndices {
  std::vector<std::size_t> train;  // sorted
  std::vector<std::size_t> test;   // sorted
};

// Uniform partition without replacement with round(fraction * n) training
// rows; stratified splits round per class instead. Throws InvalidParameter
// when a side would be empty.
SplitIndices split_indices(const std::vector<int>& labels, double train_fraction, Rng& rng,
                           bool stratified = false);

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction, Rng& rng,
                                                           bool stratified = false);

// Sorted indices of n_separable label-1 rows and n_entangled label-0 rows,
// each drawn uniformly without replacement. Throws InvalidParameter if a
// class has too few rows.
std::vector<std::size_t> prevalence_subset_indices(const std::vector<int>& labels,
                                                   std::size_t n_separable,
                                                   std::size_t n_entangled, Rng& rng);

LabeledDataset carve_prevalence_subset(const LabeledDataset& ds, std::size_t n_separable,
                                       std::size_t n_entangled, Rng& rng);

// CSV: "# key=value" lines (dims first), the header
// "f0,...,f{k-1},alpha,label", then one row per sample with an empty alpha
// cell when alpha is absent. Doubles use the shortest round-trip form.
void save_csv(const LabeledDataset& ds, std::ostream& out);
void save_csv(const LabeledDataset& ds, const std::string& path);
// Throws ParseError naming the line on malformed input.
LabeledDataset load_csv(std::istream& in);
LabeledDataset load_csv(const std::string& path);

}  // namespace qsep::data

#endif  // QSEP_DATAKIT_HPP_
