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

// Random under-sampling and SMOTE for binary training sets.

#ifndef QSEP_RESAMPLING_HPP_
#define QSEP_RESAMPLING_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "qsep/tree.hpp"

namespace qsep::learn {

// Sorted row indices kept by random under-sampling: every row of the smaller
// class plus an equally sized uniform draw without replacement from the
// larger class. Throws PolicyError unless both classes are present.
std::vector<std::size_t> undersample_indices(const std::vector<int>& labels, Rng& rng);

// data.subset(undersample_indices(...)): exactly balanced, weights renormalized.
TrainingSet random_undersample(const TrainingSet& data, Rng& rng);

// The less frequent label; 1 on a tie.
int minority_label(const std::vector<int>& labels);

// Interpolates between minority rows and their nearest minority neighbours.
class SmoteSampler {
 public:
  // `minority` holds one sample per row. Requires at least two rows
  // (PolicyError otherwise) and k >= 1; k is clipped to rows - 1.
  SmoteSampler(Eigen::MatrixXd minority, int k);

  int k() const { return k_; }
  const Eigen::MatrixXd& minority() const { return minority_; }
  // Indices of the k nearest other rows of row i, closest first.
  const std::vector<int>& neighbors(std::size_t i) const { return neighbors_[i]; }

  // n synthetic rows x_i + u (x_nn - x_i).
  Eigen::MatrixXd draw(std::size_t n, Rng& rng) const;

 private:
  Eigen::MatrixXd minority_;
  int k_;
  std::vector<std::vector<int>> neighbors_;
};

// n_synthetic SMOTE rows for the minority class of `data`.
Eigen::MatrixXd smote(const TrainingSet& data, int k_neighbors, std::size_t n_synthetic, Rng& rng);

}  // namespace qsep::learn

#endif  // QSEP_RESAMPLING_HPP_
