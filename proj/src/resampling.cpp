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

#include <algorithm>
#include <numeric>
#include <utility>

namespace qsep::learn {

std::vector<std::size_t> undersample_indices(const std::vector<int>& labels, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw PolicyError("under-sampling needs both classes");
  std::vector<std::size_t>& major = pos.size() > neg.size() ? pos : neg;
  std::vector<std::size_t>& minor = pos.size() > neg.size() ? neg : pos;
  // Partial Fisher-Yates: the first minor.size() slots are a uniform draw.
  for (std::size_t i = 0; i < minor.size(); ++i) {
    const std::size_t j = i + rng.index(major.size() - i);
    std::swap(major[i], major[j]);
  }
  std::vector<std::size_t> kept(minor);
  kept.insert(kept.end(), major.begin(), major.begin() + static_cast<std::ptrdiff_t>(minor.size()));
  std::sort(kept.begin(), kept.end());
  return kept;
}

TrainingSet random_undersample(const TrainingSet& data, Rng& rng) {
  return data.subset(undersample_indices(data.labels(), rng));
}

int minority_label(const std::vector<int>& labels) {
  const auto ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return ones <= labels.size() - ones ? 1 : 0;
}

SmoteSampler::SmoteSampler(Eigen::MatrixXd minority, int k) : minority_(std::move(minority)) {
  const auto n = static_cast<int>(minority_.rows());
  if (n < 2) throw PolicyError("SMOTE needs at least two minority samples");
  if (k < 1) throw InvalidParameter("SMOTE needs k_neighbors >= 1");
  k_ = std::min(k, n - 1);
  neighbors_.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
      if (j == static_cast<int>(i)) continue;
      dist.emplace_back((minority_.row(j) - minority_.row(row)).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
    auto& nn = neighbors_[i];
    for (int t = 0; t < k_; ++t) nn.push_back(dist[static_cast<std::size_t>(t)].second);
  });
}

Eigen::MatrixXd SmoteSampler::draw(std::size_t n, Rng& rng) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), minority_.cols());
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = rng.index(static_cast<std::size_t>(minority_.rows()));
    const int j = neighbors_[i][rng.index(static_cast<std::size_t>(k_))];
    const double u = rng.uniform();
    const auto row = static_cast<Eigen::Index>(i);
    out.row(static_cast<Eigen::Index>(s)) =
        minority_.row(row) + u * (minority_.row(j) - minority_.row(row));
  }
  return out;
}

Eigen::MatrixXd smote(const TrainingSet& data, int k_neighbors, std::size_t n_synthetic, Rng& rng) {
  const int label = minority_label(data.labels());
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels()[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd minority(static_cast<Eigen::Index>(rows.size()), data.num_features());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    minority.row(static_cast<Eigen::Index>(i)) = data.features().row(rows[i]);
  }
  const SmoteSampler sampler(std::move(minority), k_neighbors);
  return sampler.draw(n_synthetic, rng);
}

}  // namespace qsep::learn
