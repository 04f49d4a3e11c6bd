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

#include "qsep/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "qsep/csv_util.hpp"

namespace qsep::data {

namespace {

// First k entries of a uniform random permutation of `pool`.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool, std::size_t k,
                                                  Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> rows_with_label(const std::vector<int>& labels, int label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - sorted.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < sorted.size() && sorted[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

LabeledDataset::LabeledDataset(BipartiteDims dims, Eigen::MatrixXd features,
                               std::optional<Eigen::VectorXd> alpha, std::vector<int> labels,
                               DatasetMetadata metadata)
    : dims_(dims),
      features_(std::move(features)),
      alpha_(std::move(alpha)),
      labels_(std::move(labels)),
      metadata_(std::move(metadata)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (features_.rows() != n) throw InvalidInput("features and labels differ in row count");
  if (features_.cols() != dims_.feature_dim()) {
    throw InvalidInput("feature width " + std::to_string(features_.cols()) + " does not match d^2-1 = " +
                       std::to_string(dims_.feature_dim()));
  }
  if (alpha_ && alpha_->size() != n) throw InvalidInput("alpha column has the wrong length");
  for (int y : labels_) {
    if (y != 0 && y != 1) throw InvalidInput("labels must be 0 or 1");
  }
}

const Eigen::VectorXd& LabeledDataset::alpha() const {
  if (!alpha_) throw InvalidState("dataset has no alpha column");
  return *alpha_;
}

std::size_t LabeledDataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Eigen::MatrixXd LabeledDataset::design_matrix() const {
  if (!alpha_) return features_;
  Eigen::MatrixXd x(features_.rows(), features_.cols() + 1);
  x << features_, *alpha_;
  return x;
}

learn::TrainingSet LabeledDataset::training_set() const {
  return learn::TrainingSet::uniform(design_matrix(), labels_);
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd x(m, features_.cols());
  std::optional<Eigen::VectorXd> a;
  if (alpha_) a = Eigen::VectorXd(m);
  std::vector<int> y(indices.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t src = indices[static_cast<std::size_t>(i)];
    if (src >= labels_.size()) throw InvalidInput("subset index out of range");
    const auto s = static_cast<Eigen::Index>(src);
    x.row(i) = features_.row(s);
    if (a) (*a)(i) = (*alpha_)(s);
    y[static_cast<std::size_t>(i)] = labels_[src];
  }
  return LabeledDataset(dims_, std::move(x), std::move(a), std::move(y), metadata_);
}

bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
  return a.dims_ == b.dims_ && a.features_ == b.features_ && a.alpha_.has_value() == b.alpha_.has_value() &&
         (!a.alpha_ || *a.alpha_ == *b.alpha_) && a.labels_ == b.labels_ && a.metadata_ == b.metadata_;
}

LabeledDataset generate_dataset(std::size_t n, const BipartiteDims& dims, double theta,
                                const state::Labeler& labeler, Rng& rng) {
  if (n == 0) throw InvalidParameter("dataset size must be >= 1");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), dims.feature_dim());
  std::vector<int> y(n);
  parallel_for(n, [&](std::size_t i) {
    Rng sub = rng.substream(i);
    const state::DensityMatrix rho = state::random_density_matrix(dims, theta, sub);
    y[i] = state::label_state(rho, labeler).y;
    x.row(static_cast<Eigen::Index>(i)) = state::to_feature(rho).coords.transpose();
  });
  DatasetMetadata meta;
  meta.seed = rng.seed();
  meta.theta = theta;
  meta.labeler = state::describe(labeler);
  return LabeledDataset(dims, std::move(x), std::nullopt, std::move(y), std::move(meta));
}

Eigen::VectorXd alpha_scores(const Eigen::MatrixXd& features, const BipartiteDims& dims,
                             const cha::HullModel& hull, const cha::ChaOptions& options) {
  if (!(hull.dims() == dims)) {
    throw InvalidInput("hull dims " + hull.dims().str() + " do not match dataset dims " + dims.str());
  }
  Eigen::VectorXd alpha(features.rows());
  parallel_for(static_cast<std::size_t>(features.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    alpha(r) = cha::alpha_max({dims, features.row(r).transpose()}, hull, options).alpha;
  });
  return alpha;
}

LabeledDataset attach_alpha(const LabeledDataset& ds, const cha::HullModel& hull,
                            const cha::ChaOptions& options) {
  if (ds.has_alpha()) throw InvalidState("alpha is already attached");
  Eigen::VectorXd alpha = alpha_scores(ds.features(), ds.dims(), hull, options);
  DatasetMetadata meta = ds.metadata();
  meta.hull = hull.id();
  return LabeledDataset(ds.dims(), ds.features(), std::move(alpha), ds.labels(), std::move(meta));
}

SplitIndices split_indices(const std::vector<int>& labels, double train_fraction, Rng& rng,
                           bool stratified) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidParameter("train fraction must lie in (0, 1)");
  }
  const std::size_t n = labels.size();
  SplitIndices out;
  if (!stratified) {
    const auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (k == 0 || k >= n) throw InvalidParameter("train fraction leaves one side empty");
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    out.train = draw_without_replacement(std::move(all), k, rng);
  } else {
    for (int label : {1, 0}) {
      std::vector<std::size_t> pool = rows_with_label(labels, label);
      const auto k =
          static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(pool.size())));
      auto picked = draw_without_replacement(std::move(pool), k, rng);
      out.train.insert(out.train.end(), picked.begin(), picked.end());
    }
    if (out.train.empty() || out.train.size() >= n) {
      throw InvalidParameter("train fraction leaves one side empty");
    }
  }
  std::sort(out.train.begin(), out.train.end());
  out.test = complement(out.train, n);
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double train_fraction, Rng& rng,
                                                           bool stratified) {
  const SplitIndices s = split_indices(ds.labels(), train_fraction, rng, stratified);
  return {ds.subset(s.train), ds.subset(s.test)};
}

std::vector<std::size_t> prevalence_subset_indices(const std::vector<int>& labels,
                                                   std::size_t n_separable,
                                                   std::size_t n_entangled, Rng& rng) {
  std::vector<std::size_t> sep = rows_with_label(labels, 1);
  std::vector<std::size_t> ent = rows_with_label(labels, 0);
  if (sep.size() < n_separable || ent.size() < n_entangled) {
    throw InvalidParameter("requested " + std::to_string(n_separable) + " separable / " +
                           std::to_string(n_entangled) + " entangled rows, have " +
                           std::to_string(sep.size()) + " / " + std::to_string(ent.size()));
  }
  std::vector<std::size_t> out = draw_without_replacement(std::move(sep), n_separable, rng);
  const auto e = draw_without_replacement(std::move(ent), n_entangled, rng);
  out.insert(out.end(), e.begin(), e.end());
  std::sort(out.begin(), out.end());
  return out;
}

LabeledDataset carve_prevalence_subset(const LabeledDataset& ds, std::size_t n_separable,
                                       std::size_t n_entangled, Rng& rng) {
  return ds.subset(prevalence_subset_indices(ds.labels(), n_separable, n_entangled, rng));
}

void save_csv(const LabeledDataset& ds, std::ostream& out) {
  const DatasetMetadata& meta = ds.metadata();
  out << "# dims=" << ds.dims().str() << '\n';
  if (meta.seed) out << "# seed=" << *meta.seed << '\n';
  if (meta.theta) out << "# theta=" << csv::format_double(*meta.theta) << '\n';
  if (!meta.labeler.empty()) out << "# labeler=" << meta.labeler << '\n';
  if (!meta.hull.empty()) out << "# hull=" << meta.hull << '\n';
  for (const auto& [key, value] : meta.extra) out << "# " << key << '=' << value << '\n';
  const Eigen::Index k = ds.features().cols();
  for (Eigen::Index j = 0; j < k; ++j) out << 'f' << j << ',';
  out << "alpha,label\n";
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    line.clear();
    for (Eigen::Index j = 0; j < k; ++j) {
      line += csv::format_double(ds.features()(r, j));
      line += ',';
    }
    if (ds.has_alpha()) line += csv::format_double(ds.alpha()(r));
    line += ',';
    line += ds.labels()[i] ? '1' : '0';
    line += '\n';
    out << line;
  }
}

void save_csv(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  save_csv(ds, out);
  if (!out) throw InvalidInput("failed writing " + path);
}

LabeledDataset load_csv(std::istream& in) {
  std::optional<BipartiteDims> dims;
  DatasetMetadata meta;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  Eigen::Index k = 0;
  std::vector<double> values;
  std::vector<double> alphas;
  std::vector<int> labels;
  std::optional<bool> alpha_present;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = csv::chomp(raw);
    if (line.empty()) continue;
    if (!header_seen && line.front() == '#') {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos || eq == 0) throw ParseError("metadata line needs key=value", line_no);
      const std::string key(body.substr(0, eq));
      const std::string value(body.substr(eq + 1));
      try {
        if (key == "dims") {
          dims = BipartiteDims::parse(value);
        } else if (key == "seed") {
          meta.seed = csv::parse_uint(value, line_no);
        } else if (key == "theta") {
          meta.theta = csv::parse_double(value, line_no);
        } else if (key == "labeler") {
          meta.labeler = value;
        } else if (key == "hull") {
          meta.hull = value;
        } else {
          meta.extra[key] = value;
        }
      } catch (const InvalidDimension& e) {
        throw ParseError(e.what(), line_no);
      }
      continue;
    }
    const auto fields = csv::split(line);
    if (!header_seen) {
      if (!dims) throw ParseError("missing '# dims=' line before the header", line_no);
      k = dims->feature_dim();
      if (static_cast<Eigen::Index>(fields.size()) != k + 2) {
        throw ParseError("header needs " + std::to_string(k + 2) + " columns for dims " + dims->str(),
                         line_no);
      }
      for (Eigen::Index j = 0; j < k; ++j) {
        if (fields[static_cast<std::size_t>(j)] != "f" + std::to_string(j)) {
          throw ParseError("expected column f" + std::to_string(j), line_no);
        }
      }
      if (fields[static_cast<std::size_t>(k)] != "alpha" || fields[static_cast<std::size_t>(k) + 1] != "label") {
        throw ParseError("header must end with alpha,label", line_no);
      }
      header_seen = true;
      continue;
    }
    if (static_cast<Eigen::Index>(fields.size()) != k + 2) {
      throw ParseError("expected " + std::to_string(k + 2) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    for (Eigen::Index j = 0; j < k; ++j) values.push_back(csv::parse_double(fields[static_cast<std::size_t>(j)], line_no));
    const std::string_view a = fields[static_cast<std::size_t>(k)];
    if (!alpha_present) alpha_present = !a.empty();
    if (*alpha_present != !a.empty()) throw ParseError("alpha cells must be all empty or all set", line_no);
    if (*alpha_present) alphas.push_back(csv::parse_double(a, line_no));
    const std::int64_t y = csv::parse_int(fields[static_cast<std::size_t>(k) + 1], line_no);
    if (y != 0 && y != 1) throw ParseError("label must be 0 or 1", line_no);
    labels.push_back(static_cast<int>(y));
  }
  if (!header_seen) throw ParseError("missing header", line_no + 1);

  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd x(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) x(i, j) = values[static_cast<std::size_t>(i * k + j)];
  }
  std::optional<Eigen::VectorXd> alpha;
  if (alpha_present && *alpha_present) alpha = Eigen::Map<const Eigen::VectorXd>(alphas.data(), n);
  return LabeledDataset(*dims, std::move(x), std::move(alpha), std::move(labels), std::move(meta));
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return load_csv(in);
}

}  // namespace qsep::data
