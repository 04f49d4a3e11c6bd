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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <istream>
#include <ostream>

#include "qsep/csv_util.hpp"
#include "qsep/resampling.hpp"

namespace qsep::learn {

namespace {

Eigen::VectorXd uniform_weights(std::size_t n) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

// n draws with replacement, row i picked with probability w(i).
std::vector<std::size_t> weighted_bootstrap(const Eigen::VectorXd& w, Rng& rng) {
  std::vector<double> cumulative(static_cast<std::size_t>(w.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) cumulative[static_cast<std::size_t>(i)] = acc += w(i);
  std::vector<std::size_t> out(cumulative.size());
  for (auto& idx : out) {
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                cumulative.size() - 1);
  }
  return out;
}

void require_rounds(int n, const char* what) {
  if (n < 1) throw InvalidParameter(std::string(what) + " must be >= 1");
}

using FitRound = std::function<DecisionTree(const Eigen::VectorXd& weights, bool after_reset,
                                            Rng& round_rng)>;

EnsembleModel boost(const TrainingSet& data, int n_rounds, const TreeParams& params, Rng& rng,
                    EnsembleKind kind, bool use_smote, const FitRound& fit,
                    std::vector<BoostRound>* trace) {
  const std::size_t n = data.size();
  Eigen::VectorXd w = data.weights();
  std::vector<DecisionTree> learners;
  std::vector<double> alphas;
  std::vector<char> wrong(n);
  bool after_reset = false;
  std::optional<DecisionTree> last;
  if (trace) trace->clear();

  for (int t = 0; t < n_rounds; ++t) {
    Rng round_rng = rng.substream(static_cast<std::uint64_t>(t));
    DecisionTree tree = fit(w, after_reset, round_rng);
    after_reset = false;
    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      wrong[i] = tree.predict(data.features().row(r).transpose()).label != data.labels()[i];
      if (wrong[i]) eps += w(r);
    }

    if (eps <= 0.0) {
      const double weight = std::log(1.0 / kPerfectTol);
      learners.push_back(std::move(tree));
      alphas.push_back(weight);
      if (trace) trace->push_back({BoostRound::Outcome::kPerfect, eps, weight, w});
      break;
    }
    if (eps >= 0.5) {
      w = uniform_weights(n);
      after_reset = true;
      last = std::move(tree);
      if (trace) trace->push_back({BoostRound::Outcome::kReset, eps, 0.0, w});
      continue;
    }
    const double weight = 0.5 * std::log((1.0 - eps) / eps);
    const double up = std::exp(weight);
    const double down = std::exp(-weight);
    for (std::size_t i = 0; i < n; ++i) w(static_cast<Eigen::Index>(i)) *= wrong[i] ? up : down;
    w /= w.sum();
    learners.push_back(std::move(tree));
    alphas.push_back(weight);
    if (trace) trace->push_back({BoostRound::Outcome::kAccepted, eps, weight, w});
  }
  if (learners.empty()) {
    learners.push_back(std::move(*last));
    alphas.push_back(1.0);
  }
  return EnsembleModel(kind, std::move(learners), std::move(alphas), params, rng.seed(), use_smote);
}

void require_both_classes(const TrainingSet& data) {
  const std::size_t ones = data.count(1);
  if (ones == 0 || ones == data.size()) throw PolicyError("RUSBoost needs both classes present");
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::kBagging:
      return "BAGGING";
    case EnsembleKind::kBoosting:
      return "BOOSTING";
    case EnsembleKind::kRusBoost:
      return "RUSBOOST";
  }
  return "?";
}

std::string to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kMajorityVote ? "MAJORITY_VOTE" : "WEIGHTED_VOTE";
}

EnsembleModel::EnsembleModel(EnsembleKind kind, std::vector<DecisionTree> learners,
                             std::vector<double> learner_weights, TreeParams params,
                             std::uint64_t seed, bool use_smote)
    : kind_(kind),
      learners_(std::move(learners)),
      weights_(std::move(learner_weights)),
      params_(params),
      seed_(seed),
      use_smote_(use_smote) {
  if (learners_.empty()) throw InvalidInput("ensemble has no learners");
  if (learners_.size() != weights_.size()) {
    throw InvalidInput("learners and learner weights differ in length");
  }
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) throw InvalidInput("learner weights must be nonnegative");
    if (kind_ == EnsembleKind::kBagging && weights_[i] != 1.0) {
      throw InvalidInput("bagging learners carry unit weight");
    }
    if (learners_[i].num_features() != learners_.front().num_features()) {
      throw InvalidInput("learners disagree on the feature count");
    }
  }
}

EnsembleModel train_bagging(const TrainingSet& data, int n_learners, const TreeParams& params,
                            Rng& rng) {
  require_rounds(n_learners, "n_learners");
  const std::size_t n = data.size();
  std::vector<std::optional<DecisionTree>> slots(static_cast<std::size_t>(n_learners));
  parallel_for(slots.size(), [&](std::size_t i) {
    Rng sub = rng.substream(i);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = sub.index(n);
    slots[i] = train_tree(data.subset(rows).reweighted(uniform_weights(n)), params);
  });
  std::vector<DecisionTree> learners;
  learners.reserve(slots.size());
  for (auto& s : slots) learners.push_back(std::move(*s));
  return EnsembleModel(EnsembleKind::kBagging, std::move(learners),
                       std::vector<double>(slots.size(), 1.0), params, rng.seed());
}

EnsembleModel train_adaboost(const TrainingSet& data, int n_rounds, const TreeParams& params,
                             Rng& rng, std::vector<BoostRound>* trace) {
  require_rounds(n_rounds, "n_rounds");
  const FitRound fit = [&](const Eigen::VectorXd& w, bool after_reset, Rng& round_rng) {
    if (after_reset) return train_tree(data.subset(weighted_bootstrap(w, round_rng)), params);
    return train_tree(data.reweighted(w), params);
  };
  return boost(data, n_rounds, params, rng, EnsembleKind::kBoosting, false, fit, trace);
}

EnsembleModel train_rusboost(const TrainingSet& data, int n_rounds, const TreeParams& params,
                             Rng& rng, const RusBoostOptions& options,
                             std::vector<BoostRound>* trace) {
  require_rounds(n_rounds, "n_rounds");
  require_both_classes(data);
  if (options.smote_percent < 0) throw InvalidParameter("smote_percent must be >= 0");

  const int minority = minority_label(data.labels());
  std::vector<Eigen::Index> minority_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels()[i] == minority) minority_rows.push_back(static_cast<Eigen::Index>(i));
  }
  std::optional<SmoteSampler> sampler;
  std::size_t n_synthetic = 0;
  if (options.use_smote) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(minority_rows.size()), data.num_features());
    for (std::size_t i = 0; i < minority_rows.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = data.features().row(minority_rows[i]);
    }
    sampler.emplace(std::move(rows), options.smote_k);
    n_synthetic = minority_rows.size() * static_cast<std::size_t>(options.smote_percent) / 100;
  }

  const FitRound fit = [&](const Eigen::VectorXd& w, bool, Rng& round_rng) {
    if (!sampler || n_synthetic == 0) {
      return train_tree(random_undersample(data.reweighted(w), round_rng), params);
    }
    const Eigen::MatrixXd synthetic = sampler->draw(n_synthetic, round_rng);
    double minority_mass = 0.0;
    for (Eigen::Index r : minority_rows) minority_mass += w(r);
    const double synthetic_weight = minority_mass / static_cast<double>(minority_rows.size());

    const Eigen::Index n = data.features().rows();
    const auto s = static_cast<Eigen::Index>(n_synthetic);
    Eigen::MatrixXd x(n + s, data.num_features());
    x << data.features(), synthetic;
    std::vector<int> y = data.labels();
    y.insert(y.end(), n_synthetic, minority);
    Eigen::VectorXd ww(n + s);
    ww << w, Eigen::VectorXd::Constant(s, synthetic_weight);
    ww /= ww.sum();
    const TrainingSet augmented(std::move(x), std::move(y), std::move(ww));
    return train_tree(random_undersample(augmented, round_rng), params);
  };
  return boost(data, n_rounds, params, rng, EnsembleKind::kRusBoost, options.use_smote, fit, trace);
}

int ensemble_predict(const EnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto& learners = model.learners();
  if (model.aggregation() == Aggregation::kMajorityVote) {
    std::size_t ones = 0;
    for (const auto& tree : learners) ones += static_cast<std::size_t>(tree.predict(x).label);
    return ones > learners.size() - ones ? 1 : 0;
  }
  double margin = 0.0;
  for (std::size_t t = 0; t < learners.size(); ++t) {
    margin += model.learner_weights()[t] * (learners[t].predict(x).label == 1 ? 1.0 : -1.0);
  }
  return margin > 0.0 ? 1 : 0;
}

std::vector<int> ensemble_predict_rows(const EnsembleModel& model, const Eigen::MatrixXd& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = ensemble_predict(model, x.row(r).transpose());
  }
  return out;
}

void save_model(const EnsembleModel& model, std::ostream& out) {
  out << "qsep-ensemble 1\n"
      << "kind=" << to_string(model.kind()) << '\n'
      << "aggregation=" << to_string(model.aggregation()) << '\n'
      << "learners=" << model.learners().size() << '\n'
      << "features=" << model.num_features() << '\n'
      << "max_depth=" << model.params().max_depth << '\n'
      << "min_leaf=" << model.params().min_leaf << '\n'
      << "seed=" << model.seed() << '\n'
      << "use_smote=" << (model.use_smote() ? 1 : 0) << '\n';
  for (std::size_t t = 0; t < model.learners().size(); ++t) {
    const auto& nodes = model.learners()[t].nodes();
    out << "learner " << t << " weight=" << csv::format_double(model.learner_weights()[t])
        << " nodes=" << nodes.size() << '\n';
    for (const auto& node : nodes) {
      out << node.feature << ',' << csv::format_double(node.threshold) << ',' << node.left << ','
          << node.right << ',' << csv::format_double(node.p1) << '\n';
    }
  }
}

void save_model(const EnsembleModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  save_model(model, out);
  if (!out) throw InvalidInput("failed writing " + path);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(std::string("missing ") + what, line_ + 1);
    ++line_;
    return std::string(csv::chomp(line));
  }

  // "key=value" with the expected key.
  std::string value(const std::string& key) {
    const std::string line = next(key.c_str());
    if (line.rfind(key + "=", 0) != 0) throw ParseError("expected " + key + "=", line_);
    return line.substr(key.size() + 1);
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

EnsembleKind parse_kind(const std::string& s, std::size_t line) {
  for (auto k : {EnsembleKind::kBagging, EnsembleKind::kBoosting, EnsembleKind::kRusBoost}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown ensemble kind '" + s + "'", line);
}

}  // namespace

EnsembleModel load_model(std::istream& in) {
  LineReader r(in);
  if (r.next("header") != "qsep-ensemble 1") throw ParseError("not a qsep-ensemble 1 file", 1);
  const EnsembleKind kind = parse_kind(r.value("kind"), r.line());
  const std::string aggregation = r.value("aggregation");
  const std::string expected = kind == EnsembleKind::kBagging ? "MAJORITY_VOTE" : "WEIGHTED_VOTE";
  if (aggregation != expected) throw ParseError("aggregation does not match kind", r.line());
  const std::uint64_t count = csv::parse_uint(r.value("learners"), r.line());
  const std::uint64_t k = csv::parse_uint(r.value("features"), r.line());
  TreeParams params;
  params.max_depth = static_cast<int>(csv::parse_int(r.value("max_depth"), r.line()));
  params.min_leaf = static_cast<int>(csv::parse_int(r.value("min_leaf"), r.line()));
  const std::uint64_t seed = csv::parse_uint(r.value("seed"), r.line());
  const std::uint64_t smote = csv::parse_uint(r.value("use_smote"), r.line());

  std::vector<DecisionTree> learners;
  std::vector<double> weights;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::string head = r.next("learner header");
    const std::size_t at = r.line();
    const auto parts = csv::split(head, ' ');
    const std::string prefix = "learner " + std::to_string(t);
    if (parts.size() != 4 || head.rfind(prefix + " ", 0) != 0 ||
        parts[2].substr(0, 7) != "weight=" || parts[3].substr(0, 6) != "nodes=") {
      throw ParseError("expected '" + prefix + " weight=<w> nodes=<n>'", at);
    }
    weights.push_back(csv::parse_double(parts[2].substr(7), at));
    const std::uint64_t n_nodes = csv::parse_uint(parts[3].substr(6), at);
    std::vector<DecisionTree::Node> nodes;
    for (std::uint64_t i = 0; i < n_nodes; ++i) {
      const std::string line = r.next("tree node");
      const auto f = csv::split(line);
      if (f.size() != 5) throw ParseError("tree node needs 5 fields", r.line());
      DecisionTree::Node node;
      node.feature = static_cast<int>(csv::parse_int(f[0], r.line()));
      node.threshold = csv::parse_double(f[1], r.line());
      node.left = static_cast<int>(csv::parse_int(f[2], r.line()));
      node.right = static_cast<int>(csv::parse_int(f[3], r.line()));
      node.p1 = csv::parse_double(f[4], r.line());
      nodes.push_back(node);
    }
    try {
      learners.emplace_back(std::move(nodes), static_cast<Eigen::Index>(k), params);
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), at);
    }
  }
  try {
    return EnsembleModel(kind, std::move(learners), std::move(weights), params, seed, smote != 0);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what(), r.line());
  }
}

EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return load_model(in);
}

}  // namespace qsep::learn
