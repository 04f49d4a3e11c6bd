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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

#include "qsep/csv_util.hpp"
#include "qsep/ensemble.hpp"

namespace qsep::exp {

namespace {

// Keys of derive_seed() for the independent random streams of a run.
constexpr std::uint64_t kDataStream = 100;
constexpr std::uint64_t kHullStream = 101;
constexpr std::uint64_t kReferenceStream = 102;

constexpr Classifier kAllClassifiers[] = {Classifier::kBagging, Classifier::kBoosting,
                                          Classifier::kCha, Classifier::kBcha,
                                          Classifier::kRusbcha};

bool uses_alpha(Classifier c) { return c == Classifier::kCha || c == Classifier::kBcha || c == Classifier::kRusbcha; }

std::vector<Classifier> resolve_classifiers(Experiment e, const ExperimentConfig& cfg) {
  if (!cfg.classifiers.empty()) {
    for (Classifier c : cfg.classifiers) {
      if ((e == Experiment::kBaseline) == uses_alpha(c)) {
        throw ConfigError(to_string(c) + " is not allowed in " + to_string(e));
      }
    }
    return cfg.classifiers;
  }
  switch (e) {
    case Experiment::kBaseline:
      return {Classifier::kBagging, Classifier::kBoosting};
    case Experiment::kExp1:
      return {Classifier::kCha, Classifier::kBcha, Classifier::kRusbcha};
    default:
      return {Classifier::kBcha, Classifier::kRusbcha};
  }
}

template <typename T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ';';
    out += fmt(item);
  }
  return out;
}

std::string format_ladder(const std::vector<LadderEntry>& ladder) {
  return join<LadderEntry>(ladder, [](const LadderEntry& e) {
    return std::to_string(e.n_separable) + ":" + std::to_string(e.n_entangled);
  });
}

class Evaluator {
 public:
  explicit Evaluator(const ExperimentConfig& cfg) : cfg_(cfg) {}

  metrics::MetricsReport operator()(Classifier c, const data::LabeledDataset& train,
                                    const data::LabeledDataset& test, std::uint64_t seed) const {
    return train_and_score(c, train, test, cfg_, seed).report;
  }

 private:
  const ExperimentConfig& cfg_;
};

// reports[rep][point][classifier], flattened into rows plus one mean row per
// (classifier, point).
using Grid = std::vector<std::vector<std::vector<metrics::MetricsReport>>>;

ResultTable assemble(Experiment e, const std::vector<Classifier>& classifiers,
                     const std::vector<std::string>& params, const Grid& grid,
                     std::vector<std::pair<std::string, std::string>> header) {
  ResultTable table;
  table.header = std::move(header);
  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      std::vector<metrics::MetricsReport> reps;
      for (std::size_t r = 0; r < grid.size(); ++r) {
        reps.push_back(grid[r][p][c]);
        table.rows.push_back({e, classifiers[c], params[p], static_cast<int>(r), grid[r][p][c]});
      }
      table.rows.push_back({e, classifiers[c], params[p], std::nullopt, metrics::mean_report(reps)});
    }
  }
  return table;
}

Grid make_grid(int reps, std::size_t points, std::size_t classifiers) {
  return Grid(static_cast<std::size_t>(reps),
              std::vector<std::vector<metrics::MetricsReport>>(
                  points, std::vector<metrics::MetricsReport>(classifiers)));
}

std::uint64_t rep_seed(const ExperimentConfig& cfg, Experiment e, int rep) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(rep)});
}

std::uint64_t model_seed(std::uint64_t rep_seed, std::size_t point, Classifier c) {
  return derive_seed(rep_seed, {point, static_cast<std::uint64_t>(c)});
}

std::vector<std::pair<std::string, std::string>> base_header(Experiment e,
                                                             const ExperimentConfig& cfg,
                                                             const std::vector<Classifier>& cls,
                                                             const data::LabeledDataset& ds) {
  std::vector<std::pair<std::string, std::string>> h{{"experiment", to_string(e)}};
  for (auto& kv : cfg.describe()) {
    if (kv.first == "classifiers") continue;
    h.push_back(std::move(kv));
  }
  h.emplace_back("classifiers",
                 join<Classifier>(cls, [](const Classifier& c) { return to_string(c); }));
  h.emplace_back("dataset_labeler", ds.metadata().labeler);
  h.emplace_back("dataset_separable", std::to_string(ds.count(1)));
  h.emplace_back("dataset_entangled", std::to_string(ds.count(0)));
  return h;
}

cha::ChaOptions cha_options(const ExperimentConfig& cfg) {
  cha::ChaOptions o;
  o.alpha_cap = cfg.alpha_cap;
  return o;
}

data::LabeledDataset with_alpha(const data::LabeledDataset& ds, const cha::HullModel& hull,
                                const ExperimentConfig& cfg) {
  return data::attach_alpha(ds, hull, cha_options(cfg));
}

}  // namespace

std::string to_string(Classifier c) {
  switch (c) {
    case Classifier::kBagging:
      return "BAGGING";
    case Classifier::kBoosting:
      return "BOOSTING";
    case Classifier::kCha:
      return "CHA";
    case Classifier::kBcha:
      return "BCHA";
    case Classifier::kRusbcha:
      return "RUSBCHA";
  }
  return "?";
}

Classifier parse_classifier(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (Classifier c : kAllClassifiers) {
    if (to_string(c) == upper) return c;
  }
  throw ConfigError("unknown classifier '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kBaseline:
      return "baseline";
    case Experiment::kExp1:
      return "exp1";
    case Experiment::kExp2:
      return "exp2";
    case Experiment::kExp3:
      return "exp3";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (learners < 1) throw ConfigError("learners must be >= 1");
  if (tree.max_depth < 0 || tree.min_leaf < 1) throw ConfigError("bad tree parameters");
  if (m < 1 || reference_m < 1) throw ConfigError("hull sizes must be >= 1");
  if (m_grid.empty()) throw ConfigError("m grid is empty");
  for (Eigen::Index v : m_grid) {
    if (v < 1) throw ConfigError("every m must be >= 1");
  }
  if (!std::is_sorted(m_grid.begin(), m_grid.end())) throw ConfigError("m grid must be ascending");
  auto check_fraction = [](double f) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("fractions must lie in (0, 1)");
  };
  check_fraction(train_fraction);
  if (fraction_grid.empty()) throw ConfigError("fraction grid is empty");
  for (double f : fraction_grid) check_fraction(f);
  if (!(alpha_cap > 1.0)) throw ConfigError("alpha cap must exceed 1");
  for (const auto& e : ladder) {
    if (e.n_separable == 0 || e.n_entangled == 0) throw ConfigError("ladder counts must be >= 1");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::describe() const {
  using csv::format_double;
  return {
      {"dims", dims.str()},
      {"n", std::to_string(n)},
      {"theta", format_double(theta)},
      {"seed", std::to_string(seed)},
      {"classifiers", join<Classifier>(classifiers, [](const Classifier& c) { return to_string(c); })},
      {"m_grid", join<Eigen::Index>(m_grid, [](const Eigen::Index& v) { return std::to_string(v); })},
      {"m", std::to_string(m)},
      {"reference_m", std::to_string(reference_m)},
      {"train_fraction", format_double(train_fraction)},
      {"fraction_grid", join<double>(fraction_grid, [](const double& v) { return format_double(v); })},
      {"ladder", ladder.empty() ? "table" : format_ladder(ladder)},
      {"ladder_mode", ladder_mode == LadderMode::kScaled ? "scaled" : "exact"},
      {"reps", std::to_string(reps)},
      {"learners", std::to_string(learners)},
      {"max_depth", std::to_string(tree.max_depth)},
      {"min_leaf", std::to_string(tree.min_leaf)},
      {"use_smote", use_smote ? "1" : "0"},
      {"alpha_cap", format_double(alpha_cap)},
      {"stratified", stratified ? "1" : "0"},
      {"specificity", literal_specificity ? "tn_over_n" : "tn_over_tn_plus_fp"},
      {"data", data_path},
      {"hull", hull_path},
  };
}

ExperimentConfig preset(const std::string& name, const BipartiteDims& dims) {
  const bool qubits = dims.total() <= 4;
  ExperimentConfig cfg;
  cfg.dims = dims;
  if (name == "desk") {
    cfg.n = 8000;
    cfg.m_grid = qubits ? std::vector<Eigen::Index>{250, 500, 1000, 2000}
                        : std::vector<Eigen::Index>{500, 1000, 2000};
    cfg.m = qubits ? 1000 : 2000;
    cfg.reference_m = 2000;
    cfg.reps = 10;
    cfg.learners = 50;
  } else if (name == "paper") {
    cfg.n = qubits ? 40000 : 20000;
    cfg.m_grid.clear();
    for (int i = 1; i <= 10; ++i) cfg.m_grid.push_back(qubits ? 1000 * i : 10000 * i);
    cfg.m = qubits ? 2000 : 20000;
    cfg.reference_m = 100000;
    cfg.reps = 30;
    cfg.learners = 100;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
  }
  return cfg;
}

std::vector<LadderEntry> table_ladder(const BipartiteDims& dims) {
  if (dims.total() <= 4) {
    return {{1800, 37186}, {2814, 33000}, {2814, 18000}, {2814, 14000}, {2814, 10000},
            {2814, 8000},  {2814, 5500},  {2814, 4500},  {2814, 3500},  {2814, 3000}};
  }
  return {{600, 13249},  {1380, 13249}, {2200, 13249}, {3200, 13249}, {4200, 13249},
          {5500, 13249}, {6751, 13000}, {6751, 10500}, {6751, 8500},  {6751, 7000}};
}

std::vector<LadderEntry> scale_ladder(const std::vector<LadderEntry>& ladder,
                                      std::size_t available_separable,
                                      std::size_t available_entangled) {
  std::vector<LadderEntry> out;
  for (const LadderEntry& e : ladder) {
    const bool ent_major = e.n_entangled >= e.n_separable;
    const double p = metrics::prevalence_difference(e.n_separable, e.n_entangled);
    const std::size_t major_avail = ent_major ? available_entangled : available_separable;
    const std::size_t minor_avail = ent_major ? available_separable : available_entangled;
    std::size_t major = major_avail;
    auto minor = static_cast<std::size_t>(std::llround(static_cast<double>(major) * (1 - p) / (1 + p)));
    if (minor > minor_avail) {
      minor = minor_avail;
      major = std::min(major_avail, static_cast<std::size_t>(
                                        std::llround(static_cast<double>(minor) * (1 + p) / (1 - p))));
    }
    out.push_back(ent_major ? LadderEntry{minor, major} : LadderEntry{major, minor});
  }
  return out;
}

Scored train_and_score(Classifier c, const data::LabeledDataset& train,
                       const data::LabeledDataset& test, const ExperimentConfig& cfg,
                       std::uint64_t seed) {
  if (uses_alpha(c) && (!train.has_alpha() || !test.has_alpha())) {
    throw InvalidInput(to_string(c) + " needs the alpha feature");
  }
  Scored out;
  std::vector<int> pred;
  Rng rng(seed);
  switch (c) {
    case Classifier::kCha:
      pred.resize(test.size());
      for (std::size_t i = 0; i < test.size(); ++i) {
        pred[i] = cha::cha_classify(test.alpha()(static_cast<Eigen::Index>(i)));
      }
      break;
    case Classifier::kBagging:
      out.model = learn::train_bagging(learn::TrainingSet::uniform(train.features(), train.labels()),
                                       cfg.learners, cfg.tree, rng);
      pred = learn::ensemble_predict_rows(*out.model, test.features());
      break;
    case Classifier::kBoosting:
      out.model = learn::train_adaboost(learn::TrainingSet::uniform(train.features(), train.labels()),
                                        cfg.learners, cfg.tree, rng);
      pred = learn::ensemble_predict_rows(*out.model, test.features());
      break;
    case Classifier::kBcha:
      out.model = learn::train_bagging(train.training_set(), cfg.learners, cfg.tree, rng);
      pred = learn::ensemble_predict_rows(*out.model, test.design_matrix());
      break;
    case Classifier::kRusbcha:
      out.model = learn::train_rusboost(train.training_set(), cfg.learners, cfg.tree, rng,
                                        {.use_smote = cfg.use_smote});
      pred = learn::ensemble_predict_rows(*out.model, test.design_matrix());
      break;
  }
  out.report = metrics::compute_metrics(metrics::confusion(pred, test.labels()),
                                        cfg.literal_specificity
                                            ? metrics::SpecificityMode::kLiteralTnOverN
                                            : metrics::SpecificityMode::kStandard);
  return out;
}

const metrics::MetricsReport& ResultTable::mean(Classifier c, const std::string& param) const {
  for (const auto& row : rows) {
    if (!row.rep && row.classifier == c && row.param == param) return row.report;
  }
  throw InvalidInput("no mean row for " + to_string(c) + " at " + param);
}

std::vector<std::string> ResultTable::params() const {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    if (std::find(out.begin(), out.end(), row.param) == out.end()) out.push_back(row.param);
  }
  return out;
}

data::LabeledDataset prepare_dataset(const ExperimentConfig& cfg) {
  if (!cfg.data_path.empty()) {
    const data::LabeledDataset loaded = data::load_csv(cfg.data_path);
    if (!(loaded.dims() == cfg.dims)) {
      throw ConfigError("dataset dims " + loaded.dims().str() + " differ from --dims " + cfg.dims.str());
    }
    data::DatasetMetadata meta = loaded.metadata();
    meta.hull.clear();
    return data::LabeledDataset(loaded.dims(), loaded.features(), std::nullopt, loaded.labels(),
                                std::move(meta));
  }
  state::Labeler labeler = state::PptExact{};
  if (cfg.dims.total() > 6) {
    labeler = state::ChaApprox{
        std::make_shared<const cha::HullModel>(cha::sample_hull(
            cfg.dims, cfg.reference_m, derive_seed(cfg.seed, {kReferenceStream}))),
        cha_options(cfg)};
  }
  Rng rng(derive_seed(cfg.seed, {kDataStream}));
  return data::generate_dataset(cfg.n, cfg.dims, cfg.theta, labeler, rng);
}

cha::HullModel prepare_hull(const ExperimentConfig& cfg, Eigen::Index m) {
  if (!cfg.hull_path.empty()) {
    const cha::HullModel hull = cha::load_hull_csv(cfg.hull_path);
    if (!(hull.dims() == cfg.dims)) throw ConfigError("hull dims differ from --dims");
    if (hull.size() < m) {
      throw ConfigError("hull file has " + std::to_string(hull.size()) + " vertices, need " +
                        std::to_string(m));
    }
    return hull.prefix(m);
  }
  return cha::sample_hull(cfg.dims, m, derive_seed(cfg.seed, {kHullStream}));
}

ResultTable run_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  const Experiment e = Experiment::kBaseline;
  const auto classifiers = resolve_classifiers(e, cfg);
  const data::LabeledDataset ds = prepare_dataset(cfg);
  const Evaluator eval(cfg);
  Grid grid = make_grid(cfg.reps, 1, classifiers.size());
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    const std::uint64_t seed = rep_seed(cfg, e, static_cast<int>(r));
    Rng split_rng(seed);
    const auto [train, test] = data::split_train_test(ds, cfg.train_fraction, split_rng, cfg.stratified);
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
      grid[r][0][c] = eval(classifiers[c], train, test, model_seed(seed, 0, classifiers[c]));
    }
  });
  return assemble(e, classifiers, {csv::format_double(cfg.train_fraction)}, grid,
                  base_header(e, cfg, classifiers, ds));
}

ResultTable run_experiment1(const ExperimentConfig& cfg) {
  cfg.validate();
  const Experiment e = Experiment::kExp1;
  const auto classifiers = resolve_classifiers(e, cfg);
  const data::LabeledDataset ds = prepare_dataset(cfg);
  const cha::HullModel largest = prepare_hull(cfg, cfg.m_grid.back());
  std::vector<data::LabeledDataset> scored;
  std::vector<std::string> params;
  for (Eigen::Index m : cfg.m_grid) {
    scored.push_back(with_alpha(ds, largest.prefix(m), cfg));
    params.push_back(std::to_string(m));
  }
  auto header = base_header(e, cfg, classifiers, ds);
  header.emplace_back("hull_id", largest.id());

  const Evaluator eval(cfg);
  Grid grid = make_grid(cfg.reps, params.size(), classifiers.size());
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    const std::uint64_t seed = rep_seed(cfg, e, static_cast<int>(r));
    Rng split_rng(seed);
    // One split per repetition, shared by every m.
    const data::SplitIndices split =
        data::split_indices(ds.labels(), cfg.train_fraction, split_rng, cfg.stratified);
    for (std::size_t p = 0; p < scored.size(); ++p) {
      const auto train = scored[p].subset(split.train);
      const auto test = scored[p].subset(split.test);
      for (std::size_t c = 0; c < classifiers.size(); ++c) {
        grid[r][p][c] = eval(classifiers[c], train, test, model_seed(seed, p, classifiers[c]));
      }
    }
  });
  return assemble(e, classifiers, params, grid, std::move(header));
}

ResultTable run_experiment2(const ExperimentConfig& cfg) {
  cfg.validate();
  const Experiment e = Experiment::kExp2;
  const auto classifiers = resolve_classifiers(e, cfg);
  const data::LabeledDataset ds = prepare_dataset(cfg);
  const cha::HullModel hull = prepare_hull(cfg, cfg.m);
  const data::LabeledDataset scored = with_alpha(ds, hull, cfg);
  std::vector<std::string> params;
  for (double f : cfg.fraction_grid) params.push_back(csv::format_double(f));
  auto header = base_header(e, cfg, classifiers, ds);
  header.emplace_back("hull_id", hull.id());

  const Evaluator eval(cfg);
  Grid grid = make_grid(cfg.reps, params.size(), classifiers.size());
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    const std::uint64_t seed = rep_seed(cfg, e, static_cast<int>(r));
    for (std::size_t p = 0; p < cfg.fraction_grid.size(); ++p) {
      // Same stream for every fraction, so unstratified training sets are nested.
      Rng split_rng(seed);
      const auto [train, test] =
          data::split_train_test(scored, cfg.fraction_grid[p], split_rng, cfg.stratified);
      for (std::size_t c = 0; c < classifiers.size(); ++c) {
        grid[r][p][c] = eval(classifiers[c], train, test, model_seed(seed, p, classifiers[c]));
      }
    }
  });
  return assemble(e, classifiers, params, grid, std::move(header));
}

ResultTable run_experiment3(const ExperimentConfig& cfg) {
  cfg.validate();
  const Experiment e = Experiment::kExp3;
  const auto classifiers = resolve_classifiers(e, cfg);
  const data::LabeledDataset ds = prepare_dataset(cfg);
  std::vector<LadderEntry> ladder = cfg.ladder.empty() ? table_ladder(cfg.dims) : cfg.ladder;
  if (cfg.ladder_mode == LadderMode::kScaled) ladder = scale_ladder(ladder, ds.count(1), ds.count(0));
  for (const auto& entry : ladder) {
    if (entry.n_separable > ds.count(1) || entry.n_entangled > ds.count(0)) {
      throw ConfigError("ladder entry " + std::to_string(entry.n_separable) + ":" +
                        std::to_string(entry.n_entangled) + " exceeds the dataset's " +
                        std::to_string(ds.count(1)) + ":" + std::to_string(ds.count(0)));
    }
  }
  const cha::HullModel hull = prepare_hull(cfg, cfg.m);
  const data::LabeledDataset scored = with_alpha(ds, hull, cfg);
  std::vector<std::string> params;
  for (const auto& entry : ladder) {
    params.push_back(csv::format_double(metrics::prevalence_difference(entry.n_separable, entry.n_entangled)));
  }
  auto header = base_header(e, cfg, classifiers, ds);
  header.emplace_back("hull_id", hull.id());
  header.emplace_back("resolved_ladder", format_ladder(ladder));

  const Evaluator eval(cfg);
  Grid grid = make_grid(cfg.reps, params.size(), classifiers.size());
  parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t r) {
    const std::uint64_t seed = rep_seed(cfg, e, static_cast<int>(r));
    for (std::size_t p = 0; p < ladder.size(); ++p) {
      Rng carve_rng(derive_seed(seed, {p, 0}));
      const data::LabeledDataset subset = data::carve_prevalence_subset(
          scored, ladder[p].n_separable, ladder[p].n_entangled, carve_rng);
      Rng split_rng(derive_seed(seed, {p, 1}));
      const auto [train, test] =
          data::split_train_test(subset, cfg.train_fraction, split_rng, cfg.stratified);
      for (std::size_t c = 0; c < classifiers.size(); ++c) {
        grid[r][p][c] = eval(classifiers[c], train, test, model_seed(seed, p, classifiers[c]));
      }
    }
  });
  return assemble(e, classifiers, params, grid, std::move(header));
}

ResultTable run_experiment(Experiment e, const ExperimentConfig& cfg) {
  switch (e) {
    case Experiment::kBaseline:
      return run_baseline(cfg);
    case Experiment::kExp1:
      return run_experiment1(cfg);
    case Experiment::kExp2:
      return run_experiment2(cfg);
    case Experiment::kExp3:
      return run_experiment3(cfg);
  }
  throw ConfigError("unknown experiment");
}

void write_results_csv(const ResultTable& table, std::ostream& out) {
  for (const auto& [key, value] : table.header) out << "# " << key << '=' << value << '\n';
  out << "experiment,classifier,param,rep," << metrics::csv_header() << '\n';
  for (const auto& row : table.rows) {
    out << to_string(row.experiment) << ',' << to_string(row.classifier) << ',' << row.param << ','
        << (row.rep ? std::to_string(*row.rep) : std::string("mean")) << ','
        << metrics::to_csv_row(row.report) << '\n';
  }
}

void write_results_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write_results_csv(table, out);
  if (!out) throw InvalidInput("failed writing " + path);
}

}  // namespace qsep::exp
