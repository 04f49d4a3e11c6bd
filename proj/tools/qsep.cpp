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

// qsep command-line interface.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsep/chacore.hpp"
#include "qsep/csv_util.hpp"
#include "qsep/datakit.hpp"
#include "qsep/ensemble.hpp"
#include "qsep/experiments.hpp"
#include "qsep/metrics.hpp"

namespace {

using namespace qsep;

struct Flags {
  std::string preset = "desk";
  std::string dims = "2x2";
  std::size_t n = 0;
  double theta = 0.5;
  std::uint64_t seed = 1;
  Eigen::Index m = 0;
  std::string m_grid;
  Eigen::Index reference_m = 0;
  int learners = 0;
  int max_depth = 8;
  int min_leaf = 5;
  double train_frac = 0.5;
  std::string fractions;
  int reps = 0;
  bool use_smote = false;
  double alpha_cap = 100.0;
  std::string classifiers;
  std::string classifier = "RUSBCHA";
  std::string ladder;
  std::string ladder_mode = "scaled";
  bool stratified = false;
  bool literal_specificity = false;
  std::string data;
  std::string hull;
  std::string model;
  std::string model_out;
  std::string out;
};

bool given(const CLI::App* app, const std::string& name) {
  try {
    return app->get_option(name)->count() > 0;
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto part : csv::split(text, ',')) {
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

std::vector<exp::LadderEntry> parse_ladder(const std::string& text) {
  std::vector<exp::LadderEntry> out;
  for (const auto& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("ladder entries look like SEP:ENT, got '" + item + "'");
    try {
      out.push_back({csv::parse_uint(item.substr(0, colon), 0), csv::parse_uint(item.substr(colon + 1), 0)});
    } catch (const ParseError&) {
      throw ConfigError("bad ladder entry '" + item + "'");
    }
  }
  return out;
}

double to_double(const std::string& s) {
  try {
    return csv::parse_double(s, 0);
  } catch (const ParseError&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

Eigen::Index to_index(const std::string& s) {
  try {
    return static_cast<Eigen::Index>(csv::parse_uint(s, 0));
  } catch (const ParseError&) {
    throw ConfigError("not a count: '" + s + "'");
  }
}

// Preset defaults, then every flag given on the command line or in --config.
exp::ExperimentConfig build_config(const CLI::App* app, const Flags& f) {
  exp::ExperimentConfig cfg = exp::preset(f.preset, state::BipartiteDims::parse(f.dims));
  if (given(app, "--n")) cfg.n = f.n;
  if (given(app, "--theta")) cfg.theta = f.theta;
  cfg.seed = f.seed;
  if (given(app, "--m")) cfg.m = f.m;
  if (given(app, "--m-grid")) {
    cfg.m_grid.clear();
    for (const auto& v : split_list(f.m_grid)) cfg.m_grid.push_back(to_index(v));
  }
  if (given(app, "--reference-m")) cfg.reference_m = f.reference_m;
  if (given(app, "--learners")) cfg.learners = f.learners;
  cfg.tree.max_depth = f.max_depth;
  cfg.tree.min_leaf = f.min_leaf;
  cfg.train_fraction = f.train_frac;
  if (given(app, "--fractions")) {
    cfg.fraction_grid.clear();
    for (const auto& v : split_list(f.fractions)) cfg.fraction_grid.push_back(to_double(v));
  }
  if (given(app, "--reps")) cfg.reps = f.reps;
  cfg.use_smote = f.use_smote;
  cfg.alpha_cap = f.alpha_cap;
  if (given(app, "--classifiers")) {
    cfg.classifiers.clear();
    for (const auto& c : split_list(f.classifiers)) cfg.classifiers.push_back(exp::parse_classifier(c));
  }
  if (given(app, "--ladder") && f.ladder != "table") cfg.ladder = parse_ladder(f.ladder);
  if (f.ladder_mode == "exact") {
    cfg.ladder_mode = exp::LadderMode::kExact;
  } else if (f.ladder_mode != "scaled") {
    throw ConfigError("--ladder-mode is scaled or exact");
  }
  cfg.stratified = f.stratified;
  cfg.literal_specificity = f.literal_specificity;
  cfg.data_path = f.data;
  cfg.hull_path = f.hull;
  cfg.validate();
  return cfg;
}

// Runs `write` against --out, or stdout when --out is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write(out);
  if (!out) throw InvalidInput("failed writing " + path);
}

// Replaces "--config FILE" with the flags the file sets. Keys are flag names
// ("reps = 3", "m-grid = \"250,500\"", "use-smote = true"); flags also given
// on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t used = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      used = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      used = 1;
    } else {
      continue;
    }
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::Error& e) {
      throw ConfigError("cannot read config " + path + ": " + e.what());
    }
    auto on_command_line = [&](const std::string& flag) {
      for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
      }
      return false;
    };
    std::vector<std::string> extra;
    for (const auto& item : items) {
      if (!item.parents.empty()) throw ConfigError("config sections are not supported: " + item.fullname());
      std::string name = item.name;
      for (char& ch : name) {
        if (ch == '_') ch = '-';
      }
      const std::string flag = "--" + name;
      if (name == "config" || on_command_line(flag)) continue;
      std::string value;
      for (const auto& in : item.inputs) value += (value.empty() ? "" : ",") + in;
      if (value == "true") {
        extra.push_back(flag);
      } else if (value != "false") {
        extra.push_back(flag + "=" + value);
      }
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + used));
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), extra.begin(), extra.end());
    return args;
  }
  return args;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", "Read flags from a TOML file of flag = value lines");
  sub->add_option("--preset", f.preset, "Defaults: desk or paper")->capture_default_str();
  sub->add_option("--dims", f.dims, "Subsystem dimensions, e.g. 2x2 or 3x3")->capture_default_str();
  sub->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  sub->add_option("--out", f.out, "Output path (stdout if omitted)");
}

void add_data_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "Number of states");
  sub->add_option("--theta", f.theta, "Spectrum parameter in (0, 1)")->capture_default_str();
  sub->add_option("--reference-m", f.reference_m, "Labeling hull size when PPT is not exact");
}

void add_model_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--learners", f.learners, "Ensemble size T");
  sub->add_option("--max-depth", f.max_depth, "Tree depth limit")->capture_default_str();
  sub->add_option("--min-leaf", f.min_leaf, "Minimum rows per leaf")->capture_default_str();
  sub->add_option("--train-frac", f.train_frac, "Training fraction")->capture_default_str();
  sub->add_flag("--use-smote", f.use_smote, "Add SMOTE rows before under-sampling in RUSBoost");
  sub->add_option("--alpha-cap", f.alpha_cap, "Upper bound on alpha")->capture_default_str();
  sub->add_flag("--stratified", f.stratified, "Stratify train/test splits by class");
  sub->add_flag("--literal-specificity", f.literal_specificity, "Report specificity as TN/N");
}

void add_experiment(CLI::App& app, Flags& f, exp::Experiment e, const std::string& help) {
  CLI::App* sub = app.add_subcommand(exp::to_string(e), help);
  add_common(sub, f);
  add_data_flags(sub, f);
  add_model_flags(sub, f);
  sub->add_option("--m", f.m, "Hull size (exp2, exp3)");
  sub->add_option("--m-grid", f.m_grid, "Comma-separated hull sizes (exp1)");
  sub->add_option("--fractions", f.fractions, "Comma-separated training fractions (exp2)");
  sub->add_option("--ladder", f.ladder, "table, or SEP:ENT,SEP:ENT,... (exp3)");
  sub->add_option("--ladder-mode", f.ladder_mode, "scaled or exact")->capture_default_str();
  sub->add_option("--reps", f.reps, "Repetitions");
  sub->add_option("--classifiers", f.classifiers, "Comma-separated classifier names");
  sub->add_option("--data", f.data, "Dataset CSV to use instead of generating one");
  sub->add_option("--hull", f.hull, "Hull CSV to use instead of sampling one");
  sub->callback([sub, &f, e] {
    const exp::ExperimentConfig cfg = build_config(sub, f);
    const exp::ResultTable table = exp::run_experiment(e, cfg);
    emit(f.out, [&](std::ostream& out) { exp::write_results_csv(table, out); });
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separability classification of bipartite quantum states", "qsep"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* gen = app.add_subcommand("gen", "Generate a labeled dataset");
  add_common(gen, f);
  add_data_flags(gen, f);
  gen->callback([gen, &f] {
    const exp::ExperimentConfig cfg = build_config(gen, f);
    const data::LabeledDataset ds = exp::prepare_dataset(cfg);
    emit(f.out, [&](std::ostream& out) { data::save_csv(ds, out); });
  });

  CLI::App* hull = app.add_subcommand("hull", "Sample a product-state hull");
  add_common(hull, f);
  hull->add_option("--m", f.m, "Number of vertices")->required();
  hull->callback([hull, &f] {
    const exp::ExperimentConfig cfg = build_config(hull, f);
    const cha::HullModel h = exp::prepare_hull(cfg, f.m);
    emit(f.out, [&](std::ostream& out) { cha::save_hull_csv(h, out); });
  });

  CLI::App* alpha = app.add_subcommand("alpha", "Attach the CHA score to a dataset");
  add_common(alpha, f);
  alpha->add_option("--data", f.data, "Input dataset CSV")->required();
  alpha->add_option("--hull", f.hull, "Hull CSV (sampled from --m and --seed if omitted)");
  alpha->add_option("--m", f.m, "Hull size");
  alpha->add_option("--alpha-cap", f.alpha_cap, "Upper bound on alpha")->capture_default_str();
  alpha->callback([alpha, &f] {
    const data::LabeledDataset ds = data::load_csv(f.data);
    f.dims = ds.dims().str();
    exp::ExperimentConfig cfg = build_config(alpha, f);
    cfg.data_path.clear();
    const Eigen::Index m = given(alpha, "--m") ? f.m : cfg.m;
    const cha::HullModel h = f.hull.empty() ? exp::prepare_hull(cfg, m) : cha::load_hull_csv(f.hull);
    cha::ChaOptions opts;
    opts.alpha_cap = f.alpha_cap;
    const data::LabeledDataset scored = data::attach_alpha(ds, h, opts);
    emit(f.out, [&](std::ostream& out) { data::save_csv(scored, out); });
  });

  add_experiment(app, f, exp::Experiment::kBaseline, "Bagging and Boosting on raw features");
  add_experiment(app, f, exp::Experiment::kExp1, "CHA, BCHA, RUSBCHA over hull sizes");
  add_experiment(app, f, exp::Experiment::kExp2, "BCHA, RUSBCHA over training fractions");
  add_experiment(app, f, exp::Experiment::kExp3, "BCHA, RUSBCHA over prevalence differences");

  CLI::App* eval = app.add_subcommand("eval", "Train and score one classifier, or score a saved model");
  add_common(eval, f);
  add_model_flags(eval, f);
  eval->add_option("--data", f.data, "Dataset CSV")->required();
  eval->add_option("--classifier", f.classifier, "BAGGING, BOOSTING, CHA, BCHA or RUSBCHA")
      ->capture_default_str();
  eval->add_option("--model", f.model, "Saved model; scores it on the whole dataset");
  eval->add_option("--model-out", f.model_out, "Save the trained model here");
  eval->callback([eval, &f] {
    const data::LabeledDataset ds = data::load_csv(f.data);
    f.dims = ds.dims().str();
    std::vector<std::pair<std::string, std::string>> header{{"data", f.data}};
    metrics::MetricsReport report;
    const auto mode = f.literal_specificity ? metrics::SpecificityMode::kLiteralTnOverN
                                            : metrics::SpecificityMode::kStandard;
    if (!f.model.empty()) {
      const learn::EnsembleModel model = learn::load_model(f.model);
      const Eigen::MatrixXd x =
          model.num_features() == ds.features().cols() ? ds.features() : ds.design_matrix();
      report = metrics::compute_metrics(
          metrics::confusion(learn::ensemble_predict_rows(model, x), ds.labels()), mode);
      header.emplace_back("model", f.model);
    } else {
      exp::ExperimentConfig cfg = build_config(eval, f);
      cfg.data_path.clear();
      const exp::Classifier c = exp::parse_classifier(f.classifier);
      Rng split_rng(derive_seed(f.seed, {0}));
      const auto [train, test] = data::split_train_test(ds, cfg.train_fraction, split_rng, cfg.stratified);
      exp::Scored scored = exp::train_and_score(c, train, test, cfg, derive_seed(f.seed, {1}));
      report = scored.report;
      if (!f.model_out.empty() && scored.model) learn::save_model(*scored.model, f.model_out);
      for (auto& kv : cfg.describe()) {
        if (kv.first == "learners" || kv.first == "max_depth" || kv.first == "min_leaf" ||
            kv.first == "train_fraction" || kv.first == "seed" || kv.first == "use_smote") {
          header.push_back(std::move(kv));
        }
      }
      header.emplace_back("classifier", exp::to_string(c));
    }
    emit(f.out, [&](std::ostream& out) {
      for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
      out << metrics::csv_header() << '\n' << metrics::to_csv_row(report) << '\n';
    });
  });

  try {
    std::vector<std::string> args = expand_config({argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const qsep::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
