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

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qsep/csv_util.hpp"

namespace qsep::cha {

HullModel::HullModel(BipartiteDims dims, Eigen::MatrixXd vertices, std::uint64_t seed)
    : dims_(dims), vertices_(std::move(vertices)), seed_(seed) {
  if (vertices_.rows() != dims_.feature_dim()) {
    throw InvalidDimension("hull vertices must have length " + std::to_string(dims_.feature_dim()));
  }
  if (vertices_.cols() < 1) throw InvalidParameter("hull needs at least one vertex");
}

FeatureVector HullModel::vertex(Eigen::Index i) const { return {dims_, vertices_.col(i)}; }

HullModel HullModel::prefix(Eigen::Index m) const {
  if (m < 1 || m > size()) throw InvalidParameter("prefix size out of range");
  return HullModel(dims_, vertices_.leftCols(m), seed_);
}

std::string HullModel::id() const {
  return "hull:" + dims_.str() + ":m=" + std::to_string(size()) + ":seed=" + std::to_string(seed_);
}

HullModel sample_hull(const BipartiteDims& dims, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw InvalidParameter("hull size must be >= 1");
  Eigen::MatrixXd vertices(dims.feature_dim(), m);
  const Rng root(seed);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    Rng rng = root.substream(i);
    vertices.col(static_cast<Eigen::Index>(i)) =
        state::to_feature(state::random_pure_product(dims, rng)).coords;
  });
  return HullModel(dims, std::move(vertices), seed);
}

LinearProgram build_alpha_program(const FeatureVector& x, const HullModel& hull,
                                  const ChaOptions& opts) {
  if (!(x.dims == hull.dims())) throw InvalidInput("feature vector and hull dims differ");
  const Eigen::Index k = hull.dims().feature_dim();
  if (x.coords.size() != k) throw InvalidDimension("feature vector has wrong length");
  if (!(opts.alpha_cap > 1.0)) throw InvalidParameter("alpha cap must exceed 1");
  const Eigen::Index m = hull.size();
  const Eigen::Index n = 1 + m + k;

  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.objective(0) = 1.0;
  lp.constraints = Eigen::MatrixXd::Zero(k + 1, n);
  lp.constraints.block(0, 0, k, 1) = x.coords;
  lp.constraints.block(0, 1, k, m) = -hull.vertices();
  lp.constraints.block(0, 1 + m, k, k) = Eigen::MatrixXd::Identity(k, k);
  lp.constraints.block(k, 1, 1, m).setOnes();
  lp.rhs = Eigen::VectorXd::Zero(k + 1);
  lp.rhs(k) = 1.0;
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  lp.upper(0) = opts.alpha_cap;
  lp.lower.tail(k).setConstant(-opts.relaxation);
  lp.upper.tail(k).setConstant(opts.relaxation);
  return lp;
}

ChaScore alpha_max(const FeatureVector& x, const HullModel& hull, const ChaOptions& opts) {
  const LinearProgram lp = build_alpha_program(x, hull, opts);
  ChaScore score;
  // The maximally mixed state is separable and every alpha keeps it there.
  if (x.coords.isZero(0.0)) {
    score.alpha = opts.alpha_cap;
    score.capped = true;
    return score;
  }
  const LpSolution sol = lp_maximize(lp, opts.tol);
  if (sol.status == LpStatus::kInfeasible) {
    score.feasible = false;
    return score;
  }
  score.alpha = std::min(std::max(sol.x(0), 0.0), opts.alpha_cap);
  score.capped = score.alpha >= opts.alpha_cap - opts.tol;
  score.lambda = sol.x.segment(1, hull.size());
  return score;
}

int cha_classify(double alpha) { return alpha >= 1.0 ? 1 : 0; }

int cha_classify(const ChaScore& score) { return cha_classify(score.alpha); }

void save_hull_csv(const HullModel& hull, std::ostream& out) {
  out << "# dims=" << hull.dims().str() << ",m=" << hull.size() << ",seed=" << hull.seed() << "\n";
  const Eigen::Index k = hull.vertices().rows();
  for (Eigen::Index j = 0; j < k; ++j) out << (j ? "," : "") << "f" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < hull.size(); ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out << (j ? "," : "") << csv::format_double(hull.vertices()(j, i));
    }
    out << "\n";
  }
}

void save_hull_csv(const HullModel& hull, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  save_hull_csv(hull, out);
}

HullModel load_hull_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ParseError("expected '# dims=...,m=...,seed=...' header", lineno);
  }
  const auto meta = csv::parse_key_values(csv::chomp(line).substr(2), ',', lineno);
  if (!meta.count("dims") || !meta.count("m") || !meta.count("seed")) {
    throw ParseError("hull header must record dims, m and seed", lineno);
  }
  const BipartiteDims dims = BipartiteDims::parse(meta.at("dims"));
  const auto m = static_cast<Eigen::Index>(csv::parse_uint(meta.at("m"), lineno));
  const std::uint64_t seed = csv::parse_uint(meta.at("seed"), lineno);
  const Eigen::Index k = dims.feature_dim();

  ++lineno;
  if (!std::getline(in, line) ||
      csv::split(csv::chomp(line)).size() != static_cast<std::size_t>(k)) {
    throw ParseError("expected " + std::to_string(k) + " column names", lineno);
  }
  Eigen::MatrixXd vertices(k, m);
  Eigen::Index count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = csv::chomp(line);
    if (row.empty()) continue;
    const auto fields = csv::split(row);
    if (fields.size() != static_cast<std::size_t>(k)) {
      throw ParseError("expected " + std::to_string(k) + " columns, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    if (count >= m) throw ParseError("more vertices than the header's m", lineno);
    for (Eigen::Index j = 0; j < k; ++j) {
      vertices(j, count) = csv::parse_double(fields[static_cast<std::size_t>(j)], lineno);
    }
    ++count;
  }
  if (count != m) throw ParseError("header promises " + std::to_string(m) + " vertices", lineno);
  return HullModel(dims, std::move(vertices), seed);
}

HullModel load_hull_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return load_hull_csv(in);
}

}  // namespace qsep::cha
