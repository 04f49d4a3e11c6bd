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

// Convex hull approximation of the separable set and the CHA score.
//
// A hull is the convex hull of m random pure product states in feature space.
// The score of a feature vector x is the largest alpha for which alpha * x is
// a convex combination of hull vertices; alpha >= 1 certifies that x itself
// lies in the hull.

#ifndef QSEP_CHACORE_HPP_
#define QSEP_CHACORE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "qsep/simplex.hpp"
#include "qsep/statekit.hpp"

namespace qsep::cha {

using state::BipartiteDims;
using state::FeatureVector;

class HullModel {
 public:
  // `vertices` holds one vertex per column (feature_dim x m).
  HullModel(BipartiteDims dims, Eigen::MatrixXd vertices, std::uint64_t seed);

  const BipartiteDims& dims() const { return dims_; }
  const Eigen::MatrixXd& vertices() const { return vertices_; }
  Eigen::Index size() const { return vertices_.cols(); }
  std::uint64_t seed() const { return seed_; }
  FeatureVector vertex(Eigen::Index i) const;

  // Fewer than d^2 vertices cannot span a full-dimensional hull.
  bool undersized() const { return size() < dims_.total() * dims_.total(); }

  // The first m vertices. Hulls sampled from one seed are nested under prefix().
  HullModel prefix(Eigen::Index m) const;

  // Short identity string recorded in dataset metadata.
  std::string id() const;

 private:
  BipartiteDims dims_;
  Eigen::MatrixXd vertices_;
  std::uint64_t seed_;
};

// m pure product states; vertex i is drawn from substream i of `seed`, so
// sample_hull(dims, m, s) is a prefix of sample_hull(dims, m', s) for m <= m'.
HullModel sample_hull(const BipartiteDims& dims, Eigen::Index m, std::uint64_t seed);

struct ChaOptions {
  double alpha_cap = 100.0;
  double tol = 1e-9;
  // Per-coordinate slack allowed in alpha * x = sum(lambda_i c_i).
  double relaxation = 1e-7;
};

struct ChaScore {
  double alpha = 0.0;
  bool capped = false;
  // False when no alpha >= 0 admits a representation; alpha is then 0.
  bool feasible = true;
  Eigen::VectorXd lambda;  // convex weights of the witness, empty if infeasible
};

// The linear program solved by alpha_max. Variables are
// [alpha, lambda_1..lambda_m, s_1..s_k]; rows are alpha x_j - sum_i lambda_i c_ij + s_j = 0
// with |s_j| <= relaxation, and sum_i lambda_i = 1.
LinearProgram build_alpha_program(const FeatureVector& x, const HullModel& hull,
                                  const ChaOptions& opts = {});

ChaScore alpha_max(const FeatureVector& x, const HullModel& hull, const ChaOptions& opts = {});

// 1 (separable) iff alpha >= 1.
int cha_classify(const ChaScore& score);
int cha_classify(double alpha);

// Hull CSV: "# dims=2x2,m=1000,seed=42", then "f0,...,f{k-1}", then one vertex
// per row.
void save_hull_csv(const HullModel& hull, std::ostream& out);
void save_hull_csv(const HullModel& hull, const std::string& path);
HullModel load_hull_csv(std::istream& in);
HullModel load_hull_csv(const std::string& path);

}  // namespace qsep::cha

#endif  // QSEP_CHACORE_HPP_
