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

#ifndef QSEP_SIMPLEX_HPP_
#define QSEP_SIMPLEX_HPP_

#include <Eigen/Dense>
#include <limits>

#include "qsep/common.hpp"

namespace qsep::cha {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// maximize objective.x  s.t.  constraints * x = rhs,  lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return constraints.rows(); }

  // Throws InvalidInput on inconsistent shapes or bounds.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd x;  // basic feasible solution when optimal
  int iterations = 0;
};

class UnboundedError : public Error {
 public:
  using Error::Error;
};

// Two-phase bounded-variable revised simplex. Pricing is Dantzig's rule,
// switching to Bland's rule after a run of degenerate pivots so the method
// cannot cycle. The explicit basis inverse is refactorized periodically.
// Returns kInfeasible rather than throwing; throws UnboundedError when the
// objective is unbounded above.
LpSolution lp_maximize(const LinearProgram& lp, double tol = 1e-9);

}  // namespace qsep::cha

#endif  // QSEP_SIMPLEX_HPP_
