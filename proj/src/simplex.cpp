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

#include "qsep/simplex.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace qsep::cha {

void LinearProgram::validate() const {
  const Eigen::Index n = objective.size();
  if (constraints.cols() != n) throw InvalidInput("constraint matrix column count != variable count");
  if (constraints.rows() != rhs.size()) throw InvalidInput("constraint row count != rhs length");
  if (lower.size() != n || upper.size() != n) throw InvalidInput("bound vectors have wrong length");
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lower(j))) throw InvalidInput("lower bounds must be finite");
    if (upper(j) < lower(j)) throw InvalidInput("upper bound below lower bound");
  }
}

namespace {

enum class VarState { kBasic, kAtLower, kAtUpper };

constexpr double kPivotTol = 1e-11;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateRunBeforeBland = 25;

// Working state over the structural variables followed by one artificial
// variable per row.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, double tol)
      : lp_(lp),
        tol_(tol),
        rows_(lp.num_rows()),
        structural_(lp.num_vars()),
        total_(structural_ + rows_),
        lower_(total_),
        upper_(total_),
        value_(total_),
        state_(static_cast<std::size_t>(total_), VarState::kAtLower),
        art_sign_(rows_),
        head_(static_cast<std::size_t>(rows_)),
        binv_(rows_, rows_) {
    lower_.head(structural_) = lp.lower;
    upper_.head(structural_) = lp.upper;
    value_.head(structural_) = lp.lower;
    const Eigen::VectorXd residual = lp.rhs - lp.constraints * lp.lower;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      const Eigen::Index a = structural_ + i;
      art_sign_(i) = residual(i) >= 0.0 ? 1.0 : -1.0;
      lower_(a) = 0.0;
      upper_(a) = kInf;
      value_(a) = std::abs(residual(i));
      state_[static_cast<std::size_t>(a)] = VarState::kBasic;
      head_[static_cast<std::size_t>(i)] = a;
    }
    binv_ = art_sign_.asDiagonal();
  }

  LpSolution run() {
    LpSolution out;
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total_);
    phase1.tail(rows_).setConstant(-1.0);
    iterate(phase1);
    refactor();
    const double infeasibility = value_.tail(rows_).sum();
    out.iterations = iterations_;
    if (infeasibility > tol_) return out;

    upper_.tail(rows_).setZero();
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(total_);
    phase2.head(structural_) = lp_.objective;
    iterate(phase2);
    refactor();

    out.status = LpStatus::kOptimal;
    out.x = value_.head(structural_);
    for (Eigen::Index j = 0; j < structural_; ++j) {
      out.x(j) = std::min(std::max(out.x(j), lower_(j)), upper_(j));
    }
    out.value = lp_.objective.dot(out.x);
    out.iterations = iterations_;
    return out;
  }

 private:
  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < structural_) return lp_.constraints.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(rows_);
    e(j - structural_) = art_sign_(j - structural_);
    return e;
  }

  // Rebuilds the basis inverse and basic values from scratch.
  void refactor() {
    Eigen::MatrixXd basis(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) basis.col(i) = column(head_[static_cast<std::size_t>(i)]);
    binv_ = basis.fullPivLu().inverse();
    Eigen::VectorXd rhs = lp_.rhs;
    for (Eigen::Index j = 0; j < total_; ++j) {
      if (state_[static_cast<std::size_t>(j)] != VarState::kBasic && value_(j) != 0.0) {
        rhs -= column(j) * value_(j);
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < rows_; ++i) value_(head_[static_cast<std::size_t>(i)]) = xb(i);
  }

  void iterate(const Eigen::VectorXd& cost) {
    const long max_iterations = 200 * (rows_ + 10) + 20 * total_;
    int degenerate_run = 0;
    int since_refactor = 0;
    for (;;) {
      if (++iterations_ > max_iterations) throw Error("simplex iteration limit exceeded");
      if (since_refactor++ >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;

      Eigen::VectorXd cost_basic(rows_);
      for (Eigen::Index i = 0; i < rows_; ++i) cost_basic(i) = cost(head_[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd y = binv_.transpose() * cost_basic;
      Eigen::VectorXd reduced(total_);
      reduced.head(structural_) = cost.head(structural_) - lp_.constraints.transpose() * y;
      reduced.tail(rows_) = cost.tail(rows_) - art_sign_.cwiseProduct(y);

      Eigen::Index entering = -1;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total_; ++j) {
        const VarState s = state_[static_cast<std::size_t>(j)];
        if (s == VarState::kBasic || upper_(j) <= lower_(j)) continue;
        double gain = 0.0;
        if (s == VarState::kAtLower && reduced(j) > tol_) gain = reduced(j);
        if (s == VarState::kAtUpper && reduced(j) < -tol_) gain = -reduced(j);
        if (gain <= 0.0) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (gain > best) {
          best = gain;
          entering = j;
        }
      }
      if (entering < 0) return;

      const double dir = state_[static_cast<std::size_t>(entering)] == VarState::kAtLower ? 1.0 : -1.0;
      const Eigen::VectorXd w = binv_ * column(entering);

      // Ratio test. Basic value i moves at rate -dir * w(i) per unit step.
      double step = upper_(entering) - lower_(entering);
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (std::abs(w(i)) <= kPivotTol) continue;
        const Eigen::Index b = head_[static_cast<std::size_t>(i)];
        const double rate = -dir * w(i);
        double limit;
        bool to_upper;
        if (rate < 0.0) {
          limit = (value_(b) - lower_(b)) / -rate;
          to_upper = false;
        } else {
          if (!std::isfinite(upper_(b))) continue;
          limit = (upper_(b) - value_(b)) / rate;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = limit < step - 1e-12;
        if (!take && leave_row >= 0 && limit <= step + 1e-12) {
          // Tie: Bland keeps the smallest variable index; otherwise prefer the
          // larger pivot for stability.
          take = bland ? b < head_[static_cast<std::size_t>(leave_row)]
                       : std::abs(w(i)) > std::abs(leave_pivot);
        }
        if (take) {
          step = std::min(step, limit);
          leave_row = i;
          leave_to_upper = to_upper;
          leave_pivot = w(i);
        }
      }
      if (!std::isfinite(step)) throw UnboundedError("linear program is unbounded");

      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

      for (Eigen::Index i = 0; i < rows_; ++i) {
        value_(head_[static_cast<std::size_t>(i)]) -= dir * step * w(i);
      }
      value_(entering) += dir * step;

      if (leave_row < 0) {
        // Bound flip of the entering variable.
        const bool to_upper = dir > 0.0;
        state_[static_cast<std::size_t>(entering)] = to_upper ? VarState::kAtUpper : VarState::kAtLower;
        value_(entering) = to_upper ? upper_(entering) : lower_(entering);
        continue;
      }

      const Eigen::Index leaving = head_[static_cast<std::size_t>(leave_row)];
      state_[static_cast<std::size_t>(leaving)] = leave_to_upper ? VarState::kAtUpper : VarState::kAtLower;
      value_(leaving) = leave_to_upper ? upper_(leaving) : lower_(leaving);
      state_[static_cast<std::size_t>(entering)] = VarState::kBasic;
      head_[static_cast<std::size_t>(leave_row)] = entering;

      const double pivot = w(leave_row);
      binv_.row(leave_row) /= pivot;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (i != leave_row && w(i) != 0.0) binv_.row(i) -= w(i) * binv_.row(leave_row);
      }
    }
  }

  const LinearProgram& lp_;
  double tol_;
  Eigen::Index rows_;
  Eigen::Index structural_;
  Eigen::Index total_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd value_;
  std::vector<VarState> state_;
  Eigen::VectorXd art_sign_;
  std::vector<Eigen::Index> head_;
  Eigen::MatrixXd binv_;
  int iterations_ = 0;
};

}  // namespace

LpSolution lp_maximize(const LinearProgram& lp, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  lp.validate();
  if (lp.num_rows() == 0) {
    // No constraints: each variable sits at its best bound.
    LpSolution out;
    out.status = LpStatus::kOptimal;
    out.x = lp.lower;
    for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
      if (lp.objective(j) > 0.0) {
        if (!std::isfinite(lp.upper(j))) throw UnboundedError("linear program is unbounded");
        out.x(j) = lp.upper(j);
      }
    }
    out.value = lp.objective.dot(out.x);
    return out;
  }
  Simplex solver(lp, tol);
  return solver.run();
}

}  // namespace qsep::cha
