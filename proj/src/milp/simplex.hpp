/*
Copyright 2026 The bspsched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "bspsched/milp/model.hpp"

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace bspsched::milp::detail {

// Bounded dual simplex on a dense tableau [A | I]. One slack per row; the slack basis is
// dual feasible whenever structural costs are nonnegative (or the variable has a finite
// upper bound). Bounds may change between solves; the current basis stays dual feasible,
// which is what branch and bound relies on.
class DualSimplex {
  public:
    enum class Status { Optimal, Infeasible, Cutoff, IterationLimit, DualInfeasible };

    explicit DualSimplex(const MilpModel &model);

    std::size_t numStructural() const { return numVars_; }
    std::size_t numRows() const { return numRows_; }

    void setBounds(std::size_t var, double lower, double upper);
    double lower(std::size_t var) const { return lo_[var]; }
    double upper(std::size_t var) const { return hi_[var]; }

    /// Stops early once the (monotone) dual objective reaches cutoff.
    Status solve(double cutoff, std::uint64_t &iterationsLeft);

    /// Tableau entries read or written so far; a deterministic proxy for running time.
    /// solve() reports IterationLimit once it passes the work limit.
    std::uint64_t work() const { return work_; }
    void setWorkLimit(std::uint64_t limit) { workLimit_ = limit; }

    /// Objective of the current basic solution, without the model's constant.
    double objective() const;
    std::vector<double> structuralValues() const;
    /// Lower bound on the LP optimum under the current bounds that stays valid when the
    /// tableau carries rounding error (-inf if none can be given).
    double lagrangianBound() const;

  private:
    double &at(std::size_t row, std::size_t col) { return tableau_[row * numCols_ + col]; }
    double at(std::size_t row, std::size_t col) const { return tableau_[row * numCols_ + col]; }

    void placeNonbasic();
    void recomputeBasicValues();
    void pivot(std::size_t row, std::size_t col);
    void loadSlackBasis();
    // Rebuilds the tableau for the current basis from the original rows, discarding
    // accumulated rounding error. Falls back to the slack basis if that fails.
    void reinvert();
    bool primalResidualOk() const;
    bool infeasibilityCertified(std::size_t row) const;

    std::size_t numVars_;
    std::size_t numRows_;
    std::size_t numCols_;
    std::vector<double> tableau_;
    std::vector<double> rhs_;     // B^-1 b
    std::vector<double> cost_;
    std::vector<double> reduced_; // reduced costs
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> value_;   // current value of every column
    std::vector<std::size_t> basis_;
    std::vector<std::ptrdiff_t> rowOf_; // -1 for nonbasic columns
    std::vector<std::size_t> pivotNonzeros_;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_; // original structural rows
    std::vector<double> b_;
    std::size_t pivotsSinceInvert_ = 0;
    std::size_t invertInterval_ = 0;
    std::uint64_t work_ = 0;
    std::uint64_t workLimit_ = std::numeric_limits<std::uint64_t>::max();
};

} // namespace bspsched::milp::detail
