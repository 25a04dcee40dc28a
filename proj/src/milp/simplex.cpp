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

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bspsched::milp::detail {

namespace {

constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-7;
constexpr double kZero = 1e-12;

} // namespace

DualSimplex::DualSimplex(const MilpModel &model)
    : numVars_(model.numVariables()), numRows_(model.numConstraints()), numCols_(numVars_ + numRows_),
      tableau_(numRows_ * numCols_, 0.0), rhs_(numRows_, 0.0), cost_(numCols_, 0.0), reduced_(numCols_, 0.0),
      lo_(numCols_, 0.0), hi_(numCols_, 0.0), value_(numCols_, 0.0), basis_(numRows_), rowOf_(numCols_, -1),
      rows_(numRows_), b_(numRows_, 0.0), invertInterval_(std::max<std::size_t>(64, numRows_ / 2)) {
    for (std::size_t j = 0; j < numVars_; ++j) {
        const auto &v = model.variable(j);
        cost_[j] = v.objective;
        lo_[j] = v.lower;
        hi_[j] = v.upper;
        if (!std::isfinite(lo_[j]) && !std::isfinite(hi_[j])) {
            throw std::invalid_argument("free variables are not supported by the built-in solver");
        }
    }
    for (std::size_t i = 0; i < numRows_; ++i) {
        const auto &c = model.constraints()[i];
        for (const auto &t : c.terms) {
            rows_[i].emplace_back(t.var, t.coef);
        }
        b_[i] = c.rhs;
        const std::size_t slack = numVars_ + i;
        // row: a x + s = b
        switch (c.sense) {
        case Sense::LessEqual:
            lo_[slack] = 0.0;
            hi_[slack] = kInfinity;
            break;
        case Sense::GreaterEqual:
            lo_[slack] = -kInfinity;
            hi_[slack] = 0.0;
            break;
        case Sense::Equal:
            lo_[slack] = 0.0;
            hi_[slack] = 0.0;
            break;
        }
    }
    loadSlackBasis();
    placeNonbasic();
    recomputeBasicValues();
}

void DualSimplex::loadSlackBasis() {
    work_ += tableau_.size();
    std::fill(tableau_.begin(), tableau_.end(), 0.0);
    std::fill(rowOf_.begin(), rowOf_.end(), -1);
    for (std::size_t i = 0; i < numRows_; ++i) {
        for (const auto &[j, a] : rows_[i]) {
            at(i, j) = a;
        }
        at(i, numVars_ + i) = 1.0;
        rhs_[i] = b_[i];
        basis_[i] = numVars_ + i;
        rowOf_[numVars_ + i] = static_cast<std::ptrdiff_t>(i);
    }
    reduced_ = cost_;
    pivotsSinceInvert_ = 0;
}

void DualSimplex::reinvert() {
    std::vector<std::size_t> structural;
    std::vector<bool> keepSlack(numRows_, false);
    for (std::size_t i = 0; i < numRows_; ++i) {
        if (basis_[i] < numVars_) {
            structural.push_back(basis_[i]);
        } else {
            keepSlack[basis_[i] - numVars_] = true;
        }
    }
    loadSlackBasis();
    for (std::size_t j : structural) {
        std::size_t row = numRows_;
        double best = 1e-7;
        for (std::size_t i = 0; i < numRows_; ++i) {
            const std::size_t b = basis_[i];
            if (b >= numVars_ && !keepSlack[b - numVars_] && std::abs(at(i, j)) > best) {
                best = std::abs(at(i, j));
                row = i;
            }
        }
        if (row == numRows_) {
            loadSlackBasis();
            break;
        }
        pivot(row, j);
    }
    pivotsSinceInvert_ = 0;
    // Boxed columns follow their reduced cost; a one-sided column on the wrong side means
    // the rebuilt basis is not dual feasible, and the slack basis always is.
    for (std::size_t j = 0; j < numCols_; ++j) {
        if (rowOf_[j] >= 0 || lo_[j] == hi_[j]) {
            continue;
        }
        if ((reduced_[j] > kDualTol && !std::isfinite(lo_[j])) || (reduced_[j] < -kDualTol && !std::isfinite(hi_[j]))) {
            if (std::abs(reduced_[j]) < 1e-7) {
                reduced_[j] = 0.0;
            } else {
                loadSlackBasis();
                break;
            }
        }
    }
    placeNonbasic();
    recomputeBasicValues();
}

bool DualSimplex::primalResidualOk() const {
    for (std::size_t i = 0; i < numRows_; ++i) {
        double lhs = value_[numVars_ + i];
        double scale = 1.0 + std::abs(b_[i]);
        for (const auto &[j, a] : rows_[i]) {
            lhs += a * value_[j];
            scale += std::abs(a * value_[j]);
        }
        if (std::abs(lhs - b_[i]) > 1e-7 * scale) {
            return false;
        }
    }
    return true;
}

void DualSimplex::setBounds(std::size_t var, double lower, double upper) {
    lo_[var] = lower;
    hi_[var] = upper;
}

// Nonbasic columns sit at the bound their reduced cost asks for.
void DualSimplex::placeNonbasic() {
    for (std::size_t j = 0; j < numCols_; ++j) {
        if (rowOf_[j] >= 0) {
            continue;
        }
        if (reduced_[j] > kDualTol) {
            value_[j] = std::isfinite(lo_[j]) ? lo_[j] : hi_[j];
        } else if (reduced_[j] < -kDualTol) {
            value_[j] = std::isfinite(hi_[j]) ? hi_[j] : lo_[j];
        } else {
            value_[j] = std::isfinite(lo_[j]) ? lo_[j] : hi_[j];
        }
    }
}

void DualSimplex::recomputeBasicValues() {
    std::vector<double> xb = rhs_;
    for (std::size_t j = 0; j < numCols_; ++j) {
        if (rowOf_[j] >= 0 || value_[j] == 0.0) {
            continue;
        }
        const double x = value_[j];
        for (std::size_t i = 0; i < numRows_; ++i) {
            const double a = at(i, j);
            if (a != 0.0) {
                xb[i] -= a * x;
            }
        }
    }
    for (std::size_t i = 0; i < numRows_; ++i) {
        value_[basis_[i]] = xb[i];
    }
}

void DualSimplex::pivot(std::size_t row, std::size_t col) {
    const double inv = 1.0 / at(row, col);
    work_ += 2 * numCols_ + numRows_;
    pivotNonzeros_.clear();
    double *prow = &tableau_[row * numCols_];
    for (std::size_t k = 0; k < numCols_; ++k) {
        if (prow[k] != 0.0) {
            prow[k] *= inv;
            if (std::abs(prow[k]) < kZero) {
                prow[k] = 0.0;
            } else {
                pivotNonzeros_.push_back(k);
            }
        }
    }
    prow[col] = 1.0;
    rhs_[row] *= inv;
    for (std::size_t i = 0; i < numRows_; ++i) {
        if (i == row) {
            continue;
        }
        double *r = &tableau_[i * numCols_];
        const double factor = r[col];
        if (factor == 0.0) {
            continue;
        }
        work_ += pivotNonzeros_.size();
        for (std::size_t k : pivotNonzeros_) {
            double &x = r[k];
            x -= factor * prow[k];
            if (std::abs(x) < kZero) {
                x = 0.0;
            }
        }
        r[col] = 0.0;
        rhs_[i] -= factor * rhs_[row];
    }
    const double theta = reduced_[col];
    if (theta != 0.0) {
        for (std::size_t k : pivotNonzeros_) {
            reduced_[k] -= theta * prow[k];
        }
        reduced_[col] = 0.0;
    }
    const std::size_t leaving = basis_[row];
    rowOf_[leaving] = -1;
    basis_[row] = col;
    rowOf_[col] = static_cast<std::ptrdiff_t>(row);
}

double DualSimplex::objective() const {
    double obj = 0.0;
    for (std::size_t j = 0; j < numVars_; ++j) {
        obj += cost_[j] * value_[j];
    }
    return obj;
}

std::vector<double> DualSimplex::structuralValues() const {
    return std::vector<double>(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(numVars_));
}

double DualSimplex::lagrangianBound() const {
    // min c x over the bounds, with the rows priced out by y = -(slack reduced costs).
    // Valid for any y, so drift in the tableau can only weaken it.
    std::vector<double> d(cost_.begin(), cost_.begin() + static_cast<std::ptrdiff_t>(numVars_));
    double bound = 0.0;
    const auto addTerm = [&](double coef, double lo, double hi) {
        if (std::abs(coef) <= kDualTol) {
            return;
        }
        const double x = coef > 0 ? lo : hi;
        bound = std::isfinite(x) ? bound + coef * x : -kInfinity;
    };
    for (std::size_t i = 0; i < numRows_; ++i) {
        const double y = -reduced_[numVars_ + i];
        if (y == 0.0) {
            continue;
        }
        bound += y * b_[i];
        for (const auto &[j, a] : rows_[i]) {
            d[j] -= y * a;
        }
        addTerm(-y, lo_[numVars_ + i], hi_[numVars_ + i]);
    }
    for (std::size_t j = 0; j < numVars_; ++j) {
        addTerm(d[j], lo_[j], hi_[j]);
    }
    return bound;
}

bool DualSimplex::infeasibilityCertified(std::size_t row) const {
    // Row `row` of B^-1 combines the constraints into one that the bounds cannot meet.
    const double *inv = &tableau_[row * numCols_ + numVars_];
    std::vector<double> coef(numCols_, 0.0);
    double rhs = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < numRows_; ++i) {
        if (inv[i] == 0.0) {
            continue;
        }
        rhs += inv[i] * b_[i];
        scale += std::abs(inv[i] * b_[i]);
        for (const auto &[j, a] : rows_[i]) {
            coef[j] += inv[i] * a;
        }
        coef[numVars_ + i] += inv[i];
    }
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t j = 0; j < numCols_; ++j) {
        const double c = coef[j];
        if (std::abs(c) <= 1e-11) {
            continue;
        }
        lo += c > 0 ? c * lo_[j] : c * hi_[j];
        hi += c > 0 ? c * hi_[j] : c * lo_[j];
    }
    return rhs < lo - 1e-6 * scale || rhs > hi + 1e-6 * scale;
}

DualSimplex::Status DualSimplex::solve(double cutoff, std::uint64_t &iterationsLeft) {
    const auto dualInfeasible = [&] {
        for (std::size_t j = 0; j < numCols_; ++j) {
            if (rowOf_[j] < 0 && lo_[j] != hi_[j] && std::abs(reduced_[j]) > kDualTol &&
                !std::isfinite(reduced_[j] > 0 ? lo_[j] : hi_[j])) {
                return true;
            }
        }
        return false;
    };
    if (dualInfeasible()) {
        reinvert();
        if (dualInfeasible()) {
            return Status::DualInfeasible;
        }
    }
    placeNonbasic();
    recomputeBasicValues();
    std::uint64_t sinceRefresh = 0;
    double lastObjective = -kInfinity;
    bool trustCutoff = true;
    for (;;) {
        const double obj = objective();
        if (obj < lastObjective - 1e-6 * (1.0 + std::abs(obj)) && pivotsSinceInvert_ > 0) {
            // the dual objective never decreases in exact arithmetic
            reinvert();
            lastObjective = -kInfinity;
            continue;
        }
        lastObjective = obj;
        if (trustCutoff && obj >= cutoff) {
            if (lagrangianBound() >= cutoff) {
                return Status::Cutoff;
            }
            if (pivotsSinceInvert_ > 0) {
                reinvert();
                lastObjective = -kInfinity;
                continue;
            }
            trustCutoff = false;
        }
        // leaving row: largest bound violation
        std::size_t row = numRows_;
        double worst = kPrimalTol;
        bool below = false;
        for (std::size_t i = 0; i < numRows_; ++i) {
            const std::size_t b = basis_[i];
            const double x = value_[b];
            const double scale = 1.0 + std::abs(x) * 1e-9;
            if (x < lo_[b] - kPrimalTol * scale && lo_[b] - x > worst) {
                worst = lo_[b] - x;
                row = i;
                below = true;
            } else if (x > hi_[b] + kPrimalTol * scale && x - hi_[b] > worst) {
                worst = x - hi_[b];
                row = i;
                below = false;
            }
        }
        if (row == numRows_) {
            if (pivotsSinceInvert_ > 0 && !primalResidualOk()) {
                reinvert();
                lastObjective = -kInfinity;
                continue;
            }
            return Status::Optimal;
        }
        if (iterationsLeft == 0 || work_ >= workLimit_) {
            return Status::IterationLimit;
        }
        --iterationsLeft;

        // Harris ratio test over columns that move the leaving variable toward its bound
        const double *prow = &tableau_[row * numCols_];
        const auto eligible = [&](std::size_t j) {
            if (rowOf_[j] >= 0 || lo_[j] == hi_[j]) {
                return false;
            }
            const double a = prow[j];
            if (std::abs(a) < kPivotTol) {
                return false;
            }
            const bool atLower = value_[j] <= lo_[j] || !std::isfinite(hi_[j]) ||
                                 (std::isfinite(lo_[j]) && std::abs(value_[j] - lo_[j]) <= std::abs(value_[j] - hi_[j]));
            // x_b moves by -a * dx_j
            return below ? (atLower ? a < 0 : a > 0) : (atLower ? a > 0 : a < 0);
        };
        double bound = kInfinity;
        for (std::size_t j = 0; j < numCols_; ++j) {
            if (eligible(j)) {
                bound = std::min(bound, (std::abs(reduced_[j]) + kDualTol) / std::abs(prow[j]));
            }
        }
        if (bound == kInfinity) {
            if (infeasibilityCertified(row) || pivotsSinceInvert_ == 0) {
                return Status::Infeasible;
            }
            reinvert();
            lastObjective = -kInfinity;
            continue;
        }
        std::size_t col = numCols_;
        double bestAlpha = 0.0;
        for (std::size_t j = 0; j < numCols_; ++j) {
            if (eligible(j) && std::abs(reduced_[j]) / std::abs(prow[j]) <= bound &&
                std::abs(prow[j]) > bestAlpha) {
                bestAlpha = std::abs(prow[j]);
                col = j;
            }
        }

        const std::size_t leaving = basis_[row];
        const double target = below ? lo_[leaving] : hi_[leaving];
        const double alpha = prow[col];
        const double step = (value_[leaving] - target) / alpha;
        for (std::size_t i = 0; i < numRows_; ++i) {
            const double a = at(i, col);
            if (a != 0.0) {
                value_[basis_[i]] -= a * step;
            }
        }
        const double entering = value_[col] + step;
        pivot(row, col);
        ++pivotsSinceInvert_;
        value_[col] = entering;
        value_[leaving] = target;
        // Harris steps may leave tiny reduced costs on the wrong side; flatten them
        for (std::size_t j = 0; j < numCols_; ++j) {
            if (rowOf_[j] >= 0 || lo_[j] == hi_[j]) {
                continue;
            }
            const bool atLower = std::abs(value_[j] - lo_[j]) <= std::abs(value_[j] - hi_[j]);
            if (atLower && reduced_[j] < 0 && reduced_[j] > -1e-7) {
                reduced_[j] = 0.0;
            } else if (!atLower && reduced_[j] > 0 && reduced_[j] < 1e-7) {
                reduced_[j] = 0.0;
            }
        }
        if (pivotsSinceInvert_ >= invertInterval_) {
            reinvert();
            sinceRefresh = 0;
            lastObjective = -kInfinity;
        } else if (++sinceRefresh >= 50) {
            sinceRefresh = 0;
            recomputeBasicValues();
        }
    }
}

} // namespace bspsched::milp::detail
