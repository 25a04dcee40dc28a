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

#include "bspsched/milp/model.hpp"

#include "simplex.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <vector>

namespace bspsched::milp {

namespace {

constexpr double kIntTol = 1e-6;

struct BoundChange {
    std::size_t var;
    double lower;
    double upper;
};

struct Node {
    std::vector<BoundChange> changes;
    double parentBound;
};

} // namespace

SolveResult BranchAndBoundBackend::solve(const MilpModel &model, const SolveOptions &options) const {
    const auto start = std::chrono::steady_clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    SolveResult result;

    const std::size_t n = model.numVariables();
    double incumbentObj = kInfinity;
    std::vector<double> incumbent;
    if (model.warmStart() && model.isFeasible(*model.warmStart())) {
        incumbent = *model.warmStart();
        incumbentObj = model.evaluateObjective(incumbent);
    }
    const auto finish = [&](bool exhausted) {
        if (!incumbent.empty()) {
            result.status = exhausted ? SolveStatus::Optimal : SolveStatus::Feasible;
            result.values = incumbent;
            result.objective = incumbentObj;
        } else {
            result.status = exhausted ? SolveStatus::Infeasible : SolveStatus::NoSolution;
        }
        result.seconds = elapsed();
        return result;
    };

    const std::size_t rows = model.numConstraints();
    if (n > options.maxVariables || rows * (n + rows) > options.maxTableauEntries) {
        return finish(false);
    }
    for (const auto &v : model.variables()) {
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            return finish(false);
        }
    }

    detail::DualSimplex lp(model);
    lp.setWorkLimit(options.workLimit);
    std::uint64_t iterationsLeft = options.iterationLimit;
    const double constant = model.objectiveConstant();
    const bool integral = model.objectiveIntegral();
    const auto cutoff = [&] {
        if (!std::isfinite(incumbentObj)) {
            return kInfinity;
        }
        // a node is worth exploring only if it can beat the incumbent
        const double slack = 1e-6 * (1.0 + std::abs(incumbentObj));
        return integral ? incumbentObj - constant - 1.0 + slack : incumbentObj - constant - 1e-3 * slack;
    };

    std::vector<Node> stack;
    stack.push_back({{}, -kInfinity});
    bool exhausted = true;
    while (!stack.empty()) {
        if (result.nodes >= options.nodeLimit || elapsed() >= options.timeLimitSeconds || iterationsLeft == 0 ||
            lp.work() >= options.workLimit) {
            exhausted = false;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.parentBound >= cutoff()) {
            continue;
        }
        ++result.nodes;
        for (std::size_t j = 0; j < n; ++j) {
            lp.setBounds(j, model.variable(j).lower, model.variable(j).upper);
        }
        for (const auto &c : node.changes) {
            lp.setBounds(c.var, c.lower, c.upper);
        }
        const std::uint64_t before = iterationsLeft;
        const auto status = lp.solve(cutoff(), iterationsLeft);
        result.iterations += before - iterationsLeft;
        if (status == detail::DualSimplex::Status::IterationLimit) {
            exhausted = false;
            break;
        }
        if (status == detail::DualSimplex::Status::DualInfeasible) {
            exhausted = false;
            break;
        }
        if (status != detail::DualSimplex::Status::Optimal) {
            continue;
        }
        const double bound = std::min(lp.objective(), lp.lagrangianBound());
        auto x = lp.structuralValues();

        std::size_t branchVar = n;
        double bestFrac = kIntTol;
        for (std::size_t j = 0; j < n; ++j) {
            if (model.variable(j).type == VarType::Continuous) {
                continue;
            }
            const double f = x[j] - std::floor(x[j]);
            const double dist = std::min(f, 1.0 - f);
            if (dist > bestFrac + 1e-12) {
                bestFrac = dist;
                branchVar = j;
            }
        }
        if (branchVar == n) {
            for (std::size_t j = 0; j < n; ++j) {
                if (model.variable(j).type != VarType::Continuous) {
                    x[j] = std::round(x[j]);
                }
            }
            if (model.isFeasible(x, 1e-6)) {
                const double obj = model.evaluateObjective(x);
                if (obj < incumbentObj) {
                    incumbentObj = obj;
                    incumbent = std::move(x);
                }
            }
            continue;
        }
        const double value = x[branchVar];
        const double down = std::floor(value);
        const double up = down + 1.0;
        Node downNode{node.changes, bound};
        downNode.changes.push_back({branchVar, lp.lower(branchVar), down});
        Node upNode{std::move(node.changes), bound};
        upNode.changes.push_back({branchVar, up, lp.upper(branchVar)});
        // the nearer child is explored first
        if (value - down >= 0.5) {
            stack.push_back(std::move(downNode));
            stack.push_back(std::move(upNode));
        } else {
            stack.push_back(std::move(upNode));
            stack.push_back(std::move(downNode));
        }
    }
    return finish(exhausted);
}

} // namespace bspsched::milp
