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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bspsched::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Integer, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
    std::string name;
    VarType type = VarType::Continuous;
    double lower = 0.0;
    double upper = kInfinity;
    double objective = 0.0;
};

struct Term {
    std::size_t var;
    double coef;
};

struct Constraint {
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// Minimization model with linear constraints over continuous, integer and binary variables.
class MilpModel {
  public:
    std::size_t addVariable(std::string name, VarType type, double lower, double upper, double objective = 0.0);
    std::size_t addBinary(std::string name, double objective = 0.0) {
        return addVariable(std::move(name), VarType::Binary, 0.0, 1.0, objective);
    }
    std::size_t addContinuous(std::string name, double lower = 0.0, double upper = kInfinity, double objective = 0.0) {
        return addVariable(std::move(name), VarType::Continuous, lower, upper, objective);
    }

    /// Terms on the same variable are merged and zero coefficients dropped.
    void addConstraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

    void fix(std::size_t var, double value);
    void setBounds(std::size_t var, double lower, double upper);
    void setObjective(std::size_t var, double coef) { vars_[var].objective = coef; }
    void setObjectiveConstant(double c) { objectiveConstant_ = c; }
    double objectiveConstant() const { return objectiveConstant_; }

    /// Declares that every integer-feasible point has an integral objective value, so
    /// bounds may be rounded up when pruning.
    void setObjectiveIntegral(bool integral) { objectiveIntegral_ = integral; }
    bool objectiveIntegral() const { return objectiveIntegral_; }

    void setWarmStart(std::vector<double> values) { warmStart_ = std::move(values); }
    const std::optional<std::vector<double>> &warmStart() const { return warmStart_; }

    std::size_t numVariables() const { return vars_.size(); }
    std::size_t numConstraints() const { return cons_.size(); }
    const std::vector<Variable> &variables() const { return vars_; }
    const Variable &variable(std::size_t i) const { return vars_[i]; }
    const std::vector<Constraint> &constraints() const { return cons_; }
    std::size_t numIntegerVariables() const;

    double evaluateObjective(const std::vector<double> &values) const;

    /// Bounds, integrality and all constraints within an absolute tolerance.
    bool isFeasible(const std::vector<double> &values, double tolerance = 1e-6, std::string *why = nullptr) const;

    /// CPLEX LP text format.
    std::string toLpFormat() const;
    /// JSON document read by external solver backends.
    std::string toJson() const;

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    double objectiveConstant_ = 0.0;
    bool objectiveIntegral_ = false;
    std::optional<std::vector<double>> warmStart_;
};

enum class SolveStatus { Optimal, Feasible, NoSolution, Infeasible };

const char *statusName(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::NoSolution;
    std::vector<double> values;
    double objective = kInfinity;
    double seconds = 0.0;
    std::uint64_t nodes = 0;
    std::uint64_t iterations = 0;

    bool hasSolution() const { return status == SolveStatus::Optimal || status == SolveStatus::Feasible; }
};

struct SolveOptions {
    double timeLimitSeconds = kInfinity;
    std::uint64_t nodeLimit = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t iterationLimit = std::numeric_limits<std::uint64_t>::max();
    /// Built-in backend only: tableau entries touched by the simplex, summed over the
    /// search. Unlike iterations it tracks running time across model sizes.
    std::uint64_t workLimit = std::numeric_limits<std::uint64_t>::max();
    /// The built-in backend declines larger models and returns the warm start.
    std::size_t maxVariables = 2500;
    std::size_t maxTableauEntries = 8'000'000;
};

class MilpBackend {
  public:
    virtual ~MilpBackend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const MilpModel &model, const SolveOptions &options) const = 0;
};

/// Depth-first branch and bound over a bounded dual simplex. Exact when it terminates
/// within its limits.
class BranchAndBoundBackend : public MilpBackend {
  public:
    std::string name() const override { return "builtin"; }
    SolveResult solve(const MilpModel &model, const SolveOptions &options) const override;
};

/// Runs `command <model.json> <solution.txt>`. The solution file holds a first line
/// "status optimal|feasible|infeasible|none" followed by "name value" lines.
class ExternalCommandBackend : public MilpBackend {
  public:
    explicit ExternalCommandBackend(std::string command) : command_(std::move(command)) {}
    std::string name() const override { return "external"; }
    SolveResult solve(const MilpModel &model, const SolveOptions &options) const override;

  private:
    std::string command_;
};

/// Solves with the given backend (built-in when null). A feasible warm start bounds the
/// result: the returned incumbent never has a larger objective. Incumbents that fail an
/// independent feasibility check are discarded.
SolveResult solveModel(const MilpModel &model, const SolveOptions &options, const MilpBackend *backend = nullptr);

} // namespace bspsched::milp
