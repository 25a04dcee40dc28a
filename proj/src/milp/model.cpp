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

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bspsched::milp {

std::size_t MilpModel::addVariable(std::string name, VarType type, double lower, double upper, double objective) {
    if (lower > upper) {
        throw std::invalid_argument("variable " + name + " has an empty domain");
    }
    if (type == VarType::Binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
    }
    vars_.push_back({std::move(name), type, lower, upper, objective});
    return vars_.size() - 1;
}

void MilpModel::addConstraint(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    std::sort(terms.begin(), terms.end(), [](const Term &a, const Term &b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto &t : terms) {
        if (t.var >= vars_.size()) {
            throw std::invalid_argument("constraint references unknown variable");
        }
        if (!merged.empty() && merged.back().var == t.var) {
            merged.back().coef += t.coef;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term &t) { return t.coef == 0.0; });
    cons_.push_back({std::move(merged), sense, rhs, std::move(name)});
}

void MilpModel::fix(std::size_t var, double value) { setBounds(var, value, value); }

void MilpModel::setBounds(std::size_t var, double lower, double upper) {
    if (lower > upper) {
        throw std::invalid_argument("variable " + vars_[var].name + " has an empty domain");
    }
    vars_[var].lower = lower;
    vars_[var].upper = upper;
}

std::size_t MilpModel::numIntegerVariables() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable &v) { return v.type != VarType::Continuous; }));
}

double MilpModel::evaluateObjective(const std::vector<double> &values) const {
    double obj = objectiveConstant_;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        obj += vars_[i].objective * values[i];
    }
    return obj;
}

bool MilpModel::isFeasible(const std::vector<double> &values, double tolerance, std::string *why) const {
    const auto fail = [&](const std::string &msg) {
        if (why != nullptr) {
            *why = msg;
        }
        return false;
    };
    if (values.size() != vars_.size()) {
        return fail("value vector has the wrong length");
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto &v = vars_[i];
        const double x = values[i];
        if (!std::isfinite(x) || x < v.lower - tolerance || x > v.upper + tolerance) {
            return fail("variable " + v.name + " out of bounds");
        }
        if (v.type != VarType::Continuous && std::abs(x - std::round(x)) > tolerance) {
            return fail("variable " + v.name + " is fractional");
        }
    }
    for (const auto &c : cons_) {
        double lhs = 0.0;
        double scale = 1.0;
        for (const auto &t : c.terms) {
            lhs += t.coef * values[t.var];
            scale = std::max(scale, std::abs(t.coef * values[t.var]));
        }
        const double tol = tolerance * scale;
        const bool ok = c.sense == Sense::LessEqual      ? lhs <= c.rhs + tol
                        : c.sense == Sense::GreaterEqual ? lhs >= c.rhs - tol
                                                         : std::abs(lhs - c.rhs) <= tol;
        if (!ok) {
            return fail("constraint " + (c.name.empty() ? std::string("(unnamed)") : c.name) + " violated");
        }
    }
    return true;
}

namespace {

std::string lpName(const Variable &v, std::size_t i) { return v.name.empty() ? "x" + std::to_string(i) : v.name; }

void writeLinear(std::ostringstream &out, const std::vector<Term> &terms, const std::vector<Variable> &vars) {
    bool first = true;
    for (const auto &t : terms) {
        if (!first || t.coef < 0) {
            out << (t.coef < 0 ? " - " : " + ");
        }
        out << std::abs(t.coef) << ' ' << lpName(vars[t.var], t.var);
        first = false;
    }
    if (first) {
        out << " 0";
    }
}

} // namespace

std::string MilpModel::toLpFormat() const {
    std::ostringstream out;
    out.precision(17);
    out << "Minimize\n obj:";
    std::vector<Term> obj;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].objective != 0.0) {
            obj.push_back({i, vars_[i].objective});
        }
    }
    writeLinear(out, obj, vars_);
    if (objectiveConstant_ != 0.0) {
        out << (objectiveConstant_ < 0 ? " - " : " + ") << std::abs(objectiveConstant_);
    }
    out << "\nSubject To\n";
    for (std::size_t k = 0; k < cons_.size(); ++k) {
        const auto &c = cons_[k];
        out << ' ' << (c.name.empty() ? "c" + std::to_string(k) : c.name) << ':';
        writeLinear(out, c.terms, vars_);
        out << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ") << c.rhs
            << '\n';
    }
    out << "Bounds\n";
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto &v = vars_[i];
        if (v.type == VarType::Binary) {
            continue;
        }
        out << ' ';
        if (v.lower == -kInfinity) {
            out << "-inf";
        } else {
            out << v.lower;
        }
        out << " <= " << lpName(v, i) << " <= ";
        if (v.upper == kInfinity) {
            out << "+inf";
        } else {
            out << v.upper;
        }
        out << '\n';
    }
    std::ostringstream general;
    std::ostringstream binary;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].type == VarType::Integer) {
            general << ' ' << lpName(vars_[i], i) << '\n';
        } else if (vars_[i].type == VarType::Binary) {
            binary << ' ' << lpName(vars_[i], i) << '\n';
        }
    }
    if (!general.str().empty()) {
        out << "General\n" << general.str();
    }
    if (!binary.str().empty()) {
        out << "Binary\n" << binary.str();
    }
    out << "End\n";
    return out.str();
}

std::string MilpModel::toJson() const {
    nlohmann::json j;
    auto &vars = j["variables"] = nlohmann::json::array();
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto &v = vars_[i];
        nlohmann::json var;
        var["name"] = lpName(v, i);
        var["type"] = v.type == VarType::Binary ? "binary" : v.type == VarType::Integer ? "integer" : "continuous";
        var["lower"] = std::isfinite(v.lower) ? nlohmann::json(v.lower) : nlohmann::json(nullptr);
        var["upper"] = std::isfinite(v.upper) ? nlohmann::json(v.upper) : nlohmann::json(nullptr);
        var["objective"] = v.objective;
        vars.push_back(std::move(var));
    }
    auto &cons = j["constraints"] = nlohmann::json::array();
    for (const auto &c : cons_) {
        nlohmann::json con;
        auto &terms = con["terms"] = nlohmann::json::array();
        for (const auto &t : c.terms) {
            terms.push_back({t.var, t.coef});
        }
        con["sense"] = c.sense == Sense::LessEqual ? "<=" : c.sense == Sense::GreaterEqual ? ">=" : "=";
        con["rhs"] = c.rhs;
        cons.push_back(std::move(con));
    }
    j["objective_constant"] = objectiveConstant_;
    if (warmStart_) {
        j["warm_start"] = *warmStart_;
    }
    return j.dump();
}

const char *statusName(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Feasible:
        return "feasible";
    case SolveStatus::NoSolution:
        return "no-solution";
    case SolveStatus::Infeasible:
        return "infeasible";
    }
    return "unknown";
}

SolveResult solveModel(const MilpModel &model, const SolveOptions &options, const MilpBackend *backend) {
    const auto start = std::chrono::steady_clock::now();
    const BranchAndBoundBackend builtin;
    const MilpBackend &chosen = backend != nullptr ? *backend : builtin;

    std::optional<std::vector<double>> warm;
    double warmObjective = kInfinity;
    if (model.warmStart() && model.isFeasible(*model.warmStart())) {
        warm = model.warmStart();
        warmObjective = model.evaluateObjective(*warm);
    }

    SolveResult result = chosen.solve(model, options);
    if (result.hasSolution()) {
        std::string why;
        if (!model.isFeasible(result.values, 1e-5, &why)) {
            result.status = SolveStatus::NoSolution;
            result.values.clear();
            result.objective = kInfinity;
        } else {
            result.objective = model.evaluateObjective(result.values);
        }
    }
    if (warm && (!result.hasSolution() || result.objective > warmObjective)) {
        // a claim of infeasibility contradicts the warm start; trust the warm start
        result.status = SolveStatus::Feasible;
        result.values = *warm;
        result.objective = warmObjective;
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace bspsched::milp
