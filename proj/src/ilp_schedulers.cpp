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

#include "bspsched/ilp_schedulers.hpp"

#include "bspsched/cost.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace bspsched {

namespace {

using milp::MilpModel;
using milp::Sense;
using milp::Term;

// A value computed outside the scope that scope nodes consume. Sends of it may be placed
// in phases [zFirst, zLast] to processors where it is not yet available.
struct External {
    NodeId node;
    unsigned home;
    std::vector<bool> available;
    std::vector<bool> required;
};

// Sub-problem: the nodes are placed into supersteps [first, last]; communication is
// optimized over phases [commFirst, last].
struct Scope {
    std::vector<NodeId> nodes;
    unsigned first = 0;
    unsigned last = 0;
    unsigned commFirst = 0;
    unsigned zFirst = 0;
    unsigned zLast = 0;
    bool sendInLastPhase = false;
    std::vector<std::vector<bool>> needAfter; // [i][q]: value of nodes[i] must reach q by the end
    std::vector<External> externals;
    std::vector<std::vector<Weight>> workConst; // [s - first][p]
    std::vector<std::vector<Weight>> sendConst; // [s - commFirst][p], scaled
    std::vector<std::vector<Weight>> recConst;  // [s - commFirst][p], scaled
    std::vector<bool> usedFixed;                // [s - commFirst]
    bool symmetry = false;

    unsigned numSteps() const { return last - first + 1; }
    unsigned numPhases() const { return last - commFirst + 1; }
};

Scope emptyScope(unsigned P, std::vector<NodeId> nodes, unsigned first, unsigned last, unsigned commFirst) {
    Scope scope;
    scope.nodes = std::move(nodes);
    scope.first = first;
    scope.last = last;
    scope.commFirst = commFirst;
    scope.zFirst = commFirst;
    scope.zLast = last;
    scope.needAfter.assign(scope.nodes.size(), std::vector<bool>(P, false));
    scope.workConst.assign(scope.numSteps(), std::vector<Weight>(P, 0));
    scope.sendConst.assign(scope.numPhases(), std::vector<Weight>(P, 0));
    scope.recConst.assign(scope.numPhases(), std::vector<Weight>(P, 0));
    scope.usedFixed.assign(scope.numPhases(), false);
    return scope;
}

struct ScopeModel {
    MilpModel model;
    std::vector<std::size_t> x; // [(i * P + p) * K + (s - first)]
    std::map<std::tuple<std::size_t, unsigned, unsigned, unsigned>, std::size_t> y; // (i, p, q, s)
    std::map<std::tuple<std::size_t, unsigned, unsigned>, std::size_t> z;           // (e, q, s)
    std::vector<std::size_t> work;                                                  // [s - first]
    std::vector<std::size_t> comm;                                                  // [s - commFirst]
    std::vector<std::size_t> used;                                                  // [s - commFirst]
    unsigned P = 0;
    unsigned K = 0;

    std::size_t xIndex(std::size_t i, unsigned p, unsigned s, unsigned first) const {
        return x[(i * P + p) * K + (s - first)];
    }
};

std::string varName(const char *prefix, std::initializer_list<std::size_t> parts) {
    std::string s = prefix;
    for (auto part : parts) {
        s += '_';
        s += std::to_string(part);
    }
    return s;
}

ScopeModel buildScopeModel(const ComputationalDag &dag, const MachineParams &machine, const Scope &scope) {
    const unsigned P = machine.numProcessors();
    const unsigned K = scope.numSteps();
    const unsigned R = scope.numPhases();
    const Weight D = machine.denominator();
    ScopeModel sm;
    sm.P = P;
    sm.K = K;
    MilpModel &m = sm.model;

    std::vector<std::int64_t> pos(dag.numNodes(), -1);
    std::vector<std::int64_t> extPos(dag.numNodes(), -1);
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        pos[scope.nodes[i]] = static_cast<std::int64_t>(i);
    }
    for (std::size_t e = 0; e < scope.externals.size(); ++e) {
        extPos[scope.externals[e].node] = static_cast<std::int64_t>(e);
    }

    sm.x.resize(scope.nodes.size() * P * K);
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        for (unsigned p = 0; p < P; ++p) {
            for (unsigned s = scope.first; s <= scope.last; ++s) {
                sm.x[(i * P + p) * K + (s - scope.first)] = m.addBinary(varName("x", {scope.nodes[i], p, s}));
            }
        }
    }
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        for (unsigned p = 0; p < P; ++p) {
            for (unsigned q = 0; q < P; ++q) {
                if (p == q) {
                    continue;
                }
                for (unsigned s = scope.first; s <= scope.last; ++s) {
                    if (s < scope.last || scope.sendInLastPhase || scope.needAfter[i][q]) {
                        sm.y[{i, p, q, s}] = m.addBinary(varName("y", {scope.nodes[i], p, q, s}));
                    }
                }
            }
        }
    }
    for (std::size_t e = 0; e < scope.externals.size(); ++e) {
        const auto &ext = scope.externals[e];
        for (unsigned q = 0; q < P; ++q) {
            if (ext.available[q]) {
                continue;
            }
            for (unsigned s = scope.zFirst; s <= scope.zLast; ++s) {
                sm.z[{e, q, s}] = m.addBinary(varName("z", {ext.node, ext.home, q, s}));
            }
        }
    }
    for (unsigned s = scope.first; s <= scope.last; ++s) {
        sm.work.push_back(m.addContinuous(varName("W", {s}), 0.0, milp::kInfinity, static_cast<double>(D)));
    }
    for (unsigned s = scope.commFirst; s <= scope.last; ++s) {
        sm.comm.push_back(m.addContinuous(varName("C", {s}), 0.0, milp::kInfinity, static_cast<double>(machine.g())));
    }
    for (unsigned s = scope.commFirst; s <= scope.last; ++s) {
        sm.used.push_back(m.addBinary(varName("used", {s}), static_cast<double>(D * machine.latency())));
    }
    m.setObjectiveIntegral(true);

    auto yVar = [&](std::size_t i, unsigned p, unsigned q, unsigned s) -> std::int64_t {
        auto it = sm.y.find({i, p, q, s});
        return it == sm.y.end() ? -1 : static_cast<std::int64_t>(it->second);
    };

    // One processor and superstep per node.
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        std::vector<Term> terms;
        for (unsigned p = 0; p < P; ++p) {
            for (unsigned s = scope.first; s <= scope.last; ++s) {
                terms.push_back({sm.xIndex(i, p, s, scope.first), 1.0});
            }
        }
        m.addConstraint(std::move(terms), Sense::Equal, 1.0);
    }

    // Precedence: the value of every predecessor is on q when v runs there.
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        const NodeId v = scope.nodes[i];
        for (NodeId u : dag.predecessors(v)) {
            if (pos[u] >= 0) {
                const auto j = static_cast<std::size_t>(pos[u]);
                for (unsigned q = 0; q < P; ++q) {
                    for (unsigned s = scope.first; s <= scope.last; ++s) {
                        std::vector<Term> terms{{sm.xIndex(i, q, s, scope.first), 1.0}};
                        for (unsigned s2 = scope.first; s2 <= s; ++s2) {
                            terms.push_back({sm.xIndex(j, q, s2, scope.first), -1.0});
                        }
                        for (unsigned p = 0; p < P; ++p) {
                            for (unsigned s2 = scope.first; s2 < s && p != q; ++s2) {
                                if (auto yi = yVar(j, p, q, s2); yi >= 0) {
                                    terms.push_back({static_cast<std::size_t>(yi), -1.0});
                                }
                            }
                        }
                        m.addConstraint(std::move(terms), Sense::LessEqual, 0.0);
                    }
                }
            } else if (extPos[u] >= 0) {
                const auto e = static_cast<std::size_t>(extPos[u]);
                const auto &ext = scope.externals[e];
                for (unsigned q = 0; q < P; ++q) {
                    if (ext.available[q]) {
                        continue;
                    }
                    for (unsigned s = scope.first; s <= scope.last; ++s) {
                        std::vector<Term> terms{{sm.xIndex(i, q, s, scope.first), 1.0}};
                        for (unsigned s2 = scope.zFirst; s2 < s && s2 <= scope.zLast; ++s2) {
                            terms.push_back({sm.z.at({e, q, s2}), -1.0});
                        }
                        if (terms.size() == 1) {
                            m.setBounds(terms[0].var, 0.0, 0.0);
                        } else {
                            m.addConstraint(std::move(terms), Sense::LessEqual, 0.0);
                        }
                    }
                }
            }
        }
    }

    // Sends originate on the computing processor, no earlier than the computation.
    for (const auto &[key, var] : sm.y) {
        const auto [i, p, q, s] = key;
        std::vector<Term> terms{{var, 1.0}};
        for (unsigned s2 = scope.first; s2 <= s; ++s2) {
            terms.push_back({sm.xIndex(i, p, s2, scope.first), -1.0});
        }
        m.addConstraint(std::move(terms), Sense::LessEqual, 0.0);
    }

    // Values needed after the scope must be present by its end.
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        for (unsigned q = 0; q < P; ++q) {
            if (!scope.needAfter[i][q]) {
                continue;
            }
            std::vector<Term> terms;
            for (unsigned s = scope.first; s <= scope.last; ++s) {
                terms.push_back({sm.xIndex(i, q, s, scope.first), 1.0});
                for (unsigned p = 0; p < P; ++p) {
                    if (auto yi = yVar(i, p, q, s); yi >= 0) {
                        terms.push_back({static_cast<std::size_t>(yi), 1.0});
                    }
                }
            }
            m.addConstraint(std::move(terms), Sense::GreaterEqual, 1.0);
        }
    }
    for (std::size_t e = 0; e < scope.externals.size(); ++e) {
        for (unsigned q = 0; q < P; ++q) {
            if (!scope.externals[e].required[q]) {
                continue;
            }
            std::vector<Term> terms;
            for (unsigned s = scope.zFirst; s <= scope.zLast; ++s) {
                terms.push_back({sm.z.at({e, q, s}), 1.0});
            }
            m.addConstraint(std::move(terms), Sense::GreaterEqual, 1.0);
        }
    }

    // Work maxima.
    for (unsigned s = scope.first; s <= scope.last; ++s) {
        const std::size_t W = sm.work[s - scope.first];
        for (unsigned p = 0; p < P; ++p) {
            std::vector<Term> terms{{W, 1.0}};
            for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
                terms.push_back({sm.xIndex(i, p, s, scope.first), -static_cast<double>(dag.work(scope.nodes[i]))});
            }
            m.addConstraint(std::move(terms), Sense::GreaterEqual,
                            static_cast<double>(scope.workConst[s - scope.first][p]));
        }
        for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
            const Weight w = dag.work(scope.nodes[i]);
            if (w == 0) {
                continue;
            }
            std::vector<Term> terms{{W, 1.0}};
            for (unsigned p = 0; p < P; ++p) {
                terms.push_back({sm.xIndex(i, p, s, scope.first), -static_cast<double>(w)});
            }
            m.addConstraint(std::move(terms), Sense::GreaterEqual, 0.0);
        }
    }

    // h-relation maxima, in units of 1/D.
    std::vector<std::vector<std::vector<Term>>> sendTerms(R, std::vector<std::vector<Term>>(P));
    std::vector<std::vector<std::vector<Term>>> recTerms(R, std::vector<std::vector<Term>>(P));
    for (const auto &[key, var] : sm.y) {
        const auto [i, p, q, s] = key;
        const double vol = static_cast<double>(dag.comm(scope.nodes[i]) * machine.scaledLambda(p, q));
        sendTerms[s - scope.commFirst][p].push_back({var, -vol});
        recTerms[s - scope.commFirst][q].push_back({var, -vol});
    }
    for (const auto &[key, var] : sm.z) {
        const auto [e, q, s] = key;
        const auto &ext = scope.externals[e];
        const double vol = static_cast<double>(dag.comm(ext.node) * machine.scaledLambda(ext.home, q));
        sendTerms[s - scope.commFirst][ext.home].push_back({var, -vol});
        recTerms[s - scope.commFirst][q].push_back({var, -vol});
    }
    for (unsigned r = 0; r < R; ++r) {
        for (unsigned p = 0; p < P; ++p) {
            for (auto *side : {&sendTerms, &recTerms}) {
                const auto &constant = side == &sendTerms ? scope.sendConst : scope.recConst;
                auto terms = (*side)[r][p];
                if (terms.empty() && constant[r][p] == 0) {
                    continue;
                }
                terms.push_back({sm.comm[r], 1.0});
                m.addConstraint(std::move(terms), Sense::GreaterEqual, static_cast<double>(constant[r][p]));
            }
        }
    }

    // Latency indicators.
    std::vector<std::vector<std::vector<std::size_t>>> yByNodePhase(
        R, std::vector<std::vector<std::size_t>>(scope.nodes.size()));
    for (const auto &[key, var] : sm.y) {
        yByNodePhase[std::get<3>(key) - scope.commFirst][std::get<0>(key)].push_back(var);
    }
    std::vector<std::vector<std::vector<std::size_t>>> zByExtPhase(
        R, std::vector<std::vector<std::size_t>>(scope.externals.size()));
    for (const auto &[key, var] : sm.z) {
        zByExtPhase[std::get<2>(key) - scope.commFirst][std::get<0>(key)].push_back(var);
    }
    for (unsigned r = 0; r < R; ++r) {
        const unsigned s = scope.commFirst + r;
        const std::size_t U = sm.used[r];
        if (scope.usedFixed[r]) {
            m.fix(U, 1.0);
            continue;
        }
        if (s >= scope.first) {
            for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
                std::vector<Term> terms{{U, 1.0}};
                for (unsigned p = 0; p < P; ++p) {
                    terms.push_back({sm.xIndex(i, p, s, scope.first), -1.0});
                }
                m.addConstraint(std::move(terms), Sense::GreaterEqual, 0.0);
            }
        }
        for (auto *groups : {&yByNodePhase, &zByExtPhase}) {
            for (const auto &vars : (*groups)[r]) {
                if (vars.empty()) {
                    continue;
                }
                std::vector<Term> terms{{U, static_cast<double>(vars.size())}};
                for (auto var : vars) {
                    terms.push_back({var, -1.0});
                }
                m.addConstraint(std::move(terms), Sense::GreaterEqual, 0.0);
            }
        }
    }

    if (scope.symmetry) {
        for (unsigned r = 0; r + 1 < R; ++r) {
            m.addConstraint({{sm.used[r], 1.0}, {sm.used[r + 1], -1.0}}, Sense::GreaterEqual, 0.0);
        }
        if (machine.isUniform() && !scope.nodes.empty()) {
            for (unsigned p = 1; p < P; ++p) {
                for (unsigned s = scope.first; s <= scope.last; ++s) {
                    m.setBounds(sm.xIndex(0, p, s, scope.first), 0.0, 0.0);
                }
            }
        }
    }
    return sm;
}

// Raises auxiliary variables to the smallest values their constraints allow, given
// the values of all other variables.
void completeAuxiliaries(const MilpModel &model, std::vector<double> &values, const std::vector<std::size_t> &aux) {
    std::vector<std::vector<std::size_t>> rowsOf(model.numVariables());
    for (std::size_t r = 0; r < model.numConstraints(); ++r) {
        for (const auto &t : model.constraints()[r].terms) {
            rowsOf[t.var].push_back(r);
        }
    }
    for (auto a : aux) {
        values[a] = model.variable(a).lower;
    }
    bool changed = true;
    for (int pass = 0; changed && pass < 1000; ++pass) {
        changed = false;
        for (auto a : aux) {
            double lo = model.variable(a).lower;
            for (auto r : rowsOf[a]) {
                const auto &c = model.constraints()[r];
                double rest = 0.0;
                double ca = 0.0;
                for (const auto &t : c.terms) {
                    if (t.var == a) {
                        ca = t.coef;
                    } else {
                        rest += t.coef * values[t.var];
                    }
                }
                if ((c.sense == Sense::GreaterEqual && ca > 0) || (c.sense == Sense::LessEqual && ca < 0)) {
                    lo = std::max(lo, (c.rhs - rest) / ca);
                }
            }
            if (model.variable(a).type != milp::VarType::Continuous) {
                lo = std::ceil(lo - 1e-9);
            }
            if (lo > values[a] + 1e-12 || lo < values[a] - 1e-12) {
                changed = changed || lo > values[a];
                values[a] = lo;
            }
        }
    }
}

struct Placement {
    unsigned proc;
    unsigned step;
};

// Warm start from placements of the scope nodes and send tuples. Sends without a matching
// variable are dropped.
void setScopeWarmStart(ScopeModel &sm, const Scope &scope, const std::vector<Placement> &place,
                       const std::vector<std::tuple<std::size_t, unsigned, unsigned, unsigned>> &ySends,
                       const std::vector<std::tuple<std::size_t, unsigned, unsigned>> &zSends) {
    std::vector<double> values(sm.model.numVariables(), 0.0);
    for (std::size_t i = 0; i < place.size(); ++i) {
        values[sm.xIndex(i, place[i].proc, place[i].step, scope.first)] = 1.0;
    }
    for (const auto &key : ySends) {
        if (auto it = sm.y.find(key); it != sm.y.end()) {
            values[it->second] = 1.0;
        }
    }
    for (const auto &key : zSends) {
        if (auto it = sm.z.find(key); it != sm.z.end()) {
            values[it->second] = 1.0;
        }
    }
    std::vector<std::size_t> aux = sm.used;
    std::reverse(aux.begin(), aux.end());
    aux.insert(aux.end(), sm.work.begin(), sm.work.end());
    aux.insert(aux.end(), sm.comm.begin(), sm.comm.end());
    completeAuxiliaries(sm.model, values, aux);
    sm.model.setWarmStart(std::move(values));
}

struct Decoded {
    std::vector<Placement> place;
    std::vector<CommStep> ySends;
    std::vector<CommStep> zSends;
};

Decoded decodeScope(const ScopeModel &sm, const Scope &scope, const std::vector<double> &values) {
    Decoded d;
    d.place.resize(scope.nodes.size(), Placement{0, scope.first});
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        for (unsigned p = 0; p < sm.P; ++p) {
            for (unsigned s = scope.first; s <= scope.last; ++s) {
                if (values[sm.xIndex(i, p, s, scope.first)] > 0.5) {
                    d.place[i] = {p, s};
                }
            }
        }
    }
    for (const auto &[key, var] : sm.y) {
        if (values[var] > 0.5) {
            const auto [i, p, q, s] = key;
            d.ySends.push_back({scope.nodes[i], p, q, s});
        }
    }
    for (const auto &[key, var] : sm.z) {
        if (values[var] > 0.5) {
            const auto [e, q, s] = key;
            d.zSends.push_back({scope.externals[e].node, scope.externals[e].home, q, s});
        }
    }
    return d;
}

// Earliest of the given sends per (node, target); the send is dropped unless some
// successor on the target runs after it or `keep` says otherwise.
template <typename Keep>
std::vector<CommStep> earliestUsefulSends(const ComputationalDag &dag, const BspSchedule &schedule,
                                          std::vector<CommStep> sends, Keep keep) {
    std::sort(sends.begin(), sends.end(), [](const CommStep &a, const CommStep &b) {
        return std::tie(a.node, a.to, a.step) < std::tie(b.node, b.to, b.step);
    });
    std::vector<CommStep> out;
    for (std::size_t k = 0; k < sends.size(); ++k) {
        const auto &c = sends[k];
        if (k > 0 && sends[k - 1].node == c.node && sends[k - 1].to == c.to) {
            continue;
        }
        bool used = keep(c);
        for (NodeId w : dag.successors(c.node)) {
            used = used || (schedule.proc(w) == c.to && schedule.superstep(w) > c.step);
        }
        if (used) {
            out.push_back(c);
        }
    }
    return out;
}

milp::SolveResult runSolver(const MilpModel &model, const IlpOptions &options) {
    return milp::solveModel(model, options.solve, options.backend);
}

Scope fullScope(const ComputationalDag &dag, unsigned P, unsigned S) {
    Scope scope = emptyScope(P, topologicalOrder(dag), 0, S - 1, 0);
    scope.sendInLastPhase = true;
    scope.symmetry = true;
    return scope;
}

} // namespace

milp::MilpModel buildIlpFullModel(const ComputationalDag &dag, const MachineParams &machine, unsigned numSupersteps) {
    if (numSupersteps == 0) {
        throw std::invalid_argument("model needs at least one superstep");
    }
    return buildScopeModel(dag, machine, fullScope(dag, machine.numProcessors(), numSupersteps)).model;
}

IlpOutcome ilpFull(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &warmStart,
                   const IlpFullOptions &options) {
    const unsigned P = machine.numProcessors();
    IlpOutcome out{warmStart, milp::SolveStatus::NoSolution, false};
    if (dag.numNodes() == 0) {
        out.status = milp::SolveStatus::Optimal;
        return out;
    }
    const unsigned S = std::max(1u, options.numSupersteps.value_or(warmStart.numSupersteps()));
    const std::size_t estimate = estimateIlpVariables(dag.numNodes(), S, P);
    if (estimate >= options.variableLimit) {
        throw VariableBudgetExceeded("ILP variable estimate " + std::to_string(estimate) + " exceeds " +
                                     std::to_string(options.variableLimit));
    }
    const Scope scope = fullScope(dag, P, S);
    ScopeModel sm = buildScopeModel(dag, machine, scope);

    BspSchedule base = hasOnlyDirectSends(warmStart) ? warmStart : withLazyComm(dag, warmStart.assignment());
    base.compactSupersteps();
    pruneUnusedComm(dag, base);
    if (base.numSupersteps() <= S) {
        std::vector<Placement> place;
        for (NodeId v : scope.nodes) {
            place.push_back({base.proc(v), base.superstep(v)});
        }
        // The model pins its first node to processor 0 under uniform coefficients.
        if (machine.isUniform() && place[0].proc != 0) {
            const unsigned swap = place[0].proc;
            auto relabel = [swap](unsigned p) { return p == 0 ? swap : (p == swap ? 0 : p); };
            for (auto &pl : place) {
                pl.proc = relabel(pl.proc);
            }
            std::vector<CommStep> comm = base.comm();
            for (auto &c : comm) {
                c.from = relabel(c.from);
                c.to = relabel(c.to);
            }
            base.setComm(std::move(comm));
        }
        std::vector<std::int64_t> pos(dag.numNodes());
        for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
            pos[scope.nodes[i]] = static_cast<std::int64_t>(i);
        }
        std::vector<std::tuple<std::size_t, unsigned, unsigned, unsigned>> ySends;
        for (const auto &c : base.comm()) {
            ySends.emplace_back(static_cast<std::size_t>(pos[c.node]), c.from, c.to, c.step);
        }
        setScopeWarmStart(sm, scope, place, ySends, {});
    }

    const auto result = runSolver(sm.model, options);
    out.status = result.status;
    if (!result.hasSolution()) {
        return out;
    }
    const Decoded d = decodeScope(sm, scope, result.values);
    std::vector<unsigned> proc(dag.numNodes());
    std::vector<unsigned> step(dag.numNodes());
    for (std::size_t i = 0; i < scope.nodes.size(); ++i) {
        proc[scope.nodes[i]] = d.place[i].proc;
        step[scope.nodes[i]] = d.place[i].step;
    }
    BspSchedule candidate(std::move(proc), std::move(step), d.ySends);
    pruneUnusedComm(dag, candidate);
    candidate.compactSupersteps();
    if (isValidSchedule(dag, machine, candidate) &&
        scaledCost(dag, machine, candidate) < scaledCost(dag, machine, warmStart)) {
        out.schedule = std::move(candidate);
        out.changed = true;
    }
    return out;
}

std::vector<std::pair<unsigned, unsigned>> splitIntervals(const BspSchedule &schedule, unsigned numProcessors,
                                                          std::size_t limit) {
    const unsigned S = schedule.numSupersteps();
    std::vector<std::size_t> count(S, 0);
    for (NodeId v = 0; v < schedule.numNodes(); ++v) {
        ++count[schedule.superstep(v)];
    }
    std::vector<std::pair<unsigned, unsigned>> intervals;
    unsigned end = S;
    while (end > 0) {
        unsigned begin = end - 1;
        std::size_t nodes = count[begin];
        while (begin > 0 &&
               estimateIlpVariables(nodes + count[begin - 1], end - begin + 1, numProcessors) <= limit) {
            --begin;
            nodes += count[begin];
        }
        intervals.emplace_back(begin, end - 1);
        end = begin;
    }
    return intervals;
}

IlpOutcome ilpPart(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   std::pair<unsigned, unsigned> interval, const IlpOptions &options) {
    const unsigned P = machine.numProcessors();
    const auto [s1, s2] = interval;
    IlpOutcome out{schedule, milp::SolveStatus::NoSolution, false};
    if (s1 > s2 || s2 >= schedule.numSupersteps()) {
        throw std::out_of_range("interval outside the schedule");
    }
    if (!hasOnlyDirectSends(schedule)) {
        return out;
    }
    const unsigned commFirst = s1 > 0 ? s1 - 1 : s1;
    auto inScope = [&](NodeId v) { return schedule.superstep(v) >= s1 && schedule.superstep(v) <= s2; };
    auto inPhases = [&](unsigned s) { return s >= commFirst && s <= s2; };

    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < dag.numNodes(); ++v) {
        if (inScope(v)) {
            nodes.push_back(v);
        }
    }
    Scope scope = emptyScope(P, nodes, s1, s2, commFirst);

    std::vector<std::vector<CommStep>> sendsOf(dag.numNodes());
    for (const auto &c : schedule.comm()) {
        sendsOf[c.node].push_back(c);
    }
    for (auto &list : sendsOf) {
        std::sort(list.begin(), list.end(),
                  [](const CommStep &a, const CommStep &b) { return std::tie(a.step, a.to) < std::tie(b.step, b.to); });
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (NodeId w : dag.successors(nodes[i])) {
            if (schedule.superstep(w) > s2) {
                scope.needAfter[i][schedule.proc(w)] = true;
            }
        }
    }

    // Predecessors computed before the interval.
    std::vector<std::int64_t> extPos(dag.numNodes(), -1);
    for (NodeId v : nodes) {
        for (NodeId u : dag.predecessors(v)) {
            if (inScope(u) || extPos[u] >= 0) {
                continue;
            }
            External ext{u, schedule.proc(u), std::vector<bool>(P, false), std::vector<bool>(P, false)};
            ext.available[ext.home] = true;
            for (const auto &c : sendsOf[u]) {
                if (c.step < commFirst) {
                    ext.available[c.to] = true;
                }
            }
            for (const auto &c : sendsOf[u]) {
                if (inPhases(c.step) && !ext.available[c.to]) {
                    ext.required[c.to] = true;
                }
            }
            extPos[u] = static_cast<std::int64_t>(scope.externals.size());
            scope.externals.push_back(std::move(ext));
        }
    }
    scope.zFirst = commFirst;
    scope.zLast = s2;

    // Communication that stays: everything of other nodes except replaced sends.
    std::vector<CommStep> kept;
    for (const auto &c : schedule.comm()) {
        if (inScope(c.node)) {
            continue;
        }
        if (extPos[c.node] >= 0 && inPhases(c.step) &&
            !scope.externals[static_cast<std::size_t>(extPos[c.node])].available[c.to]) {
            continue;
        }
        kept.push_back(c);
        if (inPhases(c.step)) {
            const Weight vol = dag.comm(c.node) * machine.scaledLambda(c.from, c.to);
            scope.sendConst[c.step - commFirst][c.from] += vol;
            scope.recConst[c.step - commFirst][c.to] += vol;
            scope.usedFixed[c.step - commFirst] = true;
        }
    }
    if (commFirst < s1) {
        for (NodeId v = 0; v < dag.numNodes(); ++v) {
            if (schedule.superstep(v) == commFirst) {
                scope.usedFixed[0] = true;
            }
        }
    }

    ScopeModel sm = buildScopeModel(dag, machine, scope);

    std::vector<Placement> place;
    std::vector<std::tuple<std::size_t, unsigned, unsigned, unsigned>> ySends;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeId v = nodes[i];
        place.push_back({schedule.proc(v), schedule.superstep(v)});
        std::vector<bool> seen(P, false);
        for (const auto &c : sendsOf[v]) {
            if (seen[c.to]) {
                continue;
            }
            seen[c.to] = true;
            ySends.emplace_back(i, c.from, c.to, std::min(c.step, s2));
        }
    }
    std::vector<std::tuple<std::size_t, unsigned, unsigned>> zSends;
    for (std::size_t e = 0; e < scope.externals.size(); ++e) {
        std::vector<bool> seen(P, false);
        for (const auto &c : sendsOf[scope.externals[e].node]) {
            if (inPhases(c.step) && !scope.externals[e].available[c.to] && !seen[c.to]) {
                seen[c.to] = true;
                zSends.emplace_back(e, c.to, c.step);
            }
        }
    }
    setScopeWarmStart(sm, scope, place, ySends, zSends);

    const auto result = runSolver(sm.model, options);
    out.status = result.status;
    if (!result.hasSolution()) {
        return out;
    }
    const Decoded d = decodeScope(sm, scope, result.values);
    BspSchedule candidate = schedule;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        candidate.assign(nodes[i], d.place[i].proc, d.place[i].step);
    }
    std::vector<CommStep> comm = kept;
    for (const auto &c : earliestUsefulSends(dag, candidate, d.ySends, [](const CommStep &) { return false; })) {
        comm.push_back(c);
    }
    for (const auto &c : earliestUsefulSends(dag, candidate, d.zSends, [&](const CommStep &c) {
             return scope.externals[static_cast<std::size_t>(extPos[c.node])].required[c.to];
         })) {
        comm.push_back(c);
    }
    candidate.setComm(std::move(comm));
    if (isValidSchedule(dag, machine, candidate) &&
        scaledCost(dag, machine, candidate) <= scaledCost(dag, machine, schedule)) {
        out.changed = !(candidate == schedule);
        out.schedule = std::move(candidate);
    }
    return out;
}

IlpOutcome ilpCs(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                 const IlpOptions &options) {
    if (!hasOnlyDirectSends(schedule)) {
        throw std::invalid_argument("communication retiming needs direct sends");
    }
    IlpOutcome out{schedule, milp::SolveStatus::NoSolution, false};
    const unsigned P = machine.numProcessors();
    const unsigned S = schedule.numSupersteps();
    const Weight D = machine.denominator();

    struct Transfer {
        NodeId node;
        unsigned from;
        unsigned to;
        unsigned lo;
        unsigned hi;
        unsigned current;
    };
    std::vector<std::vector<unsigned>> firstNeed(dag.numNodes());
    std::vector<Transfer> transfers;
    std::vector<std::vector<unsigned>> earliestSend(dag.numNodes(), std::vector<unsigned>(P, S));
    for (const auto &c : schedule.comm()) {
        earliestSend[c.node][c.to] = std::min(earliestSend[c.node][c.to], c.step);
    }
    for (NodeId v = 0; v < dag.numNodes(); ++v) {
        std::vector<unsigned> need(P, S);
        for (NodeId w : dag.successors(v)) {
            need[schedule.proc(w)] = std::min(need[schedule.proc(w)], schedule.superstep(w));
        }
        for (unsigned q = 0; q < P; ++q) {
            if (q != schedule.proc(v) && need[q] < S) {
                transfers.push_back({v, schedule.proc(v), q, schedule.superstep(v), need[q] - 1, earliestSend[v][q]});
            }
        }
    }

    std::vector<bool> hasNodes(S, false);
    for (NodeId v = 0; v < dag.numNodes(); ++v) {
        hasNodes[schedule.superstep(v)] = true;
    }
    std::vector<std::vector<Weight>> sendConst(S, std::vector<Weight>(P, 0));
    std::vector<std::vector<Weight>> recConst(S, std::vector<Weight>(P, 0));
    std::vector<bool> constUsed(S, false);
    MilpModel m;
    m.setObjectiveIntegral(true);
    std::vector<std::vector<std::pair<std::size_t, unsigned>>> vars(transfers.size()); // (var, phase)
    std::vector<std::vector<std::vector<Term>>> sendTerms(S, std::vector<std::vector<Term>>(P));
    std::vector<std::vector<std::vector<Term>>> recTerms(S, std::vector<std::vector<Term>>(P));
    std::vector<std::vector<std::size_t>> byPhase(S);
    for (std::size_t t = 0; t < transfers.size(); ++t) {
        const auto &tr = transfers[t];
        const Weight vol = dag.comm(tr.node) * machine.scaledLambda(tr.from, tr.to);
        if (tr.lo == tr.hi) {
            sendConst[tr.lo][tr.from] += vol;
            recConst[tr.lo][tr.to] += vol;
            constUsed[tr.lo] = true;
            continue;
        }
        std::vector<Term> one;
        for (unsigned s = tr.lo; s <= tr.hi; ++s) {
            const auto var = m.addBinary(varName("b", {tr.node, tr.to, s}));
            vars[t].emplace_back(var, s);
            one.push_back({var, 1.0});
            sendTerms[s][tr.from].push_back({var, -static_cast<double>(vol)});
            recTerms[s][tr.to].push_back({var, -static_cast<double>(vol)});
            byPhase[s].push_back(var);
        }
        m.addConstraint(std::move(one), Sense::Equal, 1.0);
    }
    if (m.numVariables() == 0) {
        out.status = milp::SolveStatus::Optimal;
        return out;
    }
    std::vector<std::size_t> aux;
    for (unsigned s = 0; s < S; ++s) {
        if (byPhase[s].empty()) {
            continue;
        }
        const auto C = m.addContinuous(varName("C", {s}), 0.0, milp::kInfinity, static_cast<double>(machine.g()));
        aux.push_back(C);
        for (unsigned p = 0; p < P; ++p) {
            for (auto *side : {&sendTerms, &recTerms}) {
                const Weight constant = side == &sendTerms ? sendConst[s][p] : recConst[s][p];
                auto terms = (*side)[s][p];
                if (terms.empty() && constant == 0) {
                    continue;
                }
                terms.push_back({C, 1.0});
                m.addConstraint(std::move(terms), Sense::GreaterEqual, static_cast<double>(constant));
            }
        }
        if (!hasNodes[s] && !constUsed[s]) {
            const auto U = m.addBinary(varName("used", {s}), static_cast<double>(D * machine.latency()));
            aux.push_back(U);
            std::vector<Term> terms{{U, static_cast<double>(byPhase[s].size())}};
            for (auto var : byPhase[s]) {
                terms.push_back({var, -1.0});
            }
            m.addConstraint(std::move(terms), Sense::GreaterEqual, 0.0);
        }
    }
    std::vector<double> warm(m.numVariables(), 0.0);
    bool warmOk = true;
    for (std::size_t t = 0; t < transfers.size(); ++t) {
        if (vars[t].empty()) {
            continue;
        }
        bool set = false;
        for (const auto &[var, s] : vars[t]) {
            if (s == transfers[t].current) {
                warm[var] = 1.0;
                set = true;
            }
        }
        warmOk = warmOk && set;
    }
    if (warmOk) {
        completeAuxiliaries(m, warm, aux);
        m.setWarmStart(std::move(warm));
    }

    const auto result = runSolver(m, options);
    out.status = result.status;
    if (!result.hasSolution()) {
        return out;
    }
    std::vector<CommStep> comm;
    for (std::size_t t = 0; t < transfers.size(); ++t) {
        const auto &tr = transfers[t];
        unsigned phase = tr.lo;
        for (const auto &[var, s] : vars[t]) {
            if (result.values[var] > 0.5) {
                phase = s;
            }
        }
        comm.push_back({tr.node, tr.from, tr.to, phase});
    }
    BspSchedule candidate = schedule;
    candidate.setComm(std::move(comm));
    if (isValidSchedule(dag, machine, candidate) &&
        scaledCost(dag, machine, candidate) < scaledCost(dag, machine, schedule)) {
        out.schedule = std::move(candidate);
        out.changed = true;
    }
    return out;
}

std::size_t ilpInitBatchSize(unsigned numProcessors) {
    const std::size_t perNode = 3 * static_cast<std::size_t>(numProcessors) * numProcessors;
    return std::max<std::size_t>(1, kIlpInitVariableLimit / perNode);
}

Assignment ilpInit(const ComputationalDag &dag, const MachineParams &machine, const IlpOptions &options) {
    const unsigned P = machine.numProcessors();
    const std::size_t n = dag.numNodes();
    const auto order = topologicalOrder(dag);
    const std::size_t batchSize = ilpInitBatchSize(P);
    std::vector<unsigned> proc(n, 0);
    std::vector<unsigned> step(n, 0);
    std::vector<bool> placed(n, false);
    bool anyPlaced = false;
    unsigned maxStep = 0;

    for (std::size_t startIdx = 0; startIdx < n; startIdx += batchSize) {
        const std::vector<NodeId> batch(order.begin() + static_cast<std::ptrdiff_t>(startIdx),
                                        order.begin() + static_cast<std::ptrdiff_t>(std::min(n, startIdx + batchSize)));
        const unsigned base = anyPlaced ? maxStep : 0;
        Scope scope = emptyScope(P, batch, base, base + 2, base);
        scope.zFirst = base;
        scope.zLast = base + 1;
        scope.usedFixed[0] = anyPlaced;
        std::vector<std::int64_t> pos(n, -1);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            pos[batch[i]] = static_cast<std::int64_t>(i);
        }
        std::vector<std::int64_t> extPos(n, -1);
        for (NodeId v : batch) {
            for (NodeId u : dag.predecessors(v)) {
                if (placed[u] && step[u] == base && extPos[u] < 0) {
                    External ext{u, proc[u], std::vector<bool>(P, false), std::vector<bool>(P, false)};
                    ext.available[proc[u]] = true;
                    extPos[u] = static_cast<std::int64_t>(scope.externals.size());
                    scope.externals.push_back(std::move(ext));
                }
            }
        }
        for (NodeId v = 0; v < n; ++v) {
            if (placed[v] && step[v] == base) {
                scope.workConst[0][proc[v]] += dag.work(v);
            }
        }
        ScopeModel sm = buildScopeModel(dag, machine, scope);

        // Warm start: the whole batch on processor 0, as early as its inputs allow.
        std::vector<Placement> warm(batch.size(), Placement{0, base});
        std::vector<std::tuple<std::size_t, unsigned, unsigned>> zSends;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            for (NodeId u : dag.predecessors(batch[i])) {
                if (pos[u] >= 0) {
                    warm[i].step = std::max(warm[i].step, warm[static_cast<std::size_t>(pos[u])].step);
                } else if (extPos[u] >= 0 && proc[u] != 0) {
                    warm[i].step = base + 1;
                    zSends.emplace_back(static_cast<std::size_t>(extPos[u]), 0u, base);
                }
            }
        }
        setScopeWarmStart(sm, scope, warm, {}, zSends);

        const auto result = runSolver(sm.model, options);
        const std::vector<Placement> chosen = result.hasSolution() ? decodeScope(sm, scope, result.values).place : warm;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            proc[batch[i]] = chosen[i].proc;
            step[batch[i]] = chosen[i].step;
            placed[batch[i]] = true;
            maxStep = std::max(maxStep, chosen[i].step);
        }
        anyPlaced = true;
    }
    BspSchedule schedule(std::move(proc), std::move(step));
    schedule.compactSupersteps();
    return schedule.assignment();
}

} // namespace bspsched
