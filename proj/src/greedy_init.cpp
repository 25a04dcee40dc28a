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

#include "bspsched/greedy_init.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace bspsched {

namespace {

constexpr unsigned kUnassigned = std::numeric_limits<unsigned>::max();
constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

} // namespace

BspgState::BspgState(const ComputationalDag &dag, unsigned numProcessors)
    : dag_(dag), numProcs_(numProcessors), placed_(dag.numNodes(), 0),
      touched_(dag.numNodes() * numProcessors, 0), score_(dag.numNodes() * numProcessors, 0.0),
      readyP_(numProcessors) {
    assignment_.proc.assign(dag.numNodes(), kUnassigned);
    assignment_.step.assign(dag.numNodes(), kUnassigned);
}

void BspgState::place(NodeId v, unsigned proc, unsigned step) {
    placed_[v] = 1;
    assignment_.proc[v] = proc;
    assignment_.step[v] = step;
    const auto touch = [&](NodeId u) {
        char &flag = touched_[static_cast<std::size_t>(u) * numProcs_ + proc];
        if (flag) {
            return;
        }
        flag = 1;
        const double gain = static_cast<double>(dag_.comm(u)) / static_cast<double>(dag_.outDegree(u));
        for (NodeId x : dag_.successors(u)) {
            score_[static_cast<std::size_t>(x) * numProcs_ + proc] += gain;
        }
    };
    touch(v);
    for (NodeId u : dag_.predecessors(v)) {
        touch(u);
    }
}

NodeId BspgState::chooseNode(unsigned p) const {
    const std::set<NodeId> &pool = readyP_[p].empty() ? readyAll_ : readyP_[p];
    if (pool.empty()) {
        throw std::logic_error("no ready node for processor " + std::to_string(p));
    }
    NodeId best = *pool.begin();
    double bestScore = score(best, p);
    for (NodeId v : pool) {
        const double s = score(v, p);
        if (s > bestScore + 1e-12) {
            best = v;
            bestScore = s;
        }
    }
    return best;
}

Assignment bspg(const ComputationalDag &dag, const MachineParams &machine) {
    const std::size_t n = dag.numNodes();
    const unsigned numProcs = machine.numProcessors();
    const unsigned idleThreshold = (numProcs + 1) / 2;
    BspgState state(dag, numProcs);

    std::set<NodeId> ready;
    std::vector<std::size_t> unfinishedPreds(n);
    for (NodeId v = 0; v < n; ++v) {
        unfinishedPreds[v] = dag.inDegree(v);
        if (unfinishedPreds[v] == 0) {
            ready.insert(v);
        }
    }
    state.readyAll() = ready;

    using Event = std::pair<Weight, NodeId>; // (finish time, node); kNoNode marks the start of a superstep
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    events.emplace(0, kNoNode);
    std::vector<char> freeProc(numProcs, 1);
    unsigned superstep = 0;
    bool endStep = false;
    std::size_t remaining = n;
    std::vector<NodeId> finishing;

    while (remaining > 0) {
        if (endStep && events.empty()) {
            for (unsigned p = 0; p < numProcs; ++p) {
                state.readyP(p).clear();
            }
            state.readyAll() = ready;
            ++superstep;
            endStep = false;
            events.emplace(0, kNoNode);
        }
        const Weight t = events.top().first;
        finishing.clear();
        while (!events.empty() && events.top().first == t) {
            if (events.top().second != kNoNode) {
                finishing.push_back(events.top().second);
            }
            events.pop();
        }
        std::sort(finishing.begin(), finishing.end());
        for (NodeId v : finishing) {
            const unsigned pv = state.assignment().proc[v];
            freeProc[pv] = 1;
            for (NodeId u : dag.successors(v)) {
                if (--unfinishedPreds[u] != 0) {
                    continue;
                }
                ready.insert(u);
                const auto preds = dag.predecessors(u);
                const bool local = std::all_of(preds.begin(), preds.end(), [&](NodeId u0) {
                    return state.assignment().proc[u0] == pv || state.assignment().step[u0] < superstep;
                });
                if (local) {
                    state.readyP(pv).insert(u);
                }
            }
        }
        if (!endStep) {
            for (;;) {
                unsigned p = 0;
                while (p < numProcs && !(freeProc[p] && (!state.readyP(p).empty() || !state.readyAll().empty()))) {
                    ++p;
                }
                if (p == numProcs) {
                    break;
                }
                const NodeId v = state.chooseNode(p);
                ready.erase(v);
                state.readyAll().erase(v);
                for (unsigned q = 0; q < numProcs; ++q) {
                    state.readyP(q).erase(v);
                }
                state.place(v, p, superstep);
                --remaining;
                events.emplace(t + dag.work(v), v);
                freeProc[p] = 0;
            }
        }
        const auto idle = static_cast<unsigned>(std::count(freeProc.begin(), freeProc.end(), 1));
        // ready_p sets are disjoint from each other and from ready_all, so any surplus in
        // ready is a node that only a barrier can release
        std::size_t available = state.readyAll().size();
        for (unsigned p = 0; p < numProcs; ++p) {
            available += state.readyP(p).size();
        }
        if (state.readyAll().empty() && idle >= idleThreshold && ready.size() > available) {
            endStep = true;
        }
    }
    return state.assignment();
}

Assignment sourceSchedule(const ComputationalDag &dag, const MachineParams &machine) {
    const std::size_t n = dag.numNodes();
    const unsigned numProcs = machine.numProcessors();
    Assignment a;
    a.proc.assign(n, kUnassigned);
    a.step.assign(n, kUnassigned);
    std::vector<std::size_t> unassignedPreds(n);
    std::vector<NodeId> sources;
    for (NodeId v = 0; v < n; ++v) {
        unassignedPreds[v] = dag.inDegree(v);
        if (unassignedPreds[v] == 0) {
            sources.push_back(v);
        }
    }
    std::size_t remaining = n;
    unsigned superstep = 0;
    std::vector<NodeId> nextSources;
    std::vector<NodeId> assignedNow;

    const auto assign = [&](NodeId v, unsigned p) {
        a.proc[v] = p;
        a.step[v] = superstep;
        --remaining;
        assignedNow.push_back(v);
    };

    while (remaining > 0) {
        assignedNow.clear();
        if (superstep == 0) {
            std::vector<char> isSource(n, 0);
            for (NodeId v : sources) {
                isSource[v] = 1;
            }
            constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
            std::vector<std::size_t> clusterOf(n, none);
            std::vector<std::vector<NodeId>> clusters;
            for (NodeId v : sources) {
                if (clusterOf[v] != none) {
                    continue;
                }
                NodeId partner = kNoNode;
                for (NodeId s : dag.successors(v)) {
                    for (NodeId u : dag.predecessors(s)) {
                        if (u != v && isSource[u]) {
                            partner = std::min(partner, u);
                        }
                    }
                }
                if (partner == kNoNode) {
                    continue;
                }
                if (clusterOf[partner] != none) {
                    clusterOf[v] = clusterOf[partner];
                    clusters[clusterOf[v]].push_back(v);
                } else {
                    clusterOf[v] = clusterOf[partner] = clusters.size();
                    clusters.push_back({v, partner});
                }
            }
            for (NodeId v : sources) {
                if (clusterOf[v] == none) {
                    clusterOf[v] = clusters.size();
                    clusters.push_back({v});
                }
            }
            for (auto &c : clusters) {
                std::sort(c.begin(), c.end());
            }
            std::sort(clusters.begin(), clusters.end(),
                      [](const auto &x, const auto &y) { return x.front() < y.front(); });
            unsigned p = 0;
            for (const auto &c : clusters) {
                for (NodeId v : c) {
                    assign(v, p);
                }
                p = (p + 1) % numProcs;
            }
        } else {
            std::sort(sources.begin(), sources.end(), [&](NodeId x, NodeId y) {
                return dag.work(x) != dag.work(y) ? dag.work(x) > dag.work(y) : x < y;
            });
            unsigned p = 0;
            for (NodeId v : sources) {
                assign(v, p);
                p = (p + 1) % numProcs;
            }
        }

        // absorb successors whose in-neighbors all sit on one processor, transitively
        for (std::size_t i = 0; i < assignedNow.size(); ++i) {
            const NodeId v = assignedNow[i];
            for (NodeId u : dag.successors(v)) {
                --unassignedPreds[u];
            }
            for (NodeId u : dag.successors(v)) {
                if (a.proc[u] != kUnassigned || unassignedPreds[u] != 0) {
                    continue;
                }
                const auto preds = dag.predecessors(u);
                const bool sameProc = std::all_of(preds.begin(), preds.end(),
                                                  [&](NodeId x) { return a.proc[x] == a.proc[v]; });
                if (sameProc) {
                    assign(u, a.proc[v]);
                }
            }
        }

        nextSources.clear();
        for (NodeId v : assignedNow) {
            for (NodeId u : dag.successors(v)) {
                if (a.proc[u] == kUnassigned && unassignedPreds[u] == 0) {
                    nextSources.push_back(u);
                }
            }
        }
        std::sort(nextSources.begin(), nextSources.end());
        nextSources.erase(std::unique(nextSources.begin(), nextSources.end()), nextSources.end());
        sources.swap(nextSources);
        ++superstep;
    }
    return a;
}

} // namespace bspsched
