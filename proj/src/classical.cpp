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

#include "bspsched/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bspsched {

double ClassicalSchedule::makespan() const {
    double m = 0.0;
    for (double f : finish) {
        m = std::max(m, f);
    }
    return m;
}

std::string checkClassicalSchedule(const ComputationalDag &dag, const ClassicalSchedule &schedule,
                                   unsigned numProcessors) {
    const std::size_t n = dag.numNodes();
    if (schedule.proc.size() != n || schedule.start.size() != n || schedule.finish.size() != n) {
        return "schedule does not cover the DAG";
    }
    constexpr double eps = 1e-9;
    for (NodeId v = 0; v < n; ++v) {
        if (schedule.proc[v] >= numProcessors) {
            return "node " + std::to_string(v) + " on a nonexistent processor";
        }
        if (std::abs(schedule.finish[v] - schedule.start[v] - static_cast<double>(dag.work(v))) > eps) {
            return "node " + std::to_string(v) + " does not run for w(v)";
        }
        for (NodeId u : dag.predecessors(v)) {
            if (schedule.start[v] + eps < schedule.finish[u]) {
                return "node " + std::to_string(v) + " starts before predecessor " + std::to_string(u) + " finishes";
            }
        }
    }
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return std::tie(schedule.proc[a], schedule.start[a], schedule.finish[a]) <
               std::tie(schedule.proc[b], schedule.start[b], schedule.finish[b]);
    });
    for (std::size_t i = 1; i < n; ++i) {
        const NodeId a = order[i - 1];
        const NodeId b = order[i];
        if (schedule.proc[a] == schedule.proc[b] && schedule.start[b] + eps < schedule.finish[a]) {
            return "nodes " + std::to_string(a) + " and " + std::to_string(b) + " overlap";
        }
    }
    return {};
}

BspSchedule classicalToBsp(const ComputationalDag &dag, const ClassicalSchedule &schedule) {
    const std::size_t n = dag.numNodes();
    if (schedule.size() != n) {
        throw std::invalid_argument("classical schedule does not cover the DAG");
    }
    // position order (start, topological rank) settles ties among zero-work nodes
    const auto topo = topologicalOrder(dag);
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        rank[topo[i]] = i;
    }
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return std::tie(schedule.start[a], rank[a]) < std::tie(schedule.start[b], rank[b]);
    });
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) {
        position[order[i]] = i;
    }

    constexpr unsigned unassigned = std::numeric_limits<unsigned>::max();
    std::vector<unsigned> step(n, unassigned);
    std::size_t remaining = n;
    unsigned superstep = 0;
    while (remaining > 0) {
        // earliest node that still waits for an unassigned node on another processor
        NodeId blocker = 0;
        bool found = false;
        for (NodeId v : order) {
            if (step[v] != unassigned) {
                continue;
            }
            const auto preds = dag.predecessors(v);
            const bool blocked = std::any_of(preds.begin(), preds.end(), [&](NodeId u) {
                return step[u] == unassigned && schedule.proc[u] != schedule.proc[v];
            });
            if (blocked) {
                blocker = v;
                found = true;
                break;
            }
        }
        std::size_t assigned = 0;
        for (NodeId v : order) {
            if (step[v] == unassigned && (!found || schedule.start[v] < schedule.start[blocker])) {
                step[v] = superstep;
                ++assigned;
            }
        }
        if (assigned == 0) {
            for (NodeId v : order) {
                if (step[v] == unassigned && position[v] < position[blocker]) {
                    step[v] = superstep;
                    ++assigned;
                }
            }
        }
        if (assigned == 0) {
            throw std::invalid_argument("classical schedule violates precedence");
        }
        remaining -= assigned;
        ++superstep;
    }
    Assignment a{schedule.proc, step};
    return withLazyComm(dag, a);
}

std::string writeClassicalText(const ClassicalSchedule &schedule) {
    std::ostringstream out;
    for (std::size_t v = 0; v < schedule.size(); ++v) {
        out << v << ' ' << schedule.proc[v] << ' ' << schedule.start[v] << '\n';
    }
    return out.str();
}

} // namespace bspsched
