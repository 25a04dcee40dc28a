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

#include "bspsched/dag.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>

namespace bspsched {

ComputationalDag::ComputationalDag(std::size_t numNodes, Weight work, Weight comm)
    : work_(numNodes, work), comm_(numNodes, comm), out_(numNodes), in_(numNodes) {}

NodeId ComputationalDag::addNode(Weight work, Weight comm) {
    work_.push_back(work);
    comm_.push_back(comm);
    out_.emplace_back();
    in_.emplace_back();
    return static_cast<NodeId>(work_.size() - 1);
}

void ComputationalDag::addEdge(NodeId source, NodeId target) {
    edges_.push_back({source, target});
    if (source >= numNodes() || target >= numNodes()) {
        return;
    }
    auto &out = out_[source];
    out.insert(std::upper_bound(out.begin(), out.end(), target), target);
    auto &in = in_[target];
    in.insert(std::upper_bound(in.begin(), in.end(), source), source);
}

bool ComputationalDag::hasEdge(NodeId source, NodeId target) const {
    if (source >= numNodes()) {
        return false;
    }
    return std::binary_search(out_[source].begin(), out_[source].end(), target);
}

Weight ComputationalDag::totalWork() const { return std::accumulate(work_.begin(), work_.end(), Weight{0}); }

Weight ComputationalDag::totalComm() const { return std::accumulate(comm_.begin(), comm_.end(), Weight{0}); }

bool ComputationalDag::operator==(const ComputationalDag &other) const {
    if (work_ != other.work_ || comm_ != other.comm_) {
        return false;
    }
    auto lhs = edges_;
    auto rhs = other.edges_;
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    return lhs == rhs;
}

const char *kindName(DagViolation::Kind kind) {
    switch (kind) {
    case DagViolation::Kind::Cycle:
        return "cycle";
    case DagViolation::Kind::SelfLoop:
        return "self-loop";
    case DagViolation::Kind::DuplicateEdge:
        return "duplicate edge";
    case DagViolation::Kind::NegativeWeight:
        return "negative weight";
    case DagViolation::Kind::NodeOutOfRange:
        return "node index out of range";
    }
    return "unknown";
}

std::vector<DagViolation> validateDag(const ComputationalDag &dag) {
    std::vector<DagViolation> violations;
    const std::size_t n = dag.numNodes();

    for (NodeId v = 0; v < n; ++v) {
        if (dag.work(v) < 0) {
            violations.push_back({DagViolation::Kind::NegativeWeight,
                                  "node " + std::to_string(v) + " has work weight " + std::to_string(dag.work(v))});
        }
        if (dag.comm(v) < 0) {
            violations.push_back({DagViolation::Kind::NegativeWeight, "node " + std::to_string(v) +
                                                                          " has communication weight " +
                                                                          std::to_string(dag.comm(v))});
        }
    }

    bool indicesOk = true;
    for (const auto &e : dag.edges()) {
        if (e.source >= n || e.target >= n) {
            indicesOk = false;
            violations.push_back({DagViolation::Kind::NodeOutOfRange, "edge (" + std::to_string(e.source) + "," +
                                                                          std::to_string(e.target) + ") with n=" +
                                                                          std::to_string(n)});
        } else if (e.source == e.target) {
            violations.push_back({DagViolation::Kind::SelfLoop, "edge (" + std::to_string(e.source) + "," +
                                                                    std::to_string(e.target) + ")"});
        }
    }

    auto sorted = dag.edges();
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1] && (i < 2 || sorted[i - 2] != sorted[i])) {
            violations.push_back({DagViolation::Kind::DuplicateEdge, "edge (" + std::to_string(sorted[i].source) +
                                                                         "," + std::to_string(sorted[i].target) +
                                                                         ")"});
        }
    }

    if (indicesOk) {
        std::vector<std::size_t> indeg(n, 0);
        for (NodeId v = 0; v < n; ++v) {
            indeg[v] = dag.inDegree(v);
        }
        std::vector<NodeId> stack;
        for (NodeId v = 0; v < n; ++v) {
            if (indeg[v] == 0) {
                stack.push_back(v);
            }
        }
        std::size_t visited = 0;
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            ++visited;
            for (NodeId s : dag.successors(v)) {
                if (--indeg[s] == 0) {
                    stack.push_back(s);
                }
            }
        }
        if (visited != n) {
            violations.push_back(
                {DagViolation::Kind::Cycle, std::to_string(n - visited) + " node(s) lie on or behind a cycle"});
        }
    }
    return violations;
}

void requireValidDag(const ComputationalDag &dag) {
    const auto violations = validateDag(dag);
    if (!violations.empty()) {
        throw std::invalid_argument(std::string("invalid DAG: ") + kindName(violations.front().kind) + ": " +
                                    violations.front().detail);
    }
}

std::vector<NodeId> topologicalOrder(const ComputationalDag &dag) {
    const std::size_t n = dag.numNodes();
    std::vector<std::size_t> indeg(n);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v) {
        indeg[v] = dag.inDegree(v);
        if (indeg[v] == 0) {
            ready.push(v);
        }
    }
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const NodeId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (NodeId s : dag.successors(v)) {
            if (--indeg[s] == 0) {
                ready.push(s);
            }
        }
    }
    if (order.size() != n) {
        throw CycleError("graph contains a directed cycle");
    }
    return order;
}

std::vector<Weight> bottomLevels(const ComputationalDag &dag) {
    const auto order = topologicalOrder(dag);
    std::vector<Weight> level(dag.numNodes(), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Weight best = 0;
        for (NodeId s : dag.successors(*it)) {
            best = std::max(best, level[s]);
        }
        level[*it] = best + dag.work(*it);
    }
    return level;
}

std::size_t longestPathNodes(const ComputationalDag &dag) {
    const auto order = topologicalOrder(dag);
    std::vector<std::size_t> depth(dag.numNodes(), 1);
    std::size_t best = dag.numNodes() == 0 ? 0 : 1;
    for (NodeId v : order) {
        for (NodeId s : dag.successors(v)) {
            depth[s] = std::max(depth[s], depth[v] + 1);
            best = std::max(best, depth[s]);
        }
    }
    return best;
}

} // namespace bspsched
