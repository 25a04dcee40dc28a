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

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bspsched {

using NodeId = std::uint32_t;
using Weight = std::int64_t;

struct Edge {
    NodeId source;
    NodeId target;

    auto operator<=>(const Edge &) const = default;
};

class CycleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Computational DAG with per-node work weight w(v) and communication weight c(v).
///
/// Nodes are dense ids 0..n-1. The container accepts whatever it is given so that
/// validateDag() can report problems; algorithms assume a DAG that passed validation.
/// Adjacency lists are kept sorted by node id.
class ComputationalDag {
  public:
    ComputationalDag() = default;
    explicit ComputationalDag(std::size_t numNodes, Weight work = 1, Weight comm = 1);

    NodeId addNode(Weight work, Weight comm);

    /// Stores the edge as given. Out-of-range endpoints are kept in edges() only.
    void addEdge(NodeId source, NodeId target);

    std::size_t numNodes() const { return work_.size(); }
    std::size_t numEdges() const { return edges_.size(); }

    Weight work(NodeId v) const { return work_[v]; }
    Weight comm(NodeId v) const { return comm_[v]; }
    void setWork(NodeId v, Weight w) { work_[v] = w; }
    void setComm(NodeId v, Weight c) { comm_[v] = c; }

    std::span<const NodeId> successors(NodeId v) const { return out_[v]; }
    std::span<const NodeId> predecessors(NodeId v) const { return in_[v]; }
    std::size_t outDegree(NodeId v) const { return out_[v].size(); }
    std::size_t inDegree(NodeId v) const { return in_[v].size(); }

    const std::vector<Edge> &edges() const { return edges_; }
    bool hasEdge(NodeId source, NodeId target) const;

    Weight totalWork() const;
    Weight totalComm() const;

    bool operator==(const ComputationalDag &other) const;

  private:
    std::vector<Weight> work_;
    std::vector<Weight> comm_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
    std::vector<Edge> edges_;
};

struct DagViolation {
    enum class Kind { Cycle, SelfLoop, DuplicateEdge, NegativeWeight, NodeOutOfRange };

    Kind kind;
    std::string detail;
};

/// Empty result means the DAG satisfies every structural invariant.
std::vector<DagViolation> validateDag(const ComputationalDag &dag);

/// Throws std::invalid_argument describing the first violation, if any.
void requireValidDag(const ComputationalDag &dag);

/// Kahn's algorithm; ties broken by ascending node id. Throws CycleError.
std::vector<NodeId> topologicalOrder(const ComputationalDag &dag);

/// Longest path (sum of work weights, including both endpoints) from each node to a sink.
std::vector<Weight> bottomLevels(const ComputationalDag &dag);

/// Number of nodes on the longest directed path.
std::size_t longestPathNodes(const ComputationalDag &dag);

const char *kindName(DagViolation::Kind kind);

} // namespace bspsched
