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

#include "bspsched/dag.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace bspsched {

/// Edges (u, v) whose only u -> v path is the edge itself. Sorted.
std::vector<Edge> contractableEdges(const ComputationalDag &dag);

/// Sorts the edges by w(u) + w(v) (then u, then v) and returns the edge with the largest
/// c(u) among the first ceil(k/3); ties go to the smaller (u, v). Throws on an empty set.
Edge selectContraction(const ComputationalDag &dag, const std::vector<Edge> &contractable);

/// One contraction: u and v merge into the fresh id `merged`. The neighbor lists are the
/// ones u and v had right before, without the contracted edge itself.
struct ContractionRecord {
    NodeId u;
    NodeId v;
    NodeId merged;
    std::vector<NodeId> inU;
    std::vector<NodeId> outU;
    std::vector<NodeId> inV;
    std::vector<NodeId> outV;
};

/// DAG whose nodes keep their ids while edges are contracted; merged nodes get fresh ids
/// after all existing ones. Contractions can be undone in reverse order.
class ContractibleDag {
  public:
    explicit ContractibleDag(const ComputationalDag &dag);

    std::size_t numAlive() const { return numAlive_; }
    std::size_t capacity() const { return work_.size(); }
    bool alive(NodeId v) const { return alive_[v]; }
    Weight work(NodeId v) const { return work_[v]; }
    Weight comm(NodeId v) const { return comm_[v]; }
    const std::vector<NodeId> &successors(NodeId v) const { return out_[v]; }
    const std::vector<NodeId> &predecessors(NodeId v) const { return in_[v]; }

    /// Contractable edges among alive nodes, maintained across contractions.
    const std::set<std::tuple<Weight, NodeId, NodeId>> &contractable() const { return contractable_; }

    /// Applies selectContraction's rule to the maintained set. Empty when no edge remains.
    std::optional<Edge> selectEdge() const;

    /// Requires (u, v) to be a contractable edge.
    ContractionRecord contract(NodeId u, NodeId v);
    /// Undoes the most recent contraction that is still applied.
    void undo(const ContractionRecord &record);

    /// Alive nodes renumbered densely in ascending id order; ids[k] is the id of dense node k.
    ComputationalDag compact(std::vector<NodeId> *ids = nullptr) const;

  private:
    void refreshAround(NodeId m);
    void eraseEdgeKey(NodeId a, NodeId b);
    void insertEdgeKey(NodeId a, NodeId b);

    std::vector<Weight> work_;
    std::vector<Weight> comm_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> in_;
    std::vector<bool> alive_;
    std::size_t numAlive_ = 0;
    std::set<std::tuple<Weight, NodeId, NodeId>> contractable_;
    std::vector<std::uint32_t> mark_;
    std::vector<std::uint32_t> descMark_;
    std::uint32_t stamp_ = 0;
};

/// The contractions applied to an original DAG, together with the coarse result.
class CoarseningSequence {
  public:
    CoarseningSequence(const ComputationalDag &original, std::vector<ContractionRecord> records,
                       ContractibleDag coarse);

    const ComputationalDag &original() const { return original_; }
    const std::vector<ContractionRecord> &records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    /// Working graph after all contractions.
    const ContractibleDag &coarseWorking() const { return coarse_; }
    /// Dense coarse DAG; coarseIds()[k] is the working id of coarse node k.
    const ComputationalDag &coarseDag() const { return coarseDag_; }
    const std::vector<NodeId> &coarseIds() const { return coarseIds_; }

    /// Dense DAG after the first k contractions, rebuilt by replaying them.
    ComputationalDag graphAt(std::size_t k, std::vector<NodeId> *ids = nullptr) const;

  private:
    ComputationalDag original_;
    std::vector<ContractionRecord> records_;
    ContractibleDag coarse_;
    ComputationalDag coarseDag_;
    std::vector<NodeId> coarseIds_;
};

/// Contracts selected edges until at most ceil(ratio * n) nodes remain or no contractable
/// edge is left. Throws std::invalid_argument unless 0 < ratio < 1 and ceil(ratio * n) >= 2.
CoarseningSequence coarsen(const ComputationalDag &dag, double ratio);

} // namespace bspsched
