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
#include "bspsched/machine.hpp"
#include "bspsched/schedule.hpp"

#include <set>
#include <vector>

namespace bspsched {

/// Bookkeeping of the BSPg simulation that node selection depends on: the partial
/// assignment, the ready sets, and per (node, processor) scores.
///
/// score(v, p) sums c(u)/outdeg(u) over predecessors u of v such that u or one of its
/// successors is already placed on p. It is updated whenever a node is placed.
class BspgState {
  public:
    BspgState(const ComputationalDag &dag, unsigned numProcessors);

    void place(NodeId v, unsigned proc, unsigned step);
    bool isPlaced(NodeId v) const { return placed_[v] != 0; }

    double score(NodeId v, unsigned p) const { return score_[static_cast<std::size_t>(v) * numProcs_ + p]; }

    /// Highest score in readyP(p), or in readyAll() when readyP(p) is empty; ties go to
    /// the lowest node id. Throws std::logic_error when both sets are empty.
    NodeId chooseNode(unsigned p) const;

    std::set<NodeId> &readyP(unsigned p) { return readyP_[p]; }
    const std::set<NodeId> &readyP(unsigned p) const { return readyP_[p]; }
    std::set<NodeId> &readyAll() { return readyAll_; }
    const std::set<NodeId> &readyAll() const { return readyAll_; }

    const Assignment &assignment() const { return assignment_; }

  private:
    const ComputationalDag &dag_;
    unsigned numProcs_;
    Assignment assignment_;
    std::vector<char> placed_;
    std::vector<char> touched_; // [u * P + p]: u or a successor of u is on p
    std::vector<double> score_;
    std::vector<std::set<NodeId>> readyP_;
    std::set<NodeId> readyAll_;
};

/// Event-driven greedy BSP scheduler. A superstep closes once nothing is globally ready,
/// at least ceil(P/2) processors are idle and some ready node waits for the barrier.
Assignment bspg(const ComputationalDag &dag, const MachineParams &machine);

/// Layer-by-layer source scheduling with successor absorption.
Assignment sourceSchedule(const ComputationalDag &dag, const MachineParams &machine);

} // namespace bspsched
