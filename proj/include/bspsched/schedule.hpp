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

#include <compare>
#include <filesystem>
#include <string>
#include <vector>

namespace bspsched {

/// The output of `node` is sent from processor `from` to processor `to` in the
/// communication phase of superstep `step`.
struct CommStep {
    NodeId node;
    unsigned from;
    unsigned to;
    unsigned step;

    auto operator<=>(const CommStep &) const = default;
};

/// Processor and superstep assignment (pi, tau) without a communication schedule.
struct Assignment {
    std::vector<unsigned> proc;
    std::vector<unsigned> step;

    std::size_t size() const { return proc.size(); }
    unsigned numSupersteps() const;
};

class BspSchedule {
  public:
    BspSchedule() = default;
    BspSchedule(std::vector<unsigned> proc, std::vector<unsigned> step, std::vector<CommStep> comm = {});
    BspSchedule(Assignment assignment, std::vector<CommStep> comm);

    std::size_t numNodes() const { return proc_.size(); }
    unsigned proc(NodeId v) const { return proc_[v]; }
    unsigned superstep(NodeId v) const { return step_[v]; }
    const std::vector<unsigned> &procs() const { return proc_; }
    const std::vector<unsigned> &supersteps() const { return step_; }
    const std::vector<CommStep> &comm() const { return comm_; }
    Assignment assignment() const { return {proc_, step_}; }

    void assign(NodeId v, unsigned proc, unsigned step) {
        proc_[v] = proc;
        step_[v] = step;
    }
    void setComm(std::vector<CommStep> comm);

    /// 1 + the largest superstep index used by a node or a communication step.
    unsigned numSupersteps() const;

    /// Lowest superstep/comm index renumbering that drops unused indices. Order is preserved.
    void compactSupersteps();

    bool operator==(const BspSchedule &) const = default;

  private:
    std::vector<unsigned> proc_;
    std::vector<unsigned> step_;
    std::vector<CommStep> comm_;
};

struct ScheduleViolation {
    enum class Kind { Shape, ProcessorOutOfRange, EdgeRule, SendRule, SelfSend };

    Kind kind;
    std::string detail;
};

/// Checks index ranges, the edge rule and the send rule. Empty result means valid.
std::vector<ScheduleViolation> validateSchedule(const ComputationalDag &dag, const MachineParams &machine,
                                                const BspSchedule &schedule);

bool isValidSchedule(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule);

/// Every required value is sent directly from its producer in the last phase before it is
/// first needed on the target processor. Sorted by (node, target processor).
/// Throws std::invalid_argument when a cross-processor edge does not strictly increase tau.
std::vector<CommStep> lazyCommSchedule(const ComputationalDag &dag, const std::vector<unsigned> &proc,
                                       const std::vector<unsigned> &step);

BspSchedule withLazyComm(const ComputationalDag &dag, const Assignment &assignment);

/// True when every tuple of the schedule's communication sends a value from the processor
/// that computed it.
bool hasOnlyDirectSends(const BspSchedule &schedule);

/// Drops direct-send tuples that no successor (or onward send) uses, and duplicate
/// transfers of the same value to the same processor (keeping the earliest).
void pruneUnusedComm(const ComputationalDag &dag, BspSchedule &schedule);

const char *kindName(ScheduleViolation::Kind kind);

// Schedule text format: header "P S n", n lines "node proc superstep", then one line
// "node from to superstep" per communication step.
std::string writeScheduleText(const BspSchedule &schedule, unsigned numProcessors);
BspSchedule parseScheduleText(std::string_view text, unsigned *numProcessors = nullptr);
void saveSchedule(const BspSchedule &schedule, unsigned numProcessors, const std::filesystem::path &path);
BspSchedule loadSchedule(const std::filesystem::path &path, unsigned *numProcessors = nullptr);

} // namespace bspsched
