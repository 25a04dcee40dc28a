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
#include "bspsched/milp/model.hpp"
#include "bspsched/schedule.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bspsched {

inline constexpr std::size_t kIlpFullVariableLimit = 20000;
inline constexpr std::size_t kIlpPartVariableLimit = 4000;
inline constexpr std::size_t kIlpInitVariableLimit = 2000;

class VariableBudgetExceeded : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct IlpOptions {
    milp::SolveOptions solve;
    /// Built-in branch and bound when null.
    const milp::MilpBackend *backend = nullptr;
};

struct IlpFullOptions : IlpOptions {
    /// Number of superstep indices in the model. Defaults to the warm start's count.
    std::optional<unsigned> numSupersteps;
    /// Throw VariableBudgetExceeded when estimateIlpVariables reaches this limit.
    std::size_t variableLimit = kIlpFullVariableLimit;
};

struct IlpOutcome {
    BspSchedule schedule;
    milp::SolveStatus status = milp::SolveStatus::NoSolution;
    /// The returned schedule differs from the input.
    bool changed = false;
};

/// |V0| * |S0| * P^2, the size of the assignment and communication variable families.
inline std::size_t estimateIlpVariables(std::size_t nodes, std::size_t supersteps, unsigned numProcessors) {
    return nodes * supersteps * numProcessors * numProcessors;
}

/// The full scheduling model over S superstep indices: comp and direct-send comm binaries,
/// per-superstep work and h-relation maxima, and a latency indicator per superstep.
milp::MilpModel buildIlpFullModel(const ComputationalDag &dag, const MachineParams &machine, unsigned numSupersteps);

/// Whole-problem model. Optimal status means optimal among direct-send schedules with at
/// most S superstep indices. The result never costs more than the warm start.
IlpOutcome ilpFull(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &warmStart,
                   const IlpFullOptions &options = {});

/// Disjoint superstep intervals covering [0, S), built from the back. An interval grows
/// towards the front while its estimate stays within `limit`; it holds at least one superstep.
std::vector<std::pair<unsigned, unsigned>> splitIntervals(const BspSchedule &schedule, unsigned numProcessors,
                                                          std::size_t limit = kIlpPartVariableLimit);

/// Re-optimizes the nodes in supersteps [first, last] together with the communication
/// phases first-1 .. last. Values needed after the interval must be present by its end;
/// communication of values unrelated to the interval stays fixed. The input is returned
/// unless the whole-schedule cost does not increase. Schedules that forward values through
/// intermediate processors are returned unchanged.
IlpOutcome ilpPart(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   std::pair<unsigned, unsigned> interval, const IlpOptions &options = {});

/// Re-times every required direct transfer within its feasible window with the assignment
/// fixed. Throws std::invalid_argument for schedules with forwarded values.
IlpOutcome ilpCs(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                 const IlpOptions &options = {});

/// Batch size used by ilpInit: max(1, floor(2000 / (3 P^2))).
std::size_t ilpInitBatchSize(unsigned numProcessors);

/// Schedules the nodes batch by batch in topological order, each batch into the three
/// supersteps following the last used one.
Assignment ilpInit(const ComputationalDag &dag, const MachineParams &machine, const IlpOptions &options = {});

} // namespace bspsched
