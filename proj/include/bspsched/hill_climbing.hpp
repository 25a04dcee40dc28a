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

#include "bspsched/budget.hpp"
#include "bspsched/dag.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/schedule.hpp"

#include <cstdint>

namespace bspsched {

struct HcOptions {
    Budget budget;
    /// Recompute the full cost after every accepted move and throw std::logic_error on a
    /// mismatch with the incremental bookkeeping. Slow; meant for tests.
    bool verifyIncremental = false;
};

struct HcResult {
    BspSchedule schedule;
    std::uint64_t moves = 0;
    std::uint64_t evaluations = 0;
    /// True when the search stopped because a full pass found no improving move.
    bool localMinimum = false;
};

/// First-improvement hill climbing over single-node moves to any processor in supersteps
/// s-1, s, s+1, with the lazy communication schedule kept implicitly. The number of
/// superstep indices never grows. The result carries the lazy communication schedule; if
/// the input's own communication schedule was cheaper, the input is returned unchanged.
HcResult hcImprove(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   const HcOptions &options = {});

/// First-improvement retiming of direct transfers (v, pi(v), q, s) within
/// [tau(v), s0 - 1], where s0 is the first superstep with a successor of v on q.
/// Throws std::invalid_argument if the schedule forwards values through other processors.
HcResult hccsImprove(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                     const HcOptions &options = {});

/// hcImprove on 90% of the budget, then hccsImprove on the rest.
HcResult hcAndHccs(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   const Budget &budget);

} // namespace bspsched
