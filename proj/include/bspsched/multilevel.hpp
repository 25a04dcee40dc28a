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
#include "bspsched/coarsening.hpp"
#include "bspsched/ilp_schedulers.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/schedule.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace bspsched {

class TooSmallForMultilevel : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

using CoarseSolver = std::function<BspSchedule(const ComputationalDag &, const MachineParams &)>;

struct MultilevelConfig {
    std::vector<double> ratios{0.15, 0.30};
    /// Hill climbing runs after this many uncontractions, and once at the end.
    std::size_t refineInterval = 5;
    /// Per refinement; the move cap is the main limit.
    Budget refineBudget = [] {
        Budget b;
        b.maxMoves = 100;
        return b;
    }();
    /// HCcs after uncoarsening.
    Budget commBudget;
    bool runIlpCs = true;
    IlpOptions ilpCs;
    /// Schedules the coarse DAG. BSPg followed by HC and HCcs when empty.
    CoarseSolver coarseSolver;
};

struct MultilevelRun {
    double ratio = 0.0;
    std::size_t coarseNodes = 0;
    BspSchedule schedule;
    Weight costScaled = 0;
};

struct MultilevelResult {
    BspSchedule schedule;
    std::vector<MultilevelRun> runs;
    std::size_t selected = 0;
};

/// ceil(r * n) >= 2 for the smallest configured ratio r.
bool multilevelApplicable(std::size_t numNodes, const MultilevelConfig &config = {});

/// Undoes the contractions in reverse order. Split nodes inherit the merged node's
/// processor and superstep; hill climbing refines every refineInterval steps and at the end.
/// The result is on the original DAG and carries the lazy communication schedule.
BspSchedule uncoarsenRefine(const CoarseningSequence &sequence, const BspSchedule &coarseSchedule,
                            const MachineParams &machine, const MultilevelConfig &config = {});

/// Coarsen, solve, uncoarsen with refinement, then HCcs and ILPcs, for every ratio;
/// returns the cheapest result. Throws TooSmallForMultilevel below the size floor.
MultilevelResult multilevelSchedule(const ComputationalDag &dag, const MachineParams &machine,
                                    const MultilevelConfig &config = {});

} // namespace bspsched
