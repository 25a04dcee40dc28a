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
#include "bspsched/schedule.hpp"

#include <string>
#include <vector>

namespace bspsched {

/// Classical schedule: each node runs on one processor from start to start + w(v).
struct ClassicalSchedule {
    std::vector<unsigned> proc;
    std::vector<double> start;
    std::vector<double> finish;

    std::size_t size() const { return proc.size(); }
    double makespan() const;
};

/// Checks per-processor non-overlap and that each node starts after its predecessors finish.
/// Returns a description of the first problem found, or an empty string.
std::string checkClassicalSchedule(const ComputationalDag &dag, const ClassicalSchedule &schedule,
                                   unsigned numProcessors);

/// Cuts the classical schedule into supersteps: the current computation phase runs until
/// the earliest start of a node that still waits for an unassigned node on another
/// processor. The communication schedule is the lazy one.
BspSchedule classicalToBsp(const ComputationalDag &dag, const ClassicalSchedule &schedule);

/// "node proc start" lines.
std::string writeClassicalText(const ClassicalSchedule &schedule);

} // namespace bspsched
