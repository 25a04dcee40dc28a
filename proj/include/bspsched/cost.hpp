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

#include <string>
#include <vector>

namespace bspsched {

/// Exact cost of a schedule. Communication quantities are held in units of
/// 1/denominator so that rational NUMA coefficients never round.
///
/// Rows exist for every superstep index below schedule.numSupersteps(); indices with no
/// node and no communication are marked empty and charge nothing, not even latency.
struct CostBreakdown {
    Weight denominator = 1;
    Weight g = 0;
    std::vector<Weight> work;        // C_work(s)
    std::vector<Weight> commScaled;  // C_comm(s) * denominator
    std::vector<Weight> latency;     // l for nonempty supersteps, 0 otherwise
    std::vector<bool> nonempty;
    std::vector<std::vector<Weight>> sendScaled; // [p][s]
    std::vector<std::vector<Weight>> recScaled;  // [p][s]
    Weight totalScaled = 0;

    std::size_t numSupersteps() const { return work.size(); }
    std::size_t numNonemptySupersteps() const;
    Rational comm(std::size_t s) const { return Rational(commScaled[s], denominator); }
    /// C(s) = C_work(s) + g * C_comm(s) + l
    Rational superstepCost(std::size_t s) const;
    Rational total() const { return Rational(totalScaled, denominator); }

    /// "superstep,work,comm,latency,total", one row per nonempty superstep.
    std::string toCsv() const;
    std::string toJson() const;
};

/// Requires a valid schedule; throws std::invalid_argument otherwise.
CostBreakdown evaluateCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule);

/// Same total as evaluateCost(...).totalScaled, without validation or per-processor tables.
Weight scaledCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule);

/// Total cost as an exact rational.
Rational totalCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule);

/// Cost of putting every node on processor 0 in a single superstep: sum of w plus l.
Weight trivialScaledCost(const ComputationalDag &dag, const MachineParams &machine);

} // namespace bspsched
