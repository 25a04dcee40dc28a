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


// Independent reference implementations used by the tests. Nothing here calls the cost
// evaluator, the validator or the lazy communication builder of the library.

#pragma once

#include "bspsched/dag.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/schedule.hpp"

#include <functional>
#include <random>
#include <vector>

namespace oracle {

using bspsched::CommStep;
using bspsched::ComputationalDag;
using bspsched::MachineParams;
using bspsched::NodeId;
using bspsched::Weight;

/// Exact fraction over 128-bit integers, always reduced with a positive denominator.
struct Fraction {
    __int128 num = 0;
    __int128 den = 1;

    Fraction() = default;
    Fraction(__int128 n, __int128 d = 1);
    Fraction operator+(const Fraction &o) const;
    Fraction operator*(const Fraction &o) const;
    bool operator<(const Fraction &o) const { return num * o.den < o.num * den; }
    bool operator==(const Fraction &o) const { return num == o.num && den == o.den; }
    bool equals(const bspsched::Rational &r) const { return num == r.numerator() && den == r.denominator(); }
};

/// Edges only go from lower to higher ids, each present with probability edgeProb.
ComputationalDag randomDag(std::mt19937_64 &rng, std::size_t n, double edgeProb, Weight maxWork = 5,
                           Weight maxComm = 4);

/// Total cost recomputed from the definitions in exact fractions.
Fraction bruteForceCost(const ComputationalDag &dag, const MachineParams &machine, const std::vector<unsigned> &proc,
                        const std::vector<unsigned> &step, const std::vector<CommStep> &comm);

/// Edge rule, send rule and the absence of self-sends.
bool bruteForceValid(const ComputationalDag &dag, unsigned P, const std::vector<unsigned> &proc,
                     const std::vector<unsigned> &step, const std::vector<CommStep> &comm);

/// Each value sent straight from its producer to every other processor that needs it, in
/// the phase right before the first need there.
std::vector<CommStep> lazyComm(const ComputationalDag &dag, const std::vector<unsigned> &proc,
                               const std::vector<unsigned> &step);

/// Calls visit for every (proc, step) with step < S that admits the lazy schedule.
void forEachAssignment(const ComputationalDag &dag, unsigned P, unsigned S,
                       const std::function<void(const std::vector<unsigned> &, const std::vector<unsigned> &)> &visit);

/// Minimum over all assignments with step < S and all direct-send communication schedules
/// that send each needed value once per destination.
Fraction optimalDirectCost(const ComputationalDag &dag, const MachineParams &machine, unsigned S);

/// Minimum over the same schedules with the assignment fixed.
Fraction optimalRetimingCost(const ComputationalDag &dag, const MachineParams &machine,
                             const std::vector<unsigned> &proc, const std::vector<unsigned> &step);

/// True when no single hill-climbing move lowers the lazy cost. A move takes one node to
/// another processor in its superstep, or to any processor in the superstep before or
/// after, staying inside [0, S).
bool isHcLocalMinimum(const ComputationalDag &dag, const MachineParams &machine, const std::vector<unsigned> &proc,
                      const std::vector<unsigned> &step, unsigned S);

} // namespace oracle
