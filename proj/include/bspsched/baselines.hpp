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

#include "bspsched/classical.hpp"
#include "bspsched/dag.hpp"
#include "bspsched/machine.hpp"

#include <cstdint>

namespace bspsched {

/// Work-stealing simulation. All sources start on processor 0's stack; a node that becomes
/// ready is pushed on the stack of the processor that finished its last predecessor.
/// Idle processors pop their own top, otherwise steal the bottom of a random nonempty stack.
ClassicalSchedule cilkSchedule(const ComputationalDag &dag, const MachineParams &machine, std::uint64_t seed);

enum class ListPolicy { BlEst, Etf };

/// Earliest-start-time list scheduling. A predecessor on another processor delays the
/// start by g * c(u) * (mean off-diagonal lambda).
ClassicalSchedule listSchedule(const ComputationalDag &dag, const MachineParams &machine, ListPolicy policy);

} // namespace bspsched
