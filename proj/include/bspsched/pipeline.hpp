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
#include "bspsched/ilp_schedulers.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/multilevel.hpp"
#include "bspsched/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bspsched {

enum class BudgetMode {
    /// Wall-clock limits per stage.
    Wall,
    /// Deterministic move, evaluation, node and iteration counts.
    Ops,
};

enum class IlpInitGate { Auto, Always, Never };

struct StageTimes {
    double ilpFull = 3600;
    double hc = 300;
    double ilpCs = 300;
    double ilpPartPerInterval = 180;
    double ilpInit = 120;
};

struct StageOps {
    /// Cost evaluations shared by HC and HCcs (90% / 10%) per initial schedule.
    std::uint64_t hcEvaluations = 2'000'000;
    /// Simplex iterations and branch-and-bound nodes per ILP solve.
    std::uint64_t ilpIterations = 20'000;
    std::uint64_t ilpNodes = 100;
    /// Simplex work per ILP solve (see milp::SolveOptions::workLimit); about 1e9 per
    /// second on a desktop core.
    std::uint64_t ilpWork = 500'000'000;
    /// ILPinit solves one model per batch, each with these shares.
    std::uint64_t ilpInitIterationsPerBatch = 1'000;
    std::uint64_t ilpInitWorkPerBatch = 100'000'000;
};

struct PipelineConfig {
    BudgetMode budgetMode = BudgetMode::Wall;
    StageTimes times;
    StageOps ops;
    IlpInitGate ilpInit = IlpInitGate::Auto;
    bool runIlpFull = true;
    bool runIlpPart = true;
    bool runIlpCs = true;
    /// Back-to-front sweeps over the ILPpart intervals.
    unsigned ilpPartPasses = 1;
    std::size_t ilpFullVariableLimit = kIlpFullVariableLimit;
    std::size_t ilpPartVariableLimit = kIlpPartVariableLimit;
    /// Built-in branch and bound when null.
    const milp::MilpBackend *backend = nullptr;
    /// Models the built-in backend accepts at all.
    std::size_t builtinMaxVariables = milp::SolveOptions{}.maxVariables;
    /// With no external backend, ILPfull and ILPpart limits are clamped to this: the dense
    /// simplex slows sharply beyond it. Single-superstep intervals may still exceed it.
    std::size_t builtinTargetVariables = 1000;
    std::uint64_t seed = 1;

    Budget hcBudget() const;
    IlpOptions ilpOptions(double seconds) const;
    bool ilpInitEnabled(unsigned numProcessors) const;
    std::size_t effectiveVariableLimit(std::size_t limit) const;
};

/// Wall-clock budgets as configured.
PipelineConfig wallClockConfig();
/// Operation-count budgets; results are reproducible.
PipelineConfig operationsConfig();

struct StageRecord {
    std::string stage;
    Weight costScaled = 0;
    double seconds = 0.0;
    bool accepted = false;
};

struct PipelineResult {
    BspSchedule schedule;
    Weight costScaled = 0;
    std::vector<StageRecord> stages;
    bool provenOptimal = false;
};

/// Initializers (BSPg, Source, and ILPinit when gated in) each refined by HC and HCcs; the
/// cheapest continues through ILPfull when small enough, otherwise through ILPpart and
/// ILPcs. Every stage keeps its input unless it finds something no more expensive.
PipelineResult runPipeline(const ComputationalDag &dag, const MachineParams &machine,
                           const PipelineConfig &config = {});

/// Multilevel scheduling with the pipeline (without ILPcs) on the coarse DAG.
/// Throws TooSmallForMultilevel below the size floor.
MultilevelResult runMultilevel(const ComputationalDag &dag, const MachineParams &machine,
                               const PipelineConfig &config = {}, MultilevelConfig multilevel = {});

/// pipeline, multilevel, cilk, blest, etf, bspg, source, hc (BSPg followed by HC and HCcs).
const std::vector<std::string> &algorithmNames();

/// Runs one algorithm by name; the result carries a valid communication schedule.
BspSchedule runAlgorithm(const std::string &name, const ComputationalDag &dag, const MachineParams &machine,
                         const PipelineConfig &config = {});

} // namespace bspsched
