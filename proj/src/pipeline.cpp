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


#include "bspsched/pipeline.hpp"

#include "bspsched/baselines.hpp"
#include "bspsched/classical.hpp"
#include "bspsched/cost.hpp"
#include "bspsched/greedy_init.hpp"
#include "bspsched/hill_climbing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bspsched {

Budget PipelineConfig::hcBudget() const {
    return budgetMode == BudgetMode::Wall ? Budget::wallClock(times.hc) : Budget::operations(ops.hcEvaluations);
}

IlpOptions PipelineConfig::ilpOptions(double seconds) const {
    IlpOptions o;
    o.backend = backend;
    o.solve.maxVariables = builtinMaxVariables;
    if (budgetMode == BudgetMode::Wall) {
        o.solve.timeLimitSeconds = seconds;
    } else {
        o.solve.iterationLimit = ops.ilpIterations;
        o.solve.nodeLimit = ops.ilpNodes;
        o.solve.workLimit = ops.ilpWork;
    }
    return o;
}

bool PipelineConfig::ilpInitEnabled(unsigned numProcessors) const {
    switch (ilpInit) {
    case IlpInitGate::Always:
        return true;
    case IlpInitGate::Never:
        return false;
    case IlpInitGate::Auto:
        break;
    }
    return numProcessors == 4;
}

std::size_t PipelineConfig::effectiveVariableLimit(std::size_t limit) const {
    return backend ? limit : std::min(limit, builtinTargetVariables);
}

PipelineConfig wallClockConfig() { return PipelineConfig{}; }

PipelineConfig operationsConfig() {
    PipelineConfig c;
    c.budgetMode = BudgetMode::Ops;
    return c;
}

namespace {

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace

PipelineResult runPipeline(const ComputationalDag &dag, const MachineParams &machine, const PipelineConfig &config) {
    const unsigned P = machine.numProcessors();
    PipelineResult result;
    const auto record = [&](std::string stage, const BspSchedule &s, const Stopwatch &t, bool accepted) {
        const Weight cost = scaledCost(dag, machine, s);
        result.stages.push_back({std::move(stage), cost, t.seconds(), accepted});
        return cost;
    };

    struct Init {
        const char *name;
        std::function<Assignment()> make;
    };
    std::vector<Init> inits = {
        {"bspg", [&] { return bspg(dag, machine); }},
        {"source", [&] { return sourceSchedule(dag, machine); }},
    };
    if (config.ilpInitEnabled(P)) {
        inits.push_back({"ilpinit", [&] {
                             IlpOptions o = config.ilpOptions(config.times.ilpInit);
                             if (config.budgetMode == BudgetMode::Ops) {
                                 o.solve.iterationLimit = config.ops.ilpInitIterationsPerBatch;
                                 o.solve.workLimit = config.ops.ilpInitWorkPerBatch;
                             } else {
                                 // the stage limit is shared by all batches
                                 const double batches = std::ceil(static_cast<double>(dag.numNodes()) /
                                                                  static_cast<double>(ilpInitBatchSize(P)));
                                 o.solve.timeLimitSeconds = config.times.ilpInit / std::max(1.0, batches);
                             }
                             return ilpInit(dag, machine, o);
                         }});
    }

    Weight best = 0;
    bool haveBest = false;
    for (const auto &init : inits) {
        Stopwatch t;
        const BspSchedule start = withLazyComm(dag, init.make());
        record(init.name, start, t, false);
        Stopwatch th;
        BspSchedule improved = hcAndHccs(dag, machine, start, config.hcBudget()).schedule;
        improved.compactSupersteps();
        const Weight cost = record(std::string(init.name) + "+hc", improved, th, false);
        if (!haveBest || cost < best) {
            best = cost;
            haveBest = true;
            result.schedule = std::move(improved);
        }
    }
    for (auto &s : result.stages) {
        s.accepted = s.stage.ends_with("+hc") && s.costScaled == best;
    }
    BspSchedule current = result.schedule;

    const std::size_t n = dag.numNodes();
    const std::size_t fullLimit = config.effectiveVariableLimit(config.ilpFullVariableLimit);
    if (config.runIlpFull && estimateIlpVariables(n, current.numSupersteps(), P) < fullLimit) {
        Stopwatch t;
        IlpFullOptions o;
        static_cast<IlpOptions &>(o) = config.ilpOptions(config.times.ilpFull);
        o.variableLimit = fullLimit;
        const IlpOutcome out = ilpFull(dag, machine, current, o);
        current = out.schedule;
        result.provenOptimal = out.status == milp::SolveStatus::Optimal;
        record("ilpfull", current, t, out.changed);
    }
    if (!result.provenOptimal) {
        if (config.runIlpPart && hasOnlyDirectSends(current)) {
            for (unsigned pass = 0; pass < config.ilpPartPasses; ++pass) {
                Stopwatch t;
                bool changed = false;
                for (const auto &interval : splitIntervals(current, P, config.effectiveVariableLimit(config.ilpPartVariableLimit))) {
                    const IlpOutcome out =
                        ilpPart(dag, machine, current, interval, config.ilpOptions(config.times.ilpPartPerInterval));
                    if (out.changed) {
                        current = out.schedule;
                        changed = true;
                    }
                }
                current.compactSupersteps();
                record("ilppart", current, t, changed);
                if (!changed) {
                    break;
                }
            }
        }
        if (config.runIlpCs && hasOnlyDirectSends(current)) {
            Stopwatch t;
            const IlpOutcome out = ilpCs(dag, machine, current, config.ilpOptions(config.times.ilpCs));
            current = out.schedule;
            record("ilpcs", current, t, out.changed);
        }
    }
    current.compactSupersteps();
    const Weight cost = scaledCost(dag, machine, current);
    if (isValidSchedule(dag, machine, current) && cost <= best) {
        result.schedule = std::move(current);
        result.costScaled = cost;
    } else {
        result.costScaled = best;
    }
    return result;
}

MultilevelResult runMultilevel(const ComputationalDag &dag, const MachineParams &machine,
                               const PipelineConfig &config, MultilevelConfig multilevel) {
    PipelineConfig inner = config;
    inner.runIlpCs = false;
    multilevel.coarseSolver = [inner](const ComputationalDag &d, const MachineParams &m) {
        return runPipeline(d, m, inner).schedule;
    };
    multilevel.ilpCs = config.ilpOptions(config.times.ilpCs);
    multilevel.runIlpCs = config.runIlpCs;
    multilevel.commBudget = config.hcBudget().fraction(0.1);
    return multilevelSchedule(dag, machine, multilevel);
}

const std::vector<std::string> &algorithmNames() {
    static const std::vector<std::string> names = {"pipeline", "multilevel", "cilk", "blest",
                                                   "etf",      "bspg",       "source", "hc"};
    return names;
}

BspSchedule runAlgorithm(const std::string &name, const ComputationalDag &dag, const MachineParams &machine,
                         const PipelineConfig &config) {
    if (name == "pipeline") {
        return runPipeline(dag, machine, config).schedule;
    }
    if (name == "multilevel") {
        return runMultilevel(dag, machine, config).schedule;
    }
    if (name == "cilk") {
        return classicalToBsp(dag, cilkSchedule(dag, machine, config.seed));
    }
    if (name == "blest") {
        return classicalToBsp(dag, listSchedule(dag, machine, ListPolicy::BlEst));
    }
    if (name == "etf") {
        return classicalToBsp(dag, listSchedule(dag, machine, ListPolicy::Etf));
    }
    if (name == "bspg") {
        return withLazyComm(dag, bspg(dag, machine));
    }
    if (name == "source") {
        return withLazyComm(dag, sourceSchedule(dag, machine));
    }
    if (name == "hc") {
        return hcAndHccs(dag, machine, withLazyComm(dag, bspg(dag, machine)), config.hcBudget()).schedule;
    }
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

} // namespace bspsched
