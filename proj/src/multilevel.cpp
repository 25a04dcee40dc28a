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

#include "bspsched/multilevel.hpp"

#include "bspsched/cost.hpp"
#include "bspsched/greedy_init.hpp"
#include "bspsched/hill_climbing.hpp"

#include <algorithm>
#include <cmath>

namespace bspsched {

bool multilevelApplicable(std::size_t numNodes, const MultilevelConfig &config) {
    if (config.ratios.empty()) {
        return false;
    }
    const double r = *std::min_element(config.ratios.begin(), config.ratios.end());
    return std::ceil(r * static_cast<double>(numNodes) - 1e-9) >= 2.0;
}

BspSchedule uncoarsenRefine(const CoarseningSequence &sequence, const BspSchedule &coarseSchedule,
                            const MachineParams &machine, const MultilevelConfig &config) {
    if (coarseSchedule.numNodes() != sequence.coarseDag().numNodes()) {
        throw std::invalid_argument("coarse schedule does not match the coarsened DAG");
    }
    if (sequence.size() == 0) {
        return coarseSchedule;
    }
    ContractibleDag graph = sequence.coarseWorking();
    std::vector<unsigned> proc(graph.capacity(), 0);
    std::vector<unsigned> step(graph.capacity(), 0);
    const auto &ids = sequence.coarseIds();
    for (NodeId k = 0; k < ids.size(); ++k) {
        proc[ids[k]] = coarseSchedule.proc(k);
        step[ids[k]] = coarseSchedule.superstep(k);
    }

    const auto refine = [&] {
        std::vector<NodeId> dense;
        const ComputationalDag dag = graph.compact(&dense);
        Assignment a;
        for (NodeId v : dense) {
            a.proc.push_back(proc[v]);
            a.step.push_back(step[v]);
        }
        HcOptions options;
        options.budget = config.refineBudget;
        HcResult r = hcImprove(dag, machine, withLazyComm(dag, a), options);
        for (NodeId k = 0; k < dense.size(); ++k) {
            proc[dense[k]] = r.schedule.proc(k);
            step[dense[k]] = r.schedule.superstep(k);
        }
        return std::move(r.schedule);
    };

    const std::size_t interval = std::max<std::size_t>(1, config.refineInterval);
    std::size_t undone = 0;
    for (std::size_t t = sequence.size(); t-- > 0;) {
        const auto &rec = sequence.records()[t];
        graph.undo(rec);
        proc[rec.u] = proc[rec.v] = proc[rec.merged];
        step[rec.u] = step[rec.v] = step[rec.merged];
        if (++undone % interval == 0 && t > 0) {
            refine();
        }
    }
    BspSchedule result = refine();
    result.compactSupersteps();
    return result;
}

MultilevelResult multilevelSchedule(const ComputationalDag &dag, const MachineParams &machine,
                                    const MultilevelConfig &config) {
    if (!multilevelApplicable(dag.numNodes(), config)) {
        throw TooSmallForMultilevel("DAG with " + std::to_string(dag.numNodes()) + " nodes is too small to coarsen");
    }
    const CoarseSolver solver = config.coarseSolver ? config.coarseSolver
                                                    : [](const ComputationalDag &d, const MachineParams &m) {
                                                          return hcAndHccs(d, m, withLazyComm(d, bspg(d, m)), Budget{})
                                                              .schedule;
                                                      };
    MultilevelResult result;
    for (double ratio : config.ratios) {
        const CoarseningSequence seq = coarsen(dag, ratio);
        const BspSchedule coarse = solver(seq.coarseDag(), machine);
        BspSchedule s = uncoarsenRefine(seq, coarse, machine, config);
        if (hasOnlyDirectSends(s)) {
            HcOptions options;
            options.budget = config.commBudget;
            s = hccsImprove(dag, machine, s, options).schedule;
            if (config.runIlpCs) {
                s = ilpCs(dag, machine, s, config.ilpCs).schedule;
            }
        }
        const Weight cost = scaledCost(dag, machine, s);
        result.runs.push_back({ratio, seq.coarseDag().numNodes(), std::move(s), cost});
    }
    for (std::size_t i = 1; i < result.runs.size(); ++i) {
        if (result.runs[i].costScaled < result.runs[result.selected].costScaled) {
            result.selected = i;
        }
    }
    result.schedule = result.runs[result.selected].schedule;
    return result;
}

} // namespace bspsched
