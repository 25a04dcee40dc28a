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

#include "bspsched/baselines.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <random>

namespace bspsched {

ClassicalSchedule cilkSchedule(const ComputationalDag &dag, const MachineParams &machine, std::uint64_t seed) {
    const std::size_t n = dag.numNodes();
    const unsigned numProcs = machine.numProcessors();
    ClassicalSchedule out;
    out.proc.assign(n, 0);
    out.start.assign(n, 0.0);
    out.finish.assign(n, 0.0);
    if (n == 0) {
        return out;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::deque<NodeId>> stacks(numProcs); // back() is the top
    std::vector<char> busy(numProcs, 0);
    std::vector<std::size_t> missing(n);
    for (NodeId v = 0; v < n; ++v) {
        missing[v] = dag.inDegree(v);
        if (missing[v] == 0) {
            stacks[0].push_back(v);
        }
    }

    using Event = std::pair<Weight, NodeId>; // (finish time, node)
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    Weight now = 0;

    const auto run = [&](unsigned p, NodeId v) {
        busy[p] = 1;
        out.proc[v] = p;
        out.start[v] = static_cast<double>(now);
        out.finish[v] = static_cast<double>(now + dag.work(v));
        events.emplace(now + dag.work(v), v);
    };

    const auto dispatch = [&]() {
        for (unsigned p = 0; p < numProcs; ++p) {
            if (!busy[p] && !stacks[p].empty()) {
                const NodeId v = stacks[p].back();
                stacks[p].pop_back();
                run(p, v);
            }
        }
        std::vector<unsigned> victims;
        for (unsigned p = 0; p < numProcs; ++p) {
            if (busy[p]) {
                continue;
            }
            victims.clear();
            for (unsigned q = 0; q < numProcs; ++q) {
                if (!stacks[q].empty()) {
                    victims.push_back(q);
                }
            }
            if (victims.empty()) {
                break;
            }
            std::uniform_int_distribution<std::size_t> pick(0, victims.size() - 1);
            const unsigned q = victims[pick(rng)];
            const NodeId v = stacks[q].front();
            stacks[q].pop_front();
            run(p, v);
        }
    };

    dispatch();
    while (!events.empty()) {
        now = events.top().first;
        std::vector<NodeId> finished;
        while (!events.empty() && events.top().first == now) {
            finished.push_back(events.top().second);
            events.pop();
        }
        std::sort(finished.begin(), finished.end());
        for (NodeId v : finished) {
            busy[out.proc[v]] = 0;
        }
        for (NodeId v : finished) {
            for (NodeId s : dag.successors(v)) {
                if (--missing[s] == 0) {
                    stacks[out.proc[v]].push_back(s);
                }
            }
        }
        dispatch();
    }
    return out;
}

ClassicalSchedule listSchedule(const ComputationalDag &dag, const MachineParams &machine, ListPolicy policy) {
    const std::size_t n = dag.numNodes();
    const unsigned numProcs = machine.numProcessors();
    const double delayPerUnit = static_cast<double>(machine.g()) * machine.meanOffDiagonalLambda();
    ClassicalSchedule out;
    out.proc.assign(n, 0);
    out.start.assign(n, 0.0);
    out.finish.assign(n, 0.0);

    const auto bottom = bottomLevels(dag);
    std::vector<double> available(numProcs, 0.0);
    std::vector<std::size_t> missing(n);
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v) {
        missing[v] = dag.inDegree(v);
        if (missing[v] == 0) {
            ready.push_back(v);
        }
    }

    const auto est = [&](NodeId v, unsigned p) {
        double t = available[p];
        for (NodeId u : dag.predecessors(v)) {
            double arrive = out.finish[u];
            if (out.proc[u] != p) {
                arrive += delayPerUnit * static_cast<double>(dag.comm(u));
            }
            t = std::max(t, arrive);
        }
        return t;
    };
    const auto bestProc = [&](NodeId v) {
        unsigned best = 0;
        double bestTime = est(v, 0);
        for (unsigned p = 1; p < numProcs; ++p) {
            const double t = est(v, p);
            if (t < bestTime) {
                best = p;
                bestTime = t;
            }
        }
        return std::pair{best, bestTime};
    };

    while (!ready.empty()) {
        std::size_t chosenIdx = 0;
        unsigned proc = 0;
        double start = 0.0;
        if (policy == ListPolicy::BlEst) {
            for (std::size_t i = 1; i < ready.size(); ++i) {
                const NodeId a = ready[i];
                const NodeId b = ready[chosenIdx];
                if (bottom[a] > bottom[b] || (bottom[a] == bottom[b] && a < b)) {
                    chosenIdx = i;
                }
            }
            std::tie(proc, start) = bestProc(ready[chosenIdx]);
        } else {
            double bestTime = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ready.size(); ++i) {
                const auto [p, t] = bestProc(ready[i]);
                if (t < bestTime || (t == bestTime && ready[i] < ready[chosenIdx])) {
                    bestTime = t;
                    chosenIdx = i;
                    proc = p;
                }
            }
            start = bestTime;
        }
        const NodeId v = ready[chosenIdx];
        ready[chosenIdx] = ready.back();
        ready.pop_back();
        out.proc[v] = proc;
        out.start[v] = start;
        out.finish[v] = start + static_cast<double>(dag.work(v));
        available[proc] = out.finish[v];
        for (NodeId s : dag.successors(v)) {
            if (--missing[s] == 0) {
                ready.push_back(s);
            }
        }
    }
    return out;
}

} // namespace bspsched
