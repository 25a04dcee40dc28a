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


#include "bspsched/cost.hpp"
#include "bspsched/greedy_init.hpp"
#include "bspsched/multilevel.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace bspsched;

namespace {

MultilevelConfig projectionOnly() {
    MultilevelConfig c;
    c.refineBudget.maxMoves = 0;
    return c;
}

/// Two heavy-communication clusters joined by one light edge.
ComputationalDag twoClusters(std::mt19937_64 &rng, std::size_t each) {
    ComputationalDag d;
    for (int c = 0; c < 2; ++c) {
        const auto base = static_cast<NodeId>(d.numNodes());
        for (std::size_t i = 0; i < each; ++i) {
            d.addNode(2 + static_cast<Weight>(rng() % 3), 6);
        }
        for (NodeId i = 1; i < each; ++i) {
            d.addEdge(base + static_cast<NodeId>(rng() % i), base + i);
            if (i > 2 && rng() % 2) {
                const NodeId j = static_cast<NodeId>(rng() % i);
                if (!d.hasEdge(base + j, base + i)) {
                    d.addEdge(base + j, base + i);
                }
            }
        }
    }
    d.setComm(0, 1);
    d.addEdge(0, static_cast<NodeId>(2 * each - 1));
    return d;
}

} // namespace

TEST_CASE("uncoarsening an empty sequence returns the schedule") {
    ComputationalDag d(10);
    const auto seq = coarsen(d, 0.5);
    REQUIRE(seq.size() == 0);
    const MachineParams m(2, 1, 1);
    const auto s = withLazyComm(seq.coarseDag(), bspg(seq.coarseDag(), m));
    CHECK(uncoarsenRefine(seq, s, m) == s);
}

TEST_CASE("split nodes inherit the merged placement") {
    ComputationalDag d(3);
    d.addEdge(0, 1);
    d.addEdge(1, 2);
    const auto seq = coarsen(d, 0.6);
    REQUIRE(seq.size() == 1);
    const MachineParams m(2, 1, 1);
    const auto &c = seq.coarseDag();
    REQUIRE(c.numNodes() == 2);
    std::vector<unsigned> proc = {1, 1}, step = {0, 0};
    const auto coarse = withLazyComm(c, {proc, step});
    const auto fine = uncoarsenRefine(seq, coarse, m, projectionOnly());
    CHECK(fine.procs() == std::vector<unsigned>{1, 1, 1});
    CHECK(isValidSchedule(d, m, fine));

    CHECK_THROWS(uncoarsenRefine(seq, withLazyComm(d, {{0, 0, 0}, {0, 0, 0}}), m));
}

TEST_CASE("projection is valid at every level") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const auto d = oracle::randomDag(rng, 20 + rng() % 40, 0.1);
        const MachineParams m(3, 2, 2);
        const auto seq = coarsen(d, 0.3);
        const auto coarse = withLazyComm(seq.coarseDag(), bspg(seq.coarseDag(), m));
        ContractibleDag g = seq.coarseWorking();
        std::vector<unsigned> proc(g.capacity()), step(g.capacity());
        for (NodeId k = 0; k < seq.coarseIds().size(); ++k) {
            proc[seq.coarseIds()[k]] = coarse.proc(k);
            step[seq.coarseIds()[k]] = coarse.superstep(k);
        }
        for (std::size_t k = seq.size(); k-- > 0;) {
            const auto &r = seq.records()[k];
            g.undo(r);
            proc[r.u] = proc[r.v] = proc[r.merged];
            step[r.u] = step[r.v] = step[r.merged];
            std::vector<NodeId> ids;
            const auto level = g.compact(&ids);
            Assignment a;
            for (NodeId v : ids) {
                a.proc.push_back(proc[v]);
                a.step.push_back(step[v]);
            }
            CHECK(isValidSchedule(level, m, withLazyComm(level, a)));
        }
        const auto fine = uncoarsenRefine(seq, coarse, m);
        CHECK(isValidSchedule(d, m, fine));
    }
}

TEST_CASE("multilevel size floor") {
    ComputationalDag d(6);
    CHECK_FALSE(multilevelApplicable(6));
    CHECK(multilevelApplicable(7));
    CHECK_THROWS_AS(multilevelSchedule(d, MachineParams(2, 1, 1)), TooSmallForMultilevel);
}

TEST_CASE("multilevel beats the trivial schedule on two clusters") {
    std::mt19937_64 rng(29);
    const auto d = twoClusters(rng, 40);
    const MachineParams m(4, 1, 10, numaFromTree(4, 4));
    const auto r = multilevelSchedule(d, m);
    CHECK(r.runs.size() == 2);
    CHECK(isValidSchedule(d, m, r.schedule));
    CHECK(scaledCost(d, m, r.schedule) < trivialScaledCost(d, m));
    CHECK(scaledCost(d, m, r.schedule) == std::min(r.runs[0].costScaled, r.runs[1].costScaled));
}

TEST_CASE("multilevel output is valid on random DAGs") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 8; ++t) {
        const auto d = oracle::randomDag(rng, 20 + rng() % 60, 0.08);
        const MachineParams m(2 + rng() % 3, 1 + rng() % 3, 0);
        CHECK(isValidSchedule(d, m, multilevelSchedule(d, m).schedule));
    }
}
