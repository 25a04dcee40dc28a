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


#include "bspsched/classical.hpp"
#include "bspsched/cost.hpp"
#include "bspsched/schedule.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace bspsched;

namespace {

ComputationalDag chain2() {
    ComputationalDag d(2);
    d.setComm(0, 2);
    d.addEdge(0, 1);
    return d;
}

} // namespace

TEST_CASE("single node costs work plus latency") {
    ComputationalDag d(1, 5, 1);
    const MachineParams m(2, 3, 5);
    CHECK(totalCost(d, m, BspSchedule({0}, {0})) == Rational(10));
}

TEST_CASE("cross-processor chain") {
    const auto d = chain2();
    const MachineParams m(2, 3, 5);
    const BspSchedule s({0, 1}, {0, 1}, {{0, 0, 1, 0}});
    const auto c = evaluateCost(d, m, s);
    CHECK(c.superstepCost(0) == Rational(12));
    CHECK(c.superstepCost(1) == Rational(6));
    CHECK(c.total() == Rational(18));

    const MachineParams numa(8, 3, 5, numaFromTree(8, 3));
    const BspSchedule far({0, 4}, {0, 1}, {{0, 0, 4, 0}});
    const auto cn = evaluateCost(d, numa, far);
    CHECK(cn.comm(0) == Rational(18));
    CHECK(cn.superstepCost(0) == Rational(1 + 54 + 5));
}

TEST_CASE("validity rules") {
    const auto d = chain2();
    const MachineParams m(2, 1, 1);
    CHECK(isValidSchedule(d, m, BspSchedule({0, 0}, {0, 0})));
    CHECK_FALSE(isValidSchedule(d, m, BspSchedule({0, 0}, {1, 0})));
    // a send in the superstep of the consumer is too late
    CHECK_FALSE(isValidSchedule(d, m, BspSchedule({0, 1}, {0, 1}, {{0, 0, 1, 1}})));
    CHECK_FALSE(isValidSchedule(d, m, BspSchedule({0, 1}, {0, 1}, {{0, 0, 0, 0}})));
    CHECK_FALSE(isValidSchedule(d, m, BspSchedule({0, 2}, {0, 1}, {{0, 0, 1, 0}})));
    // forwarding through a third processor
    const MachineParams m3(3, 1, 1);
    CHECK(isValidSchedule(d, m3, BspSchedule({0, 2}, {0, 2}, {{0, 0, 1, 0}, {0, 1, 2, 1}})));
    CHECK_FALSE(isValidSchedule(d, m3, BspSchedule({0, 2}, {0, 2}, {{0, 0, 1, 0}, {0, 1, 2, 0}})));
    CHECK_THROWS(evaluateCost(d, m, BspSchedule({0, 0}, {1, 0})));
}

TEST_CASE("empty supersteps are free and comm-only supersteps pay latency") {
    ComputationalDag d(2);
    d.addEdge(0, 1);
    const MachineParams m(2, 1, 7);
    const BspSchedule gap({0, 1}, {0, 3}, {{0, 0, 1, 2}});
    const auto c = evaluateCost(d, m, gap);
    CHECK(c.numNonemptySupersteps() == 3);
    CHECK(c.total() == Rational(1 + 7 + 1 + 7 + 1 + 7));
}

TEST_CASE("lazy communication picks the phase before the first need") {
    ComputationalDag d(3);
    d.addEdge(0, 1);
    d.addEdge(0, 2);
    const auto comm = lazyCommSchedule(d, {0, 1, 1}, {0, 1, 3});
    REQUIRE(comm.size() == 1);
    CHECK(comm[0] == CommStep{0, 0, 1, 0});

    ComputationalDag fan(4);
    fan.addEdge(0, 1);
    fan.addEdge(0, 2);
    fan.addEdge(0, 3);
    const auto f = lazyCommSchedule(fan, {0, 1, 2, 3}, {0, 1, 1, 1});
    CHECK(f.size() == 3);
    for (const auto &c : f) {
        CHECK(c.step == 0);
    }
    CHECK(lazyCommSchedule(fan, {0, 0, 0, 0}, {0, 0, 0, 0}).empty());
    CHECK_THROWS(lazyCommSchedule(d, {0, 1, 1}, {0, 0, 1}));
}

TEST_CASE("cost agrees with the brute-force evaluator on random schedules") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const unsigned P = 1 + rng() % 4;
        const auto dag = oracle::randomDag(rng, 1 + rng() % 10, 0.3);
        LambdaMatrix l = uniformLambda(P);
        for (unsigned p = 0; p < P; ++p) {
            for (unsigned q = 0; q < P; ++q) {
                if (p != q) {
                    l[p][q] = Rational(1 + static_cast<std::int64_t>(rng() % 5), 1 + static_cast<std::int64_t>(rng() % 3));
                }
            }
        }
        const MachineParams m(P, rng() % 4, rng() % 6, l);
        std::vector<unsigned> proc(dag.numNodes()), step(dag.numNodes());
        for (NodeId v : topologicalOrder(dag)) {
            proc[v] = rng() % P;
            unsigned s = 0;
            for (NodeId u : dag.predecessors(v)) {
                s = std::max(s, step[u] + (proc[u] != proc[v] ? 1u : 0u));
            }
            step[v] = s + rng() % 2;
        }
        const auto comm = lazyCommSchedule(dag, proc, step);
        CHECK(comm == oracle::lazyComm(dag, proc, step));
        const BspSchedule s(proc, step, comm);
        REQUIRE(isValidSchedule(dag, m, s));
        CHECK(oracle::bruteForceCost(dag, m, proc, step, comm).equals(totalCost(dag, m, s)));
    }
}

TEST_CASE("processor relabeling leaves uniform cost unchanged") {
    std::mt19937_64 rng(9);
    const auto dag = oracle::randomDag(rng, 12, 0.25);
    const MachineParams m(3, 2, 3);
    std::vector<unsigned> proc(12), step(12);
    for (NodeId v = 0; v < 12; ++v) {
        proc[v] = rng() % 3;
        step[v] = v;
    }
    const Rational base = totalCost(dag, m, withLazyComm(dag, {proc, step}));
    std::vector<unsigned> perm = {2, 0, 1};
    for (auto &p : proc) {
        p = perm[p];
    }
    CHECK(totalCost(dag, m, withLazyComm(dag, {proc, step})) == base);
}

TEST_CASE("schedule files round-trip") {
    ComputationalDag d(3);
    d.addEdge(0, 2);
    const BspSchedule s({0, 1, 1}, {0, 0, 1}, {{0, 0, 1, 0}});
    unsigned P = 0;
    const auto back = parseScheduleText(writeScheduleText(s, 2), &P);
    CHECK(P == 2);
    CHECK(back == s);
}

TEST_CASE("compacting drops empty supersteps without changing cost") {
    ComputationalDag d(2);
    d.addEdge(0, 1);
    const MachineParams m(2, 1, 3);
    BspSchedule s({0, 1}, {1, 4}, {{0, 0, 1, 2}});
    const Weight before = scaledCost(d, m, s);
    s.compactSupersteps();
    CHECK(s.numSupersteps() == 3);
    CHECK(scaledCost(d, m, s) == before);
    CHECK(isValidSchedule(d, m, s));
}

TEST_CASE("cost exports") {
    const auto d = chain2();
    const MachineParams m(2, 3, 5);
    const auto c = evaluateCost(d, m, BspSchedule({0, 1}, {0, 1}, {{0, 0, 1, 0}}));
    CHECK(c.toCsv().rfind("superstep,work,comm,latency,total", 0) == 0);
    CHECK(c.toJson().find("\"total\"") != std::string::npos);
}

TEST_CASE("classical conversion") {
    ComputationalDag d(4);
    d.addEdge(0, 1);
    d.addEdge(1, 2);
    d.addEdge(2, 3);
    ClassicalSchedule alt;
    alt.proc = {0, 1, 0, 1};
    alt.start = {0, 1, 2, 3};
    alt.finish = {1, 2, 3, 4};
    const auto s = classicalToBsp(d, alt);
    CHECK(s.numSupersteps() == 4);
    CHECK(isValidSchedule(d, MachineParams(2, 1, 1), s));

    ClassicalSchedule local;
    local.proc = {0, 0, 0, 0};
    local.start = {0, 1, 2, 3};
    local.finish = {1, 2, 3, 4};
    CHECK(classicalToBsp(d, local).numSupersteps() == 1);
}
