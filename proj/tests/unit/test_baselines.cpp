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
#include "bspsched/classical.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace bspsched;

namespace {

ComputationalDag chain(std::size_t n) {
    ComputationalDag d(n, 2, 1);
    for (NodeId v = 0; v + 1 < n; ++v) {
        d.addEdge(v, v + 1);
    }
    return d;
}

ComputationalDag fork() {
    ComputationalDag d(3, 4, 3);
    d.addEdge(0, 1);
    d.addEdge(0, 2);
    return d;
}

} // namespace

TEST_CASE("cilk on a single node and on a chain") {
    ComputationalDag one(1, 7, 1);
    const auto s = cilkSchedule(one, MachineParams(4, 1, 1), 3);
    CHECK(s.makespan() == doctest::Approx(7));

    const auto c = chain(10);
    const auto cs = cilkSchedule(c, MachineParams(4, 1, 1), 3);
    CHECK(std::all_of(cs.proc.begin(), cs.proc.end(), [&](unsigned p) { return p == cs.proc[0]; }));
    CHECK(cs.makespan() == doctest::Approx(20));
    CHECK(classicalToBsp(c, cs).numSupersteps() == 1);
}

TEST_CASE("cilk keeps processors busy on independent nodes") {
    for (std::size_t n : {1u, 4u, 5u, 9u}) {
        ComputationalDag d(n, 3, 1);
        const auto s = cilkSchedule(d, MachineParams(2, 1, 1), 1);
        CHECK(s.makespan() == doctest::Approx(3.0 * static_cast<double>((n + 1) / 2)));
    }
}

TEST_CASE("cilk is deterministic per seed") {
    std::mt19937_64 rng(2);
    const auto d = oracle::randomDag(rng, 40, 0.08);
    const MachineParams m(4, 1, 1);
    CHECK(cilkSchedule(d, m, 17).proc == cilkSchedule(d, m, 17).proc);
}

TEST_CASE("list schedulers on a fork") {
    const auto d = fork();
    for (auto policy : {ListPolicy::BlEst, ListPolicy::Etf}) {
        const auto cheap = listSchedule(d, MachineParams(2, 0, 1), policy);
        CHECK(cheap.proc[1] != cheap.proc[2]);
        CHECK(cheap.makespan() == doctest::Approx(8));

        const auto costly = listSchedule(d, MachineParams(2, 100, 1), policy);
        CHECK(costly.proc[1] == costly.proc[0]);
        CHECK(costly.proc[2] == costly.proc[0]);
    }
    ComputationalDag one(1, 5, 1);
    const auto s = listSchedule(one, MachineParams(3, 1, 1), ListPolicy::Etf);
    CHECK(s.start[0] == doctest::Approx(0));
    CHECK(s.makespan() == doctest::Approx(5));
}

TEST_CASE("baseline outputs are valid classical schedules and convert to valid BSP schedules") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const auto d = oracle::randomDag(rng, 5 + rng() % 40, 0.15);
        const unsigned P = 1 + rng() % 6;
        const MachineParams m(P, rng() % 5, 2, P == 4 ? numaFromTree(4, 3) : uniformLambda(P));
        for (const auto &cs : {cilkSchedule(d, m, t), listSchedule(d, m, ListPolicy::BlEst),
                               listSchedule(d, m, ListPolicy::Etf)}) {
            CHECK(checkClassicalSchedule(d, cs, P).empty());
            CHECK(isValidSchedule(d, m, classicalToBsp(d, cs)));
        }
    }
}
