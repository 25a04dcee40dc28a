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


#include "bspsched/generators.hpp"
#include "bspsched/hyperdag_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <queue>

using namespace bspsched;

namespace {

bool weightRuleHolds(const ComputationalDag &d) {
    for (NodeId v = 0; v < d.numNodes(); ++v) {
        const Weight expected = d.inDegree(v) == 0 ? 1 : static_cast<Weight>(d.inDegree(v)) - 1;
        if (d.work(v) != expected || d.comm(v) != 1) {
            return false;
        }
    }
    return true;
}

SparsityPattern pattern(std::size_t N, std::vector<std::pair<std::size_t, std::size_t>> nz) {
    SparsityPattern p;
    p.N = N;
    p.nonzeros = std::move(nz);
    p.normalize();
    return p;
}

SparsityPattern identity(std::size_t N) {
    SparsityPattern p;
    p.N = N;
    for (std::size_t i = 0; i < N; ++i) {
        p.nonzeros.emplace_back(i, i);
    }
    return p;
}

std::size_t rowsUsed(const SparsityPattern &p) {
    std::vector<char> r(p.N, 0);
    std::size_t n = 0;
    for (const auto &[i, j] : p.nonzeros) {
        n += r[i] ? 0 : 1;
        r[i] = 1;
    }
    return n;
}

std::size_t colsUsed(const SparsityPattern &p) {
    std::vector<char> c(p.N, 0);
    std::size_t n = 0;
    for (const auto &nz : p.nonzeros) {
        n += c[nz.second] ? 0 : 1;
        c[nz.second] = 1;
    }
    return n;
}

} // namespace

TEST_CASE("random patterns") {
    CHECK(randomPattern(5, 1.0, 1).nnz() == 25);
    CHECK(randomPattern(7, 0.3, 42).nonzeros == randomPattern(7, 0.3, 42).nonzeros);
    const auto p = randomPattern(100, 0.1, 7);
    const double sigma = std::sqrt(10000 * 0.1 * 0.9);
    CHECK(std::abs(static_cast<double>(p.nnz()) - 1000.0) <= 4 * sigma);
    CHECK_THROWS(randomPattern(5, 0.0, 1));
    CHECK_THROWS(randomPattern(5, 1.5, 1));
    CHECK_THROWS(randomPattern(0, 0.5, 1));
}

TEST_CASE("spmv structure") {
    const auto one = genSpmv(pattern(1, {{0, 0}}));
    CHECK(one.numNodes() == 4);
    CHECK(weightRuleHolds(one));

    const auto dense = genSpmv(randomPattern(2, 1.0, 1));
    CHECK(dense.numNodes() == 12);
    CHECK(longestPathNodes(dense) == 3);

    const auto p = randomPattern(12, 0.25, 5);
    const auto d = genSpmv(p);
    CHECK(d.numNodes() == 2 * p.nnz() + colsUsed(p) + rowsUsed(p));
    CHECK(weightRuleHolds(d));
    std::size_t mulIndeg = 0;
    for (NodeId v = 0; v < d.numNodes(); ++v) {
        if (d.inDegree(v) == 2 && d.successors(v).size() == 1) {
            mulIndeg += 2;
        }
    }
    CHECK(mulIndeg == 2 * p.nnz());
    CHECK_THROWS(genSpmv(SparsityPattern{3, {}}));
}

TEST_CASE("exp layers") {
    const auto p = randomPattern(8, 0.4, 3);
    CHECK(genExp(p, 1) == genSpmv(p));
    CHECK(writeHyperdag(genExp(p, 1)) == writeHyperdag(genSpmv(p)));
    CHECK_THROWS(genExp(p, 0));

    const auto id = genExp(identity(2), 3);
    CHECK(id.numNodes() == 3 * (2 + 2 + 2) + 2);
    CHECK(longestPathNodes(id) == 1 + 3 * 2);

    // full rows so that every layer sees every entry
    for (unsigned k = 1; k <= 3; ++k) {
        const auto q = randomPattern(6, 1.0, 1);
        const auto d = genExp(q, k);
        CHECK(d.numNodes() == k * (2 * q.nnz() + 6) + 6);
        CHECK(weightRuleHolds(d));
    }
    const auto shared = genExp(p, 3, ExpOptions{true});
    CHECK(weightRuleHolds(shared));
    CHECK(shared.numNodes() < genExp(p, 3).numNodes());
}

TEST_CASE("CG structure") {
    const auto tiny = genCg(pattern(1, {{0, 0}}), 1);
    CHECK(validateDag(tiny).empty());
    CHECK(weightRuleHolds(tiny));

    const auto p = randomPattern(5, 0.5, 2);
    SparsityPattern full = p;
    for (std::size_t i = 0; i < 5; ++i) {
        full.nonzeros.emplace_back(i, i);
    }
    full.normalize();
    std::size_t prev = 0;
    for (unsigned k = 1; k <= 4; ++k) {
        const auto d = genCg(full, k);
        CHECK(weightRuleHolds(d));
        CHECK(validateDag(d).empty());
        CHECK(longestPathNodes(d) > prev);
        prev = longestPathNodes(d);
    }
    CHECK_THROWS(genCg(pattern(2, {{0, 0}}), 1));
    CHECK_THROWS(genCg(full, 0));
}

TEST_CASE("kNN frontier") {
    // entry 0 is only read by row 0 when A(0, 0) is set; here nothing reads it
    const auto lone = genKnn(pattern(3, {{1, 2}}), 1, 0);
    CHECK(lone.numNodes() == 1);

    const auto id = genKnn(identity(4), 5, 2);
    CHECK(id.numNodes() == 1 + 5 * 3);
    CHECK(weightRuleHolds(id));

    // row i reads entry i - 1 (mod N): one new row per hop
    const std::size_t N = 6;
    std::vector<std::pair<std::size_t, std::size_t>> cyc;
    for (std::size_t i = 0; i < N; ++i) {
        cyc.emplace_back(i, (i + N - 1) % N);
    }
    const auto cycle = pattern(N, cyc);
    for (unsigned k = 1; k <= N; ++k) {
        const auto d = genKnn(cycle, k, 0);
        CHECK(weightRuleHolds(d));
        std::size_t reduces = 0;
        for (NodeId v = 0; v < d.numNodes(); ++v) {
            reduces += d.inDegree(v) == 1 ? 1 : 0;
        }
        // hop t reaches t + 1 rows; every reached row is recomputed in later layers
        std::size_t expected = 0;
        for (unsigned t = 1; t <= k; ++t) {
            expected += std::min<std::size_t>(t, N);
        }
        CHECK(reduces == expected);
    }
    CHECK_THROWS(genKnn(cycle, 1, N));
    CHECK_THROWS(genKnn(cycle, 0, 0));
}

TEST_CASE("MatrixMarket patterns") {
    const auto path = std::filesystem::temp_directory_path() / "bspsched_pattern.mtx";
    {
        std::ofstream out(path);
        out << "%%MatrixMarket matrix coordinate real symmetric\n% c\n3 3 3\n1 1 2.0\n3 1 1.0\n2 2 4\n";
    }
    const auto p = loadMatrixMarketPattern(path);
    CHECK(p.N == 3);
    CHECK(p.nonzeros == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {0, 2}, {1, 1}, {2, 0}});
    std::filesystem::remove(path);
}

TEST_CASE("generator output is deterministic") {
    CHECK(writeHyperdag(genCg(randomPattern(6, 0.5, 9), 2)) == writeHyperdag(genCg(randomPattern(6, 0.5, 9), 2)));
}
