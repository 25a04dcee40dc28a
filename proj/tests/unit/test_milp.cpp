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


#include "bspsched/milp/model.hpp"

#include <doctest.h>

#include <cstdlib>
#include <random>

using namespace bspsched::milp;

namespace {

/// Minimum over all 0/1 assignments, or infinity when none is feasible.
double bruteForceBinary(const MilpModel &m) {
    const std::size_t n = m.numVariables();
    double best = kInfinity;
    std::vector<double> x(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = static_cast<double>((mask >> j) & 1U);
        }
        if (m.isFeasible(x)) {
            best = std::min(best, m.evaluateObjective(x));
        }
    }
    return best;
}

MilpModel randomBinaryModel(std::mt19937_64 &rng, std::size_t n, std::size_t rows) {
    MilpModel m;
    std::uniform_int_distribution<int> coef(-4, 6);
    for (std::size_t j = 0; j < n; ++j) {
        m.addBinary("b" + std::to_string(j), static_cast<double>(coef(rng)));
    }
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<Term> terms;
        for (std::size_t j = 0; j < n; ++j) {
            if (rng() % 2) {
                terms.push_back({j, static_cast<double>(coef(rng))});
            }
        }
        const auto sense = static_cast<Sense>(rng() % 3 == 0 ? 1 : 0);
        m.addConstraint(std::move(terms), sense, static_cast<double>(coef(rng)));
    }
    m.setObjectiveIntegral(true);
    return m;
}

} // namespace

TEST_CASE("fully pinned model is optimal at its fixed point") {
    MilpModel m;
    const auto a = m.addBinary("a", 3);
    const auto b = m.addVariable("b", VarType::Integer, 0, 10, 2);
    m.addConstraint({{a, 1}, {b, 1}}, Sense::LessEqual, 8);
    m.fix(a, 1);
    m.fix(b, 4);
    m.setObjectiveConstant(1);
    const auto r = solveModel(m, {});
    CHECK(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(12));
}

TEST_CASE("conflicting pins are infeasible") {
    MilpModel m;
    const auto a = m.addBinary("a", 1);
    m.fix(a, 1);
    m.addConstraint({{a, 1}}, Sense::LessEqual, 0);
    CHECK(solveModel(m, {}).status == SolveStatus::Infeasible);
}

TEST_CASE("branch and bound matches enumeration on random binary models") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 150; ++t) {
        const auto m = randomBinaryModel(rng, 1 + rng() % 11, rng() % 7);
        const double expected = bruteForceBinary(m);
        const auto r = solveModel(m, {});
        if (expected == kInfinity) {
            CHECK(r.status == SolveStatus::Infeasible);
        } else {
            REQUIRE(r.status == SolveStatus::Optimal);
            CHECK(r.objective == doctest::Approx(expected));
        }
    }
}

TEST_CASE("mixed model with continuous maxima") {
    // minimize W subject to W >= 3a + 2b, W >= 4(1-a) + 2(1-b), a, b binary
    MilpModel m;
    const auto a = m.addBinary("a");
    const auto b = m.addBinary("b");
    const auto w = m.addContinuous("W", 0, kInfinity, 1);
    m.addConstraint({{w, 1}, {a, -3}, {b, -2}}, Sense::GreaterEqual, 0);
    m.addConstraint({{w, 1}, {a, 4}, {b, 2}}, Sense::GreaterEqual, 6);
    const auto r = solveModel(m, {});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(3));
}

TEST_CASE("warm start bounds the result when limits stop the search") {
    std::mt19937_64 rng(5);
    MilpModel m;
    for (int j = 0; j < 8; ++j) {
        m.addBinary("b" + std::to_string(j), 1.0 + static_cast<double>(j % 3));
    }
    std::vector<Term> all;
    for (std::size_t j = 0; j < 8; ++j) {
        all.push_back({j, 1});
    }
    m.addConstraint(all, Sense::GreaterEqual, 3);
    m.setWarmStart({1, 1, 1, 1, 1, 1, 1, 1});
    SolveOptions o;
    o.iterationLimit = 0;
    const auto r = solveModel(m, o);
    CHECK(r.status == SolveStatus::Feasible);
    CHECK(r.objective <= m.evaluateObjective(*m.warmStart()));
    const auto full = solveModel(m, {});
    CHECK(full.status == SolveStatus::Optimal);
    CHECK(full.objective == doctest::Approx(3));

    // loading the 1 x 9 slack tableau already counts as work
    SolveOptions tight;
    tight.workLimit = 5;
    const auto cut = solveModel(m, tight);
    CHECK(cut.status == SolveStatus::Feasible);
    CHECK(cut.nodes == 0);
    tight.workLimit = 1'000'000;
    CHECK(solveModel(m, tight).status == SolveStatus::Optimal);
}

TEST_CASE("oversized models are declined") {
    MilpModel m;
    for (int j = 0; j < 10; ++j) {
        m.addBinary("b" + std::to_string(j), 1);
    }
    SolveOptions o;
    o.maxVariables = 5;
    CHECK(solveModel(m, o).status == SolveStatus::NoSolution);
}

TEST_CASE("LP and JSON export") {
    MilpModel m;
    const auto a = m.addBinary("a", 2);
    const auto x = m.addContinuous("x", 0, 5, 1);
    m.addConstraint({{a, 1}, {x, -1}}, Sense::LessEqual, 0, "link");
    const std::string lp = m.toLpFormat();
    CHECK(lp.find("Minimize") != std::string::npos);
    CHECK(lp.find("Subject To") != std::string::npos);
    CHECK(lp.find("link") != std::string::npos);
    CHECK(m.toJson().find("\"binary\"") != std::string::npos);
}

TEST_CASE("external command backend") {
    const std::string script = std::string(BSPSCHED_SOURCE_DIR) + "/tools/scipy_milp_backend.py";
    if (std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") != 0) {
        MESSAGE("scipy not available; skipped");
        return;
    }
    std::mt19937_64 rng(9);
    const ExternalCommandBackend backend("python3 " + script);
    for (int t = 0; t < 5; ++t) {
        const auto m = randomBinaryModel(rng, 6, 3);
        const double expected = bruteForceBinary(m);
        const auto r = solveModel(m, {}, &backend);
        if (expected == kInfinity) {
            CHECK(r.status == SolveStatus::Infeasible);
        } else {
            REQUIRE(r.hasSolution());
            CHECK(r.objective == doctest::Approx(expected));
        }
    }
    const ExternalCommandBackend broken("false");
    MilpModel m;
    m.addBinary("a", 1);
    CHECK_THROWS(solveModel(m, {}, &broken));
}
