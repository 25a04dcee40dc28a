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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. `--only 3,7` runs a subset.

#include "bspsched/baselines.hpp"
#include "bspsched/classical.hpp"
#include "bspsched/coarsening.hpp"
#include "bspsched/cost.hpp"
#include "bspsched/generators.hpp"
#include "bspsched/greedy_init.hpp"
#include "bspsched/hill_climbing.hpp"
#include "bspsched/hyperdag_io.hpp"
#include "bspsched/ilp_schedulers.hpp"
#include "bspsched/multilevel.hpp"
#include "bspsched/pipeline.hpp"
#include "bspsched/report.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace bspsched;

namespace {

bool verbose = false;

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok && pass) {
            detail << "first failure: " << what << "; ";
        }
        pass = pass && ok;
    }
};

bool bothValid(const ComputationalDag &d, const MachineParams &m, const BspSchedule &s) {
    return isValidSchedule(d, m, s) &&
           oracle::bruteForceValid(d, m.numProcessors(), s.procs(), s.supersteps(), s.comm());
}

// ---------------------------------------------------------------------------------------
// 1. cost evaluation against the from-scratch evaluator over exhaustive enumeration

LambdaMatrix randomRationalLambda(std::mt19937_64 &rng, unsigned P) {
    LambdaMatrix l(P, std::vector<Rational>(P));
    for (unsigned p = 0; p < P; ++p) {
        for (unsigned q = 0; q < P; ++q) {
            if (p != q) {
                l[p][q] = Rational(static_cast<std::int64_t>(1 + rng() % 6), static_cast<std::int64_t>(1 + rng() % 3));
            }
        }
    }
    return l;
}

void criterionCostOracle(Outcome &out) {
    Stopwatch t;
    std::mt19937_64 rng(1001);
    std::uint64_t schedules = 0;
    for (int i = 0; i < 200; ++i) {
        // (3P)^n candidate assignments; n is capped per P so the sweep stays fast
        const unsigned P = 1 + static_cast<unsigned>(rng() % 3);
        const std::size_t maxN = P == 3 ? 7 : 8;
        const std::size_t n = 1 + rng() % maxN;
        const auto d = oracle::randomDag(rng, n, 0.1 + 0.5 * static_cast<double>(rng() % 100) / 100.0);
        const Weight g = static_cast<Weight>(rng() % 5);
        const Weight l = static_cast<Weight>(rng() % 7);
        const MachineParams m = rng() % 2 ? MachineParams(P, g, l) : MachineParams(P, g, l, randomRationalLambda(rng, P));
        oracle::forEachAssignment(d, P, 3, [&](const std::vector<unsigned> &proc, const std::vector<unsigned> &step) {
            ++schedules;
            auto lazy = lazyCommSchedule(d, proc, step);
            auto ref = oracle::lazyComm(d, proc, step);
            std::sort(lazy.begin(), lazy.end());
            std::sort(ref.begin(), ref.end());
            const BspSchedule s(proc, step, lazy);
            const auto expected = oracle::bruteForceCost(d, m, proc, step, ref);
            const auto breakdown = evaluateCost(d, m, s);
            const bool ok = lazy == ref && expected.equals(breakdown.total()) &&
                            static_cast<__int128>(breakdown.totalScaled) * expected.den ==
                                expected.num * static_cast<__int128>(m.denominator()) &&
                            isValidSchedule(d, m, s);
            out.require(ok, "dag " + std::to_string(i) + " schedule " + std::to_string(schedules));
        });
    }
    const double sec = t.seconds();
    out.require(sec <= 120.0, "runtime above 2 min");
    out.detail << "200 DAGs, " << schedules << " schedules, " << sec << " s";
}

// ---------------------------------------------------------------------------------------
// 2. ILPfull against the direct-send enumeration optimum

void criterionIlpOptimal(Outcome &out) {
    Stopwatch t;
    std::mt19937_64 rng(2002);
    int matched = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 1 + rng() % 5;
        const auto d = oracle::randomDag(rng, n, 0.4);
        const unsigned S = 1 + static_cast<unsigned>(rng() % 3);
        const MachineParams m(2, 1 + static_cast<Weight>(rng() % 4), static_cast<Weight>(rng() % 6));
        const BspSchedule trivial(std::vector<unsigned>(n, 0), std::vector<unsigned>(n, 0));
        IlpFullOptions o;
        o.numSupersteps = S;
        const auto r = ilpFull(d, m, trivial, o);
        const auto opt = oracle::optimalDirectCost(d, m, S);
        const bool ok = r.status == milp::SolveStatus::Optimal && bothValid(d, m, r.schedule) &&
                        r.schedule.numSupersteps() <= S && opt.equals(totalCost(d, m, r.schedule));
        matched += ok;
        out.require(ok, "dag " + std::to_string(i));
    }
    const double sec = t.seconds();
    out.require(sec <= 300.0, "runtime above 5 min");
    out.detail << matched << "/50 equal to the enumeration optimum, " << sec << " s";
}

// ---------------------------------------------------------------------------------------
// 3. NUMA tree coefficients

void criterionNuma(Outcome &out) {
    const auto l8 = numaFromTree(8, 3);
    out.require(l8[0][1] == Rational(1), "lambda(0,1)");
    out.require(l8[0][2] == Rational(3) && l8[0][3] == Rational(3), "lambda(0,2..3)");
    for (unsigned q = 4; q < 8; ++q) {
        out.require(l8[0][q] == Rational(9), "lambda(0," + std::to_string(q) + ")");
    }
    const auto l16 = numaFromTree(16, 3);
    out.require(l16[0][15] == Rational(27), "lambda16(0,15)");
    out.detail << "P=8: 1,3,3,9,9,9,9; P=16: lambda(0,15)=" << l16[0][15].toString();
}

// ---------------------------------------------------------------------------------------
// generated suite shared by criteria 4, 5 and 6

struct Instance {
    std::string name;
    ComputationalDag dag;
    unsigned P;
    Weight g;
    std::optional<Weight> delta;

    MachineParams machine() const {
        return delta ? MachineParams(P, g, 5, numaFromTree(P, *delta)) : MachineParams(P, g, 5);
    }
};

// generators reject empty patterns, so redraw until one has a nonzero
SparsityPattern nonemptyPattern(std::size_t N, double q, std::mt19937_64 &rng) {
    SparsityPattern p;
    do {
        p = randomPattern(N, q, rng());
    } while (p.nnz() == 0);
    return p;
}

ComputationalDag generateKind(int kind, std::mt19937_64 &rng, std::string &label) {
    const double q = 0.05 + 0.25 * static_cast<double>(rng() % 1000) / 1000.0;
    switch (kind) {
    case 0: {
        const std::size_t N = 8 + rng() % 40;
        label = "spmv_N" + std::to_string(N);
        return genSpmv(nonemptyPattern(N, q, rng));
    }
    case 1: {
        const std::size_t N = 6 + rng() % 25;
        const unsigned k = 2 + static_cast<unsigned>(rng() % 3);
        label = "exp_N" + std::to_string(N) + "_k" + std::to_string(k);
        return genExp(nonemptyPattern(N, q, rng), k);
    }
    case 2: {
        const std::size_t N = 3 + rng() % 10;
        const unsigned k = 1 + static_cast<unsigned>(rng() % 3);
        auto pattern = randomPattern(N, q, rng());
        // CG needs every row to hold a nonzero; the diagonal guarantees it
        for (std::size_t i = 0; i < N; ++i) {
            pattern.nonzeros.emplace_back(i, i);
        }
        pattern.normalize();
        label = "cg_N" + std::to_string(N) + "_k" + std::to_string(k);
        return genCg(pattern, k);
    }
    default: {
        const std::size_t N = 10 + rng() % 40;
        const unsigned k = 2 + static_cast<unsigned>(rng() % 4);
        label = "knn_N" + std::to_string(N) + "_k" + std::to_string(k);
        return genKnn(nonemptyPattern(N, q, rng), k, rng() % N);
    }
    }
}

std::vector<Instance> buildSuite() {
    std::mt19937_64 rng(4004);
    std::vector<Instance> suite;
    const unsigned procs[] = {4, 8, 16};
    const Weight gs[] = {1, 3, 5};
    for (int i = 0; i < 100; ++i) {
        const int kind = i % 4;
        std::string label;
        ComputationalDag d;
        do {
            d = generateKind(kind, rng, label);
        } while (d.numNodes() < 40 || d.numNodes() > 500);
        Instance inst{std::to_string(i) + "_" + label, std::move(d), procs[rng() % 3], gs[rng() % 3], std::nullopt};
        const int delta = static_cast<int>(rng() % 4);
        if (delta > 0) {
            inst.delta = delta + 1;
        }
        suite.push_back(std::move(inst));
    }
    return suite;
}

PipelineConfig suiteConfig() { return operationsConfig(); }

// ---------------------------------------------------------------------------------------
// 4 and 5. validity of every algorithm and monotone improvement

struct SuiteRuns {
    std::vector<PipelineResult> pipelines;
};

void criterionValidity(const std::vector<Instance> &suite, SuiteRuns &runs, Outcome &out) {
    Stopwatch t;
    const PipelineConfig config = suiteConfig();
    std::size_t checked = 0;
    std::size_t nodes = 0;
    for (const auto &inst : suite) {
        const MachineParams m = inst.machine();
        nodes += inst.dag.numNodes();
        out.require(validateDag(inst.dag).empty(), inst.name + " dag");
        for (const auto &algo : algorithmNames()) {
            Stopwatch ta;
            BspSchedule s;
            if (algo == "pipeline") {
                runs.pipelines.push_back(runPipeline(inst.dag, m, config));
                s = runs.pipelines.back().schedule;
                out.require(runs.pipelines.back().costScaled == scaledCost(inst.dag, m, s), inst.name + " cost record");
            } else {
                s = runAlgorithm(algo, inst.dag, m, config);
            }
            ++checked;
            out.require(validateSchedule(inst.dag, m, s).empty() && bothValid(inst.dag, m, s),
                        inst.name + " " + algo);
            if (verbose) {
                std::cerr << inst.name << " n=" << inst.dag.numNodes() << " P=" << inst.P << " " << algo << " "
                          << ta.seconds() << " s\n";
            }
        }
    }
    out.detail << checked << " schedules over " << suite.size() << " instances (" << nodes << " nodes), "
               << t.seconds() << " s";
}

void criterionMonotone(const std::vector<Instance> &suite, const SuiteRuns &runs, Outcome &out) {
    Stopwatch t;
    const PipelineConfig config = suiteConfig();
    std::size_t transitions = 0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto &inst = suite[i];
        const MachineParams m = inst.machine();
        // HC and HCcs separately, from both greedy initializers
        for (const auto &start : {withLazyComm(inst.dag, bspg(inst.dag, m)),
                                  withLazyComm(inst.dag, sourceSchedule(inst.dag, m))}) {
            const Weight c0 = scaledCost(inst.dag, m, start);
            const auto hc = hcImprove(inst.dag, m, start, {config.hcBudget()});
            const Weight c1 = scaledCost(inst.dag, m, hc.schedule);
            const auto cs = hccsImprove(inst.dag, m, hc.schedule, {config.hcBudget().fraction(0.1)});
            const Weight c2 = scaledCost(inst.dag, m, cs.schedule);
            out.require(c1 <= c0, inst.name + " HC");
            out.require(c2 <= c1, inst.name + " HCcs");
            transitions += 2;
        }
        // the ILP stages as recorded by the pipeline
        const auto &stages = runs.pipelines[i].stages;
        std::optional<Weight> previous;
        for (std::size_t k = 0; k < stages.size(); ++k) {
            const auto &st = stages[k];
            if (st.stage.ends_with("+hc")) {
                out.require(st.costScaled <= stages[k - 1].costScaled, inst.name + " " + st.stage);
                previous = previous ? std::min(*previous, st.costScaled) : st.costScaled;
                ++transitions;
            } else if (st.stage == "ilpfull" || st.stage == "ilppart" || st.stage == "ilpcs") {
                out.require(previous && st.costScaled <= *previous, inst.name + " " + st.stage);
                previous = st.costScaled;
                ++transitions;
            }
        }
        out.require(runs.pipelines[i].costScaled <= previous.value_or(0), inst.name + " final");
    }

    // local minima by exhaustive rescan on every fifth instance
    std::size_t minima = 0;
    for (std::size_t i = 0; i < suite.size(); i += 5) {
        const auto &inst = suite[i];
        const MachineParams m = inst.machine();
        const auto start = withLazyComm(inst.dag, bspg(inst.dag, m));
        const unsigned S = std::max(1u, start.numSupersteps());
        const auto hc = hcImprove(inst.dag, m, start);
        const bool ok = hc.localMinimum &&
                        oracle::isHcLocalMinimum(inst.dag, m, hc.schedule.procs(), hc.schedule.supersteps(), S);
        minima += ok;
        out.require(ok, inst.name + " local minimum");
    }
    out.detail << transitions << " stage transitions non-increasing, " << minima << "/20 local minima confirmed, "
               << t.seconds() << " s";
}

// ---------------------------------------------------------------------------------------
// 6. pipeline against the Cilk baseline at g=5 with uniform lambda

void criterionBaseline(const std::vector<Instance> &suite, Outcome &out) {
    Stopwatch t;
    const PipelineConfig config = suiteConfig();
    std::vector<double> ratios;
    std::size_t notWorse = 0;
    for (const auto &inst : suite) {
        const MachineParams m(inst.P, 5, 5);
        const Weight cilk = scaledCost(inst.dag, m, classicalToBsp(inst.dag, cilkSchedule(inst.dag, m, config.seed)));
        const auto r = runPipeline(inst.dag, m, config);
        out.require(isValidSchedule(inst.dag, m, r.schedule), inst.name + " valid");
        notWorse += r.costScaled <= cilk;
        ratios.push_back(static_cast<double>(r.costScaled) / static_cast<double>(cilk));
    }
    const double share = static_cast<double>(notWorse) / static_cast<double>(suite.size());
    const double geo = geometricMean(ratios);
    const double sec = t.seconds();
    out.require(share >= 0.90, "pipeline not worse on fewer than 90%");
    out.require(geo <= 0.85, "geometric-mean ratio above 0.85");
    out.require(sec <= 1800.0, "runtime above 30 min");
    out.detail << "not worse on " << notWorse << "/" << suite.size() << ", geomean ratio " << geo
               << ", worst " << *std::max_element(ratios.begin(), ratios.end()) << ", " << sec << " s";
}

// ---------------------------------------------------------------------------------------
// 7. multilevel on two-cluster fixtures

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
    // one light edge joins the clusters
    d.setComm(0, 1);
    d.addEdge(0, static_cast<NodeId>(2 * each - 1));
    return d;
}

void criterionMultilevel(Outcome &out) {
    Stopwatch t;
    std::mt19937_64 rng(7007);
    int wins = 0;
    std::ostringstream ratios;
    for (int i = 0; i < 10; ++i) {
        const auto d = twoClusters(rng, 30 + rng() % 40);
        const unsigned P = i % 2 ? 8 : 4;
        const MachineParams m(P, 1, 10, numaFromTree(P, 4));
        const auto r = multilevelSchedule(d, m);
        out.require(isValidSchedule(d, m, r.schedule), "fixture " + std::to_string(i) + " valid");
        const Weight cost = scaledCost(d, m, r.schedule);
        const Weight trivial = trivialScaledCost(d, m);
        wins += cost < trivial;
        ratios << (i ? " " : "") << static_cast<double>(cost) / static_cast<double>(trivial);
    }
    out.require(wins >= 9, "fewer than 9 wins");
    out.detail << wins << "/10 below the single-processor cost (ratios " << ratios.str() << "), " << t.seconds()
               << " s";
}

// ---------------------------------------------------------------------------------------
// 8. coarsening invariants

bool acyclic(const ComputationalDag &d) {
    std::vector<std::size_t> indeg(d.numNodes(), 0);
    for (const auto &e : d.edges()) {
        ++indeg[e.target];
    }
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < d.numNodes(); ++v) {
        if (indeg[v] == 0) {
            stack.push_back(v);
        }
    }
    std::size_t seen = 0;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        ++seen;
        for (const auto &e : d.edges()) {
            if (e.source == v && --indeg[e.target] == 0) {
                stack.push_back(e.target);
            }
        }
    }
    return seen == d.numNodes();
}

std::pair<Weight, Weight> sums(const ComputationalDag &d) {
    Weight w = 0, c = 0;
    for (NodeId v = 0; v < d.numNodes(); ++v) {
        w += d.work(v);
        c += d.comm(v);
    }
    return {w, c};
}

void criterionCoarsening(Outcome &out) {
    Stopwatch t;
    std::mt19937_64 rng(8008);
    std::size_t levels = 0;
    for (int i = 0; i < 50; ++i) {
        std::string label;
        ComputationalDag d;
        do {
            d = generateKind(i % 4, rng, label);
        } while (d.numNodes() < 20 || d.numNodes() > 300);
        const auto total = sums(d);
        const double ratio = i % 2 ? 0.15 : 0.30;
        const auto seq = coarsen(d, ratio);
        out.require(seq.coarseDag().numNodes() >= static_cast<std::size_t>(std::ceil(ratio * d.numNodes())),
                    label + " coarse size");

        // replay every contraction and check each level
        ContractibleDag g(d);
        for (const auto &rec : seq.records()) {
            const auto again = g.contract(rec.u, rec.v);
            out.require(again.merged == rec.merged, label + " replay");
            const auto level = g.compact();
            ++levels;
            out.require(acyclic(level), label + " acyclic");
            out.require(sums(level) == total, label + " weight sums");
        }

        // project a coarse schedule down through every level
        const unsigned P = 2 + static_cast<unsigned>(rng() % 3);
        const MachineParams m(P, 2, 3);
        const auto coarse = withLazyComm(seq.coarseDag(), bspg(seq.coarseDag(), m));
        std::vector<unsigned> proc(g.capacity()), step(g.capacity());
        for (NodeId k = 0; k < seq.coarseIds().size(); ++k) {
            proc[seq.coarseIds()[k]] = coarse.proc(k);
            step[seq.coarseIds()[k]] = coarse.superstep(k);
        }
        for (std::size_t k = seq.size(); k-- > 0;) {
            const auto &rec = seq.records()[k];
            g.undo(rec);
            proc[rec.u] = proc[rec.v] = proc[rec.merged];
            step[rec.u] = step[rec.v] = step[rec.merged];
            std::vector<NodeId> ids;
            const auto level = g.compact(&ids);
            Assignment a;
            for (NodeId v : ids) {
                a.proc.push_back(proc[v]);
                a.step.push_back(step[v]);
            }
            out.require(bothValid(level, m, withLazyComm(level, a)), label + " projection");
            out.require(sums(level) == total, label + " weight sums after undo");
        }
        out.require(g.compact() == d, label + " full undo restores the DAG");
        out.require(bothValid(d, m, uncoarsenRefine(seq, coarse, m)), label + " refined");
    }
    out.detail << "50 DAGs, " << levels << " contraction levels checked both ways, " << t.seconds() << " s";
}

// ---------------------------------------------------------------------------------------
// 9. generator audit

bool weightRule(const ComputationalDag &d) {
    for (NodeId v = 0; v < d.numNodes(); ++v) {
        const Weight expected = d.inDegree(v) == 0 ? 1 : static_cast<Weight>(d.inDegree(v)) - 1;
        if (d.work(v) != expected || d.comm(v) != 1) {
            return false;
        }
    }
    return true;
}

void criterionGenerators(const std::vector<Instance> &suite, Outcome &out) {
    std::mt19937_64 rng(9009);
    std::size_t audited = 0;
    const auto audit = [&](const ComputationalDag &d, const std::string &label) {
        ++audited;
        out.require(weightRule(d), label + " weights");
        out.require(acyclic(d), label + " acyclic");
        const std::string text = writeHyperdag(d);
        const auto back = parseHyperdag(text);
        out.require(back == d && writeHyperdag(back) == text, label + " round trip");
    };
    for (const auto &inst : suite) {
        audit(inst.dag, inst.name);
    }
    for (int i = 0; i < 100; ++i) {
        std::string label;
        audit(generateKind(i % 4, rng, label), label);
    }
    int same = 0;
    for (int i = 0; i < 30; ++i) {
        const auto p = nonemptyPattern(3 + rng() % 30, 0.02 + 0.3 * static_cast<double>(rng() % 100) / 100.0, rng);
        const bool eq = genExp(p, 1) == genSpmv(p);
        same += eq;
        out.require(eq, "exp k=1 differs from spmv");
    }
    // the file round trip through disk as well
    const auto path = std::filesystem::temp_directory_path() / "bspsched_acceptance_roundtrip.hdag";
    saveHyperdag(suite.front().dag, path);
    out.require(loadHyperdag(path) == suite.front().dag, "disk round trip");
    std::filesystem::remove(path);
    out.detail << audited << " DAGs audited and round-tripped, exp(k=1) == spmv on " << same << "/30 patterns";
}

// ---------------------------------------------------------------------------------------
// 10. geometric mean through the suite evaluator

void criterionGeomean(Outcome &out) {
    const std::vector<double> pair = {0.5, 2.0};
    const double direct = geometricMean(pair);
    out.require(std::abs(direct - 1.0) <= 1e-12, "geometricMean({0.5, 2})");

    // two instances on which "mine" costs half, then twice, the baseline
    const auto root = std::filesystem::temp_directory_path() / "bspsched_acceptance_geomean";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root / "base");
    std::filesystem::create_directories(root / "mine");
    ComputationalDag pairDag(2, 4, 1);
    const BspSchedule serial({0, 0}, {0, 0});
    const BspSchedule parallel({0, 1}, {0, 0});
    saveSchedule(serial, 2, root / "base" / "a.sched");
    saveSchedule(parallel, 2, root / "mine" / "a.sched");
    saveSchedule(parallel, 2, root / "base" / "b.sched");
    saveSchedule(serial, 2, root / "mine" / "b.sched");
    std::vector<SuiteInstance> inst = {{"a", "pair", pairDag}, {"b", "pair", pairDag}};
    std::vector<SuiteMachine> machines = {{MachineParams(2, 1, 0), std::nullopt}};
    SuiteOptions o;
    o.algorithms = {"external:" + (root / "base").string(), "external:" + (root / "mine").string()};
    o.baseline = o.algorithms[0];
    const auto report = evaluateSuite(inst, machines, o);
    std::filesystem::remove_all(root);
    std::vector<double> seen;
    double suiteMean = 0.0;
    for (const auto &r : report.records) {
        if (r.algorithm == o.algorithms[1] && r.ratio) {
            seen.push_back(*r.ratio);
        }
    }
    std::sort(seen.begin(), seen.end());
    out.require(seen == pair, "per-instance ratios");
    for (const auto &gsum : report.groups) {
        if (gsum.algorithm == o.algorithms[1]) {
            suiteMean = gsum.geomeanRatio;
        }
    }
    out.require(std::abs(suiteMean - 1.0) <= 1e-12, "suite geometric mean");
    out.detail.precision(17);
    out.detail << "ratios {0.5, 2} give " << suiteMean << " through the suite evaluator";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    app.add_option("--only", only, "Criteria to run")->delimiter(',');
    app.add_flag("--verbose", verbose, "Per-instance timings on stderr");
    CLI11_PARSE(app, argc, argv);
    const auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };

    bool allPass = true;
    const auto report = [&](int k, const char *title, const std::function<void(Outcome &)> &body) {
        if (!wanted(k)) {
            return;
        }
        Outcome out;
        try {
            body(out);
        } catch (const std::exception &e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        allPass = allPass && out.pass;
        std::cout << "criterion " << k << " [" << title << "]: " << (out.pass ? "PASS" : "FAIL") << " - "
                  << out.detail.str() << std::endl;
    };

    report(1, "cost oracle", criterionCostOracle);
    report(2, "ILP optimality", criterionIlpOptimal);
    report(3, "NUMA matrix", criterionNuma);
    std::vector<Instance> suite;
    if (wanted(4) || wanted(5) || wanted(6) || wanted(9)) {
        suite = buildSuite();
    }
    SuiteRuns runs;
    report(4, "validity", [&](Outcome &o) { criterionValidity(suite, runs, o); });
    if (wanted(5)) {
        if (runs.pipelines.size() != suite.size()) {
            runs.pipelines.clear();
            for (const auto &inst : suite) {
                runs.pipelines.push_back(runPipeline(inst.dag, inst.machine(), suiteConfig()));
            }
        }
        report(5, "monotone improvement", [&](Outcome &o) { criterionMonotone(suite, runs, o); });
    }
    report(6, "baseline comparison", [&](Outcome &o) { criterionBaseline(suite, o); });
    report(7, "multilevel", criterionMultilevel);
    report(8, "coarsening", criterionCoarsening);
    report(9, "generators", [&](Outcome &o) { criterionGenerators(suite, o); });
    report(10, "geometric mean", criterionGeomean);
    return allPass ? 0 : 1;
}
