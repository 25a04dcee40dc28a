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


// bspsched: schedule, generate and bench subcommands.

#include "bspsched/cost.hpp"
#include "bspsched/generators.hpp"
#include "bspsched/hyperdag_io.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/pipeline.hpp"
#include "bspsched/report.hpp"
#include "bspsched/schedule.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace bspsched;

namespace {

void writeFile(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

BudgetMode parseBudgetMode(const std::string &s) {
    if (s == "wall") {
        return BudgetMode::Wall;
    }
    if (s == "ops") {
        return BudgetMode::Ops;
    }
    throw std::invalid_argument("budget mode must be wall or ops");
}

struct ScheduleArgs {
    std::string dag;
    unsigned P = 1;
    Weight g = 1;
    Weight l = 0;
    Weight numaTree = 0;
    std::string numaMatrix;
    std::string algo = "pipeline";
    std::uint64_t seed = 1;
    std::string budgetMode = "wall";
    std::string milpCommand;
    std::string out;
};

int runSchedule(const ScheduleArgs &a) {
    const ComputationalDag dag = loadHyperdag(a.dag);
    LambdaMatrix lambda = uniformLambda(a.P);
    if (a.numaTree > 0) {
        lambda = numaFromTree(a.P, a.numaTree);
    } else if (!a.numaMatrix.empty()) {
        lambda = loadLambdaMatrix(a.numaMatrix);
    }
    const MachineParams machine(a.P, a.g, a.l, lambda);
    PipelineConfig config;
    config.budgetMode = parseBudgetMode(a.budgetMode);
    config.seed = a.seed;
    std::unique_ptr<milp::MilpBackend> backend;
    if (!a.milpCommand.empty()) {
        backend = std::make_unique<milp::ExternalCommandBackend>(a.milpCommand);
        config.backend = backend.get();
    }

    const fs::path out(a.out);
    fs::create_directories(out);
    BspSchedule schedule;
    nlohmann::json extra;
    if (a.algo == "pipeline") {
        PipelineResult r = runPipeline(dag, machine, config);
        std::string stages = "stage,cost_scaled,seconds,accepted\n";
        for (const auto &s : r.stages) {
            stages += s.stage + "," + std::to_string(s.costScaled) + "," + std::to_string(s.seconds) + "," +
                      (s.accepted ? "1" : "0") + "\n";
        }
        writeFile(out / "stages.csv", stages);
        extra["proven_optimal"] = r.provenOptimal;
        schedule = std::move(r.schedule);
    } else if (a.algo == "multilevel") {
        MultilevelResult r = runMultilevel(dag, machine, config);
        std::string runs = "ratio,coarse_nodes,cost_scaled,selected\n";
        for (std::size_t i = 0; i < r.runs.size(); ++i) {
            runs += std::to_string(r.runs[i].ratio) + "," + std::to_string(r.runs[i].coarseNodes) + "," +
                    std::to_string(r.runs[i].costScaled) + "," + (i == r.selected ? "1" : "0") + "\n";
        }
        writeFile(out / "multilevel_runs.csv", runs);
        schedule = std::move(r.schedule);
    } else {
        schedule = runAlgorithm(a.algo, dag, machine, config);
    }

    const auto violations = validateSchedule(dag, machine, schedule);
    if (!violations.empty()) {
        std::cerr << "invalid schedule: " << violations.front().detail << "\n";
        return 2;
    }
    const CostBreakdown cost = evaluateCost(dag, machine, schedule);
    saveSchedule(schedule, a.P, out / "schedule.sched");
    writeFile(out / "cost.csv", cost.toCsv());
    nlohmann::json j = nlohmann::json::parse(cost.toJson());
    j["algorithm"] = a.algo;
    j["dag"] = a.dag;
    for (auto &[k, v] : extra.items()) {
        j[k] = v;
    }
    writeFile(out / "cost.json", j.dump(2) + "\n");
    std::cout << a.algo << " cost " << cost.total().toString() << " supersteps " << schedule.numSupersteps()
              << "\n";
    return 0;
}

struct GenerateArgs {
    std::string kind = "spmv";
    std::size_t N = 10;
    double q = 0.1;
    unsigned k = 1;
    std::uint64_t seed = 1;
    std::string matrix;
    std::size_t sourceIndex = 0;
    bool shareA = false;
    std::string out;
};

int runGenerate(const GenerateArgs &a) {
    const SparsityPattern pattern = a.matrix.empty() ? randomPattern(a.N, a.q, a.seed) : loadMatrixMarketPattern(a.matrix);
    ComputationalDag dag;
    if (a.kind == "spmv") {
        dag = genSpmv(pattern);
    } else if (a.kind == "exp") {
        dag = genExp(pattern, a.k, ExpOptions{a.shareA});
    } else if (a.kind == "cg") {
        dag = genCg(pattern, a.k);
    } else if (a.kind == "knn") {
        dag = genKnn(pattern, a.k, a.sourceIndex);
    } else {
        throw std::invalid_argument("unknown kind '" + a.kind + "'");
    }
    saveHyperdag(dag, a.out);
    std::cout << a.kind << " nodes " << dag.numNodes() << " edges " << dag.numEdges() << "\n";
    return 0;
}

template <typename T> std::vector<T> asList(const nlohmann::json &j, const char *key, std::vector<T> fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const auto &v = j.at(key);
    if (v.is_array()) {
        return v.get<std::vector<T>>();
    }
    return {v.get<T>()};
}

/// Suite config (JSON):
///   {"P": [4, 8], "g": [1, 3], "l": [5], "numa_delta": [0, 2],
///    "algorithms": ["cilk", "pipeline"], "baseline": "cilk",
///    "budget_mode": "ops", "threads": 1, "seed": 1, "save_schedules": true}
/// numa_delta 0 means uniform lambda.
int runBench(const std::string &suiteDir, const std::string &configPath, const std::string &outDir) {
    std::ifstream in(configPath);
    if (!in) {
        throw std::runtime_error("cannot open " + configPath);
    }
    const nlohmann::json cfg = nlohmann::json::parse(in);

    std::vector<SuiteInstance> instances;
    std::vector<fs::path> files;
    for (const auto &e : fs::recursive_directory_iterator(suiteDir)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".hdag" || ext == ".hyperdag" || ext == ".txt")) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        const fs::path rel = fs::relative(f, suiteDir);
        std::string dataset = rel.has_parent_path() ? rel.parent_path().generic_string() : "suite";
        instances.push_back({f.stem().string(), dataset, loadHyperdag(f)});
    }

    std::vector<SuiteMachine> machines;
    for (unsigned P : asList<unsigned>(cfg, "P", {4})) {
        for (Weight g : asList<Weight>(cfg, "g", {1})) {
            for (Weight l : asList<Weight>(cfg, "l", {5})) {
                for (Weight d : asList<Weight>(cfg, "numa_delta", {0})) {
                    if (d > 0) {
                        machines.push_back({MachineParams(P, g, l, numaFromTree(P, d)), d});
                    } else {
                        machines.push_back({MachineParams(P, g, l), std::nullopt});
                    }
                }
            }
        }
    }

    SuiteOptions options;
    options.config.budgetMode = parseBudgetMode(cfg.value("budget_mode", std::string("wall")));
    options.config.seed = cfg.value("seed", std::uint64_t{1});
    options.algorithms = asList<std::string>(cfg, "algorithms", {"cilk", "pipeline"});
    options.baseline = cfg.value("baseline", std::string("cilk"));
    options.threads = cfg.value("threads", 1u);
    const fs::path out(outDir);
    fs::create_directories(out);
    if (cfg.value("save_schedules", true)) {
        options.scheduleDir = out / "schedules";
        fs::create_directories(*options.scheduleDir);
    }
    options.progress = [](const RunRecord &r) {
        std::cerr << r.instance << " " << r.machine << " " << r.algorithm << " "
                  << (r.skipped.empty() ? std::to_string(r.cost()) : r.skipped) << "\n";
    };

    const RunReport report = evaluateSuite(instances, machines, options);
    writeFile(out / "runs.csv", report.toCsv());
    writeFile(out / "groups.csv", report.groupsCsv());
    writeFile(out / "report.json", report.toJson());
    writeFile(out / "table.txt", report.toTable());
    std::cout << report.toTable();
    const bool allValid = std::all_of(report.records.begin(), report.records.end(),
                                      [](const RunRecord &r) { return !r.skipped.empty() || r.valid; });
    return allValid ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"BSP scheduling of computational DAGs"};
    app.require_subcommand(1);

    ScheduleArgs sa;
    auto *sched = app.add_subcommand("schedule", "Schedule one DAG");
    sched->add_option("--dag", sa.dag, "hyperDAG file")->required()->check(CLI::ExistingFile);
    sched->add_option("--P", sa.P, "Number of processors")->required()->check(CLI::PositiveNumber);
    sched->add_option("--g", sa.g, "Cost per communicated data unit")->required();
    sched->add_option("--l", sa.l, "Latency per superstep")->required();
    auto *tree = sched->add_option("--numa-tree", sa.numaTree, "Binary-tree NUMA factor delta");
    sched->add_option("--numa-matrix", sa.numaMatrix, "File with the P x P lambda matrix")
        ->check(CLI::ExistingFile)
        ->excludes(tree);
    sched->add_option("--algo", sa.algo, "Algorithm")
        ->check(CLI::IsMember(algorithmNames()));
    sched->add_option("--seed", sa.seed, "Seed for randomized baselines");
    sched->add_option("--budget-mode", sa.budgetMode, "wall or ops")->check(CLI::IsMember({"wall", "ops"}));
    sched->add_option("--milp-command", sa.milpCommand, "External MILP solver command");
    sched->add_option("--out", sa.out, "Output directory")->required();

    GenerateArgs ga;
    auto *gen = app.add_subcommand("generate", "Generate a fine-grained DAG");
    gen->add_option("--kind", ga.kind, "spmv, exp, cg or knn")->check(CLI::IsMember({"spmv", "exp", "cg", "knn"}));
    gen->add_option("--N", ga.N, "Matrix dimension");
    gen->add_option("--q", ga.q, "Nonzero probability");
    gen->add_option("--k", ga.k, "Iterations");
    gen->add_option("--seed", ga.seed, "Pattern seed");
    gen->add_option("--matrix", ga.matrix, "MatrixMarket pattern instead of a random one")->check(CLI::ExistingFile);
    gen->add_option("--source-index", ga.sourceIndex, "Start entry for knn");
    gen->add_flag("--share-a", ga.shareA, "exp: reuse matrix-entry sources across layers");
    gen->add_option("--out", ga.out, "Output hyperDAG file")->required();

    std::string suite, config, benchOut;
    auto *bench = app.add_subcommand("bench", "Run a suite and report cost ratios");
    bench->add_option("--suite", suite, "Directory of hyperDAG files")->required()->check(CLI::ExistingDirectory);
    bench->add_option("--config", config, "JSON suite config")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", benchOut, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (sched->parsed()) {
            return runSchedule(sa);
        }
        if (gen->parsed()) {
            return runGenerate(ga);
        }
        return runBench(suite, config, benchOut);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
