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


#pragma once

#include "bspsched/dag.hpp"
#include "bspsched/machine.hpp"
#include "bspsched/pipeline.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bspsched {

/// exp of the mean of ln r. Throws std::invalid_argument on an empty range or a
/// non-positive ratio.
double geometricMean(std::span<const double> ratios);

struct SuiteInstance {
    std::string name;
    /// Grouping key, e.g. tiny or small.
    std::string dataset;
    ComputationalDag dag;
};

struct SuiteMachine {
    MachineParams machine;
    /// Tree NUMA parameter; empty for uniform or file-given matrices.
    std::optional<Weight> delta;
    std::string label() const;
};

struct RunRecord {
    std::string instance;
    std::string dataset;
    std::string machine;
    unsigned P = 0;
    Weight g = 0;
    Weight latency = 0;
    std::optional<Weight> delta;
    std::string algorithm;
    /// Empty when the run completed; otherwise why it was skipped.
    std::string skipped;
    Weight costScaled = 0;
    Weight denominator = 1;
    std::size_t supersteps = 0;
    double seconds = 0.0;
    bool valid = false;
    std::string schedulePath;
    /// cost / baseline cost on the same instance and machine.
    std::optional<double> ratio;

    double cost() const { return static_cast<double>(costScaled) / static_cast<double>(denominator); }
};

struct GroupSummary {
    std::string dataset;
    unsigned P = 0;
    Weight g = 0;
    std::optional<Weight> delta;
    std::string algorithm;
    std::size_t count = 0;
    double geomeanRatio = 0.0;
};

struct RunReport {
    std::string baseline;
    std::vector<RunRecord> records;
    std::vector<GroupSummary> groups;

    std::string toCsv() const;
    std::string groupsCsv() const;
    std::string toJson() const;
    /// Geometric-mean ratios, one row per (dataset, P, g, delta) and one column per algorithm.
    std::string toTable() const;
};

struct SuiteOptions {
    PipelineConfig config;
    /// Names accepted by runAlgorithm, or "external:DIR" to read DIR/<instance>.sched.
    std::vector<std::string> algorithms;
    std::string baseline = "cilk";
    unsigned threads = 1;
    /// When set, every schedule is written here, reloaded and checked.
    std::optional<std::filesystem::path> scheduleDir;
    std::function<void(const RunRecord &)> progress;
};

/// Runs every algorithm on every (instance, machine) pair and aggregates cost ratios
/// against the baseline. Throws std::invalid_argument when a set is empty or the baseline
/// is not among the algorithms.
RunReport evaluateSuite(const std::vector<SuiteInstance> &instances, const std::vector<SuiteMachine> &machines,
                        const SuiteOptions &options);

/// Recomputes ratios and group geometric means from the records.
void summarize(RunReport &report);

} // namespace bspsched
