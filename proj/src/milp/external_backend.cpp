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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <unistd.h>

namespace bspsched::milp {

namespace {

std::string shellQuote(const std::string &s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

} // namespace

SolveResult ExternalCommandBackend::solve(const MilpModel &model, const SolveOptions &options) const {
    static std::atomic<unsigned> counter{0};
    const auto start = std::chrono::steady_clock::now();
    const auto dir = std::filesystem::temp_directory_path() /
                     ("bspsched-milp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    const auto modelPath = dir / "model.json";
    const auto solutionPath = dir / "solution.txt";
    {
        std::ofstream out(modelPath);
        out << model.toJson();
    }
    std::string command = command_ + " " + shellQuote(modelPath.string()) + " " + shellQuote(solutionPath.string());
    if (std::isfinite(options.timeLimitSeconds)) {
        command += " " + std::to_string(options.timeLimitSeconds);
    }
    const int rc = std::system(command.c_str());

    SolveResult result;
    std::ifstream in(solutionPath);
    if (rc != 0 || !in) {
        std::filesystem::remove_all(dir);
        throw std::runtime_error("external solver command failed: " + command_);
    }
    std::string word;
    std::string status;
    in >> word >> status;
    if (word != "status") {
        std::filesystem::remove_all(dir);
        throw std::runtime_error("external solver wrote no status line");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.numVariables(); ++i) {
        const auto &name = model.variable(i).name;
        index[name.empty() ? "x" + std::to_string(i) : name] = i;
    }
    if (status == "optimal" || status == "feasible") {
        result.values.assign(model.numVariables(), 0.0);
        std::string name;
        double value = 0.0;
        while (in >> name >> value) {
            const auto it = index.find(name);
            if (it != index.end()) {
                result.values[it->second] = value;
            }
        }
        result.status = status == "optimal" ? SolveStatus::Optimal : SolveStatus::Feasible;
        result.objective = model.evaluateObjective(result.values);
    } else if (status == "infeasible") {
        result.status = SolveStatus::Infeasible;
    } else {
        result.status = SolveStatus::NoSolution;
    }
    std::filesystem::remove_all(dir);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace bspsched::milp
