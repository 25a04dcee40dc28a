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


#include "bspsched/report.hpp"

#include "bspsched/cost.hpp"
#include "bspsched/schedule.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace bspsched {

double geometricMean(std::span<const double> ratios) {
    if (ratios.empty()) {
        throw std::invalid_argument("geometric mean of an empty set");
    }
    double sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("geometric mean needs positive finite ratios");
        }
        sum += std::log(r);
    }
    return std::exp(sum / static_cast<double>(ratios.size()));
}

std::string SuiteMachine::label() const {
    std::ostringstream os;
    os << "P" << machine.numProcessors() << "_g" << machine.g() << "_l" << machine.latency();
    if (delta) {
        os << "_numa" << *delta;
    } else if (!machine.isUniform()) {
        os << "_numa";
    }
    return os.str();
}

namespace {

std::string deltaText(const std::optional<Weight> &d) { return d ? std::to_string(*d) : std::string("-"); }

std::string csvField(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::string formatDouble(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

RunRecord runOne(const SuiteInstance &inst, const SuiteMachine &m, const std::string &algorithm,
                 const SuiteOptions &options) {
    RunRecord r;
    r.instance = inst.name;
    r.dataset = inst.dataset;
    r.machine = m.label();
    r.P = m.machine.numProcessors();
    r.g = m.machine.g();
    r.latency = m.machine.latency();
    r.delta = m.delta;
    r.algorithm = algorithm;
    r.denominator = m.machine.denominator();
    const auto start = std::chrono::steady_clock::now();
    BspSchedule schedule;
    try {
        if (algorithm.rfind("external:", 0) == 0) {
            const std::filesystem::path file =
                std::filesystem::path(algorithm.substr(9)) / (inst.name + ".sched");
            unsigned P = 0;
            schedule = loadSchedule(file, &P);
            if (P != r.P) {
                throw std::invalid_argument(file.string() + " is for " + std::to_string(P) + " processors");
            }
        } else {
            schedule = runAlgorithm(algorithm, inst.dag, m.machine, options.config);
        }
    } catch (const TooSmallForMultilevel &e) {
        r.skipped = e.what();
        return r;
    } catch (const std::exception &e) {
        r.skipped = std::string("error: ") + e.what();
        return r;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.valid = isValidSchedule(inst.dag, m.machine, schedule);
    r.costScaled = r.valid ? scaledCost(inst.dag, m.machine, schedule) : 0;
    r.supersteps = schedule.numSupersteps();
    if (options.scheduleDir && r.valid) {
        std::string algoTag = algorithm;
        std::replace_if(algoTag.begin(), algoTag.end(), [](char c) { return c == '/' || c == ':'; }, '_');
        const auto path = *options.scheduleDir / (inst.name + "__" + r.machine + "__" + algoTag + ".sched");
        saveSchedule(schedule, r.P, path);
        r.schedulePath = path.string();
        const BspSchedule back = loadSchedule(path);
        r.valid = isValidSchedule(inst.dag, m.machine, back) && scaledCost(inst.dag, m.machine, back) == r.costScaled;
    }
    return r;
}

} // namespace

void summarize(RunReport &report) {
    std::map<std::pair<std::string, std::string>, Weight> baseline;
    for (const auto &r : report.records) {
        if (r.algorithm == report.baseline && r.skipped.empty() && r.valid) {
            baseline[{r.instance, r.machine}] = r.costScaled;
        }
    }
    using Key = std::tuple<std::string, unsigned, Weight, Weight, std::string>;
    std::map<Key, std::vector<double>> groups;
    std::map<Key, std::optional<Weight>> deltas;
    std::vector<std::string> order;
    for (auto &r : report.records) {
        r.ratio.reset();
        const auto it = baseline.find({r.instance, r.machine});
        if (!r.skipped.empty() || !r.valid || it == baseline.end() || it->second <= 0 || r.costScaled <= 0) {
            continue;
        }
        r.ratio = static_cast<double>(r.costScaled) / static_cast<double>(it->second);
        const Key k{r.dataset, r.P, r.g, r.delta ? *r.delta : -1, r.algorithm};
        groups[k].push_back(*r.ratio);
        deltas[k] = r.delta;
    }
    report.groups.clear();
    for (const auto &[k, ratios] : groups) {
        report.groups.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), deltas[k], std::get<4>(k),
                                 ratios.size(), geometricMean(ratios)});
    }
}

RunReport evaluateSuite(const std::vector<SuiteInstance> &instances, const std::vector<SuiteMachine> &machines,
                        const SuiteOptions &options) {
    if (instances.empty() || machines.empty() || options.algorithms.empty()) {
        throw std::invalid_argument("suite needs instances, machines and algorithms");
    }
    if (std::find(options.algorithms.begin(), options.algorithms.end(), options.baseline) ==
        options.algorithms.end()) {
        throw std::invalid_argument("baseline '" + options.baseline + "' is not among the algorithms");
    }
    struct Task {
        std::size_t instance, machine, algorithm;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t m = 0; m < machines.size(); ++m) {
            for (std::size_t a = 0; a < options.algorithms.size(); ++a) {
                tasks.push_back({i, m, a});
            }
        }
    }
    RunReport report;
    report.baseline = options.baseline;
    report.records.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex progressMutex;
    const auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const Task &task = tasks[t];
            report.records[t] = runOne(instances[task.instance], machines[task.machine],
                                       options.algorithms[task.algorithm], options);
            if (options.progress) {
                std::lock_guard lock(progressMutex);
                options.progress(report.records[t]);
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    summarize(report);
    return report;
}

std::string RunReport::toCsv() const {
    std::ostringstream os;
    os << "instance,dataset,machine,P,g,l,delta,algorithm,cost,cost_scaled,denominator,supersteps,seconds,valid,"
          "ratio,skipped,schedule\n";
    for (const auto &r : records) {
        os << csvField(r.instance) << ',' << csvField(r.dataset) << ',' << r.machine << ',' << r.P << ',' << r.g << ','
           << r.latency << ',' << deltaText(r.delta) << ',' << csvField(r.algorithm) << ','
           << (r.skipped.empty() ? formatDouble(r.cost(), 12) : "") << ',' << r.costScaled << ',' << r.denominator
           << ',' << r.supersteps << ',' << formatDouble(r.seconds, 4) << ',' << (r.valid ? 1 : 0) << ','
           << (r.ratio ? formatDouble(*r.ratio, 12) : "") << ',' << csvField(r.skipped) << ','
           << csvField(r.schedulePath) << '\n';
    }
    return os.str();
}

std::string RunReport::groupsCsv() const {
    std::ostringstream os;
    os << "dataset,P,g,delta,algorithm,count,geomean_ratio\n";
    for (const auto &g : groups) {
        os << csvField(g.dataset) << ',' << g.P << ',' << g.g << ',' << deltaText(g.delta) << ','
           << csvField(g.algorithm) << ',' << g.count << ',' << formatDouble(g.geomeanRatio, 12) << '\n';
    }
    return os.str();
}

std::string RunReport::toJson() const {
    nlohmann::json j;
    j["baseline"] = baseline;
    j["records"] = nlohmann::json::array();
    for (const auto &r : records) {
        nlohmann::json o{{"instance", r.instance},     {"dataset", r.dataset},   {"machine", r.machine},
                         {"P", r.P},                   {"g", r.g},               {"l", r.latency},
                         {"algorithm", r.algorithm},   {"cost_scaled", r.costScaled},
                         {"denominator", r.denominator}, {"supersteps", r.supersteps},
                         {"seconds", r.seconds},       {"valid", r.valid}};
        o["delta"] = r.delta ? nlohmann::json(*r.delta) : nlohmann::json();
        o["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json();
        if (!r.skipped.empty()) {
            o["skipped"] = r.skipped;
        }
        if (!r.schedulePath.empty()) {
            o["schedule"] = r.schedulePath;
        }
        j["records"].push_back(std::move(o));
    }
    j["groups"] = nlohmann::json::array();
    for (const auto &g : groups) {
        nlohmann::json o{{"dataset", g.dataset}, {"P", g.P}, {"g", g.g}, {"algorithm", g.algorithm},
                         {"count", g.count}, {"geomean_ratio", g.geomeanRatio}};
        o["delta"] = g.delta ? nlohmann::json(*g.delta) : nlohmann::json();
        j["groups"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

std::string RunReport::toTable() const {
    std::vector<std::string> algorithms;
    for (const auto &g : groups) {
        if (std::find(algorithms.begin(), algorithms.end(), g.algorithm) == algorithms.end()) {
            algorithms.push_back(g.algorithm);
        }
    }
    using Row = std::tuple<std::string, unsigned, Weight, Weight>;
    std::map<Row, std::map<std::string, double>> rows;
    for (const auto &g : groups) {
        rows[{g.dataset, g.P, g.g, g.delta ? *g.delta : -1}][g.algorithm] = g.geomeanRatio;
    }
    std::ostringstream os;
    os << "geometric-mean cost ratio vs " << baseline << "\n";
    os << std::left << std::setw(10) << "dataset" << std::setw(5) << "P" << std::setw(5) << "g" << std::setw(7)
       << "delta";
    for (const auto &a : algorithms) {
        os << std::setw(std::max<int>(12, static_cast<int>(a.size()) + 2)) << a;
    }
    os << '\n';
    for (const auto &[k, cells] : rows) {
        os << std::setw(10) << std::get<0>(k) << std::setw(5) << std::get<1>(k) << std::setw(5) << std::get<2>(k)
           << std::setw(7) << (std::get<3>(k) < 0 ? std::string("-") : std::to_string(std::get<3>(k)));
        for (const auto &a : algorithms) {
            const auto it = cells.find(a);
            std::ostringstream cell;
            if (it != cells.end()) {
                cell << std::fixed << std::setprecision(3) << it->second;
            } else {
                cell << "-";
            }
            os << std::setw(std::max<int>(12, static_cast<int>(a.size()) + 2)) << cell.str();
        }
        os << '\n';
    }
    return os.str();
}

} // namespace bspsched
