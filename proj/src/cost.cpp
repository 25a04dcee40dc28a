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

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bspsched {

std::size_t CostBreakdown::numNonemptySupersteps() const {
    return static_cast<std::size_t>(std::count(nonempty.begin(), nonempty.end(), true));
}

Rational CostBreakdown::superstepCost(std::size_t s) const {
    return Rational(denominator * work[s] + g * commScaled[s] + denominator * latency[s], denominator);
}

std::string CostBreakdown::toCsv() const {
    std::ostringstream out;
    out << "superstep,work,comm,latency,total\n";
    for (std::size_t s = 0; s < numSupersteps(); ++s) {
        if (!nonempty[s]) {
            continue;
        }
        out << s << ',' << work[s] << ',' << comm(s).toString() << ',' << latency[s] << ','
            << superstepCost(s).toString() << '\n';
    }
    return out.str();
}

std::string CostBreakdown::toJson() const {
    nlohmann::json j;
    j["total"] = total().toString();
    j["total_value"] = total().toDouble();
    j["g"] = g;
    j["denominator"] = denominator;
    auto &rows = j["supersteps"] = nlohmann::json::array();
    for (std::size_t s = 0; s < numSupersteps(); ++s) {
        if (!nonempty[s]) {
            continue;
        }
        nlohmann::json row;
        row["superstep"] = s;
        row["work"] = work[s];
        row["comm"] = comm(s).toString();
        row["latency"] = latency[s];
        row["total"] = superstepCost(s).toString();
        std::vector<std::string> send;
        std::vector<std::string> rec;
        for (std::size_t p = 0; p < sendScaled.size(); ++p) {
            send.push_back(Rational(sendScaled[p][s], denominator).toString());
            rec.push_back(Rational(recScaled[p][s], denominator).toString());
        }
        row["send"] = send;
        row["receive"] = rec;
        rows.push_back(std::move(row));
    }
    return j.dump(2);
}

CostBreakdown evaluateCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule) {
    const auto violations = validateSchedule(dag, machine, schedule);
    if (!violations.empty()) {
        throw std::invalid_argument("cannot cost an invalid schedule: " + violations.front().detail);
    }
    const unsigned numProcs = machine.numProcessors();
    const std::size_t numSteps = schedule.numSupersteps();
    CostBreakdown out;
    out.denominator = machine.denominator();
    out.g = machine.g();
    out.work.assign(numSteps, 0);
    out.commScaled.assign(numSteps, 0);
    out.latency.assign(numSteps, 0);
    out.nonempty.assign(numSteps, false);
    out.sendScaled.assign(numProcs, std::vector<Weight>(numSteps, 0));
    out.recScaled.assign(numProcs, std::vector<Weight>(numSteps, 0));

    std::vector<std::vector<Weight>> procWork(numProcs, std::vector<Weight>(numSteps, 0));
    for (NodeId v = 0; v < schedule.numNodes(); ++v) {
        procWork[schedule.proc(v)][schedule.superstep(v)] += dag.work(v);
        out.nonempty[schedule.superstep(v)] = true;
    }
    for (const auto &c : schedule.comm()) {
        const Weight volume = machine.scaledLambda(c.from, c.to) * dag.comm(c.node);
        out.sendScaled[c.from][c.step] += volume;
        out.recScaled[c.to][c.step] += volume;
        out.nonempty[c.step] = true;
    }
    for (std::size_t s = 0; s < numSteps; ++s) {
        for (unsigned p = 0; p < numProcs; ++p) {
            out.work[s] = std::max(out.work[s], procWork[p][s]);
            out.commScaled[s] = std::max({out.commScaled[s], out.sendScaled[p][s], out.recScaled[p][s]});
        }
        if (out.nonempty[s]) {
            out.latency[s] = machine.latency();
        }
        out.totalScaled += out.denominator * (out.work[s] + out.latency[s]) + out.g * out.commScaled[s];
    }
    return out;
}

Weight scaledCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule) {
    const unsigned numProcs = machine.numProcessors();
    const std::size_t numSteps = schedule.numSupersteps();
    std::vector<Weight> work(numSteps * numProcs, 0);
    std::vector<Weight> send(numSteps * numProcs, 0);
    std::vector<Weight> rec(numSteps * numProcs, 0);
    std::vector<char> used(numSteps, 0);
    for (NodeId v = 0; v < schedule.numNodes(); ++v) {
        work[schedule.superstep(v) * numProcs + schedule.proc(v)] += dag.work(v);
        used[schedule.superstep(v)] = 1;
    }
    for (const auto &c : schedule.comm()) {
        const Weight volume = machine.scaledLambda(c.from, c.to) * dag.comm(c.node);
        send[c.step * numProcs + c.from] += volume;
        rec[c.step * numProcs + c.to] += volume;
        used[c.step] = 1;
    }
    const Weight denom = machine.denominator();
    Weight total = 0;
    for (std::size_t s = 0; s < numSteps; ++s) {
        if (!used[s]) {
            continue;
        }
        Weight w = 0;
        Weight h = 0;
        for (unsigned p = 0; p < numProcs; ++p) {
            w = std::max(w, work[s * numProcs + p]);
            h = std::max({h, send[s * numProcs + p], rec[s * numProcs + p]});
        }
        total += denom * (w + machine.latency()) + machine.g() * h;
    }
    return total;
}

Rational totalCost(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule) {
    return Rational(scaledCost(dag, machine, schedule), machine.denominator());
}

Weight trivialScaledCost(const ComputationalDag &dag, const MachineParams &machine) {
    if (dag.numNodes() == 0) {
        return 0;
    }
    return machine.denominator() * (dag.totalWork() + machine.latency());
}

} // namespace bspsched
