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

#include "bspsched/schedule.hpp"

#include "text_reader.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace bspsched {

namespace {

constexpr unsigned kNever = std::numeric_limits<unsigned>::max();

std::uint64_t pairKey(NodeId v, unsigned p) { return (static_cast<std::uint64_t>(v) << 32) | p; }

} // namespace

unsigned Assignment::numSupersteps() const {
    unsigned s = 0;
    for (unsigned t : step) {
        s = std::max(s, t + 1);
    }
    return s;
}

BspSchedule::BspSchedule(std::vector<unsigned> proc, std::vector<unsigned> step, std::vector<CommStep> comm)
    : proc_(std::move(proc)), step_(std::move(step)), comm_(std::move(comm)) {
    if (proc_.size() != step_.size()) {
        throw std::invalid_argument("processor and superstep maps differ in length");
    }
}

BspSchedule::BspSchedule(Assignment assignment, std::vector<CommStep> comm)
    : BspSchedule(std::move(assignment.proc), std::move(assignment.step), std::move(comm)) {}

void BspSchedule::setComm(std::vector<CommStep> comm) { comm_ = std::move(comm); }

unsigned BspSchedule::numSupersteps() const {
    unsigned s = 0;
    for (unsigned t : step_) {
        s = std::max(s, t + 1);
    }
    for (const auto &c : comm_) {
        s = std::max(s, c.step + 1);
    }
    return s;
}

void BspSchedule::compactSupersteps() {
    const unsigned numSteps = numSupersteps();
    std::vector<char> used(numSteps, 0);
    for (unsigned t : step_) {
        used[t] = 1;
    }
    for (const auto &c : comm_) {
        used[c.step] = 1;
    }
    std::vector<unsigned> rank(numSteps, 0);
    unsigned next = 0;
    for (unsigned s = 0; s < numSteps; ++s) {
        rank[s] = next;
        next += used[s];
    }
    for (auto &t : step_) {
        t = rank[t];
    }
    for (auto &c : comm_) {
        c.step = rank[c.step];
    }
}

const char *kindName(ScheduleViolation::Kind kind) {
    switch (kind) {
    case ScheduleViolation::Kind::Shape:
        return "shape";
    case ScheduleViolation::Kind::ProcessorOutOfRange:
        return "processor out of range";
    case ScheduleViolation::Kind::EdgeRule:
        return "edge rule";
    case ScheduleViolation::Kind::SendRule:
        return "send rule";
    case ScheduleViolation::Kind::SelfSend:
        return "self send";
    }
    return "unknown";
}

std::vector<ScheduleViolation> validateSchedule(const ComputationalDag &dag, const MachineParams &machine,
                                                const BspSchedule &schedule) {
    using Kind = ScheduleViolation::Kind;
    std::vector<ScheduleViolation> out;
    const std::size_t n = dag.numNodes();
    const unsigned numProcs = machine.numProcessors();

    if (schedule.numNodes() != n) {
        out.push_back({Kind::Shape, "schedule covers " + std::to_string(schedule.numNodes()) + " nodes, DAG has " +
                                        std::to_string(n)});
        return out;
    }
    for (NodeId v = 0; v < n; ++v) {
        if (schedule.proc(v) >= numProcs) {
            out.push_back({Kind::ProcessorOutOfRange,
                           "node " + std::to_string(v) + " on processor " + std::to_string(schedule.proc(v))});
        }
    }
    bool commShapeOk = true;
    for (const auto &c : schedule.comm()) {
        if (c.node >= n || c.from >= numProcs || c.to >= numProcs) {
            commShapeOk = false;
            out.push_back({Kind::ProcessorOutOfRange, "communication (" + std::to_string(c.node) + "," +
                                                          std::to_string(c.from) + "," + std::to_string(c.to) + "," +
                                                          std::to_string(c.step) + ") out of range"});
        } else if (c.from == c.to) {
            out.push_back({Kind::SelfSend, "communication of node " + std::to_string(c.node) + " from processor " +
                                               std::to_string(c.from) + " to itself"});
        }
    }
    if (!out.empty() && !commShapeOk) {
        return out;
    }

    // earliest arrival of each value on each processor through the communication schedule
    std::unordered_map<std::uint64_t, unsigned> arrival;
    arrival.reserve(schedule.comm().size() * 2);
    for (const auto &c : schedule.comm()) {
        auto [it, inserted] = arrival.try_emplace(pairKey(c.node, c.to), c.step);
        if (!inserted) {
            it->second = std::min(it->second, c.step);
        }
    }
    const auto arrivalAt = [&](NodeId v, unsigned p) {
        const auto it = arrival.find(pairKey(v, p));
        return it == arrival.end() ? kNever : it->second;
    };

    for (NodeId u = 0; u < n; ++u) {
        if (schedule.proc(u) >= numProcs) {
            continue;
        }
        for (NodeId v : dag.successors(u)) {
            if (schedule.proc(v) >= numProcs) {
                continue;
            }
            if (schedule.proc(u) == schedule.proc(v)) {
                if (schedule.superstep(u) > schedule.superstep(v)) {
                    out.push_back({Kind::EdgeRule, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                                       ") on one processor goes backwards in supersteps"});
                }
            } else {
                const unsigned t = arrivalAt(u, schedule.proc(v));
                if (t == kNever || t >= schedule.superstep(v)) {
                    out.push_back({Kind::EdgeRule, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                                       "): value not delivered to processor " +
                                                       std::to_string(schedule.proc(v)) + " before superstep " +
                                                       std::to_string(schedule.superstep(v))});
                }
            }
        }
    }

    for (const auto &c : schedule.comm()) {
        if (c.from == c.to) {
            continue;
        }
        const bool fromProducer = schedule.proc(c.node) == c.from && schedule.superstep(c.node) <= c.step;
        if (fromProducer) {
            continue;
        }
        const unsigned t = arrivalAt(c.node, c.from);
        if (t == kNever || t >= c.step) {
            out.push_back({Kind::SendRule, "communication (" + std::to_string(c.node) + "," + std::to_string(c.from) +
                                               "," + std::to_string(c.to) + "," + std::to_string(c.step) +
                                               "): value not present on the sender"});
        }
    }
    return out;
}

bool isValidSchedule(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule) {
    return validateSchedule(dag, machine, schedule).empty();
}

std::vector<CommStep> lazyCommSchedule(const ComputationalDag &dag, const std::vector<unsigned> &proc,
                                       const std::vector<unsigned> &step) {
    const std::size_t n = dag.numNodes();
    if (proc.size() != n || step.size() != n) {
        throw std::invalid_argument("assignment does not cover the DAG");
    }
    std::vector<CommStep> comm;
    std::vector<std::pair<unsigned, unsigned>> needs; // (target processor, first superstep needed)
    for (NodeId u = 0; u < n; ++u) {
        needs.clear();
        for (NodeId v : dag.successors(u)) {
            if (proc[v] == proc[u]) {
                if (step[u] > step[v]) {
                    throw std::invalid_argument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                                ") goes backwards in supersteps");
                }
                continue;
            }
            if (step[u] >= step[v]) {
                throw std::invalid_argument("cross-processor edge (" + std::to_string(u) + "," + std::to_string(v) +
                                            ") within one superstep");
            }
            needs.emplace_back(proc[v], step[v]);
        }
        std::sort(needs.begin(), needs.end());
        for (std::size_t i = 0; i < needs.size(); ++i) {
            if (i > 0 && needs[i].first == needs[i - 1].first) {
                continue;
            }
            comm.push_back({u, proc[u], needs[i].first, needs[i].second - 1});
        }
    }
    return comm;
}

BspSchedule withLazyComm(const ComputationalDag &dag, const Assignment &assignment) {
    auto comm = lazyCommSchedule(dag, assignment.proc, assignment.step);
    return BspSchedule(assignment, std::move(comm));
}

bool hasOnlyDirectSends(const BspSchedule &schedule) {
    return std::all_of(schedule.comm().begin(), schedule.comm().end(),
                       [&](const CommStep &c) { return c.node < schedule.numNodes() && schedule.proc(c.node) == c.from; });
}

void pruneUnusedComm(const ComputationalDag &dag, BspSchedule &schedule) {
    auto comm = schedule.comm();
    std::sort(comm.begin(), comm.end(), [](const CommStep &a, const CommStep &b) {
        return std::tie(a.node, a.to, a.step, a.from) < std::tie(b.node, b.to, b.step, b.from);
    });
    if (!hasOnlyDirectSends(schedule)) {
        comm.erase(std::unique(comm.begin(), comm.end()), comm.end());
        schedule.setComm(std::move(comm));
        return;
    }
    std::vector<CommStep> kept;
    for (std::size_t i = 0; i < comm.size(); ++i) {
        if (i > 0 && comm[i].node == comm[i - 1].node && comm[i].to == comm[i - 1].to) {
            continue;
        }
        const auto succ = dag.successors(comm[i].node);
        const bool needed = std::any_of(succ.begin(), succ.end(), [&](NodeId x) {
            return schedule.proc(x) == comm[i].to && schedule.superstep(x) > comm[i].step;
        });
        if (needed) {
            kept.push_back(comm[i]);
        }
    }
    std::sort(kept.begin(), kept.end());
    schedule.setComm(std::move(kept));
}

std::string writeScheduleText(const BspSchedule &schedule, unsigned numProcessors) {
    std::ostringstream out;
    out << numProcessors << ' ' << schedule.numSupersteps() << ' ' << schedule.numNodes() << '\n';
    for (NodeId v = 0; v < schedule.numNodes(); ++v) {
        out << v << ' ' << schedule.proc(v) << ' ' << schedule.superstep(v) << '\n';
    }
    auto comm = schedule.comm();
    std::sort(comm.begin(), comm.end());
    for (const auto &c : comm) {
        out << c.node << ' ' << c.from << ' ' << c.to << ' ' << c.step << '\n';
    }
    return out.str();
}

BspSchedule parseScheduleText(std::string_view text, unsigned *numProcessors) {
    detail::TextReader reader(text);
    auto header = reader.nextRecord();
    if (!header) {
        throw ParseError("missing header line", reader.lineNumber() + 1, 1);
    }
    if (header->size() != 3) {
        throw ParseError("header must hold <P> <S> <n>", header->line, 1);
    }
    const auto numProcs = header->integer(0, 1, std::numeric_limits<unsigned>::max());
    const auto numSteps = header->integer(1, 0, std::numeric_limits<unsigned>::max());
    const auto n = header->integer(2, 0, std::numeric_limits<NodeId>::max());
    std::vector<unsigned> proc(static_cast<std::size_t>(n));
    std::vector<unsigned> step(static_cast<std::size_t>(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        auto rec = reader.nextRecord();
        if (!rec) {
            throw ParseError("expected " + std::to_string(n) + " node lines", reader.lineNumber() + 1, 1);
        }
        if (rec->size() != 3) {
            throw ParseError("node line must hold <node> <proc> <superstep>", rec->line, 1);
        }
        const auto v = static_cast<std::size_t>(rec->integer(0, 0, n - 1));
        if (seen[v]) {
            throw ParseError("node " + std::to_string(v) + " assigned twice", rec->line, rec->column(0));
        }
        seen[v] = 1;
        proc[v] = static_cast<unsigned>(rec->integer(1, 0, numProcs - 1));
        step[v] = static_cast<unsigned>(rec->integer(2, 0, std::max<std::int64_t>(numSteps - 1, 0)));
    }
    std::vector<CommStep> comm;
    while (auto rec = reader.nextRecord()) {
        if (rec->size() != 4) {
            throw ParseError("communication line must hold <node> <from> <to> <superstep>", rec->line, 1);
        }
        comm.push_back({static_cast<NodeId>(rec->integer(0, 0, n - 1)),
                        static_cast<unsigned>(rec->integer(1, 0, numProcs - 1)),
                        static_cast<unsigned>(rec->integer(2, 0, numProcs - 1)),
                        static_cast<unsigned>(rec->integer(3, 0, std::max<std::int64_t>(numSteps - 1, 0)))});
    }
    if (numProcessors != nullptr) {
        *numProcessors = static_cast<unsigned>(numProcs);
    }
    return BspSchedule(std::move(proc), std::move(step), std::move(comm));
}

void saveSchedule(const BspSchedule &schedule, unsigned numProcessors, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << writeScheduleText(schedule, numProcessors);
}

BspSchedule loadSchedule(const std::filesystem::path &path, unsigned *numProcessors) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseScheduleText(buffer.str(), numProcessors);
}

} // namespace bspsched
