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

#include "bspsched/hyperdag_io.hpp"

#include "text_reader.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bspsched {

ParseError::ParseError(const std::string &message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

ComputationalDag parseHyperdag(std::string_view text) {
    detail::TextReader reader(text);

    auto header = reader.nextRecord();
    if (!header) {
        throw ParseError("missing header line", reader.lineNumber() + 1, 1);
    }
    if (header->size() != 3) {
        throw ParseError("header must hold exactly 3 integers", header->line, 1);
    }
    const auto numHyperedges = header->integer(0, 0);
    const auto numPins = header->integer(1, 0);
    const auto numNodes = header->integer(2, 0);

    // first pin of each hyperedge, then the rest
    std::vector<std::vector<NodeId>> pins(static_cast<std::size_t>(numHyperedges));
    std::vector<std::pair<std::size_t, std::size_t>> pinLocation(static_cast<std::size_t>(numHyperedges));
    for (std::int64_t i = 0; i < numPins; ++i) {
        auto rec = reader.nextRecord();
        if (!rec) {
            throw ParseError("expected " + std::to_string(numPins) + " pin lines, found " + std::to_string(i),
                             reader.lineNumber() + 1, 1);
        }
        if (rec->size() != 2) {
            throw ParseError("pin line must hold <hyperedge> <node>", rec->line, 1);
        }
        const auto h = rec->integer(0, 0, numHyperedges - 1);
        const auto v = rec->integer(1, 0, numNodes - 1);
        auto &list = pins[static_cast<std::size_t>(h)];
        if (list.empty()) {
            pinLocation[static_cast<std::size_t>(h)] = {rec->line, rec->column(1)};
        } else if (static_cast<NodeId>(v) == list.front()) {
            throw ParseError("hyperedge " + std::to_string(h) + " lists its source node as a successor", rec->line,
                             rec->column(1));
        }
        list.push_back(static_cast<NodeId>(v));
    }

    ComputationalDag dag;
    for (std::int64_t i = 0; i < numNodes; ++i) {
        auto rec = reader.nextRecord();
        if (!rec) {
            throw ParseError("expected " + std::to_string(numNodes) + " node lines, found " + std::to_string(i),
                             reader.lineNumber() + 1, 1);
        }
        if (rec->size() != 3) {
            throw ParseError("node line must hold <node> <work> <comm>", rec->line, 1);
        }
        const auto id = rec->integer(0, 0, numNodes - 1);
        if (id != i) {
            throw ParseError("node lines must be in ascending id order; expected " + std::to_string(i), rec->line,
                             rec->column(0));
        }
        dag.addNode(rec->integer(1, 0), rec->integer(2, 0));
    }

    if (auto extra = reader.nextRecord()) {
        throw ParseError("unexpected data after the last node line", extra->line, 1);
    }

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(std::max<std::int64_t>(numPins - numHyperedges, 0)));
    for (std::size_t h = 0; h < pins.size(); ++h) {
        if (pins[h].empty()) {
            throw ParseError("hyperedge " + std::to_string(h) + " has no pins", header->line, header->column(0));
        }
        for (std::size_t i = 1; i < pins[h].size(); ++i) {
            edges.push_back({pins[h].front(), pins[h][i]});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto &e : edges) {
        dag.addEdge(e.source, e.target);
    }

    for (const auto &violation : validateDag(dag)) {
        if (violation.kind == DagViolation::Kind::Cycle) {
            throw CycleError("hyperDAG contains a directed cycle: " + violation.detail);
        }
    }
    return dag;
}

ComputationalDag loadHyperdag(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseHyperdag(buffer.str());
}

std::string writeHyperdag(const ComputationalDag &dag) {
    std::ostringstream out;
    const std::size_t n = dag.numNodes();
    out << "% bspsched hyperDAG\n";
    out << "% header: hyperedges pins nodes; then hyperedge/pin pairs; then node work comm\n";
    out << n << ' ' << (n + dag.numEdges()) << ' ' << n << '\n';
    for (NodeId v = 0; v < n; ++v) {
        out << v << ' ' << v << '\n';
        for (NodeId s : dag.successors(v)) {
            out << v << ' ' << s << '\n';
        }
    }
    for (NodeId v = 0; v < n; ++v) {
        out << v << ' ' << dag.work(v) << ' ' << dag.comm(v) << '\n';
    }
    return out.str();
}

void saveHyperdag(const ComputationalDag &dag, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << writeHyperdag(dag);
}

} // namespace bspsched
