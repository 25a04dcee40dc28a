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

#include "bspsched/coarsening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bspsched {

namespace {

void insertSorted(std::vector<NodeId> &list, NodeId x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) {
        list.insert(it, x);
    }
}

void eraseSorted(std::vector<NodeId> &list, NodeId x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it != list.end() && *it == x) {
        list.erase(it);
    }
}

std::vector<NodeId> sortedUnion(const std::vector<NodeId> &a, const std::vector<NodeId> &b) {
    std::vector<NodeId> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// For every node u, marks what the successors of u reach through at least one edge;
// (u, v) is contractable iff v stays unmarked.
template <typename Succ, typename Visit>
void forEachContractable(std::size_t capacity, const std::vector<NodeId> &nodes, Succ succ, Visit visit) {
    std::vector<std::uint32_t> mark(capacity, 0);
    std::uint32_t stamp = 0;
    std::vector<NodeId> stack;
    for (NodeId u : nodes) {
        ++stamp;
        for (NodeId s : succ(u)) {
            for (NodeId t : succ(s)) {
                if (mark[t] != stamp) {
                    mark[t] = stamp;
                    stack.push_back(t);
                }
            }
        }
        while (!stack.empty()) {
            const NodeId x = stack.back();
            stack.pop_back();
            for (NodeId t : succ(x)) {
                if (mark[t] != stamp) {
                    mark[t] = stamp;
                    stack.push_back(t);
                }
            }
        }
        for (NodeId v : succ(u)) {
            if (mark[v] != stamp) {
                visit(u, v);
            }
        }
    }
}

} // namespace

std::vector<Edge> contractableEdges(const ComputationalDag &dag) {
    std::vector<NodeId> nodes(dag.numNodes());
    for (NodeId v = 0; v < dag.numNodes(); ++v) {
        nodes[v] = v;
    }
    std::vector<Edge> out;
    forEachContractable(
        dag.numNodes(), nodes, [&](NodeId v) { return dag.successors(v); },
        [&](NodeId u, NodeId v) { out.push_back({u, v}); });
    std::sort(out.begin(), out.end());
    return out;
}

Edge selectContraction(const ComputationalDag &dag, const std::vector<Edge> &contractable) {
    if (contractable.empty()) {
        throw std::invalid_argument("no contractable edge");
    }
    std::vector<Edge> sorted = contractable;
    std::sort(sorted.begin(), sorted.end(), [&](const Edge &a, const Edge &b) {
        const Weight wa = dag.work(a.source) + dag.work(a.target);
        const Weight wb = dag.work(b.source) + dag.work(b.target);
        return std::tie(wa, a.source, a.target) < std::tie(wb, b.source, b.target);
    });
    const std::size_t prefix = (sorted.size() + 2) / 3;
    Edge best = sorted[0];
    for (std::size_t i = 1; i < prefix; ++i) {
        const Edge &e = sorted[i];
        if (dag.comm(e.source) > dag.comm(best.source) ||
            (dag.comm(e.source) == dag.comm(best.source) && e < best)) {
            best = e;
        }
    }
    return best;
}

ContractibleDag::ContractibleDag(const ComputationalDag &dag)
    : work_(dag.numNodes()), comm_(dag.numNodes()), out_(dag.numNodes()), in_(dag.numNodes()),
      alive_(dag.numNodes(), true), numAlive_(dag.numNodes()), mark_(dag.numNodes(), 0),
      descMark_(dag.numNodes(), 0) {
    std::vector<NodeId> nodes(dag.numNodes());
    for (NodeId v = 0; v < dag.numNodes(); ++v) {
        work_[v] = dag.work(v);
        comm_[v] = dag.comm(v);
        out_[v].assign(dag.successors(v).begin(), dag.successors(v).end());
        in_[v].assign(dag.predecessors(v).begin(), dag.predecessors(v).end());
        nodes[v] = v;
    }
    forEachContractable(
        dag.numNodes(), nodes, [&](NodeId v) -> const std::vector<NodeId> & { return out_[v]; },
        [&](NodeId u, NodeId v) { insertEdgeKey(u, v); });
}

void ContractibleDag::eraseEdgeKey(NodeId a, NodeId b) {
    contractable_.erase({work_[a] + work_[b], a, b});
}

void ContractibleDag::insertEdgeKey(NodeId a, NodeId b) {
    contractable_.insert({work_[a] + work_[b], a, b});
}

std::optional<Edge> ContractibleDag::selectEdge() const {
    if (contractable_.empty()) {
        return std::nullopt;
    }
    const std::size_t prefix = (contractable_.size() + 2) / 3;
    auto it = contractable_.begin();
    Edge best{std::get<1>(*it), std::get<2>(*it)};
    for (std::size_t i = 1; i < prefix; ++i) {
        ++it;
        const Edge e{std::get<1>(*it), std::get<2>(*it)};
        if (comm_[e.source] > comm_[best.source] || (comm_[e.source] == comm_[best.source] && e < best)) {
            best = e;
        }
    }
    return best;
}

ContractionRecord ContractibleDag::contract(NodeId u, NodeId v) {
    if (!contractable_.contains({work_[u] + work_[v], u, v})) {
        throw std::invalid_argument("edge is not contractable");
    }
    ContractionRecord rec{u, v, static_cast<NodeId>(work_.size()), in_[u], out_[u], in_[v], out_[v]};
    eraseSorted(rec.outU, v);
    eraseSorted(rec.inV, u);
    for (NodeId x : in_[u]) {
        eraseEdgeKey(x, u);
    }
    for (NodeId y : out_[u]) {
        eraseEdgeKey(u, y);
    }
    for (NodeId x : in_[v]) {
        eraseEdgeKey(x, v);
    }
    for (NodeId y : out_[v]) {
        eraseEdgeKey(v, y);
    }

    const NodeId m = rec.merged;
    work_.push_back(work_[u] + work_[v]);
    comm_.push_back(comm_[u] + comm_[v]);
    in_.push_back(sortedUnion(rec.inU, rec.inV));
    out_.push_back(sortedUnion(rec.outU, rec.outV));
    alive_.push_back(true);
    mark_.push_back(0);
    descMark_.push_back(0);
    for (NodeId x : in_[m]) {
        eraseSorted(out_[x], u);
        eraseSorted(out_[x], v);
        out_[x].push_back(m); // m is the largest id
    }
    for (NodeId y : out_[m]) {
        eraseSorted(in_[y], u);
        eraseSorted(in_[y], v);
        in_[y].push_back(m);
    }
    in_[u].clear();
    out_[u].clear();
    in_[v].clear();
    out_[v].clear();
    alive_[u] = false;
    alive_[v] = false;
    --numAlive_;
    refreshAround(m);
    return rec;
}

// Every path that the contraction creates runs through m. Edges from an ancestor of m
// to a descendant of m now have a detour; edges at m are rechecked.
void ContractibleDag::refreshAround(NodeId m) {
    const std::uint32_t anc = ++stamp_;
    const std::uint32_t desc = ++stamp_;
    std::vector<NodeId> ancestors;
    std::vector<NodeId> descendants;
    std::vector<NodeId> stack{m};
    auto &descMark = descMark_;
    while (!stack.empty()) {
        const NodeId x = stack.back();
        stack.pop_back();
        for (NodeId p : in_[x]) {
            if (mark_[p] != anc) {
                mark_[p] = anc;
                ancestors.push_back(p);
                stack.push_back(p);
            }
        }
    }
    stack.push_back(m);
    while (!stack.empty()) {
        const NodeId x = stack.back();
        stack.pop_back();
        for (NodeId s : out_[x]) {
            if (descMark[s] != desc) {
                descMark[s] = desc;
                descendants.push_back(s);
                stack.push_back(s);
            }
        }
    }
    for (NodeId a : ancestors) {
        for (NodeId b : out_[a]) {
            if (b != m && descMark[b] == desc) {
                eraseEdgeKey(a, b);
            }
        }
    }
    for (NodeId x : in_[m]) {
        bool ok = true;
        for (NodeId z : out_[x]) {
            ok = ok && (z == m || mark_[z] != anc);
        }
        if (ok) {
            insertEdgeKey(x, m);
        }
    }
    for (NodeId y : out_[m]) {
        bool ok = true;
        for (NodeId z : in_[y]) {
            ok = ok && (z == m || descMark[z] != desc);
        }
        if (ok) {
            insertEdgeKey(m, y);
        }
    }
}

void ContractibleDag::undo(const ContractionRecord &rec) {
    const NodeId m = rec.merged;
    if (m + 1 != work_.size() || !alive_[m]) {
        throw std::invalid_argument("contractions must be undone in reverse order");
    }
    // The maintained contractable set is only meaningful while coarsening.
    contractable_.clear();
    for (NodeId x : in_[m]) {
        eraseSorted(out_[x], m);
    }
    for (NodeId y : out_[m]) {
        eraseSorted(in_[y], m);
    }
    work_.pop_back();
    comm_.pop_back();
    in_.pop_back();
    out_.pop_back();
    alive_.pop_back();
    mark_.pop_back();
    descMark_.pop_back();

    const NodeId u = rec.u;
    const NodeId v = rec.v;
    in_[u] = rec.inU;
    out_[u] = rec.outU;
    insertSorted(out_[u], v);
    in_[v] = rec.inV;
    insertSorted(in_[v], u);
    out_[v] = rec.outV;
    for (NodeId x : rec.inU) {
        insertSorted(out_[x], u);
    }
    for (NodeId x : rec.inV) {
        insertSorted(out_[x], v);
    }
    for (NodeId y : rec.outU) {
        insertSorted(in_[y], u);
    }
    for (NodeId y : rec.outV) {
        insertSorted(in_[y], v);
    }
    alive_[u] = true;
    alive_[v] = true;
    ++numAlive_;
}

ComputationalDag ContractibleDag::compact(std::vector<NodeId> *ids) const {
    std::vector<NodeId> dense(work_.size(), 0);
    std::vector<NodeId> order;
    ComputationalDag dag;
    for (NodeId v = 0; v < work_.size(); ++v) {
        if (alive_[v]) {
            dense[v] = dag.addNode(work_[v], comm_[v]);
            order.push_back(v);
        }
    }
    for (NodeId v : order) {
        for (NodeId s : out_[v]) {
            dag.addEdge(dense[v], dense[s]);
        }
    }
    if (ids != nullptr) {
        *ids = std::move(order);
    }
    return dag;
}

CoarseningSequence::CoarseningSequence(const ComputationalDag &original, std::vector<ContractionRecord> records,
                                       ContractibleDag coarse)
    : original_(original), records_(std::move(records)), coarse_(std::move(coarse)) {
    coarseDag_ = coarse_.compact(&coarseIds_);
}

ComputationalDag CoarseningSequence::graphAt(std::size_t k, std::vector<NodeId> *ids) const {
    if (k > records_.size()) {
        throw std::out_of_range("contraction index past the end of the sequence");
    }
    ContractibleDag g(original_);
    for (std::size_t i = 0; i < k; ++i) {
        g.contract(records_[i].u, records_[i].v);
    }
    return g.compact(ids);
}

CoarseningSequence coarsen(const ComputationalDag &dag, double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw std::invalid_argument("coarsening ratio must lie in (0, 1)");
    }
    const auto target = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(dag.numNodes()) - 1e-9));
    if (target < 2) {
        throw std::invalid_argument("coarsening target below two nodes");
    }
    ContractibleDag g(dag);
    std::vector<ContractionRecord> records;
    while (g.numAlive() > target) {
        const auto e = g.selectEdge();
        if (!e) {
            break;
        }
        records.push_back(g.contract(e->source, e->target));
    }
    return CoarseningSequence(dag, std::move(records), std::move(g));
}

} // namespace bspsched
