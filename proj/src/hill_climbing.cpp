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

#include "bspsched/hill_climbing.hpp"

#include "bspsched/cost.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace bspsched {

namespace {

constexpr unsigned kInf = std::numeric_limits<unsigned>::max();

// Per-superstep sorted sets of per-processor values, with a handle per processor so that
// an update is one erase and one insert.
class SuperstepMaxima {
  public:
    using Entry = std::pair<Weight, unsigned>;

    void init(unsigned numSteps, unsigned numProcs) {
        numProcs_ = numProcs;
        sets_.assign(numSteps, {});
        handles_.resize(static_cast<std::size_t>(numSteps) * numProcs);
        for (unsigned s = 0; s < numSteps; ++s) {
            for (unsigned p = 0; p < numProcs; ++p) {
                handles_[index(s, p)] = sets_[s].insert({0, p});
            }
        }
    }

    void set(unsigned s, unsigned p, Weight value) {
        auto &h = handles_[index(s, p)];
        if (h->first == value) {
            return;
        }
        sets_[s].erase(h);
        h = sets_[s].insert({value, p});
    }

    Weight max(unsigned s) const { return sets_[s].rbegin()->first; }

    /// Largest value among the processors for which skip(p) is false (0 if none).
    template <class Skip> Weight maxExcluding(unsigned s, Skip skip) const {
        for (auto it = sets_[s].rbegin(); it != sets_[s].rend(); ++it) {
            if (!skip(it->second)) {
                return it->first;
            }
        }
        return 0;
    }

  private:
    std::size_t index(unsigned s, unsigned p) const { return static_cast<std::size_t>(s) * numProcs_ + p; }

    unsigned numProcs_ = 0;
    std::vector<std::multiset<Entry>> sets_;
    std::vector<std::multiset<Entry>::iterator> handles_;
};

// Pending changes of one candidate move, consumed by delta() and apply().
struct ChangeSet {
    struct Cell {
        unsigned s;
        unsigned p;
        Weight dWork;
        Weight dSend;
        Weight dRec;
    };
    struct Step {
        unsigned s;
        std::int64_t dNodes;
        std::int64_t dComm;
    };

    std::vector<Cell> cells;
    std::vector<Step> steps;

    void clear() {
        cells.clear();
        steps.clear();
    }

    Step &step(unsigned s) {
        for (auto &st : steps) {
            if (st.s == s) {
                return st;
            }
        }
        steps.push_back({s, 0, 0});
        return steps.back();
    }

    Cell &cell(unsigned s, unsigned p) {
        step(s);
        for (auto &c : cells) {
            if (c.s == s && c.p == p) {
                return c;
            }
        }
        cells.push_back({s, p, 0, 0, 0});
        return cells.back();
    }

    void transfer(unsigned s, unsigned from, unsigned to, Weight volume, int sign) {
        cell(s, from).dSend += sign * volume;
        cell(s, to).dRec += sign * volume;
        step(s).dComm += sign;
    }

    bool touches(unsigned s, unsigned p) const {
        return std::any_of(cells.begin(), cells.end(), [&](const Cell &c) { return c.s == s && c.p == p; });
    }
};

// Cost bookkeeping shared by HC and HCcs: per (superstep, processor) work, send and
// receive volumes, per-superstep node and transfer counts, and cached superstep costs.
class CostState {
  public:
    CostState(const MachineParams &machine, unsigned numSteps)
        : numProcs_(machine.numProcessors()), numSteps_(numSteps), denom_(machine.denominator()), g_(machine.g()),
          latency_(machine.latency()) {
        const std::size_t cells = static_cast<std::size_t>(numSteps) * numProcs_;
        work_.assign(cells, 0);
        send_.assign(cells, 0);
        rec_.assign(cells, 0);
        nodes_.assign(numSteps, 0);
        comms_.assign(numSteps, 0);
        stepCost_.assign(numSteps, 0);
        workMax_.init(numSteps, numProcs_);
        commMax_.init(numSteps, numProcs_);
    }

    void addNode(unsigned s, unsigned p, Weight w) {
        work_[idx(s, p)] += w;
        ++nodes_[s];
    }
    void addTransfer(unsigned s, unsigned from, unsigned to, Weight volume) {
        send_[idx(s, from)] += volume;
        rec_[idx(s, to)] += volume;
        ++comms_[s];
    }

    void finishInit() {
        total_ = 0;
        for (unsigned s = 0; s < numSteps_; ++s) {
            for (unsigned p = 0; p < numProcs_; ++p) {
                workMax_.set(s, p, work_[idx(s, p)]);
                commMax_.set(s, p, std::max(send_[idx(s, p)], rec_[idx(s, p)]));
            }
            stepCost_[s] = costOf(s, workMax_.max(s), commMax_.max(s), nodes_[s], comms_[s]);
            total_ += stepCost_[s];
        }
    }

    Weight total() const { return total_; }
    unsigned numSteps() const { return numSteps_; }

    Weight delta(const ChangeSet &cs) const {
        Weight d = 0;
        for (const auto &st : cs.steps) {
            const unsigned s = st.s;
            const auto skip = [&](unsigned p) { return cs.touches(s, p); };
            Weight w = workMax_.maxExcluding(s, skip);
            Weight h = commMax_.maxExcluding(s, skip);
            for (const auto &c : cs.cells) {
                if (c.s != s) {
                    continue;
                }
                const std::size_t i = idx(s, c.p);
                w = std::max(w, work_[i] + c.dWork);
                h = std::max({h, send_[i] + c.dSend, rec_[i] + c.dRec});
            }
            d += costOf(s, w, h, nodes_[s] + st.dNodes, comms_[s] + st.dComm) - stepCost_[s];
        }
        return d;
    }

    void apply(const ChangeSet &cs) {
        for (const auto &c : cs.cells) {
            const std::size_t i = idx(c.s, c.p);
            work_[i] += c.dWork;
            send_[i] += c.dSend;
            rec_[i] += c.dRec;
            workMax_.set(c.s, c.p, work_[i]);
            commMax_.set(c.s, c.p, std::max(send_[i], rec_[i]));
        }
        for (const auto &st : cs.steps) {
            nodes_[st.s] += st.dNodes;
            comms_[st.s] += st.dComm;
            const Weight updated = costOf(st.s, workMax_.max(st.s), commMax_.max(st.s), nodes_[st.s], comms_[st.s]);
            total_ += updated - stepCost_[st.s];
            stepCost_[st.s] = updated;
        }
    }

  private:
    std::size_t idx(unsigned s, unsigned p) const { return static_cast<std::size_t>(s) * numProcs_ + p; }

    Weight costOf(unsigned, Weight work, Weight comm, std::int64_t nodes, std::int64_t comms) const {
        if (nodes == 0 && comms == 0) {
            return 0;
        }
        return denom_ * (work + latency_) + g_ * comm;
    }

    unsigned numProcs_;
    unsigned numSteps_;
    Weight denom_;
    Weight g_;
    Weight latency_;
    std::vector<Weight> work_;
    std::vector<Weight> send_;
    std::vector<Weight> rec_;
    std::vector<std::int64_t> nodes_;
    std::vector<std::int64_t> comms_;
    std::vector<Weight> stepCost_;
    SuperstepMaxima workMax_;
    SuperstepMaxima commMax_;
    Weight total_ = 0;
};

class HillClimber {
  public:
    HillClimber(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule)
        : dag_(dag), machine_(machine), numProcs_(machine.numProcessors()),
          numSteps_(std::max(1u, schedule.numSupersteps())), proc_(schedule.procs()), step_(schedule.supersteps()),
          firstNeeded_(dag.numNodes() * numProcs_, kInf), cost_(machine, numSteps_), lo_(numProcs_),
          hi_(numProcs_) {
        const std::size_t n = dag.numNodes();
        for (NodeId v = 0; v < n; ++v) {
            for (NodeId x : dag.successors(v)) {
                unsigned &f = firstNeeded_[fnIdx(v, proc_[x])];
                f = std::min(f, step_[x]);
            }
        }
        for (NodeId v = 0; v < n; ++v) {
            cost_.addNode(step_[v], proc_[v], dag.work(v));
            for (unsigned q = 0; q < numProcs_; ++q) {
                const unsigned f = firstNeeded_[fnIdx(v, q)];
                if (q != proc_[v] && f != kInf) {
                    if (f == 0 || f - 1 < step_[v]) {
                        throw std::invalid_argument("hill climbing needs a valid schedule");
                    }
                    cost_.addTransfer(f - 1, proc_[v], q, volume(v, proc_[v], q));
                }
            }
        }
        cost_.finishInit();
    }

    Weight total() const { return cost_.total(); }
    Assignment assignment() const { return {proc_, step_}; }

    /// Evaluates the destinations of v in scan order and applies the first improving one.
    bool improveNode(NodeId v, BudgetTracker &tracker) {
        computeBounds(v);
        const unsigned p = proc_[v];
        const unsigned s = step_[v];
        for (int offset = -1; offset <= 1; ++offset) {
            const std::int64_t target = static_cast<std::int64_t>(s) + offset;
            if (target < 0 || target >= static_cast<std::int64_t>(numSteps_)) {
                continue;
            }
            const auto s2 = static_cast<unsigned>(target);
            for (unsigned p2 = 0; p2 < numProcs_; ++p2) {
                if ((p2 == p && s2 == s) || target < lo_[p2] || target > hi_[p2]) {
                    continue;
                }
                if (tracker.exhausted()) {
                    return false;
                }
                tracker.addEvaluations();
                collect(v, p2, s2);
                if (cost_.delta(changes_) < 0) {
                    apply(v, p2, s2);
                    tracker.addMove();
                    return true;
                }
            }
        }
        return false;
    }

  private:
    struct FnUpdate {
        NodeId u;
        unsigned q;
        unsigned value;
    };

    std::size_t fnIdx(NodeId v, unsigned q) const { return static_cast<std::size_t>(v) * numProcs_ + q; }

    Weight volume(NodeId v, unsigned from, unsigned to) const {
        return dag_.comm(v) * machine_.scaledLambda(from, to);
    }

    // lo_[q]..hi_[q]: supersteps where v may sit on processor q given its neighbors.
    void computeBounds(NodeId v) {
        constexpr std::int64_t negInf = std::numeric_limits<std::int64_t>::min() / 4;
        constexpr std::int64_t posInf = std::numeric_limits<std::int64_t>::max() / 4;
        std::fill(lo_.begin(), lo_.end(), 0);
        std::fill(hi_.begin(), hi_.end(), static_cast<std::int64_t>(numSteps_) - 1);

        // predecessors elsewhere force tau(u) + 1, predecessors on q force tau(u)
        std::int64_t best1 = negInf;
        std::int64_t best2 = negInf;
        unsigned bestProc = kInf;
        for (NodeId u : dag_.predecessors(v)) {
            const std::int64_t val = static_cast<std::int64_t>(step_[u]) + 1;
            const unsigned q = proc_[u];
            lo_[q] = std::max(lo_[q], static_cast<std::int64_t>(step_[u]));
            if (val > best1) {
                if (q != bestProc) {
                    best2 = best1;
                    bestProc = q;
                }
                best1 = val;
            } else if (q != bestProc && val > best2) {
                best2 = val;
            }
        }
        std::int64_t low1 = posInf;
        std::int64_t low2 = posInf;
        unsigned lowProc = kInf;
        for (NodeId x : dag_.successors(v)) {
            const std::int64_t val = static_cast<std::int64_t>(step_[x]) - 1;
            const unsigned q = proc_[x];
            hi_[q] = std::min(hi_[q], static_cast<std::int64_t>(step_[x]));
            if (val < low1) {
                if (q != lowProc) {
                    low2 = low1;
                    lowProc = q;
                }
                low1 = val;
            } else if (q != lowProc && val < low2) {
                low2 = val;
            }
        }
        for (unsigned q = 0; q < numProcs_; ++q) {
            lo_[q] = std::max(lo_[q], q != bestProc ? best1 : best2);
            hi_[q] = std::min(hi_[q], q != lowProc ? low1 : low2);
        }
    }

    void collect(NodeId v, unsigned p2, unsigned s2) {
        changes_.clear();
        fnUpdates_.clear();
        const unsigned p = proc_[v];
        const unsigned s = step_[v];
        changes_.cell(s, p).dWork -= dag_.work(v);
        changes_.step(s).dNodes -= 1;
        changes_.cell(s2, p2).dWork += dag_.work(v);
        changes_.step(s2).dNodes += 1;

        if (p2 != p) {
            for (unsigned q = 0; q < numProcs_; ++q) {
                const unsigned f = firstNeeded_[fnIdx(v, q)];
                if (f == kInf) {
                    continue;
                }
                if (q != p) {
                    changes_.transfer(f - 1, p, q, volume(v, p, q), -1);
                }
                if (q != p2) {
                    changes_.transfer(f - 1, p2, q, volume(v, p2, q), +1);
                }
            }
        }

        for (NodeId u : dag_.predecessors(v)) {
            unsigned newOld = kInf; // first need on p after the move
            unsigned newNew = kInf; // first need on p2 after the move
            for (NodeId x : dag_.successors(u)) {
                const unsigned qx = x == v ? p2 : proc_[x];
                const unsigned sx = x == v ? s2 : step_[x];
                if (qx == p) {
                    newOld = std::min(newOld, sx);
                }
                if (qx == p2) {
                    newNew = std::min(newNew, sx);
                }
            }
            const unsigned pu = proc_[u];
            const auto update = [&](unsigned q, unsigned value) {
                const unsigned old = firstNeeded_[fnIdx(u, q)];
                if (old == value) {
                    return;
                }
                fnUpdates_.push_back({u, q, value});
                if (q == pu) {
                    return;
                }
                if (old != kInf) {
                    changes_.transfer(old - 1, pu, q, volume(u, pu, q), -1);
                }
                if (value != kInf) {
                    changes_.transfer(value - 1, pu, q, volume(u, pu, q), +1);
                }
            };
            update(p, newOld);
            if (p2 != p) {
                update(p2, newNew);
            }
        }
    }

    void apply(NodeId v, unsigned p2, unsigned s2) {
        cost_.apply(changes_);
        for (const auto &f : fnUpdates_) {
            firstNeeded_[fnIdx(f.u, f.q)] = f.value;
        }
        proc_[v] = p2;
        step_[v] = s2;
    }

    const ComputationalDag &dag_;
    const MachineParams &machine_;
    unsigned numProcs_;
    unsigned numSteps_;
    std::vector<unsigned> proc_;
    std::vector<unsigned> step_;
    std::vector<unsigned> firstNeeded_;
    CostState cost_;
    ChangeSet changes_;
    std::vector<FnUpdate> fnUpdates_;
    std::vector<std::int64_t> lo_;
    std::vector<std::int64_t> hi_;
};

class CommClimber {
  public:
    struct Transfer {
        NodeId node;
        unsigned from;
        unsigned to;
        unsigned step;
        unsigned lo;
        unsigned hi;
    };

    CommClimber(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule)
        : dag_(dag), machine_(machine), cost_(machine, std::max(1u, schedule.numSupersteps())) {
        const unsigned numProcs = machine.numProcessors();
        const unsigned numSteps = cost_.numSteps();
        for (NodeId v = 0; v < schedule.numNodes(); ++v) {
            cost_.addNode(schedule.superstep(v), schedule.proc(v), dag.work(v));
        }
        auto comm = schedule.comm();
        std::sort(comm.begin(), comm.end());
        std::vector<unsigned> firstNeed(numProcs);
        for (const auto &c : comm) {
            if (c.from != schedule.proc(c.node)) {
                throw std::invalid_argument("communication retiming needs direct sends only");
            }
            unsigned first = kInf;
            for (NodeId x : dag.successors(c.node)) {
                if (schedule.proc(x) == c.to) {
                    first = std::min(first, schedule.superstep(x));
                }
            }
            const unsigned lo = schedule.superstep(c.node);
            const unsigned hi = first == kInf ? numSteps - 1 : first - 1;
            transfers_.push_back({c.node, c.from, c.to, c.step, lo, std::max(lo, hi)});
            cost_.addTransfer(c.step, c.from, c.to, volume(c));
        }
        cost_.finishInit();
    }

    Weight total() const { return cost_.total(); }

    std::vector<CommStep> comm() const {
        std::vector<CommStep> out;
        out.reserve(transfers_.size());
        for (const auto &t : transfers_) {
            out.push_back({t.node, t.from, t.to, t.step});
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t numTransfers() const { return transfers_.size(); }

    bool improveTransfer(std::size_t i, BudgetTracker &tracker) {
        Transfer &t = transfers_[i];
        const Weight vol = volume({t.node, t.from, t.to, t.step});
        for (unsigned s2 = t.lo; s2 <= t.hi; ++s2) {
            if (s2 == t.step) {
                continue;
            }
            if (tracker.exhausted()) {
                return false;
            }
            tracker.addEvaluations();
            changes_.clear();
            changes_.transfer(t.step, t.from, t.to, vol, -1);
            changes_.transfer(s2, t.from, t.to, vol, +1);
            if (cost_.delta(changes_) < 0) {
                cost_.apply(changes_);
                t.step = s2;
                tracker.addMove();
                return true;
            }
        }
        return false;
    }

  private:
    Weight volume(const CommStep &c) const { return dag_.comm(c.node) * machine_.scaledLambda(c.from, c.to); }

    const ComputationalDag &dag_;
    const MachineParams &machine_;
    CostState cost_;
    ChangeSet changes_;
    std::vector<Transfer> transfers_;
};

} // namespace

HcResult hcImprove(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   const HcOptions &options) {
    HcResult result;
    result.schedule = schedule;
    const std::size_t n = dag.numNodes();
    if (n == 0) {
        result.localMinimum = true;
        return result;
    }
    HillClimber climber(dag, machine, schedule);
    BudgetTracker tracker(options.budget);
    std::size_t idle = 0;
    NodeId v = 0;
    while (idle < n && !tracker.exhausted()) {
        if (climber.improveNode(v, tracker)) {
            idle = 0;
            if (options.verifyIncremental) {
                const Weight full = scaledCost(dag, machine, withLazyComm(dag, climber.assignment()));
                if (full != climber.total()) {
                    throw std::logic_error("incremental cost " + std::to_string(climber.total()) +
                                           " differs from recomputed cost " + std::to_string(full));
                }
            }
        } else {
            ++idle;
        }
        v = static_cast<NodeId>((v + 1) % n);
    }
    result.moves = tracker.moves();
    result.evaluations = tracker.evaluations();
    result.localMinimum = idle >= n;
    BspSchedule improved = withLazyComm(dag, climber.assignment());
    if (scaledCost(dag, machine, improved) <= scaledCost(dag, machine, schedule)) {
        result.schedule = std::move(improved);
    }
    return result;
}

HcResult hccsImprove(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                     const HcOptions &options) {
    HcResult result;
    result.schedule = schedule;
    CommClimber climber(dag, machine, schedule);
    const std::size_t count = climber.numTransfers();
    if (count == 0) {
        result.localMinimum = true;
        return result;
    }
    BudgetTracker tracker(options.budget);
    std::size_t idle = 0;
    std::size_t i = 0;
    while (idle < count && !tracker.exhausted()) {
        if (climber.improveTransfer(i, tracker)) {
            idle = 0;
            if (options.verifyIncremental) {
                const BspSchedule check(schedule.procs(), schedule.supersteps(), climber.comm());
                if (scaledCost(dag, machine, check) != climber.total()) {
                    throw std::logic_error("incremental communication cost differs from recomputed cost");
                }
            }
        } else {
            ++idle;
        }
        i = (i + 1) % count;
    }
    result.moves = tracker.moves();
    result.evaluations = tracker.evaluations();
    result.localMinimum = idle >= count;
    result.schedule.setComm(climber.comm());
    return result;
}

HcResult hcAndHccs(const ComputationalDag &dag, const MachineParams &machine, const BspSchedule &schedule,
                   const Budget &budget) {
    HcOptions hcOptions;
    hcOptions.budget = budget.fraction(0.9);
    HcResult first = hcImprove(dag, machine, schedule, hcOptions);
    HcOptions csOptions;
    csOptions.budget = budget.fraction(0.1);
    if (!hasOnlyDirectSends(first.schedule)) {
        return first;
    }
    HcResult second = hccsImprove(dag, machine, first.schedule, csOptions);
    second.moves += first.moves;
    second.evaluations += first.evaluations;
    second.localMinimum = first.localMinimum && second.localMinimum;
    return second;
}

} // namespace bspsched
