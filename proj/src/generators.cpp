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


#include "bspsched/generators.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bspsched {

void SparsityPattern::normalize() {
    for (const auto &[i, j] : nonzeros) {
        if (i >= N || j >= N) {
            throw std::invalid_argument("nonzero (" + std::to_string(i) + ", " + std::to_string(j) +
                                        ") outside a " + std::to_string(N) + "x" + std::to_string(N) + " pattern");
        }
    }
    std::sort(nonzeros.begin(), nonzeros.end());
    nonzeros.erase(std::unique(nonzeros.begin(), nonzeros.end()), nonzeros.end());
}

SparsityPattern randomPattern(std::size_t N, double q, std::uint64_t seed) {
    if (N == 0) {
        throw std::invalid_argument("pattern dimension must be positive");
    }
    if (!(q > 0.0 && q <= 1.0)) {
        throw std::invalid_argument("nonzero probability must lie in (0, 1]");
    }
    std::mt19937_64 rng(seed);
    SparsityPattern p;
    p.N = N;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            // 53 random bits, independent of the standard library's distributions
            const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
            if (u < q) {
                p.nonzeros.emplace_back(i, j);
            }
        }
    }
    return p;
}

SparsityPattern loadMatrixMarketPattern(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    bool symmetric = false;
    bool haveSize = false;
    std::size_t rows = 0, cols = 0, entries = 0;
    SparsityPattern p;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.rfind("%%MatrixMarket", 0) == 0) {
            std::string lower = line;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            if (lower.find("coordinate") == std::string::npos) {
                throw std::runtime_error(path.string() + ": only coordinate MatrixMarket files are supported");
            }
            symmetric = lower.find("symmetric") != std::string::npos || lower.find("hermitian") != std::string::npos;
            continue;
        }
        if (line.empty() || line[0] == '%') {
            continue;
        }
        std::istringstream ls(line);
        if (!haveSize) {
            if (!(ls >> rows >> cols >> entries)) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineNo) + ": bad size line");
            }
            haveSize = true;
            p.N = std::max(rows, cols);
            continue;
        }
        std::size_t i = 0, j = 0;
        if (!(ls >> i >> j) || i == 0 || j == 0 || i > rows || j > cols) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineNo) + ": bad entry");
        }
        p.nonzeros.emplace_back(i - 1, j - 1);
        if (symmetric && i != j) {
            p.nonzeros.emplace_back(j - 1, i - 1);
        }
    }
    if (!haveSize) {
        throw std::runtime_error(path.string() + ": missing size line");
    }
    p.normalize();
    return p;
}

namespace {

/// Adds nodes with the generator weight rule: sources do one unit of work, every other
/// node indeg - 1; every value is one unit of data.
class Builder {
  public:
    NodeId source() { return dag_.addNode(1, 1); }

    NodeId op(std::vector<NodeId> preds) {
        std::sort(preds.begin(), preds.end());
        preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
        const NodeId v = dag_.addNode(static_cast<Weight>(preds.size()) - 1, 1);
        for (NodeId u : preds) {
            dag_.addEdge(u, v);
        }
        return v;
    }

    ComputationalDag take() { return std::move(dag_); }

  private:
    ComputationalDag dag_;
};

using Vec = std::vector<std::optional<NodeId>>;

std::vector<std::vector<std::size_t>> rowsOf(const SparsityPattern &p) {
    std::vector<std::vector<std::size_t>> rows(p.N);
    for (const auto &[i, j] : p.nonzeros) {
        rows[i].push_back(j);
    }
    return rows;
}

void requirePattern(const SparsityPattern &p) {
    if (p.nonzeros.empty()) {
        throw std::invalid_argument("empty sparsity pattern");
    }
    for (const auto &[i, j] : p.nonzeros) {
        if (i >= p.N || j >= p.N) {
            throw std::invalid_argument("nonzero outside the pattern dimension");
        }
    }
}

/// One spmv layer over the entries present in x. Returns the reduce node per row that had
/// at least one usable nonzero.
Vec spmvLayer(Builder &b, const std::vector<std::vector<std::size_t>> &rows, const Vec &x,
              std::vector<std::vector<std::optional<NodeId>>> *sharedA) {
    Vec y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<NodeId> products;
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            const std::size_t j = rows[i][k];
            if (!x[j]) {
                continue;
            }
            NodeId a;
            if (sharedA) {
                auto &slot = (*sharedA)[i][k];
                if (!slot) {
                    slot = b.source();
                }
                a = *slot;
            } else {
                a = b.source();
            }
            products.push_back(b.op({a, *x[j]}));
        }
        if (!products.empty()) {
            y[i] = b.op(products);
        }
    }
    return y;
}

Vec usedColumnSources(Builder &b, const SparsityPattern &p) {
    std::vector<char> used(p.N, 0);
    for (const auto &nz : p.nonzeros) {
        used[nz.second] = 1;
    }
    Vec x(p.N);
    for (std::size_t j = 0; j < p.N; ++j) {
        if (used[j]) {
            x[j] = b.source();
        }
    }
    return x;
}

} // namespace

ComputationalDag genSpmv(const SparsityPattern &pattern) { return genExp(pattern, 1); }

ComputationalDag genExp(const SparsityPattern &pattern, unsigned k, const ExpOptions &options) {
    if (k < 1) {
        throw std::invalid_argument("exp needs at least one layer");
    }
    requirePattern(pattern);
    const auto rows = rowsOf(pattern);
    Builder b;
    Vec x = usedColumnSources(b, pattern);
    std::vector<std::vector<std::optional<NodeId>>> shared;
    if (options.shareMatrixSources) {
        for (const auto &r : rows) {
            shared.emplace_back(r.size());
        }
    }
    for (unsigned t = 0; t < k; ++t) {
        x = spmvLayer(b, rows, x, options.shareMatrixSources ? &shared : nullptr);
    }
    return b.take();
}

ComputationalDag genCg(const SparsityPattern &pattern, unsigned k) {
    if (k < 1) {
        throw std::invalid_argument("CG needs at least one iteration");
    }
    requirePattern(pattern);
    const auto rows = rowsOf(pattern);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) {
            throw std::invalid_argument("CG needs a nonzero in every row; row " + std::to_string(i) + " is empty");
        }
    }
    const std::size_t N = pattern.N;
    Builder b;
    std::vector<std::vector<NodeId>> A(N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k2 = 0; k2 < rows[i].size(); ++k2) {
            A[i].push_back(b.source());
        }
    }
    std::vector<NodeId> r(N), x(N);
    for (auto &v : r) {
        v = b.source();
    }
    for (auto &v : x) {
        v = b.source();
    }
    std::vector<NodeId> p = r;
    const auto dot = [&](const std::vector<NodeId> &u, const std::vector<NodeId> &v) {
        std::vector<NodeId> prods;
        for (std::size_t i = 0; i < N; ++i) {
            prods.push_back(b.op({u[i], v[i]}));
        }
        return b.op(prods);
    };
    NodeId rho = dot(r, r);
    for (unsigned it = 0; it < k; ++it) {
        std::vector<NodeId> q(N);
        for (std::size_t i = 0; i < N; ++i) {
            std::vector<NodeId> prods;
            for (std::size_t k2 = 0; k2 < rows[i].size(); ++k2) {
                prods.push_back(b.op({A[i][k2], p[rows[i][k2]]}));
            }
            q[i] = b.op(prods);
        }
        const NodeId pq = dot(p, q);
        const NodeId alpha = b.op({rho, pq});
        for (std::size_t i = 0; i < N; ++i) {
            x[i] = b.op({x[i], alpha, p[i]});
        }
        std::vector<NodeId> rNew(N);
        for (std::size_t i = 0; i < N; ++i) {
            rNew[i] = b.op({r[i], alpha, q[i]});
        }
        const NodeId rhoNew = dot(rNew, rNew);
        const NodeId beta = b.op({rhoNew, rho});
        for (std::size_t i = 0; i < N; ++i) {
            p[i] = b.op({rNew[i], beta, p[i]});
        }
        r = std::move(rNew);
        rho = rhoNew;
    }
    return b.take();
}

ComputationalDag genKnn(const SparsityPattern &pattern, unsigned k, std::size_t sourceIndex) {
    if (k < 1) {
        throw std::invalid_argument("kNN needs at least one hop");
    }
    if (sourceIndex >= pattern.N) {
        throw std::invalid_argument("kNN source index " + std::to_string(sourceIndex) + " out of range");
    }
    const auto rows = rowsOf(pattern);
    Builder b;
    Vec x(pattern.N);
    x[sourceIndex] = b.source();
    for (unsigned t = 0; t < k; ++t) {
        const Vec y = spmvLayer(b, rows, x, nullptr);
        // entries not recomputed keep their latest node
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i]) {
                x[i] = y[i];
            }
        }
    }
    return b.take();
}

} // namespace bspsched
