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

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace bspsched {

/// Nonzero positions of an N x N matrix, sorted row-major without duplicates.
struct SparsityPattern {
    std::size_t N = 0;
    std::vector<std::pair<std::size_t, std::size_t>> nonzeros;

    std::size_t nnz() const { return nonzeros.size(); }
    /// Sorts, deduplicates and range-checks; throws std::invalid_argument.
    void normalize();
};

/// Every cell independently nonzero with probability q. Cells are drawn row-major from a
/// 64-bit Mersenne twister, so patterns are reproducible across platforms.
SparsityPattern randomPattern(std::size_t N, double q, std::uint64_t seed);

/// MatrixMarket coordinate file (1-based indices; values, if any, are ignored).
/// N is the larger of the row and column counts.
SparsityPattern loadMatrixMarketPattern(const std::filesystem::path &path);

/// Sparse matrix times dense vector: sources for the used vector entries and the matrix
/// entries, one multiply per nonzero and one reduce node per nonempty row.
ComputationalDag genSpmv(const SparsityPattern &pattern);

struct ExpOptions {
    /// Reuse the matrix-entry sources in every layer instead of reading A again.
    bool shareMatrixSources = false;
};

/// k chained spmv layers computing A^k u. The reduce node of row i in one layer is vector
/// entry i of the next.
ComputationalDag genExp(const SparsityPattern &pattern, unsigned k, const ExpOptions &options = {});

/// k iterations of conjugate gradient on A with one node per scalar operation.
ComputationalDag genCg(const SparsityPattern &pattern, unsigned k);

/// k sparse spmv layers starting from a vector whose only nonzero is entry sourceIndex.
/// A row gets a node in layer t only once it is reachable within t hops.
ComputationalDag genKnn(const SparsityPattern &pattern, unsigned k, std::size_t sourceIndex);

} // namespace bspsched
