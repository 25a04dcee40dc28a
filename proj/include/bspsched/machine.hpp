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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bspsched {

/// Normalized fraction with a positive denominator.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator = 1);

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }
    double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool isInteger() const { return den_ == 1; }

    /// "7" or "7/3"
    std::string toString() const;
    static Rational parse(const std::string &text);

    friend bool operator==(const Rational &a, const Rational &b) = default;
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

using LambdaMatrix = std::vector<std::vector<Rational>>;

/// BSP machine: P processors, per-unit communication cost g, per-superstep latency,
/// and the P x P matrix of NUMA coefficients.
///
/// Costs are evaluated exactly in integer units of 1/denominator(), where denominator()
/// is the least common multiple of all lambda denominators (1 for integral matrices).
class MachineParams {
  public:
    MachineParams(unsigned numProcessors, Weight g, Weight latency);
    MachineParams(unsigned numProcessors, Weight g, Weight latency, LambdaMatrix lambda);

    unsigned numProcessors() const { return numProcessors_; }
    Weight g() const { return g_; }
    Weight latency() const { return latency_; }

    const Rational &lambda(unsigned from, unsigned to) const { return lambda_[from][to]; }
    const LambdaMatrix &lambdaMatrix() const { return lambda_; }

    Weight denominator() const { return denominator_; }
    /// lambda(from, to) * denominator(); always an integer.
    Weight scaledLambda(unsigned from, unsigned to) const { return scaled_[from * numProcessors_ + to]; }

    bool isUniform() const { return uniform_; }
    /// Mean of the off-diagonal coefficients (0 when P = 1).
    double meanOffDiagonalLambda() const;

  private:
    unsigned numProcessors_;
    Weight g_;
    Weight latency_;
    LambdaMatrix lambda_;
    Weight denominator_ = 1;
    std::vector<Weight> scaled_;
    bool uniform_ = true;
};

LambdaMatrix uniformLambda(unsigned numProcessors);

/// Binary-tree hierarchy over P = 2^h leaves: coefficient delta^(level-1), where level is
/// the height of the lowest common ancestor of the two leaves.
LambdaMatrix numaFromTree(unsigned numProcessors, Weight delta);

/// Whitespace-separated P x P matrix; entries are integers or fractions "a/b".
LambdaMatrix loadLambdaMatrix(const std::filesystem::path &path);

} // namespace bspsched
