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

#include <chrono>
#include <cstdint>
#include <limits>

namespace bspsched {

/// Work limit for an improvement stage. Any combination of a wall-clock limit, a cap on
/// accepted moves and a cap on evaluated candidates (or solver nodes) may be set.
/// Limits left at their defaults are unbounded. Operation caps make runs reproducible.
struct Budget {
    double seconds = std::numeric_limits<double>::infinity();
    std::uint64_t maxMoves = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t maxEvaluations = std::numeric_limits<std::uint64_t>::max();

    static Budget wallClock(double seconds) {
        Budget b;
        b.seconds = seconds;
        return b;
    }
    static Budget operations(std::uint64_t evaluations) {
        Budget b;
        b.maxEvaluations = evaluations;
        return b;
    }

    /// Scales the time and evaluation limits; the move cap is kept.
    Budget fraction(double f) const {
        Budget b = *this;
        b.seconds = seconds * f;
        if (maxEvaluations != std::numeric_limits<std::uint64_t>::max()) {
            b.maxEvaluations = static_cast<std::uint64_t>(static_cast<double>(maxEvaluations) * f);
        }
        return b;
    }
};

/// Tracks consumption of a Budget. The clock is read only every few hundred checks.
class BudgetTracker {
  public:
    explicit BudgetTracker(const Budget &budget)
        : budget_(budget), start_(std::chrono::steady_clock::now()) {}

    void addMove() { ++moves_; }
    void addEvaluations(std::uint64_t k = 1) { evaluations_ += k; }

    std::uint64_t moves() const { return moves_; }
    std::uint64_t evaluations() const { return evaluations_; }

    double elapsedSeconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    double remainingSeconds() const { return budget_.seconds - elapsedSeconds(); }

    bool exhausted() {
        if (moves_ >= budget_.maxMoves || evaluations_ >= budget_.maxEvaluations) {
            return true;
        }
        if (budget_.seconds == std::numeric_limits<double>::infinity()) {
            return false;
        }
        if (++polls_ % 256 != 0 && !timedOut_) {
            return false;
        }
        timedOut_ = timedOut_ || elapsedSeconds() >= budget_.seconds;
        return timedOut_;
    }

  private:
    Budget budget_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t moves_ = 0;
    std::uint64_t evaluations_ = 0;
    std::uint64_t polls_ = 0;
    bool timedOut_ = false;
};

} // namespace bspsched
