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

#include "bspsched/machine.hpp"

#include "text_reader.hpp"

#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bspsched {

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    const auto d = std::gcd(numerator, denominator);
    num_ = numerator / (d == 0 ? 1 : d);
    den_ = denominator / (d == 0 ? 1 : d);
}

std::string Rational::toString() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string &text) {
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const auto value = std::stoll(text, &used);
            if (used != text.size()) {
                throw std::invalid_argument(text);
            }
            return Rational(value);
        }
        const std::string a = text.substr(0, slash);
        const std::string b = text.substr(slash + 1);
        const auto num = std::stoll(a, &used);
        if (used != a.size()) {
            throw std::invalid_argument(text);
        }
        const auto den = std::stoll(b, &used);
        if (used != b.size()) {
            throw std::invalid_argument(text);
        }
        return Rational(num, den);
    } catch (const std::invalid_argument &) {
        throw std::invalid_argument("not a rational number: '" + text + "'");
    } catch (const std::out_of_range &) {
        throw std::invalid_argument("rational out of range: '" + text + "'");
    }
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

LambdaMatrix uniformLambda(unsigned numProcessors) {
    LambdaMatrix lambda(numProcessors, std::vector<Rational>(numProcessors, Rational(1)));
    for (unsigned p = 0; p < numProcessors; ++p) {
        lambda[p][p] = Rational(0);
    }
    return lambda;
}

LambdaMatrix numaFromTree(unsigned numProcessors, Weight delta) {
    if (numProcessors == 0 || !std::has_single_bit(numProcessors)) {
        throw std::invalid_argument("NUMA tree needs a power-of-two processor count, got " +
                                    std::to_string(numProcessors));
    }
    if (delta < 1) {
        throw std::invalid_argument("NUMA tree factor must be at least 1");
    }
    LambdaMatrix lambda(numProcessors, std::vector<Rational>(numProcessors));
    for (unsigned p = 0; p < numProcessors; ++p) {
        for (unsigned q = 0; q < numProcessors; ++q) {
            if (p == q) {
                continue;
            }
            const unsigned level = static_cast<unsigned>(std::bit_width(p ^ q));
            Weight value = 1;
            for (unsigned i = 1; i < level; ++i) {
                value *= delta;
            }
            lambda[p][q] = Rational(value);
        }
    }
    return lambda;
}

MachineParams::MachineParams(unsigned numProcessors, Weight g, Weight latency)
    : MachineParams(numProcessors, g, latency, uniformLambda(numProcessors)) {}

MachineParams::MachineParams(unsigned numProcessors, Weight g, Weight latency, LambdaMatrix lambda)
    : numProcessors_(numProcessors), g_(g), latency_(latency), lambda_(std::move(lambda)) {
    if (numProcessors_ == 0) {
        throw std::invalid_argument("machine needs at least one processor");
    }
    if (g_ < 0 || latency_ < 0) {
        throw std::invalid_argument("g and latency must be nonnegative");
    }
    if (lambda_.size() != numProcessors_) {
        throw std::invalid_argument("lambda matrix must be P x P");
    }
    for (unsigned p = 0; p < numProcessors_; ++p) {
        if (lambda_[p].size() != numProcessors_) {
            throw std::invalid_argument("lambda matrix must be P x P");
        }
        for (unsigned q = 0; q < numProcessors_; ++q) {
            const Rational &value = lambda_[p][q];
            if (p == q && value != Rational(0)) {
                throw std::invalid_argument("lambda diagonal must be 0");
            }
            if (p != q && value <= Rational(0)) {
                throw std::invalid_argument("off-diagonal lambda entries must be positive");
            }
            if (p != q && value != Rational(1)) {
                uniform_ = false;
            }
            denominator_ = std::lcm(denominator_, value.denominator());
        }
    }
    scaled_.resize(static_cast<std::size_t>(numProcessors_) * numProcessors_);
    for (unsigned p = 0; p < numProcessors_; ++p) {
        for (unsigned q = 0; q < numProcessors_; ++q) {
            const Rational &value = lambda_[p][q];
            scaled_[p * numProcessors_ + q] = value.numerator() * (denominator_ / value.denominator());
        }
    }
}

double MachineParams::meanOffDiagonalLambda() const {
    if (numProcessors_ < 2) {
        return 0.0;
    }
    double sum = 0.0;
    for (unsigned p = 0; p < numProcessors_; ++p) {
        for (unsigned q = 0; q < numProcessors_; ++q) {
            if (p != q) {
                sum += lambda_[p][q].toDouble();
            }
        }
    }
    return sum / (static_cast<double>(numProcessors_) * (numProcessors_ - 1));
}

LambdaMatrix loadLambdaMatrix(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    detail::TextReader reader(text);
    LambdaMatrix lambda;
    while (auto rec = reader.nextRecord()) {
        std::vector<Rational> row;
        for (std::size_t i = 0; i < rec->size(); ++i) {
            try {
                row.push_back(Rational::parse(std::string(rec->tokens[i])));
            } catch (const std::invalid_argument &e) {
                throw ParseError(e.what(), rec->line, rec->column(i));
            }
        }
        lambda.push_back(std::move(row));
    }
    return lambda;
}

} // namespace bspsched
