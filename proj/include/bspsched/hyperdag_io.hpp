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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bspsched {

/// Malformed input. line/column are 1-based and point at the offending token.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &message, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

// hyperDAG text format. Lines starting with '%' are comments.
//
//   <H> <PINS> <N>
//   <hyperedge> <node>      (PINS lines; the first pin of a hyperedge is its source)
//   <node> <work> <comm>    (N lines, ascending node id)
//
// A hyperedge (v, s1, ..., sk) stands for the edges v->si. Duplicate edges are merged.

ComputationalDag parseHyperdag(std::string_view text);
ComputationalDag loadHyperdag(const std::filesystem::path &path);

/// One hyperedge per node (id = node id) holding the node and its successors.
std::string writeHyperdag(const ComputationalDag &dag);
void saveHyperdag(const ComputationalDag &dag, const std::filesystem::path &path);

} // namespace bspsched
