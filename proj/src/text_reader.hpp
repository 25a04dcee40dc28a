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

#include "bspsched/hyperdag_io.hpp"

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bspsched::detail {

// Line-oriented whitespace tokenizer shared by the text formats. Skips blank lines
// and lines whose first non-blank character is one of the comment characters.
class TextReader {
  public:
    struct Record {
        std::size_t line = 0;
        std::vector<std::string_view> tokens;
        std::vector<std::size_t> columns;

        std::size_t size() const { return tokens.size(); }
        std::size_t column(std::size_t i) const { return columns[i]; }

        std::int64_t integer(std::size_t i, std::int64_t lo = std::numeric_limits<std::int64_t>::min(),
                             std::int64_t hi = std::numeric_limits<std::int64_t>::max()) const {
            std::int64_t value = 0;
            const auto tok = tokens[i];
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError("expected an integer, got '" + std::string(tok) + "'", line, columns[i]);
            }
            if (value < lo || value > hi) {
                throw ParseError("value " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]",
                                 line, columns[i]);
            }
            return value;
        }

        double real(std::size_t i) const {
            const std::string tok(tokens[i]);
            try {
                std::size_t used = 0;
                const double value = std::stod(tok, &used);
                if (used != tok.size()) {
                    throw std::invalid_argument(tok);
                }
                return value;
            } catch (const std::exception &) {
                throw ParseError("expected a number, got '" + tok + "'", line, columns[i]);
            }
        }
    };

    explicit TextReader(std::string_view text, std::string_view commentChars = "%#") :
        text_(text), comments_(commentChars) {}

    std::optional<Record> nextRecord() {
        while (pos_ < text_.size()) {
            const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
            std::string_view line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_;
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            Record rec;
            rec.line = line_;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
                    ++i;
                }
                if (i >= line.size()) {
                    break;
                }
                if (rec.tokens.empty() && comments_.find(line[i]) != std::string_view::npos) {
                    break;
                }
                const std::size_t start = i;
                while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
                    ++i;
                }
                rec.tokens.push_back(line.substr(start, i - start));
                rec.columns.push_back(start + 1);
            }
            if (!rec.tokens.empty()) {
                return rec;
            }
        }
        return std::nullopt;
    }

    std::size_t lineNumber() const { return line_; }

  private:
    std::string_view text_;
    std::string_view comments_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

} // namespace bspsched::detail
