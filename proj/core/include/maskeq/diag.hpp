// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace maskeq {

struct SourcePos {
    int line = 0;
    int col = 0;
};

inline std::string to_string(SourcePos p) {
    return std::to_string(p.line) + ":" + std::to_string(p.col);
}

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourcePos pos)
        : std::runtime_error(to_string(pos) + ": " + msg), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

// semantic rejects: unresolved names, recursion, share mismatches, ...
class SemanticError : public std::runtime_error {
public:
    SemanticError(const std::string& msg, SourcePos pos = {})
        : std::runtime_error(pos.line ? to_string(pos) + ": " + msg : msg),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

// raised when a normalization or oracle budget is exhausted
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace maskeq
