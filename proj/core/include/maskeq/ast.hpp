// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "maskeq/diag.hpp"

namespace maskeq {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

// Expression tree as parsed. Call covers procedure calls, affine
// applications and the builtin bit-ops (rotl/shl/shr/band/bor/bnot);
// which one it is gets resolved against the program during checking.
struct Expr {
    enum class Kind { Const, Ident, Index, Xor, Mul, Call };

    Kind kind;
    SourcePos pos;
    std::uint32_t value = 0;       // Const
    std::string name;              // Ident, Index base, Call target
    std::vector<ExprPtr> args;     // Call args; Xor/Mul children; Index index

    ExprPtr clone() const;
};

ExprPtr mk_const(std::uint32_t v, SourcePos p = {});
ExprPtr mk_ident(std::string name, SourcePos p = {});
ExprPtr mk_binary(Expr::Kind k, ExprPtr l, ExprPtr r, SourcePos p = {});
ExprPtr mk_call(std::string name, std::vector<ExprPtr> args, SourcePos p = {});

struct Stmt {
    enum class Kind { Assign, Rand, For, If, Assume, Assert };

    Kind kind;
    SourcePos pos;
    std::string lhs;               // Assign/Rand target; For loop variable
    ExprPtr lhs_index;             // non-null for "x[i] <- ..." targets
    ExprPtr rhs;                   // Assign value; If guard; Assume/Assert expr
    ExprPtr rhs2;                  // optional "== e" right side of assume/assert
    long lo = 0, hi = 0;           // For bounds, half-open [lo, hi)
    std::vector<Stmt> body;        // For/If body
    std::vector<Stmt> else_body;   // If else branch

    Stmt clone() const;
};

struct AffineDef {
    std::string name;
    std::string input;
    std::string output;
    std::vector<Stmt> body;
    SourcePos pos;
    bool has_builtins = false;     // body uses bit-ops; stays opaque as a term
};

struct Proc {
    std::string name;
    std::vector<std::string> inputs;
    std::string output;
    int shares = 1;                // d + 1
    std::vector<Stmt> orig;
    std::vector<Stmt> masked;
    SourcePos pos;
    // names the masked block treats as (d+1)-tuples; filled by preprocess
    std::vector<std::string> encodings;

    Proc clone() const;
    int order() const { return shares - 1; }
};

struct Program {
    unsigned field_n = 8;
    std::uint32_t field_poly = 0x11B;
    bool field_directive = false;  // text carried an explicit "field n P;"

    std::vector<AffineDef> affine_defs;
    std::vector<std::string> affine_decls;
    std::vector<Proc> procs;

    const AffineDef* find_affine_def(const std::string& n) const;
    const Proc* find_proc(const std::string& n) const;
    bool is_affine_name(const std::string& n) const;
    bool is_declared_only(const std::string& n) const;

    Program clone() const;
};

bool is_builtin_name(const std::string& n);

// splits a trailing decimal index off an identifier: "x12" -> {"x", 12}.
// Returns false if there is no digit suffix or no base left.
bool split_share_ref(const std::string& ident, std::string& base, int& index);

} // namespace maskeq
