// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "maskeq/ast.hpp"
#include "maskeq/poly.hpp"

namespace maskeq {

struct OracleConfig {
    std::uint64_t seed = 0xF15C;
    unsigned trials = 64;
    std::uint64_t budget = 1ull << 20; // max evaluations when exhaustive
};

struct OracleResult {
    enum class Kind {
        Zero,      // proved zero by complete enumeration
        ZeroSoFar, // zero at every sampled assignment
        Nonzero,   // witness found
    };
    Kind kind = Kind::ZeroSoFar;
    std::map<VarId, Elem> witness;
    std::uint64_t evals = 0;
};

// Evaluates p at `trials` seeded assignments (all symbols must have tables
// in iota). Deterministic for a fixed seed.
OracleResult sample_check_zero(const TermStore& st, const Polynomial& p,
                               const Field& field, const Tables& iota,
                               const OracleConfig& cfg);

// Complete enumeration over every assignment to the variables of p, in
// canonical order (variables sorted by name, last one fastest). Throws
// BudgetError when (2^n)^#vars exceeds cfg.budget.
OracleResult exhaustive_check_zero(const TermStore& st, const Polynomial& p,
                                   const Field& field, const Tables& iota,
                                   const OracleConfig& cfg);

// per-task seed derivation so procedures draw independent streams
std::uint64_t fnv1a(const std::string& s);

// ---- concrete interpreter -------------------------------------------------
//
// Direct execution of statement blocks over field values. Used to build
// affine function tables, to cross-check preprocessing and symbolic
// execution, and to brute-force the share-sum equivalence definition.
struct InterpCtx {
    const Field& field;
    const Program* prog = nullptr; // resolves affine definitions
    // tables by symbol name; consulted before re-interpreting a definition
    const std::map<std::string, std::vector<Elem>>* tables = nullptr;
    std::function<Elem()> rand_source; // required when the block draws
    // set both to give encoding-level statements their share-wise meaning
    const Proc* proc = nullptr;
    const std::map<std::string, Elem>* lambda = nullptr;
};

void interp_block(const std::vector<Stmt>& stmts,
                  std::map<std::string, Elem>& env, const InterpCtx& ctx);

Elem interp_expr(const Expr& e, const std::map<std::string, Elem>& env,
                 const InterpCtx& ctx);

} // namespace maskeq
