// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <unordered_map>

#include "maskeq/poly.hpp"

namespace maskeq {

// R1..R13 follow the rewrite rule set; FoldMul/FoldAdd are the constant
// folding extension (general constants multiply/merge, which the base
// rules only cover for 0 and 1).
enum class Rule {
    R1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12, R13,
    FoldMul, FoldAdd,
};

const char* rule_name(Rule r);

struct RewriteStats {
    std::uint64_t steps = 0;
    std::map<std::string, std::uint64_t> rule_counts;
};

using TraceFn = std::function<void(Rule, const std::string&)>;

struct RewriteCtx {
    TermStore& store;
    const Field& field;
    std::map<SymId, Elem> lambda; // affine constant per symbol
    std::uint64_t budget = 10'000'000;
    RewriteStats stats;
    TraceFn trace; // optional per-rule-application callback

    RewriteCtx(TermStore& st, const Field& f) : store(st), field(f) {}

    Elem lambda_of(SymId s) const;
    void count(Rule r, std::uint64_t n = 1);

    std::unordered_map<TermId, Polynomial> memo;
};

// Normalization to the canonical polynomial shape: distribution and affine
// expansion to fixpoint, factor and monomial sorting, adjacent
// cancellation and constant folding. Works bottom-up over the DAG with the
// polynomial arithmetic carrying the rules. Throws BudgetError when the
// step budget runs out and SemanticError on a missing affine constant.
Polynomial normalize(TermId t, RewriteCtx& ctx);

Polynomial poly_add(const Polynomial& a, const Polynomial& b, RewriteCtx& ctx);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b, RewriteCtx& ctx);

bool poly_equal(const TermStore& st, const Polynomial& a, const Polynomial& b);

// ---- single-step reference engine ----------------------------------------
//
// A literal, term-level implementation of the rules, used to unit-test each
// rule in isolation, print derivations, and run the randomized-order
// confluence experiment. XOR/product chains are treated as flattened
// sequences at their topmost node and rebuilt right-associated.

struct Redex {
    std::vector<int> path; // child indices from the root (App argument = 0)
    Rule rule;
    int index = -1;        // element position for chain-level rules
};

std::vector<Redex> find_redexes(TermStore& st, const Field& field,
                                const std::map<SymId, Elem>& lambda, TermId t);

// applies one rule instance; throws SemanticError if the premise fails
TermId apply_rule(TermStore& st, const Field& field,
                  const std::map<SymId, Elem>& lambda, TermId t,
                  const Redex& r);

// repeatedly applies randomly chosen redexes until none remain
TermId normalize_steps(TermStore& st, const Field& field,
                       const std::map<SymId, Elem>& lambda, TermId t,
                       std::mt19937_64& rng, std::uint64_t max_steps,
                       std::uint64_t* steps_out = nullptr,
                       const TraceFn& trace = {});

// parses a rule-fixpoint term back into a Polynomial (validates the shape)
Polynomial read_back(TermStore& st, const Field& field, TermId t);

} // namespace maskeq
