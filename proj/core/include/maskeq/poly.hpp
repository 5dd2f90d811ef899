// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "maskeq/term.hpp"

namespace maskeq {

struct Monomial;

// A factor is a constant, a variable, or an affine application whose
// argument is XOR-free. Normal-form monomials never store Const factors
// (those fold into the coefficient); the Const case exists for comparing
// raw, not-yet-folded terms.
struct Factor {
    enum class Kind : std::uint8_t { Const, Var, App };

    Kind kind = Kind::Const;
    Elem value = 0;  // Const
    VarId var = 0;   // Var
    SymId sym = 0;   // App symbol
    TermId arg = 0;  // App argument as a canonical term (equality fast path)
    std::shared_ptr<const Monomial> arg_view; // App argument for ordering

    static Factor konst(Elem v);
    static Factor variable(VarId v);
};

struct FactorPow {
    Factor base;
    std::uint32_t exp = 1;
};

// coeff * product of factor powers; factors strictly descending under the
// factor order, exponents already reduced, coeff nonzero in normal forms
struct Monomial {
    Elem coeff = 1;
    std::vector<FactorPow> factors;

    bool is_const() const { return factors.empty(); }
};

// XOR of monomials, strictly descending by body; the empty list is 0
struct Polynomial {
    std::vector<Monomial> monomials;

    bool is_zero() const { return monomials.empty(); }
    bool is_const() const {
        return monomials.empty() ||
               (monomials.size() == 1 && monomials[0].is_const());
    }
    Elem const_value() const {
        return monomials.empty() ? 0 : monomials[0].coeff;
    }
};

// the factor order: leaves by symbol order, applications by symbol then
// argument; every application ranks above every leaf
int cmp_factor(const TermStore& st, const Factor& a, const Factor& b);

// lexicographic on the expanded factor sequence (each factor repeated by
// its exponent, coefficient != 1 acting as one trailing constant element)
int cmp_monomial(const TermStore& st, const Monomial& a, const Monomial& b);

// same walk ignoring coefficients; on const-free bodies the two orders
// rank monomials identically
int cmp_monomial_body(const TermStore& st, const Monomial& a,
                      const Monomial& b);

// builds the App factor f(arg), attaching the canonical argument term
Factor make_app_factor(TermStore& st, SymId f, const Monomial& arg);

// parses an XOR-free term into a sorted monomial view, folding constants
// into the coefficient; throws SemanticError if the term contains XOR
Monomial monomial_view(TermStore& st, TermId t, const Field& field);

TermId mono_to_term(TermStore& st, const Monomial& m);
TermId poly_to_term(TermStore& st, const Polynomial& p);

std::string to_string(const TermStore& st, const Monomial& m);
std::string to_string(const TermStore& st, const Polynomial& p);

// normal-form shape: strict monomial descent, strict factor descent,
// nonzero coefficients, exponents within [1, 2^n - 1], no Const factors
bool is_normal_form(const TermStore& st, const Field& field,
                    const Polynomial& p);

Elem eval_monomial(const TermStore& st, const Monomial& m, const Field& field,
                   const std::map<VarId, Elem>& sigma, const Tables& iota);
Elem eval_poly(const TermStore& st, const Polynomial& p, const Field& field,
               const std::map<VarId, Elem>& sigma, const Tables& iota);

void vars_of_poly(const TermStore& st, const Polynomial& p,
                  std::set<VarId>& out);
void syms_of_poly(const TermStore& st, const Polynomial& p,
                  std::set<SymId>& out);

} // namespace maskeq
