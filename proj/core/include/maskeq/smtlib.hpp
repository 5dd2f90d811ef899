// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "maskeq/ast.hpp"
#include "maskeq/term.hpp"

namespace maskeq {

// Bitvector script asserting the equivalence term is nonzero, so unsat
// means the masked procedure is correct. Multiplication is a fully
// unrolled n-round peasant reduction, defined affine symbols become
// define-funs, declared-only ones become uninterpreted functions with a
// linearity axiom. Output is byte-deterministic.
std::string emit_smtlib_equivalence(TermStore& st, const Program& prog,
                                    const Proc& proc, TermId tau);

// Script asking for an affine constant c with f(x^y)^f(x)^f(y) = c for all
// pairs; sat with model c confirms affineness.
std::string emit_smtlib_affine(const Program& prog, const AffineDef& def);

// The same n-round multiplication recurrence the scripts encode, evaluable
// in-process; must agree with Field::mul everywhere.
Elem peasant_eval(const Field& field, Elem a, Elem b);

} // namespace maskeq
