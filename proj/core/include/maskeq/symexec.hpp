// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "maskeq/ast.hpp"
#include "maskeq/term.hpp"

namespace maskeq {

struct SymState {
    std::map<std::string, TermId> env;
    std::vector<VarId> randoms; // in encounter order
};

// Runs the straight-line original block, mapping each input name to a Var
// and keeping affine applications as App nodes. Returns the output term.
TermId exec_origin(TermStore& st, const Program& prog, const Proc& proc,
                   SymState* state = nullptr);

// Runs the straight-line masked block over share variables name0..named and
// fresh Vars for rand statements. Statements whose target is an encoding
// apply affine maps share-wise; when the masking order d is odd the affine
// constant lands on share 0 so the encoded value is preserved. Returns one
// term per output share.
std::vector<TermId> exec_masked(TermStore& st, const Program& prog,
                                const Proc& proc,
                                const std::map<SymId, Elem>& lambda,
                                SymState* state = nullptr);

TermId xor_fold(TermStore& st, const std::vector<TermId>& shares);

// Runs a straight-line affine body with its input bound to the given term;
// calls to other affine symbols stay symbolic. The body must be free of
// builtin bit-ops (those definitions stay opaque).
TermId exec_affine_body(TermStore& st, const AffineDef& def, TermId input);

} // namespace maskeq
