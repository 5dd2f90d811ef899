// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "maskeq/ast.hpp"
#include "maskeq/field.hpp"
#include "maskeq/term.hpp"

namespace maskeq::test {

// schoolbook carry-less multiply followed by long division, kept free of
// the per-round reduction the library uses
Elem naive_mul(unsigned n, std::uint32_t poly, Elem a, Elem b);

// seeded random term over the given variable and symbol pools; size is the
// node budget
TermId random_term(TermStore& st, const Field& field, std::mt19937_64& rng,
                   int size, const std::vector<std::string>& vars,
                   const std::vector<std::string>& syms);

// a genuinely affine function as a table: random GF(2)-linear map plus a
// constant, so f(x^y) = f(x) ^ f(y) ^ c exactly
struct AffineTable {
    std::vector<Elem> table;
    Elem c = 0;
};
AffineTable random_affine_table(const Field& field, std::mt19937_64& rng);

// exhaustive share-sum equivalence: enumerates every input share and
// random assignment and compares the decoded masked output against the
// original output
bool decode_agrees(const Program& prog, const Proc& proc, const Field& field,
                const std::map<std::string, Elem>& lambda = {});

// random first-order straight-line gadget over GF(16), correct by
// construction; roughly half receive one seeded fault afterwards
std::string random_gadget(std::mt19937_64& rng);

// the equivalence term: original output with each input replaced by the
// XOR of its shares, XORed with the folded masked output shares
TermId build_tau(TermStore& st, const Program& prog, const Proc& proc,
                 const std::map<SymId, Elem>& lambda);

// reads a whole file, throwing std::runtime_error when it cannot
std::string slurp(const std::string& path);

// every solver script a program gives rise to, keyed by subject name
struct EmittedScripts {
    Program prog;
    std::map<std::string, std::string> equivalence;
    std::map<std::string, std::string> affine;
};
EmittedScripts emit_scripts(const std::string& text);

// the (file name, script bytes) pairs frozen as byte-exact goldens
std::vector<std::pair<std::string, std::string>> smt_golden_set(
    const std::string& corpus_dir);

} // namespace maskeq::test
