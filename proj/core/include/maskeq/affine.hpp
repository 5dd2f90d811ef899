// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "maskeq/oracle.hpp"
#include "maskeq/rewrite.hpp"

namespace maskeq {

// two probe pairs where f(x+y)+f(x)+f(y) takes different values, which
// rules out every possible affine constant at once
struct AffineWitness {
    Elem x1 = 0, y1 = 0, t1 = 0;
    Elem x2 = 0, y2 = 0, t2 = 0;
};

struct AffineResult {
    enum class Kind { Constant, NotAffine, AssumedLinear, Unknown };

    Kind kind = Kind::Unknown;
    Elem c = 0;                // Constant / AssumedLinear
    AffineWitness witness;     // NotAffine
    std::string method;        // "trs", "table", "sampled", "declared"
    std::string note;          // Unknown: why no decision was possible
    std::string residual;      // Unknown: last residual, pretty-printed
};

// Lazily built function tables, shared between the affine analysis and the
// oracle fallbacks so table construction is observable in the stats.
class TableCache {
public:
    // builds (and caches) the 2^n table; nullptr when the symbol or one of
    // its callees is declared-only and therefore has no computable table
    const std::vector<Elem>* get(const std::string& name, const Program& prog,
                                 const Field& field);

    std::uint64_t builds() const { return builds_; }
    const std::map<std::string, std::vector<Elem>>& all() const {
        return tables_;
    }

private:
    std::map<std::string, std::vector<Elem>> tables_;
    std::map<std::string, bool> known_impossible_;
    std::uint64_t builds_ = 0;
};

struct AffineOutcome {
    std::vector<std::pair<std::string, AffineResult>> results; // source order
    // Constant and AssumedLinear symbols, keyed by name so the map can
    // cross term-store boundaries (each verification task owns a store)
    std::map<std::string, Elem> lambda;
    TableCache cache;
    std::uint64_t oracle_calls = 0; // sampled disproof attempts
    std::uint64_t table_checks = 0; // exhaustive table verifications
    RewriteStats rewrite_stats;

    const AffineResult* find(const std::string& name) const;
};

// full concrete evaluation of an affine definition at every field element
std::vector<Elem> table_of(const AffineDef& def, const Program& prog,
                           const Field& field, TableCache& cache);

struct TableCheck {
    bool affine = false;
    Elem c = 0;
    AffineWitness witness;
};

// fixes the candidate constant at one probe and verifies it at all pairs
TableCheck check_affine_table(const std::vector<Elem>& table,
                              const Field& field);

// replaces every application of `name` in t by the expanded body
TermId inline_affine(TermStore& st, const Program& prog, TermId t,
                     const std::string& name);

// Decides the affine constant of every affine symbol in topological order:
// term rewriting first, then the inline-and-retry loop, then seeded random
// disproof, then the exhaustive table check. Declared-only symbols are
// assumed linear with constant 0.
AffineOutcome aff_const_all(TermStore& st, const Program& prog,
                            const Field& field, const OracleConfig& ocfg,
                            std::uint64_t step_budget = 10'000'000);

// interns a name-keyed constant map into a store's symbol ids
std::map<SymId, Elem> intern_lambda(TermStore& st,
                                    const std::map<std::string, Elem>& lambda);

} // namespace maskeq
