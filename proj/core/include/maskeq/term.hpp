// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "maskeq/field.hpp"

namespace maskeq {

using TermId = std::uint32_t;
using VarId = std::uint32_t;
using SymId = std::uint32_t;

enum class TermKind : std::uint8_t { Const, Var, Add, Mul, App };

struct TermNode {
    TermKind kind;
    std::uint32_t a = 0; // Const value / Var id / left child / App symbol
    std::uint32_t b = 0; // right child / App argument
};

// Hash-consed term DAG: structurally equal terms share one id. A store is
// confined to a single verification task and is append-only.
class TermStore {
public:
    TermStore();

    TermId konst(Elem v);
    TermId var(const std::string& name);
    TermId var_term(VarId v);
    TermId add(TermId l, TermId r);
    TermId mul(TermId l, TermId r);
    TermId app(SymId f, TermId arg);

    VarId var_id(const std::string& name);
    SymId sym_id(const std::string& name);
    bool has_sym(const std::string& name) const;

    const TermNode& at(TermId t) const { return nodes_[t]; }
    TermKind kind(TermId t) const { return nodes_[t].kind; }
    bool is_zero(TermId t) const {
        return kind(t) == TermKind::Const && nodes_[t].a == 0;
    }

    const std::string& var_name(VarId v) const { return var_names_[v]; }
    const std::string& sym_name(SymId s) const { return sym_names_[s]; }
    std::size_t var_count() const { return var_names_.size(); }
    std::size_t sym_count() const { return sym_names_.size(); }

    // lexicographic-by-name orders within each class (constants < variables
    // < affine symbols overall; the class split lives in cmp_factor)
    int cmp_var(VarId a, VarId b) const;
    int cmp_sym(SymId a, SymId b) const;

    TermId substitute(TermId t, const std::map<VarId, TermId>& m);

    void vars_of(TermId t, std::set<VarId>& out) const;
    void syms_of(TermId t, std::set<SymId>& out) const;
    std::size_t dag_size(TermId t) const; // distinct nodes reachable

    std::string to_string(TermId t) const;

private:
    struct Key {
        TermKind k;
        std::uint32_t a, b;
        bool operator==(const Key& o) const {
            return k == o.k && a == o.a && b == o.b;
        }
    };
    struct KeyHash {
        std::size_t operator()(const Key& key) const {
            std::size_t h = static_cast<std::size_t>(key.k);
            h = h * 0x9E3779B97F4A7C15ull + key.a;
            h = h * 0x9E3779B97F4A7C15ull + key.b;
            return h;
        }
    };

    TermId intern(TermKind k, std::uint32_t a, std::uint32_t b);
    void ensure_ranks() const;

    std::vector<TermNode> nodes_;
    std::unordered_map<Key, TermId, KeyHash> dedup_;
    std::vector<std::string> var_names_;
    std::unordered_map<std::string, VarId> var_ids_;
    std::vector<std::string> sym_names_;
    std::unordered_map<std::string, SymId> sym_ids_;
    mutable std::vector<std::uint32_t> var_rank_, sym_rank_;
    mutable bool ranks_dirty_ = true;
};

// Concrete interpretation of affine symbols: one lookup table per symbol,
// indexed by the argument value.
using Tables = std::map<SymId, std::vector<Elem>>;

// Bottom-up memoized evaluation. Throws SemanticError on a missing binding.
Elem eval(const TermStore& st, TermId t, const Field& field,
          const std::map<VarId, Elem>& sigma, const Tables& iota);

} // namespace maskeq
