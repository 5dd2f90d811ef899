// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/term.hpp"

#include <algorithm>
#include <numeric>

#include "maskeq/diag.hpp"

namespace maskeq {

TermStore::TermStore() { nodes_.reserve(1024); }

TermId TermStore::intern(TermKind k, std::uint32_t a, std::uint32_t b) {
    Key key{k, a, b};
    auto it = dedup_.find(key);
    if (it != dedup_.end()) return it->second;
    TermId id = static_cast<TermId>(nodes_.size());
    nodes_.push_back(TermNode{k, a, b});
    dedup_.emplace(key, id);
    return id;
}

TermId TermStore::konst(Elem v) { return intern(TermKind::Const, v, 0); }

VarId TermStore::var_id(const std::string& name) {
    auto it = var_ids_.find(name);
    if (it != var_ids_.end()) return it->second;
    VarId id = static_cast<VarId>(var_names_.size());
    var_names_.push_back(name);
    var_ids_.emplace(name, id);
    ranks_dirty_ = true;
    return id;
}

SymId TermStore::sym_id(const std::string& name) {
    auto it = sym_ids_.find(name);
    if (it != sym_ids_.end()) return it->second;
    SymId id = static_cast<SymId>(sym_names_.size());
    sym_names_.push_back(name);
    sym_ids_.emplace(name, id);
    ranks_dirty_ = true;
    return id;
}

bool TermStore::has_sym(const std::string& name) const {
    return sym_ids_.count(name) != 0;
}

TermId TermStore::var(const std::string& name) {
    return intern(TermKind::Var, var_id(name), 0);
}

TermId TermStore::var_term(VarId v) { return intern(TermKind::Var, v, 0); }

TermId TermStore::add(TermId l, TermId r) {
    return intern(TermKind::Add, l, r);
}

TermId TermStore::mul(TermId l, TermId r) {
    return intern(TermKind::Mul, l, r);
}

TermId TermStore::app(SymId f, TermId arg) {
    return intern(TermKind::App, f, arg);
}

void TermStore::ensure_ranks() const {
    if (!ranks_dirty_) return;
    auto rank_by_name = [](const std::vector<std::string>& names,
                           std::vector<std::uint32_t>& rank) {
        std::vector<std::uint32_t> idx(names.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
            return names[a] < names[b];
        });
        rank.assign(names.size(), 0);
        for (std::uint32_t i = 0; i < idx.size(); ++i) rank[idx[i]] = i;
    };
    rank_by_name(var_names_, var_rank_);
    rank_by_name(sym_names_, sym_rank_);
    ranks_dirty_ = false;
}

int TermStore::cmp_var(VarId a, VarId b) const {
    if (a == b) return 0;
    ensure_ranks();
    return var_rank_[a] < var_rank_[b] ? -1 : 1;
}

int TermStore::cmp_sym(SymId a, SymId b) const {
    if (a == b) return 0;
    ensure_ranks();
    return sym_rank_[a] < sym_rank_[b] ? -1 : 1;
}

TermId TermStore::substitute(TermId t, const std::map<VarId, TermId>& m) {
    std::unordered_map<TermId, TermId> memo;
    auto rec = [&](auto&& self, TermId id) -> TermId {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        const TermNode n = nodes_[id];
        TermId out = id;
        switch (n.kind) {
        case TermKind::Const:
            break;
        case TermKind::Var: {
            auto v = m.find(n.a);
            if (v != m.end()) out = v->second;
            break;
        }
        case TermKind::Add:
            out = add(self(self, n.a), self(self, n.b));
            break;
        case TermKind::Mul:
            out = mul(self(self, n.a), self(self, n.b));
            break;
        case TermKind::App:
            out = app(n.a, self(self, n.b));
            break;
        }
        memo.emplace(id, out);
        return out;
    };
    return rec(rec, t);
}

void TermStore::vars_of(TermId t, std::set<VarId>& out) const {
    std::set<TermId> seen;
    auto rec = [&](auto&& self, TermId id) -> void {
        if (!seen.insert(id).second) return;
        const TermNode& n = nodes_[id];
        switch (n.kind) {
        case TermKind::Const:
            break;
        case TermKind::Var:
            out.insert(n.a);
            break;
        case TermKind::Add:
        case TermKind::Mul:
            self(self, n.a);
            self(self, n.b);
            break;
        case TermKind::App:
            self(self, n.b);
            break;
        }
    };
    rec(rec, t);
}

void TermStore::syms_of(TermId t, std::set<SymId>& out) const {
    std::set<TermId> seen;
    auto rec = [&](auto&& self, TermId id) -> void {
        if (!seen.insert(id).second) return;
        const TermNode& n = nodes_[id];
        switch (n.kind) {
        case TermKind::Const:
        case TermKind::Var:
            break;
        case TermKind::Add:
        case TermKind::Mul:
            self(self, n.a);
            self(self, n.b);
            break;
        case TermKind::App:
            out.insert(n.a);
            self(self, n.b);
            break;
        }
    };
    rec(rec, t);
}

std::size_t TermStore::dag_size(TermId t) const {
    std::set<TermId> seen;
    auto rec = [&](auto&& self, TermId id) -> void {
        if (!seen.insert(id).second) return;
        const TermNode& n = nodes_[id];
        if (n.kind == TermKind::Add || n.kind == TermKind::Mul) {
            self(self, n.a);
            self(self, n.b);
        } else if (n.kind == TermKind::App) {
            self(self, n.b);
        }
    };
    rec(rec, t);
    return seen.size();
}

std::string TermStore::to_string(TermId t) const {
    // precedence: ^ = 0, * = 1, atoms = 2
    auto rec = [&](auto&& self, TermId id, int ctx) -> std::string {
        const TermNode& n = nodes_[id];
        switch (n.kind) {
        case TermKind::Const:
            return std::to_string(n.a);
        case TermKind::Var:
            return var_names_[n.a];
        case TermKind::App:
            return sym_names_[n.a] + "(" + self(self, n.b, 0) + ")";
        case TermKind::Add: {
            std::string s = self(self, n.a, 0) + " ^ " + self(self, n.b, 0);
            return ctx > 0 ? "(" + s + ")" : s;
        }
        case TermKind::Mul: {
            std::string s = self(self, n.a, 1) + " * " + self(self, n.b, 1);
            return ctx > 1 ? "(" + s + ")" : s;
        }
        }
        return {};
    };
    return rec(rec, t, 0);
}

Elem eval(const TermStore& st, TermId t, const Field& field,
          const std::map<VarId, Elem>& sigma, const Tables& iota) {
    std::unordered_map<TermId, Elem> memo;
    auto rec = [&](auto&& self, TermId id) -> Elem {
        auto it = memo.find(id);
        if (it != memo.end()) return it->second;
        const TermNode& n = st.at(id);
        Elem out = 0;
        switch (n.kind) {
        case TermKind::Const:
            out = n.a;
            break;
        case TermKind::Var: {
            auto v = sigma.find(n.a);
            if (v == sigma.end())
                throw SemanticError("no value for variable '" +
                                    st.var_name(n.a) + "'");
            out = v->second;
            break;
        }
        case TermKind::Add:
            out = self(self, n.a) ^ self(self, n.b);
            break;
        case TermKind::Mul:
            out = field.mul(self(self, n.a), self(self, n.b));
            break;
        case TermKind::App: {
            auto f = iota.find(n.a);
            if (f == iota.end())
                throw SemanticError("no table for symbol '" +
                                    st.sym_name(n.a) + "'");
            out = f->second[self(self, n.b)];
            break;
        }
        }
        memo.emplace(id, out);
        return out;
    };
    return rec(rec, t);
}

} // namespace maskeq
