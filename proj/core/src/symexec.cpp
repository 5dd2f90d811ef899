// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/symexec.hpp"

#include <algorithm>

#include "maskeq/diag.hpp"

namespace maskeq {

namespace {

TermId term_of(TermStore& st, const Expr& e,
               const std::map<std::string, TermId>& env) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return st.konst(e.value);
    case Expr::Kind::Ident: {
        auto it = env.find(e.name);
        if (it == env.end())
            throw SemanticError("'" + e.name + "' used before assignment",
                                e.pos);
        return it->second;
    }
    case Expr::Kind::Xor:
        return st.add(term_of(st, *e.args[0], env),
                      term_of(st, *e.args[1], env));
    case Expr::Kind::Mul:
        return st.mul(term_of(st, *e.args[0], env),
                      term_of(st, *e.args[1], env));
    case Expr::Kind::Call:
        // only affine applications survive preprocessing
        return st.app(st.sym_id(e.name), term_of(st, *e.args[0], env));
    case Expr::Kind::Index:
        break;
    }
    throw SemanticError("unresolved share index in straight-line code", e.pos);
}

bool is_encoding(const Proc& proc, const std::string& name) {
    return std::find(proc.encodings.begin(), proc.encodings.end(), name) !=
           proc.encodings.end();
}

std::string share_name(const std::string& base, int i) {
    return base + std::to_string(i);
}

} // namespace

TermId exec_origin(TermStore& st, const Program& prog, const Proc& proc,
                   SymState* state) {
    (void)prog;
    SymState local;
    SymState& s = state ? *state : local;
    for (const std::string& in : proc.inputs) s.env[in] = st.var(in);
    for (const Stmt& stmt : proc.orig) {
        if (stmt.kind != Stmt::Kind::Assign)
            throw SemanticError("original block is not straight-line",
                                stmt.pos);
        s.env[stmt.lhs] = term_of(st, *stmt.rhs, s.env);
    }
    auto it = s.env.find(proc.output);
    if (it == s.env.end())
        throw SemanticError("output '" + proc.output + "' never assigned",
                            proc.pos);
    return it->second;
}

std::vector<TermId> exec_masked(TermStore& st, const Program& prog,
                                const Proc& proc,
                                const std::map<SymId, Elem>& lambda,
                                SymState* state) {
    (void)prog;
    SymState local;
    SymState& s = state ? *state : local;
    const int d = proc.order();
    for (const std::string& in : proc.inputs)
        for (int i = 0; i <= d; ++i) {
            const std::string nm = share_name(in, i);
            s.env[nm] = st.var(nm);
        }

    for (const Stmt& stmt : proc.masked) {
        if (stmt.kind == Stmt::Kind::Rand) {
            TermId r = st.var(stmt.lhs);
            s.env[stmt.lhs] = r;
            s.randoms.push_back(st.at(r).a);
            continue;
        }
        if (stmt.kind != Stmt::Kind::Assign)
            throw SemanticError("masked block is not straight-line", stmt.pos);

        if (!is_encoding(proc, stmt.lhs)) {
            s.env[stmt.lhs] = term_of(st, *stmt.rhs, s.env);
            continue;
        }

        // encoding-level statement: share-wise copy or affine application
        const Expr& rhs = *stmt.rhs;
        if (rhs.kind == Expr::Kind::Ident) {
            for (int i = 0; i <= d; ++i) {
                auto it = s.env.find(share_name(rhs.name, i));
                if (it == s.env.end())
                    throw SemanticError("encoding '" + rhs.name +
                                            "' not fully assigned",
                                        stmt.pos);
                s.env[share_name(stmt.lhs, i)] = it->second;
            }
        } else if (rhs.kind == Expr::Kind::Call &&
                   rhs.args[0]->kind == Expr::Kind::Ident) {
            SymId f = st.sym_id(rhs.name);
            auto lit = lambda.find(f);
            if (lit == lambda.end())
                throw SemanticError("'" + rhs.name +
                                        "' applied to an encoding but not "
                                        "known to be affine",
                                    stmt.pos);
            const std::string& base = rhs.args[0]->name;
            for (int i = 0; i <= d; ++i) {
                auto it = s.env.find(share_name(base, i));
                if (it == s.env.end())
                    throw SemanticError("encoding '" + base +
                                            "' not fully assigned",
                                        stmt.pos);
                TermId t = st.app(f, it->second);
                if (i == 0 && d % 2 == 1 && lit->second != 0)
                    t = st.add(t, st.konst(lit->second));
                s.env[share_name(stmt.lhs, i)] = t;
            }
        } else {
            throw SemanticError("unsupported encoding-level statement",
                                stmt.pos);
        }
    }

    std::vector<TermId> out;
    out.reserve(d + 1);
    for (int i = 0; i <= d; ++i) {
        auto it = s.env.find(share_name(proc.output, i));
        if (it == s.env.end())
            throw SemanticError("output share '" +
                                    share_name(proc.output, i) +
                                    "' never assigned",
                                proc.pos);
        out.push_back(it->second);
    }
    return out;
}

TermId xor_fold(TermStore& st, const std::vector<TermId>& shares) {
    if (shares.empty())
        throw SemanticError("cannot fold an empty share tuple");
    TermId acc = shares[0];
    for (std::size_t i = 1; i < shares.size(); ++i)
        acc = st.add(acc, shares[i]);
    return acc;
}

TermId exec_affine_body(TermStore& st, const AffineDef& def, TermId input) {
    if (def.has_builtins)
        throw SemanticError("'" + def.name +
                            "' uses bit-ops and has no term-level body");
    std::map<std::string, TermId> env;
    env[def.input] = input;
    for (const Stmt& stmt : def.body) {
        if (stmt.kind != Stmt::Kind::Assign)
            throw SemanticError("affine body is not straight-line", stmt.pos);
        env[stmt.lhs] = term_of(st, *stmt.rhs, env);
    }
    auto it = env.find(def.output);
    if (it == env.end())
        throw SemanticError("output '" + def.output + "' never assigned",
                            def.pos);
    return it->second;
}

} // namespace maskeq
