// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/affine.hpp"

#include <random>

#include "maskeq/diag.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/symexec.hpp"

namespace maskeq {

namespace {

void collect_callees(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::Call && !is_builtin_name(e.name))
        out.insert(e.name);
    for (const auto& a : e.args) collect_callees(*a, out);
}

void collect_callees(const std::vector<Stmt>& stmts,
                     std::set<std::string>& out) {
    for (const Stmt& s : stmts) {
        if (s.rhs) collect_callees(*s.rhs, out);
        if (s.rhs2) collect_callees(*s.rhs2, out);
        collect_callees(s.body, out);
        collect_callees(s.else_body, out);
    }
}

} // namespace

const std::vector<Elem>* TableCache::get(const std::string& name,
                                         const Program& prog,
                                         const Field& field) {
    auto hit = tables_.find(name);
    if (hit != tables_.end()) return &hit->second;
    auto imp = known_impossible_.find(name);
    if (imp != known_impossible_.end()) return nullptr;

    const AffineDef* def = prog.find_affine_def(name);
    if (!def) {
        known_impossible_[name] = true; // declared-only or unknown
        return nullptr;
    }
    std::set<std::string> callees;
    collect_callees(def->body, callees);
    for (const std::string& c : callees)
        if (!get(c, prog, field)) {
            known_impossible_[name] = true;
            return nullptr;
        }
    auto table = table_of(*def, prog, field, *this);
    ++builds_;
    return &tables_.emplace(name, std::move(table)).first->second;
}

std::vector<Elem> table_of(const AffineDef& def, const Program& prog,
                           const Field& field, TableCache& cache) {
    std::set<std::string> callees;
    collect_callees(def.body, callees);
    for (const std::string& c : callees)
        if (!cache.get(c, prog, field))
            throw SemanticError("'" + def.name + "' depends on '" + c +
                                "' which has no computable table");
    InterpCtx ctx{field, &prog, &cache.all(), {}, nullptr, nullptr};
    std::vector<Elem> table(field.size());
    for (Elem x = 0; x < field.size(); ++x) {
        std::map<std::string, Elem> env;
        env[def.input] = x;
        interp_block(def.body, env, ctx);
        table[x] = env.at(def.output);
    }
    return table;
}

TableCheck check_affine_table(const std::vector<Elem>& table,
                              const Field& field) {
    TableCheck chk;
    chk.c = table[0]; // tau at the probe pair (0,0) is f(0)
    for (Elem x = 0; x < field.size(); ++x)
        for (Elem y = 0; y < field.size(); ++y) {
            Elem v = table[x ^ y] ^ table[x] ^ table[y];
            if (v != chk.c) {
                chk.affine = false;
                chk.witness = AffineWitness{0, 0, chk.c, x, y, v};
                return chk;
            }
        }
    chk.affine = true;
    return chk;
}

TermId inline_affine(TermStore& st, const Program& prog, TermId t,
                     const std::string& name) {
    const AffineDef* def = prog.find_affine_def(name);
    if (!def || def->has_builtins) return t;
    const SymId target = st.sym_id(name);
    std::map<TermId, TermId> memo;
    std::function<TermId(TermId)> rec = [&](TermId u) -> TermId {
        auto hit = memo.find(u);
        if (hit != memo.end()) return hit->second;
        const TermNode node = st.at(u);
        TermId out = u;
        switch (node.kind) {
        case TermKind::Const:
        case TermKind::Var:
            break;
        case TermKind::Add:
            out = st.add(rec(node.a), rec(node.b));
            break;
        case TermKind::Mul:
            out = st.mul(rec(node.a), rec(node.b));
            break;
        case TermKind::App: {
            TermId arg = rec(node.b);
            out = node.a == target ? exec_affine_body(st, *def, arg)
                                   : st.app(node.a, arg);
            break;
        }
        }
        memo.emplace(u, out);
        return out;
    };
    return rec(t);
}

const AffineResult* AffineOutcome::find(const std::string& name) const {
    for (const auto& [n, r] : results)
        if (n == name) return &r;
    return nullptr;
}

namespace {

// builds tables for every symbol of t; false when one is uncomputable
bool tables_for_term(TermStore& st, const Program& prog, const Field& field,
                     TableCache& cache, TermId t, Tables& iota) {
    std::set<SymId> syms;
    st.syms_of(t, syms);
    for (SymId s : syms) {
        const std::vector<Elem>* tbl = cache.get(st.sym_name(s), prog, field);
        if (!tbl) return false;
        iota[s] = *tbl;
    }
    return true;
}

AffineResult decide_symbol(TermStore& st, const Program& prog,
                           const Field& field, const AffineDef& def,
                           RewriteCtx& ctx, AffineOutcome& out,
                           const OracleConfig& ocfg) {
    AffineResult r;
    TermId tau = 0;
    bool have_tau = false;

    if (!def.has_builtins) {
        TermId x = st.var(def.input);
        TermId y = st.var(def.input + "$y");
        TermId xi = exec_affine_body(st, def, x);
        VarId xv = st.var_id(def.input);
        std::map<VarId, TermId> to_sum{{xv, st.add(x, y)}};
        std::map<VarId, TermId> to_y{{xv, y}};
        tau = st.add(st.add(st.substitute(xi, to_sum), xi),
                     st.substitute(xi, to_y));
        have_tau = true;

        TermId cur = tau;
        std::set<std::string> inlined;
        for (;;) {
            try {
                Polynomial p = normalize(cur, ctx);
                if (p.is_const()) {
                    r.kind = AffineResult::Kind::Constant;
                    r.c = p.const_value();
                    r.method = "trs";
                    return r;
                }
                r.residual = to_string(st, p);
            } catch (const BudgetError& e) {
                r.note = e.what();
            } catch (const SemanticError& e) {
                r.note = e.what(); // a split needed a missing constant
            }

            bool progress = false;
            std::set<SymId> syms;
            st.syms_of(cur, syms);
            for (SymId s : syms) {
                const std::string& nm = st.sym_name(s);
                if (inlined.count(nm)) continue;
                const AffineDef* d2 = prog.find_affine_def(nm);
                if (!d2 || d2->has_builtins) continue;
                cur = inline_affine(st, prog, cur, nm);
                inlined.insert(nm);
                progress = true;
            }
            if (!progress) break;
        }
    }

    // random disproof over seeded probe pairs, then the exhaustive table
    Tables iota;
    bool evaluable =
        have_tau && tables_for_term(st, prog, field, out.cache, tau, iota);
    if (evaluable) {
        ++out.oracle_calls;
        VarId xv = st.var_id(def.input);
        VarId yv = st.var_id(def.input + "$y");
        std::map<VarId, Elem> sigma{{xv, 0}, {yv, 0}};
        Elem c0 = eval(st, tau, field, sigma, iota);
        std::mt19937_64 rng(ocfg.seed ^ fnv1a(def.name));
        for (int i = 0; i < 16; ++i) {
            Elem vx = static_cast<Elem>(rng()) & field.mask();
            Elem vy = static_cast<Elem>(rng()) & field.mask();
            sigma[xv] = vx;
            sigma[yv] = vy;
            Elem v = eval(st, tau, field, sigma, iota);
            if (v != c0) {
                r.kind = AffineResult::Kind::NotAffine;
                r.witness = AffineWitness{0, 0, c0, vx, vy, v};
                r.method = "sampled";
                return r;
            }
        }
    }

    const std::vector<Elem>* tbl = out.cache.get(def.name, prog, field);
    if (!tbl) {
        r.kind = AffineResult::Kind::Unknown;
        if (r.note.empty())
            r.note = "no computable table (declared-only dependency)";
        return r;
    }
    ++out.table_checks;
    TableCheck chk = check_affine_table(*tbl, field);
    if (chk.affine) {
        r.kind = AffineResult::Kind::Constant;
        r.c = chk.c;
        r.method = "table";
    } else {
        r.kind = AffineResult::Kind::NotAffine;
        r.witness = chk.witness;
        r.method = "table";
    }
    return r;
}

} // namespace

AffineOutcome aff_const_all(TermStore& st, const Program& prog,
                            const Field& field, const OracleConfig& ocfg,
                            std::uint64_t step_budget) {
    AffineOutcome out;
    RewriteCtx ctx(st, field);

    for (const std::string& name : prog.affine_decls) {
        AffineResult r;
        r.kind = AffineResult::Kind::AssumedLinear;
        r.c = 0;
        r.method = "declared";
        ctx.lambda[st.sym_id(name)] = 0;
        out.results.emplace_back(name, std::move(r));
    }

    CallGraph g = build_call_graph(prog);
    std::map<std::string, AffineResult> decided;
    for (const std::string& name : g.topo_order()) {
        const AffineDef* def = prog.find_affine_def(name);
        if (!def) continue;
        ctx.budget = ctx.stats.steps + step_budget;
        AffineResult r = decide_symbol(st, prog, field, *def, ctx, out, ocfg);
        if (r.kind == AffineResult::Kind::Constant)
            ctx.lambda[st.sym_id(name)] = r.c;
        decided.emplace(name, std::move(r));
    }
    for (const AffineDef& def : prog.affine_defs) {
        auto it = decided.find(def.name);
        if (it != decided.end())
            out.results.emplace_back(def.name, std::move(it->second));
    }

    for (const auto& [sym, c] : ctx.lambda) out.lambda[st.sym_name(sym)] = c;
    out.rewrite_stats = ctx.stats;
    return out;
}

std::map<SymId, Elem> intern_lambda(TermStore& st,
                                    const std::map<std::string, Elem>& lambda) {
    std::map<SymId, Elem> out;
    for (const auto& [name, c] : lambda) out[st.sym_id(name)] = c;
    return out;
}

} // namespace maskeq
