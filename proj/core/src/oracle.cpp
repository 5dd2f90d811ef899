// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/oracle.hpp"

#include <algorithm>
#include <random>

#include "maskeq/diag.hpp"

namespace maskeq {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::vector<VarId> sorted_vars(const TermStore& st, const Polynomial& p) {
    std::set<VarId> vs;
    vars_of_poly(st, p, vs);
    std::vector<VarId> out(vs.begin(), vs.end());
    std::sort(out.begin(), out.end(),
              [&](VarId a, VarId b) { return st.cmp_var(a, b) < 0; });
    return out;
}

} // namespace

OracleResult sample_check_zero(const TermStore& st, const Polynomial& p,
                               const Field& field, const Tables& iota,
                               const OracleConfig& cfg) {
    OracleResult res;
    std::vector<VarId> vars = sorted_vars(st, p);
    std::mt19937_64 rng(cfg.seed);
    std::map<VarId, Elem> sigma;
    for (unsigned t = 0; t < cfg.trials; ++t) {
        for (VarId v : vars)
            sigma[v] = static_cast<Elem>(rng()) & field.mask();
        ++res.evals;
        if (eval_poly(st, p, field, sigma, iota) != 0) {
            res.kind = OracleResult::Kind::Nonzero;
            res.witness = sigma;
            return res;
        }
    }
    res.kind = OracleResult::Kind::ZeroSoFar;
    return res;
}

OracleResult exhaustive_check_zero(const TermStore& st, const Polynomial& p,
                                   const Field& field, const Tables& iota,
                                   const OracleConfig& cfg) {
    OracleResult res;
    std::vector<VarId> vars = sorted_vars(st, p);
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (total > cfg.budget / field.size())
            throw BudgetError("exhaustive check needs more than " +
                              std::to_string(cfg.budget) + " evaluations");
        total *= field.size();
    }

    std::map<VarId, Elem> sigma;
    for (VarId v : vars) sigma[v] = 0;
    std::vector<Elem> vals(vars.size(), 0);
    for (;;) {
        ++res.evals;
        if (eval_poly(st, p, field, sigma, iota) != 0) {
            res.kind = OracleResult::Kind::Nonzero;
            res.witness = sigma;
            return res;
        }
        std::size_t i = vars.size();
        while (i > 0) {
            --i;
            if (++vals[i] <= field.mask()) {
                sigma[vars[i]] = vals[i];
                break;
            }
            vals[i] = 0;
            sigma[vars[i]] = 0;
            if (i == 0) {
                res.kind = OracleResult::Kind::Zero;
                return res;
            }
        }
        if (vars.empty()) {
            res.kind = OracleResult::Kind::Zero;
            return res;
        }
    }
}

// ---- concrete interpreter -------------------------------------------------

namespace {

Elem apply_builtin(const std::string& name, Elem x, Elem k, unsigned n,
                   Elem mask) {
    if (name == "bnot") return ~x & mask;
    if (name == "band") return x & k;
    if (name == "bor") return (x | k) & mask;
    if (name == "rotl") {
        unsigned r = static_cast<unsigned>(k) % n;
        if (r == 0) return x;
        return ((x << r) | (x >> (n - r))) & mask;
    }
    if (name == "shl") return k >= 32 ? 0 : (x << k) & mask;
    if (name == "shr") return k >= 32 ? 0 : (x >> k) & mask;
    throw SemanticError("unknown builtin '" + name + "'");
}

Elem apply_sym(const std::string& name, Elem x, const InterpCtx& ctx) {
    if (ctx.tables) {
        auto it = ctx.tables->find(name);
        if (it != ctx.tables->end()) return it->second[x];
    }
    const AffineDef* def = ctx.prog ? ctx.prog->find_affine_def(name) : nullptr;
    if (!def)
        throw SemanticError("no interpretation available for '" + name + "'");
    std::map<std::string, Elem> env;
    env[def->input] = x;
    interp_block(def->body, env, ctx);
    auto out = env.find(def->output);
    if (out == env.end())
        throw SemanticError("'" + name + "' did not assign its output");
    return out->second;
}

bool lhs_is_encoding(const InterpCtx& ctx, const std::string& name) {
    if (!ctx.proc || !ctx.lambda) return false;
    const auto& enc = ctx.proc->encodings;
    return std::find(enc.begin(), enc.end(), name) != enc.end();
}

} // namespace

Elem interp_expr(const Expr& e, const std::map<std::string, Elem>& env,
                 const InterpCtx& ctx) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return e.value;
    case Expr::Kind::Ident: {
        auto it = env.find(e.name);
        if (it == env.end())
            throw SemanticError("'" + e.name + "' used before assignment",
                                e.pos);
        return it->second;
    }
    case Expr::Kind::Index: {
        Elem idx = interp_expr(*e.args[0], env, ctx);
        std::string nm = e.name + std::to_string(idx);
        auto it = env.find(nm);
        if (it == env.end())
            throw SemanticError("'" + nm + "' used before assignment", e.pos);
        return it->second;
    }
    case Expr::Kind::Xor:
        return interp_expr(*e.args[0], env, ctx) ^
               interp_expr(*e.args[1], env, ctx);
    case Expr::Kind::Mul:
        return ctx.field.mul(interp_expr(*e.args[0], env, ctx),
                             interp_expr(*e.args[1], env, ctx));
    case Expr::Kind::Call: {
        if (is_builtin_name(e.name)) {
            Elem x = interp_expr(*e.args[0], env, ctx);
            Elem k = e.args.size() > 1 ? interp_expr(*e.args[1], env, ctx) : 0;
            return apply_builtin(e.name, x, k, ctx.field.width(),
                                 ctx.field.mask());
        }
        return apply_sym(e.name, interp_expr(*e.args[0], env, ctx), ctx);
    }
    }
    throw SemanticError("unreachable expression kind", e.pos);
}

void interp_block(const std::vector<Stmt>& stmts,
                  std::map<std::string, Elem>& env, const InterpCtx& ctx) {
    for (const Stmt& s : stmts) {
        switch (s.kind) {
        case Stmt::Kind::Assign: {
            if (lhs_is_encoding(ctx, s.lhs)) {
                const int d = ctx.proc->order();
                const Expr& rhs = *s.rhs;
                for (int i = 0; i <= d; ++i) {
                    std::string li = s.lhs + std::to_string(i);
                    if (rhs.kind == Expr::Kind::Ident) {
                        env[li] = env.at(rhs.name + std::to_string(i));
                    } else if (rhs.kind == Expr::Kind::Call) {
                        Elem x =
                            env.at(rhs.args[0]->name + std::to_string(i));
                        Elem v = apply_sym(rhs.name, x, ctx);
                        if (i == 0 && d % 2 == 1)
                            v ^= ctx.lambda->at(rhs.name);
                        env[li] = v;
                    } else {
                        throw SemanticError(
                            "unsupported encoding-level statement", s.pos);
                    }
                }
                break;
            }
            std::string target = s.lhs;
            if (s.lhs_index) {
                Elem idx = interp_expr(*s.lhs_index, env, ctx);
                target += std::to_string(idx);
            }
            env[target] = interp_expr(*s.rhs, env, ctx);
            break;
        }
        case Stmt::Kind::Rand:
            if (!ctx.rand_source)
                throw SemanticError("no randomness source for 'rand'", s.pos);
            env[s.lhs] = ctx.rand_source();
            break;
        case Stmt::Kind::For: {
            auto shadow = env.find(s.lhs);
            bool had = shadow != env.end();
            Elem saved = had ? shadow->second : 0;
            for (long v = s.lo; v < s.hi; ++v) {
                env[s.lhs] = static_cast<Elem>(v);
                interp_block(s.body, env, ctx);
            }
            if (had)
                env[s.lhs] = saved;
            else
                env.erase(s.lhs);
            break;
        }
        case Stmt::Kind::If:
            if (interp_expr(*s.rhs, env, ctx) != 0)
                interp_block(s.body, env, ctx);
            else
                interp_block(s.else_body, env, ctx);
            break;
        case Stmt::Kind::Assume:
            break;
        case Stmt::Kind::Assert: {
            Elem l = interp_expr(*s.rhs, env, ctx);
            Elem r = s.rhs2 ? interp_expr(*s.rhs2, env, ctx) : l;
            bool ok = s.rhs2 ? l == r : l != 0;
            if (!ok) throw SemanticError("assertion failed", s.pos);
            break;
        }
        }
    }
}

} // namespace maskeq
