// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>

#include "maskeq/field.hpp"

namespace maskeq {

// ----------------------------------------------------------------- callgraph

namespace {

void collect_callees(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::Call && !is_builtin_name(e.name))
        out.insert(e.name);
    for (const auto& a : e.args) collect_callees(*a, out);
}

void collect_callees(const std::vector<Stmt>& stmts,
                     std::set<std::string>& out) {
    for (const auto& s : stmts) {
        if (s.rhs) collect_callees(*s.rhs, out);
        if (s.rhs2) collect_callees(*s.rhs2, out);
        collect_callees(s.body, out);
        collect_callees(s.else_body, out);
    }
}

} // namespace

CallGraph build_call_graph(const Program& prog) {
    CallGraph g;
    for (const auto& d : prog.affine_defs) {
        g.nodes.push_back(d.name);
        std::set<std::string> c;
        collect_callees(d.body, c);
        g.edges[d.name] = {c.begin(), c.end()};
    }
    for (const auto& n : prog.affine_decls) {
        g.nodes.push_back(n);
        g.edges[n] = {};
    }
    for (const auto& p : prog.procs) {
        g.nodes.push_back(p.name);
        std::set<std::string> c;
        collect_callees(p.orig, c);
        collect_callees(p.masked, c);
        g.edges[p.name] = {c.begin(), c.end()};
    }
    g.topo_order(); // validates acyclicity
    return g;
}

std::vector<std::string> CallGraph::topo_order() const {
    std::vector<std::string> order;
    std::map<std::string, int> state; // 0 new, 1 visiting, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
        int& st = state[n];
        if (st == 2) return;
        if (st == 1)
            throw SemanticError("recursion detected through '" + n + "'");
        st = 1;
        auto it = edges.find(n);
        if (it != edges.end())
            for (const auto& m : it->second) visit(m);
        st = 2;
        order.push_back(n);
    };
    for (const auto& n : nodes) visit(n);
    return order;
}

// ---------------------------------------------------------------- preprocess

namespace {

using LoopEnv = std::map<std::string, long>;

// replaces loop variables inside an identifier: whole name, or any
// '_'-separated component, e.g. i=1 turns "r_i_j" into "r_1_j".
std::string subst_ident(const std::string& name, const LoopEnv& env) {
    if (env.empty()) return name;
    auto whole = env.find(name);
    if (whole != env.end()) return std::to_string(whole->second);
    if (name.find('_') == std::string::npos) return name;
    std::string out;
    size_t start = 0;
    while (start <= name.size()) {
        size_t sep = name.find('_', start);
        std::string part = name.substr(
            start, sep == std::string::npos ? std::string::npos : sep - start);
        auto it = env.find(part);
        out += it != env.end() ? std::to_string(it->second) : part;
        if (sep == std::string::npos) break;
        out += '_';
        start = sep + 1;
    }
    return out;
}

std::optional<std::uint64_t> eval_const(const Expr& e, const Field& field) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return e.value;
    case Expr::Kind::Xor: {
        auto l = eval_const(*e.args[0], field);
        auto r = eval_const(*e.args[1], field);
        if (l && r) return *l ^ *r;
        return std::nullopt;
    }
    case Expr::Kind::Mul: {
        auto l = eval_const(*e.args[0], field);
        auto r = eval_const(*e.args[1], field);
        if (l && r)
            return field.mul(static_cast<Elem>(*l), static_cast<Elem>(*r));
        return std::nullopt;
    }
    default:
        return std::nullopt;
    }
}

// loop-variable substitution over an expression; resolves x[i] to xi once
// the index is constant
void subst_expr(Expr& e, const LoopEnv& env, const Field& field) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return;
    case Expr::Kind::Ident: {
        auto it = env.find(e.name);
        if (it != env.end()) {
            e.kind = Expr::Kind::Const;
            e.value = static_cast<std::uint32_t>(it->second);
            e.name.clear();
            return;
        }
        e.name = subst_ident(e.name, env);
        return;
    }
    case Expr::Kind::Index: {
        subst_expr(*e.args[0], env, field);
        e.name = subst_ident(e.name, env);
        auto idx = eval_const(*e.args[0], field);
        if (idx) {
            e.kind = Expr::Kind::Ident;
            e.name += std::to_string(*idx);
            e.args.clear();
        }
        return;
    }
    case Expr::Kind::Xor:
    case Expr::Kind::Mul:
        subst_expr(*e.args[0], env, field);
        subst_expr(*e.args[1], env, field);
        return;
    case Expr::Kind::Call:
        for (auto& a : e.args) subst_expr(*a, env, field);
        return;
    }
}

void rename_idents(Expr& e, const std::function<std::string(const std::string&)>& f) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return;
    case Expr::Kind::Ident:
    case Expr::Kind::Index:
        e.name = f(e.name);
        break;
    default:
        break;
    }
    for (auto& a : e.args) rename_idents(*a, f);
}

struct Preprocessor {
    const Program& src;
    Program out;
    Field field;
    int inline_counter = 0;

    explicit Preprocessor(const Program& p)
        : src(p), field(p.field_n, p.field_poly) {
        out.field_n = p.field_n;
        out.field_poly = p.field_poly;
        out.field_directive = p.field_directive;
        out.affine_decls = p.affine_decls;
    }

    // ---- shared straight-line flattening machinery

    struct BlockCtx {
        std::vector<Stmt> stmts;
        std::set<std::string> rand_sources;  // names that were rand targets
        std::map<std::string, std::string> rand_rename;
        std::set<std::string> rand_defined;  // final random names
        std::set<std::string> assigned;
        int version = 0;
        // masked-block extras
        bool masked = false;
        std::set<std::string> enc;           // encoding names in scope
        std::vector<std::string> enc_order;
    };

    const Proc* find_out_proc(const std::string& n) const {
        for (const auto& p : out.procs)
            if (p.name == n) return &p;
        return nullptr;
    }

    std::string apply_rand_rename(const std::string& n, BlockCtx& ctx) {
        auto it = ctx.rand_rename.find(n);
        return it != ctx.rand_rename.end() ? it->second : n;
    }

    void note_encoding(const std::string& n, BlockCtx& ctx, SourcePos pos) {
        if (!n.empty() && std::isdigit(static_cast<unsigned char>(n.back())))
            throw SemanticError("encoding name '" + n +
                                    "' must not end with a digit",
                                pos);
        if (ctx.enc.insert(n).second) ctx.enc_order.push_back(n);
    }

    // classify + update encoding scope as statements are appended
    void emit(Stmt s, BlockCtx& ctx) {
        if (ctx.masked && s.kind == Stmt::Kind::Assign) {
            const Expr& r = *s.rhs;
            bool enc_level =
                (r.kind == Expr::Kind::Ident && ctx.enc.count(r.name)) ||
                (r.kind == Expr::Kind::Call && src.is_affine_name(r.name) &&
                 r.args.size() == 1 &&
                 r.args[0]->kind == Expr::Kind::Ident &&
                 ctx.enc.count(r.args[0]->name));
            if (enc_level) note_encoding(s.lhs, ctx, s.pos);
        }
        if (s.kind == Stmt::Kind::Rand)
            ctx.rand_defined.insert(s.lhs);
        else if (s.kind == Stmt::Kind::Assign)
            ctx.assigned.insert(s.lhs);
        ctx.stmts.push_back(std::move(s));
    }

    void flatten_rand(const Stmt& s, const LoopEnv& env, BlockCtx& ctx) {
        std::string name = subst_ident(s.lhs, env);
        if (ctx.assigned.count(name))
            throw SemanticError("random variable '" + name +
                                    "' was already assigned",
                                s.pos);
        if (ctx.rand_sources.count(name)) {
            // a loop body drew the same name again: version it
            std::string fresh = name + "$" + std::to_string(++ctx.version);
            ctx.rand_rename[name] = fresh;
            name = fresh;
        } else {
            ctx.rand_sources.insert(subst_ident(s.lhs, env));
            ctx.rand_rename.erase(subst_ident(s.lhs, env));
        }
        Stmt r;
        r.kind = Stmt::Kind::Rand;
        r.pos = s.pos;
        r.lhs = name;
        emit(std::move(r), ctx);
    }

    void flatten_assign(const Stmt& s, const LoopEnv& env, BlockCtx& ctx) {
        std::string lhs = subst_ident(s.lhs, env);
        if (s.lhs_index) {
            auto idx = s.lhs_index->clone();
            subst_expr(*idx, env, field);
            auto v = eval_const(*idx, field);
            if (!v)
                throw SemanticError("share index is not compile-time constant",
                                    s.pos);
            lhs += std::to_string(*v);
        }
        if (ctx.rand_sources.count(lhs))
            throw SemanticError(
                "random variable '" + lhs + "' cannot be reassigned", s.pos);
        ExprPtr rhs = s.rhs->clone();
        subst_expr(*rhs, env, field);
        rename_idents(*rhs, [&](const std::string& n) {
            return apply_rand_rename(n, ctx);
        });
        if (rhs->kind == Expr::Kind::Call && src.find_proc(rhs->name)) {
            inline_call(lhs, *rhs, ctx, s.pos);
            return;
        }
        Stmt a;
        a.kind = Stmt::Kind::Assign;
        a.pos = s.pos;
        a.lhs = std::move(lhs);
        a.rhs = std::move(rhs);
        emit(std::move(a), ctx);
    }

    void flatten_stmts(const std::vector<Stmt>& stmts, LoopEnv& env,
                       BlockCtx& ctx) {
        for (const auto& s : stmts) {
            switch (s.kind) {
            case Stmt::Kind::Assign:
                flatten_assign(s, env, ctx);
                break;
            case Stmt::Kind::Rand:
                flatten_rand(s, env, ctx);
                break;
            case Stmt::Kind::For: {
                if (env.count(s.lhs))
                    throw SemanticError(
                        "loop variable '" + s.lhs + "' shadows another", s.pos);
                for (long i = s.lo; i < s.hi; ++i) {
                    env[s.lhs] = i;
                    flatten_stmts(s.body, env, ctx);
                }
                env.erase(s.lhs);
                break;
            }
            case Stmt::Kind::If: {
                auto guard = s.rhs->clone();
                subst_expr(*guard, env, field);
                auto v = eval_const(*guard, field);
                if (!v)
                    throw SemanticError(
                        "conditional guard is not compile-time constant",
                        s.pos);
                flatten_stmts(*v ? s.body : s.else_body, env, ctx);
                break;
            }
            case Stmt::Kind::Assume:
            case Stmt::Kind::Assert:
                break; // documentation only; equivalence semantics is fixed
            }
        }
    }

    // ---- procedure call inlining (bodies of callees are already flat)

    void inline_call(const std::string& target, const Expr& call, BlockCtx& ctx,
                     SourcePos pos) {
        const Proc* callee = find_out_proc(call.name);
        if (!callee)
            throw SemanticError("call to '" + call.name +
                                    "' before its definition",
                                pos);
        std::string prefix =
            call.name + "$" + std::to_string(++inline_counter) + "$";
        if (!ctx.masked) {
            std::map<std::string, std::string> map;
            for (size_t j = 0; j < callee->inputs.size(); ++j) {
                std::string t = prefix + "a" + std::to_string(j);
                Stmt bind;
                bind.kind = Stmt::Kind::Assign;
                bind.pos = pos;
                bind.lhs = t;
                bind.rhs = call.args[j]->clone();
                emit(std::move(bind), ctx);
                map[callee->inputs[j]] = t;
            }
            map[callee->output] = target;
            auto rn = [&](const std::string& n) {
                auto it = map.find(n);
                return it != map.end() ? it->second : prefix + n;
            };
            for (const auto& cs : callee->orig) {
                Stmt s = cs.clone();
                s.lhs = rn(s.lhs);
                if (s.rhs) rename_idents(*s.rhs, rn);
                emit(std::move(s), ctx);
            }
        } else {
            std::map<std::string, std::string> map;
            for (size_t j = 0; j < callee->inputs.size(); ++j) {
                const Expr& a = *call.args[j];
                if (a.kind != Expr::Kind::Ident || !ctx.enc.count(a.name))
                    throw SemanticError("masked call argument " +
                                            std::to_string(j + 1) +
                                            " must be an encoding variable",
                                        pos);
                std::string arg_name = a.name;
                if (arg_name == target) {
                    // the callee may write the target before its last read
                    // of this input, so keep a share-wise snapshot
                    std::string snap = prefix + callee->inputs[j] + "$s";
                    Stmt cp;
                    cp.kind = Stmt::Kind::Assign;
                    cp.pos = pos;
                    cp.lhs = snap;
                    cp.rhs = mk_ident(arg_name, pos);
                    emit(std::move(cp), ctx);
                    arg_name = snap;
                }
                map[callee->inputs[j]] = arg_name;
            }
            note_encoding(target, ctx, pos);
            map[callee->output] = target;
            std::set<std::string> callee_enc(callee->encodings.begin(),
                                             callee->encodings.end());
            auto rn_base = [&](const std::string& b) {
                auto it = map.find(b);
                return it != map.end() ? it->second : prefix + b;
            };
            auto rn = [&](const std::string& n) -> std::string {
                std::string base;
                int idx;
                if (split_share_ref(n, base, idx) && callee_enc.count(base))
                    return rn_base(base) + std::to_string(idx);
                if (callee_enc.count(n)) return rn_base(n);
                return prefix + n;
            };
            for (const auto& cs : callee->masked) {
                Stmt s = cs.clone();
                s.lhs = rn(s.lhs);
                if (s.rhs) rename_idents(*s.rhs, rn);
                emit(std::move(s), ctx);
            }
        }
    }

    // ---- share-count compatibility for masked calls

    void check_call_shares(const std::vector<Stmt>& stmts, int shares) {
        for (const auto& s : stmts) {
            if (s.kind == Stmt::Kind::Assign &&
                s.rhs->kind == Expr::Kind::Call) {
                const Proc* q = src.find_proc(s.rhs->name);
                if (q && q->shares != shares)
                    throw SemanticError(
                        "call to '" + q->name + "' with " +
                            std::to_string(q->shares) +
                            " shares from a block with " +
                            std::to_string(shares),
                        s.pos);
            }
            check_call_shares(s.body, shares);
            check_call_shares(s.else_body, shares);
        }
    }

    // ---- per-definition drives

    std::vector<Stmt> flatten_block(const std::vector<Stmt>& b, bool masked,
                                    const Proc* pr,
                                    std::vector<std::string>* enc_out) {
        BlockCtx ctx;
        ctx.masked = masked;
        if (masked && pr) {
            for (const auto& in : pr->inputs) note_encoding(in, ctx, pr->pos);
            note_encoding(pr->output, ctx, pr->pos);
        }
        LoopEnv env;
        flatten_stmts(b, env, ctx);
        if (enc_out) *enc_out = ctx.enc_order;
        return std::move(ctx.stmts);
    }

    void check_literals(const Expr& e) {
        if (e.kind == Expr::Kind::Const && e.value > field.mask())
            throw SemanticError("literal " + std::to_string(e.value) +
                                    " does not fit in " +
                                    std::to_string(field.width()) + " bits",
                                e.pos);
        for (const auto& a : e.args) check_literals(*a);
    }

    void check_literals(const std::vector<Stmt>& stmts) {
        for (const Stmt& s : stmts) {
            if (s.lhs_index) check_literals(*s.lhs_index);
            if (s.rhs) check_literals(*s.rhs);
            if (s.rhs2) check_literals(*s.rhs2);
            check_literals(s.body);
            check_literals(s.else_body);
        }
    }

    void run() {
        for (const auto& d : src.affine_defs) check_literals(d.body);
        for (const auto& p : src.procs) {
            check_literals(p.orig);
            check_literals(p.masked);
        }
        CallGraph g = build_call_graph(src);
        auto order = g.topo_order();
        // affine bodies only need unrolling / branch elimination
        for (const auto& name : order) {
            if (const AffineDef* d = src.find_affine_def(name)) {
                AffineDef nd;
                nd.name = d->name;
                nd.input = d->input;
                nd.output = d->output;
                nd.pos = d->pos;
                nd.has_builtins = d->has_builtins;
                nd.body = flatten_block(d->body, false, nullptr, nullptr);
                validate_affine(nd);
                out.affine_defs.push_back(std::move(nd));
            } else if (const Proc* p = src.find_proc(name)) {
                check_call_shares(p->masked, p->shares);
                Proc np;
                np.name = p->name;
                np.inputs = p->inputs;
                np.output = p->output;
                np.shares = p->shares;
                np.pos = p->pos;
                np.orig = flatten_block(p->orig, false, nullptr, nullptr);
                np.masked = flatten_block(p->masked, true, p, &np.encodings);
                validate_proc(np);
                out.procs.push_back(std::move(np));
            }
        }
        // restore the source definition ordering for stable reports
        std::vector<AffineDef> defs;
        for (const auto& d : src.affine_defs)
            for (auto& nd : out.affine_defs)
                if (nd.name == d.name) defs.push_back(std::move(nd));
        out.affine_defs = std::move(defs);
        std::vector<Proc> procs;
        for (const auto& p : src.procs)
            for (auto& np : out.procs)
                if (np.name == p.name) procs.push_back(std::move(np));
        out.procs = std::move(procs);
    }

    // ---- post-flatten validation (use-before-def, read-only inputs)

    void validate_affine(const AffineDef& d) {
        std::set<std::string> defined{d.input};
        for (const auto& s : d.body) {
            std::vector<const Expr*> reads;
            collect_reads(*s.rhs, reads);
            for (const Expr* r : reads)
                if (!defined.count(r->name))
                    throw SemanticError("'" + r->name +
                                            "' read before definition",
                                        r->pos);
            if (s.lhs == d.input)
                throw SemanticError("input '" + s.lhs + "' is read-only",
                                    s.pos);
            defined.insert(s.lhs);
        }
        if (!defined.count(d.output))
            throw SemanticError("affine body never assigns output '" +
                                    d.output + "'",
                                d.pos);
    }

    void collect_reads(const Expr& e, std::vector<const Expr*>& out_reads) {
        if (e.kind == Expr::Kind::Ident) {
            out_reads.push_back(&e);
            return;
        }
        if (e.kind == Expr::Kind::Index)
            throw SemanticError("unresolved share index", e.pos);
        for (const auto& a : e.args) collect_reads(*a, out_reads);
    }

    void validate_proc(Proc& p) {
        // original block: scalar straight-line
        std::set<std::string> defined(p.inputs.begin(), p.inputs.end());
        std::set<std::string> inputs = defined;
        for (const auto& s : p.orig) {
            if (s.kind == Stmt::Kind::Rand)
                throw SemanticError("original block cannot draw randomness",
                                    s.pos);
            std::vector<const Expr*> reads;
            collect_reads(*s.rhs, reads);
            for (const Expr* r : reads)
                if (!defined.count(r->name))
                    throw SemanticError("'" + r->name +
                                            "' read before definition",
                                        r->pos);
            if (inputs.count(s.lhs))
                throw SemanticError("input '" + s.lhs + "' is read-only",
                                    s.pos);
            defined.insert(s.lhs);
        }
        if (!defined.count(p.output))
            throw SemanticError("original block never assigns output '" +
                                    p.output + "'",
                                p.pos);

        // masked block: share-level tracking
        std::set<std::string> enc(p.encodings.begin(), p.encodings.end());
        std::set<std::string> live; // defined share vars + scalar locals
        std::set<std::string> ro;   // read-only share names (input shares)
        for (const auto& in : p.inputs)
            for (int i = 0; i < p.shares; ++i) {
                live.insert(in + std::to_string(i));
                ro.insert(in + std::to_string(i));
            }
        std::set<std::string> enc_done; // encodings wholly defined
        for (const auto& in : p.inputs) enc_done.insert(in);
        auto enc_ready = [&](const std::string& n) {
            if (enc_done.count(n)) return true;
            for (int i = 0; i < p.shares; ++i)
                if (!live.count(n + std::to_string(i))) return false;
            return true;
        };
        for (const auto& s : p.masked) {
            if (s.kind == Stmt::Kind::Rand) {
                live.insert(s.lhs);
                continue;
            }
            const Expr& r = *s.rhs;
            bool enc_level =
                (r.kind == Expr::Kind::Ident && enc.count(r.name)) ||
                (r.kind == Expr::Kind::Call && src.is_affine_name(r.name) &&
                 r.args.size() == 1 && r.args[0]->kind == Expr::Kind::Ident &&
                 enc.count(r.args[0]->name));
            if (enc_level) {
                const std::string& from = r.kind == Expr::Kind::Ident
                                              ? r.name
                                              : r.args[0]->name;
                if (!enc_ready(from))
                    throw SemanticError("encoding '" + from +
                                            "' used before all shares are set",
                                        s.pos);
                for (int i = 0; i < p.shares; ++i)
                    live.insert(s.lhs + std::to_string(i));
                enc_done.insert(s.lhs);
                continue;
            }
            std::vector<const Expr*> reads;
            collect_reads(*s.rhs, reads);
            for (const Expr* rd : reads) {
                if (enc.count(rd->name))
                    throw SemanticError("encoding '" + rd->name +
                                            "' needs a share index here",
                                        rd->pos);
                if (!live.count(rd->name))
                    throw SemanticError("'" + rd->name +
                                            "' read before definition",
                                        rd->pos);
            }
            if (ro.count(s.lhs))
                throw SemanticError("input share '" + s.lhs +
                                        "' is read-only",
                                    s.pos);
            live.insert(s.lhs);
        }
        for (int i = 0; i < p.shares; ++i) {
            std::string sh = p.output + std::to_string(i);
            if (!live.count(sh))
                throw SemanticError("masked block never assigns share '" + sh +
                                        "'",
                                    p.pos);
        }
    }
};

} // namespace

Program preprocess(const Program& prog) {
    Preprocessor pp(prog);
    pp.run();
    return std::move(pp.out);
}

} // namespace maskeq
