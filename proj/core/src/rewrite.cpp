// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/rewrite.hpp"

#include <algorithm>
#include <cassert>

#include "maskeq/diag.hpp"

namespace maskeq {

const char* rule_name(Rule r) {
    switch (r) {
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
    case Rule::R4: return "R4";
    case Rule::R5: return "R5";
    case Rule::R6: return "R6";
    case Rule::R7: return "R7";
    case Rule::R8: return "R8";
    case Rule::R9: return "R9";
    case Rule::R10: return "R10";
    case Rule::R11: return "R11";
    case Rule::R12: return "R12";
    case Rule::R13: return "R13";
    case Rule::FoldMul: return "fold-mul";
    case Rule::FoldAdd: return "fold-add";
    }
    return "?";
}

Elem RewriteCtx::lambda_of(SymId s) const {
    auto it = lambda.find(s);
    if (it == lambda.end())
        throw SemanticError("no affine constant recorded for '" +
                            store.sym_name(s) + "'");
    return it->second;
}

void RewriteCtx::count(Rule r, std::uint64_t n) {
    stats.steps += n;
    stats.rule_counts[rule_name(r)] += n;
    if (stats.steps > budget)
        throw BudgetError("rewrite step budget exceeded (" +
                          std::to_string(budget) + ")");
}

namespace {

// budget progress without a rule attribution (traversal, sorting)
void tick(RewriteCtx& ctx, std::uint64_t n) {
    ctx.stats.steps += n;
    if (ctx.stats.steps > ctx.budget)
        throw BudgetError("rewrite step budget exceeded (" +
                          std::to_string(ctx.budget) + ")");
}

void say(RewriteCtx& ctx, Rule r, const Monomial& m) {
    if (ctx.trace) ctx.trace(r, to_string(ctx.store, m));
}

Polynomial const_poly(Elem v) {
    Polynomial p;
    if (v != 0) p.monomials.push_back(Monomial{v, {}});
    return p;
}

} // namespace

Polynomial poly_add(const Polynomial& a, const Polynomial& b,
                    RewriteCtx& ctx) {
    tick(ctx, a.monomials.size() + b.monomials.size() + 1);
    Polynomial out;
    out.monomials.reserve(a.monomials.size() + b.monomials.size());
    std::size_t i = 0, j = 0;
    while (i < a.monomials.size() && j < b.monomials.size()) {
        int c = cmp_monomial_body(ctx.store, a.monomials[i], b.monomials[j]);
        if (c > 0) {
            out.monomials.push_back(a.monomials[i++]);
        } else if (c < 0) {
            out.monomials.push_back(b.monomials[j++]);
        } else {
            Monomial m = a.monomials[i++];
            m.coeff ^= b.monomials[j++].coeff;
            if (m.coeff == 0) {
                ctx.count(Rule::R3);
                say(ctx, Rule::R3, a.monomials[i - 1]);
            } else {
                ctx.count(Rule::FoldAdd);
                out.monomials.push_back(std::move(m));
            }
        }
    }
    while (i < a.monomials.size()) out.monomials.push_back(a.monomials[i++]);
    while (j < b.monomials.size()) out.monomials.push_back(b.monomials[j++]);
    return out;
}

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b, RewriteCtx& ctx) {
    Monomial out;
    tick(ctx, a.factors.size() + b.factors.size() + 1);
    if (a.coeff != 1 && b.coeff != 1) ctx.count(Rule::FoldMul);
    out.coeff = ctx.field.mul(a.coeff, b.coeff);
    out.factors.reserve(a.factors.size() + b.factors.size());
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        int c = cmp_factor(ctx.store, a.factors[i].base, b.factors[j].base);
        if (c > 0) {
            out.factors.push_back(a.factors[i++]);
        } else if (c < 0) {
            out.factors.push_back(b.factors[j++]);
        } else {
            FactorPow fp = a.factors[i++];
            fp.exp = ctx.field.reduce_exponent(fp.exp + b.factors[j++].exp);
            out.factors.push_back(std::move(fp));
        }
    }
    while (i < a.factors.size()) out.factors.push_back(a.factors[i++]);
    while (j < b.factors.size()) out.factors.push_back(b.factors[j++]);
    return out;
}

} // namespace

Polynomial poly_mul(const Polynomial& a, const Polynomial& b,
                    RewriteCtx& ctx) {
    tick(ctx, 1);
    if (a.is_zero()) {
        ctx.count(Rule::R5);
        return {};
    }
    if (b.is_zero()) {
        ctx.count(Rule::R4);
        return {};
    }
    const std::size_t k = a.monomials.size(), l = b.monomials.size();
    if (k == 1 && a.monomials[0].is_const() && a.monomials[0].coeff == 1)
        ctx.count(Rule::R9);
    if (l == 1 && b.monomials[0].is_const() && b.monomials[0].coeff == 1)
        ctx.count(Rule::R8);
    if (k > 1) ctx.count(Rule::R10, k - 1);
    if (l > 1) ctx.count(Rule::R11, k * (l - 1));

    std::vector<Monomial> products;
    products.reserve(k * l);
    for (const Monomial& ma : a.monomials)
        for (const Monomial& mb : b.monomials)
            products.push_back(mono_mul(ma, mb, ctx));

    tick(ctx, products.size());
    std::sort(products.begin(), products.end(),
              [&](const Monomial& x, const Monomial& y) {
                  return cmp_monomial_body(ctx.store, x, y) > 0;
              });

    Polynomial out;
    out.monomials.reserve(products.size());
    for (Monomial& m : products) {
        if (!out.monomials.empty() &&
            cmp_monomial_body(ctx.store, out.monomials.back(), m) == 0) {
            out.monomials.back().coeff ^= m.coeff;
            if (out.monomials.back().coeff == 0) {
                ctx.count(Rule::R3);
                say(ctx, Rule::R3, m);
                out.monomials.pop_back();
            } else {
                ctx.count(Rule::FoldAdd);
            }
        } else {
            out.monomials.push_back(std::move(m));
        }
    }
    return out;
}

Polynomial normalize(TermId t, RewriteCtx& ctx) {
    auto hit = ctx.memo.find(t);
    if (hit != ctx.memo.end()) return hit->second;
    tick(ctx, 1);

    // copy: recursive calls below may grow the store and move its nodes
    const TermNode node = ctx.store.at(t);
    Polynomial out;
    switch (node.kind) {
    case TermKind::Const:
        out = const_poly(node.a);
        break;
    case TermKind::Var:
        out.monomials.push_back(
            Monomial{1, {FactorPow{Factor::variable(node.a), 1}}});
        break;
    case TermKind::Add: {
        Polynomial l = normalize(node.a, ctx);
        Polynomial r = normalize(node.b, ctx);
        out = poly_add(l, r, ctx);
        break;
    }
    case TermKind::Mul: {
        Polynomial l = normalize(node.a, ctx);
        Polynomial r = normalize(node.b, ctx);
        out = poly_mul(l, r, ctx);
        break;
    }
    case TermKind::App: {
        const SymId f = node.a;
        Polynomial pu = normalize(node.b, ctx);
        if (pu.is_zero()) {
            ctx.count(Rule::R13);
            out = const_poly(ctx.lambda_of(f));
            break;
        }
        const std::size_t k = pu.monomials.size();
        // splitting an application is only sound for affine symbols, so a
        // sum argument demands the constant; a lone monomial passes through
        // even for symbols nobody proved affine
        Elem c = 0;
        if (k > 1) {
            c = ctx.lambda_of(f);
            ctx.count(Rule::R12, k - 1);
        }
        for (const Monomial& m : pu.monomials)
            out.monomials.push_back(
                Monomial{1, {FactorPow{make_app_factor(ctx.store, f, m), 1}}});
        // an even split leaves one surviving copy of the affine constant
        if (k % 2 == 0 && c != 0) out.monomials.push_back(Monomial{c, {}});
        break;
    }
    }
    ctx.memo.emplace(t, out);
    return out;
}

bool poly_equal(const TermStore& st, const Polynomial& a, const Polynomial& b) {
    if (a.monomials.size() != b.monomials.size()) return false;
    for (std::size_t i = 0; i < a.monomials.size(); ++i) {
        const Monomial& ma = a.monomials[i];
        const Monomial& mb = b.monomials[i];
        if (ma.coeff != mb.coeff) return false;
        if (cmp_monomial_body(st, ma, mb) != 0) return false;
    }
    return true;
}

// ---- single-step reference engine ----------------------------------------

namespace {

void flatten_chain(const TermStore& st, TermId t, TermKind op,
                   std::vector<TermId>& out) {
    if (st.kind(t) == op) {
        flatten_chain(st, st.at(t).a, op, out);
        flatten_chain(st, st.at(t).b, op, out);
    } else {
        out.push_back(t);
    }
}

TermId rebuild_chain(TermStore& st, TermKind op,
                     const std::vector<TermId>& els) {
    assert(!els.empty());
    TermId acc = els.back();
    for (std::size_t i = els.size() - 1; i-- > 0;)
        acc = op == TermKind::Add ? st.add(els[i], acc) : st.mul(els[i], acc);
    return acc;
}

bool xor_free(const TermStore& st, TermId t) {
    switch (st.kind(t)) {
    case TermKind::Add: return false;
    case TermKind::Const:
    case TermKind::Var: return true;
    case TermKind::Mul:
        return xor_free(st, st.at(t).a) && xor_free(st, st.at(t).b);
    case TermKind::App: return xor_free(st, st.at(t).b);
    }
    return true;
}

// a chain element usable as one factor under the factor order
bool is_factor_atom(const TermStore& st, TermId t) {
    switch (st.kind(t)) {
    case TermKind::Const:
    case TermKind::Var: return true;
    case TermKind::App: return xor_free(st, st.at(t).b);
    default: return false;
    }
}

Factor factor_of_atom(TermStore& st, const Field& field, TermId t) {
    switch (st.kind(t)) {
    case TermKind::Const: return Factor::konst(st.at(t).a);
    case TermKind::Var: return Factor::variable(st.at(t).a);
    case TermKind::App:
        return make_app_factor(st, st.at(t).a,
                               monomial_view(st, st.at(t).b, field));
    default:
        throw SemanticError("not a factor atom");
    }
}

struct Walker {
    TermStore& st;
    const Field& field;
    const std::map<SymId, Elem>& lambda;
    std::vector<Redex> out;
    std::vector<int> path;

    // Splitting an application before its argument has finished reducing
    // can strand constant summands in separate monomials, where no rule
    // can recombine them; forms diverge depending on which fired first.
    // Holding the split back until the argument is redex-free keeps every
    // reduction order on the same normal form without shrinking the set
    // of reachable ones.
    bool settled(TermId t) {
        Walker sub{st, field, lambda, {}, {}};
        sub.walk(t, TermKind::App);
        return sub.out.empty();
    }

    void add_chain_rules(TermId t) {
        std::vector<TermId> els;
        flatten_chain(st, t, TermKind::Add, els);
        const TermId zero = st.konst(0);
        bool any_zero = false;
        for (std::size_t i = 0; i < els.size(); ++i) {
            if (els[i] == zero) {
                any_zero = true;
                out.push_back({path, i == 0 ? Rule::R7 : Rule::R6,
                               static_cast<int>(i)});
            }
        }
        std::vector<bool> flat(els.size());
        std::vector<Monomial> views(els.size());
        bool all_flat = true;
        for (std::size_t i = 0; i < els.size(); ++i) {
            flat[i] = xor_free(st, els[i]);
            all_flat = all_flat && flat[i];
            if (flat[i]) views[i] = monomial_view(st, els[i], field);
        }
        for (std::size_t i = 0; i + 1 < els.size(); ++i) {
            if (els[i] == els[i + 1]) {
                out.push_back({path, Rule::R3, static_cast<int>(i)});
            } else if (flat[i] && flat[i + 1] &&
                       cmp_monomial_body(st, views[i], views[i + 1]) == 0) {
                out.push_back({path, Rule::FoldAdd, static_cast<int>(i)});
            }
        }
        if (all_flat && !any_zero) {
            for (std::size_t i = 0; i + 1 < els.size(); ++i) {
                if (cmp_monomial(st, views[i], views[i + 1]) < 0) {
                    out.push_back({path, Rule::R1, -1});
                    break;
                }
            }
        }
    }

    void mul_chain_rules(TermId t) {
        std::vector<TermId> els;
        flatten_chain(st, t, TermKind::Mul, els);
        const TermId zero = st.konst(0);
        const TermId one = st.konst(1);
        bool blocked = false;
        for (std::size_t i = 0; i < els.size(); ++i) {
            if (els[i] == zero) {
                blocked = true;
                out.push_back({path, i == 0 ? Rule::R5 : Rule::R4,
                               static_cast<int>(i)});
            } else if (els[i] == one && els.size() >= 2) {
                out.push_back({path, i == 0 ? Rule::R9 : Rule::R8,
                               static_cast<int>(i)});
            }
        }
        for (std::size_t i = 0; i + 1 < els.size(); ++i)
            if (st.kind(els[i]) == TermKind::Const &&
                st.kind(els[i + 1]) == TermKind::Const)
                out.push_back({path, Rule::FoldMul, static_cast<int>(i)});
        if (blocked) return;
        bool all_atoms = true;
        for (TermId el : els) all_atoms = all_atoms && is_factor_atom(st, el);
        if (!all_atoms) return;
        std::vector<Factor> fs;
        fs.reserve(els.size());
        for (TermId el : els) fs.push_back(factor_of_atom(st, field, el));
        for (std::size_t i = 0; i + 1 < els.size(); ++i) {
            if (cmp_factor(st, fs[i], fs[i + 1]) < 0) {
                out.push_back({path, Rule::R2, -1});
                break;
            }
        }
    }

    void walk(TermId t, TermKind parent) {
        const TermNode& node = st.at(t);
        switch (node.kind) {
        case TermKind::Const:
        case TermKind::Var:
            return;
        case TermKind::Add:
            if (parent != TermKind::Add) add_chain_rules(t);
            break;
        case TermKind::Mul:
            if (parent != TermKind::Mul) mul_chain_rules(t);
            if (st.kind(node.a) == TermKind::Add)
                out.push_back({path, Rule::R10, -1});
            if (st.kind(node.b) == TermKind::Add)
                out.push_back({path, Rule::R11, -1});
            break;
        case TermKind::App:
            if (st.is_zero(node.b))
                out.push_back({path, Rule::R13, -1});
            else if (st.kind(node.b) == TermKind::Add && settled(node.b))
                out.push_back({path, Rule::R12, -1});
            break;
        }
        if (node.kind == TermKind::App) {
            path.push_back(0);
            walk(node.b, TermKind::App);
            path.pop_back();
        } else {
            path.push_back(0);
            walk(node.a, node.kind);
            path.pop_back();
            path.push_back(1);
            walk(node.b, node.kind);
            path.pop_back();
        }
    }
};

Elem lambda_or_throw(const TermStore& st, const std::map<SymId, Elem>& lambda,
                     SymId s) {
    auto it = lambda.find(s);
    if (it == lambda.end())
        throw SemanticError("no affine constant recorded for '" +
                            st.sym_name(s) + "'");
    return it->second;
}

TermId rewrite_at(TermStore& st, TermId t, const std::vector<int>& path,
                  std::size_t depth, const std::function<TermId(TermId)>& fn) {
    if (depth == path.size()) return fn(t);
    const TermNode node = st.at(t);
    switch (node.kind) {
    case TermKind::Add:
    case TermKind::Mul: {
        TermId a = node.a, b = node.b;
        if (path[depth] == 0)
            a = rewrite_at(st, a, path, depth + 1, fn);
        else
            b = rewrite_at(st, b, path, depth + 1, fn);
        return node.kind == TermKind::Add ? st.add(a, b) : st.mul(a, b);
    }
    case TermKind::App:
        return st.app(node.a,
                      rewrite_at(st, node.b, path, depth + 1, fn));
    default:
        throw SemanticError("rewrite path walks through a leaf");
    }
}

} // namespace

std::vector<Redex> find_redexes(TermStore& st, const Field& field,
                                const std::map<SymId, Elem>& lambda,
                                TermId t) {
    Walker w{st, field, lambda, {}, {}};
    w.walk(t, TermKind::Const);
    return std::move(w.out);
}

TermId apply_rule(TermStore& st, const Field& field,
                  const std::map<SymId, Elem>& lambda, TermId t,
                  const Redex& r) {
    auto chain_edit = [&](TermId node, TermKind op,
                          const std::function<void(std::vector<TermId>&)>& ed)
        -> TermId {
        if (st.kind(node) != op)
            throw SemanticError("redex is not the expected chain");
        std::vector<TermId> els;
        flatten_chain(st, node, op, els);
        ed(els);
        if (els.empty()) return st.konst(0);
        return rebuild_chain(st, op, els);
    };
    auto need = [&](bool ok) {
        if (!ok) throw SemanticError("rule premise does not hold here");
    };
    auto at = [&](std::vector<TermId>& els) -> std::size_t {
        need(r.index >= 0 && static_cast<std::size_t>(r.index) < els.size());
        return static_cast<std::size_t>(r.index);
    };

    auto fn = [&](TermId node) -> TermId {
        const TermNode nd = st.at(node);
        switch (r.rule) {
        case Rule::R3:
            return chain_edit(node, TermKind::Add, [&](auto& els) {
                std::size_t i = at(els);
                need(i + 1 < els.size() && els[i] == els[i + 1]);
                els.erase(els.begin() + i, els.begin() + i + 2);
                els.insert(els.begin() + i, st.konst(0));
            });
        case Rule::R6:
        case Rule::R7:
            return chain_edit(node, TermKind::Add, [&](auto& els) {
                std::size_t i = at(els);
                need(els.size() >= 2 && st.is_zero(els[i]));
                els.erase(els.begin() + i);
            });
        case Rule::FoldAdd:
            return chain_edit(node, TermKind::Add, [&](auto& els) {
                std::size_t i = at(els);
                need(i + 1 < els.size());
                Monomial a = monomial_view(st, els[i], field);
                Monomial b = monomial_view(st, els[i + 1], field);
                need(cmp_monomial_body(st, a, b) == 0);
                a.coeff ^= b.coeff;
                TermId merged =
                    a.coeff == 0 ? st.konst(0) : mono_to_term(st, a);
                els.erase(els.begin() + i, els.begin() + i + 2);
                els.insert(els.begin() + i, merged);
            });
        case Rule::R1:
            return chain_edit(node, TermKind::Add, [&](auto& els) {
                std::vector<Monomial> views;
                views.reserve(els.size());
                for (TermId el : els) {
                    need(!st.is_zero(el) && xor_free(st, el));
                    views.push_back(monomial_view(st, el, field));
                }
                std::vector<std::size_t> idx(els.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                std::stable_sort(idx.begin(), idx.end(),
                                 [&](std::size_t x, std::size_t y) {
                                     return cmp_monomial(st, views[x],
                                                         views[y]) > 0;
                                 });
                std::vector<TermId> sorted;
                sorted.reserve(els.size());
                for (std::size_t i : idx) sorted.push_back(els[i]);
                els = std::move(sorted);
            });
        case Rule::R4:
        case Rule::R5: {
            std::vector<TermId> els;
            need(st.kind(node) == TermKind::Mul);
            flatten_chain(st, node, TermKind::Mul, els);
            std::size_t i = at(els);
            need(st.is_zero(els[i]));
            return st.konst(0);
        }
        case Rule::R8:
        case Rule::R9:
            return chain_edit(node, TermKind::Mul, [&](auto& els) {
                std::size_t i = at(els);
                need(els.size() >= 2 && els[i] == st.konst(1));
                els.erase(els.begin() + i);
            });
        case Rule::FoldMul:
            return chain_edit(node, TermKind::Mul, [&](auto& els) {
                std::size_t i = at(els);
                need(i + 1 < els.size() &&
                     st.kind(els[i]) == TermKind::Const &&
                     st.kind(els[i + 1]) == TermKind::Const);
                Elem prod = field.mul(st.at(els[i]).a, st.at(els[i + 1]).a);
                els.erase(els.begin() + i, els.begin() + i + 2);
                els.insert(els.begin() + i, st.konst(prod));
            });
        case Rule::R2:
            return chain_edit(node, TermKind::Mul, [&](auto& els) {
                std::vector<Factor> fs;
                fs.reserve(els.size());
                for (TermId el : els) {
                    need(is_factor_atom(st, el));
                    fs.push_back(factor_of_atom(st, field, el));
                }
                std::vector<std::size_t> idx(els.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                std::stable_sort(idx.begin(), idx.end(),
                                 [&](std::size_t x, std::size_t y) {
                                     return cmp_factor(st, fs[x], fs[y]) > 0;
                                 });
                std::vector<TermId> sorted;
                sorted.reserve(els.size());
                for (std::size_t i : idx) sorted.push_back(els[i]);
                els = std::move(sorted);
            });
        case Rule::R10: {
            need(nd.kind == TermKind::Mul &&
                 st.kind(nd.a) == TermKind::Add);
            const TermNode l = st.at(nd.a);
            return st.add(st.mul(l.a, nd.b), st.mul(l.b, nd.b));
        }
        case Rule::R11: {
            need(nd.kind == TermKind::Mul &&
                 st.kind(nd.b) == TermKind::Add);
            const TermNode rr = st.at(nd.b);
            return st.add(st.mul(nd.a, rr.a), st.mul(nd.a, rr.b));
        }
        case Rule::R12: {
            need(nd.kind == TermKind::App &&
                 st.kind(nd.b) == TermKind::Add);
            const TermNode arg = st.at(nd.b);
            Elem c = lambda_or_throw(st, lambda, nd.a);
            return st.add(st.add(st.app(nd.a, arg.a), st.app(nd.a, arg.b)),
                          st.konst(c));
        }
        case Rule::R13:
            need(nd.kind == TermKind::App && st.is_zero(nd.b));
            return st.konst(lambda_or_throw(st, lambda, nd.a));
        }
        throw SemanticError("unknown rule");
    };
    return rewrite_at(st, t, r.path, 0, fn);
}

TermId normalize_steps(TermStore& st, const Field& field,
                       const std::map<SymId, Elem>& lambda, TermId t,
                       std::mt19937_64& rng, std::uint64_t max_steps,
                       std::uint64_t* steps_out, const TraceFn& trace) {
    std::uint64_t steps = 0;
    for (;;) {
        std::vector<Redex> rs = find_redexes(st, field, lambda, t);
        if (rs.empty()) break;
        const Redex& r = rs[rng() % rs.size()];
        if (trace) {
            std::string where;
            for (int p : r.path) where += p ? 'R' : 'L';
            trace(r.rule, where.empty() ? "root" : where);
        }
        t = apply_rule(st, field, lambda, t, r);
        if (++steps > max_steps)
            throw BudgetError("single-step rewrite budget exceeded (" +
                              std::to_string(max_steps) + ")");
    }
    if (steps_out) *steps_out = steps;
    return t;
}

Polynomial read_back(TermStore& st, const Field& field, TermId t) {
    Polynomial p;
    std::vector<TermId> els;
    flatten_chain(st, t, TermKind::Add, els);
    for (TermId el : els) {
        if (st.is_zero(el)) continue;
        Monomial m = monomial_view(st, el, field);
        if (m.coeff == 0) continue;
        p.monomials.push_back(std::move(m));
    }
    for (std::size_t i = 0; i + 1 < p.monomials.size(); ++i)
        if (cmp_monomial(st, p.monomials[i], p.monomials[i + 1]) <= 0)
            throw SemanticError("term is not in normal form");
    return p;
}

} // namespace maskeq
