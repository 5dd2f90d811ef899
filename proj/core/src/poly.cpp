// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/poly.hpp"

#include <algorithm>

#include "maskeq/diag.hpp"

namespace maskeq {

Factor Factor::konst(Elem v) {
    Factor f;
    f.kind = Kind::Const;
    f.value = v;
    return f;
}

Factor Factor::variable(VarId v) {
    Factor f;
    f.kind = Kind::Var;
    f.var = v;
    return f;
}

int cmp_factor(const TermStore& st, const Factor& a, const Factor& b) {
    auto cls = [](const Factor& f) { return static_cast<int>(f.kind); };
    if (cls(a) != cls(b)) return cls(a) < cls(b) ? -1 : 1;
    switch (a.kind) {
    case Factor::Kind::Const:
        return a.value == b.value ? 0 : (a.value < b.value ? -1 : 1);
    case Factor::Kind::Var:
        return st.cmp_var(a.var, b.var);
    case Factor::Kind::App: {
        int c = st.cmp_sym(a.sym, b.sym);
        if (c != 0) return c;
        if (a.arg == b.arg) return 0;
        return cmp_monomial(st, *a.arg_view, *b.arg_view);
    }
    }
    return 0;
}

namespace {

// walks the expanded factor sequence of a monomial; when with_coeff is set,
// a coefficient != 1 contributes one trailing Const element
int cmp_walk(const TermStore& st, const Monomial& a, const Monomial& b,
             bool with_coeff) {
    std::size_t ia = 0, ib = 0;
    std::uint32_t ua = 0, ub = 0; // copies consumed of the current factor
    for (;;) {
        bool ha = ia < a.factors.size();
        bool hb = ib < b.factors.size();
        if (ha && hb) {
            int c = cmp_factor(st, a.factors[ia].base, b.factors[ib].base);
            if (c != 0) return c;
            std::uint32_t ra = a.factors[ia].exp - ua;
            std::uint32_t rb = b.factors[ib].exp - ub;
            std::uint32_t m = std::min(ra, rb);
            ua += m;
            ub += m;
            if (ua == a.factors[ia].exp) { ++ia; ua = 0; }
            if (ub == b.factors[ib].exp) { ++ib; ub = 0; }
            continue;
        }
        if (ha != hb) {
            // the side still holding a Var/App factor outranks the other
            // side's trailing constant (or its end)
            return ha ? 1 : -1;
        }
        if (!with_coeff) return 0;
        bool pa = a.coeff != 1;
        bool pb = b.coeff != 1;
        if (pa != pb) return pa ? 1 : -1; // present beats absent (prefix rule)
        if (!pa) return 0;
        return a.coeff == b.coeff ? 0 : (a.coeff < b.coeff ? -1 : 1);
    }
}

} // namespace

int cmp_monomial(const TermStore& st, const Monomial& a, const Monomial& b) {
    return cmp_walk(st, a, b, true);
}

int cmp_monomial_body(const TermStore& st, const Monomial& a,
                      const Monomial& b) {
    return cmp_walk(st, a, b, false);
}

Factor make_app_factor(TermStore& st, SymId f, const Monomial& arg) {
    Factor fac;
    fac.kind = Factor::Kind::App;
    fac.sym = f;
    fac.arg = mono_to_term(st, arg);
    fac.arg_view = std::make_shared<Monomial>(arg);
    return fac;
}

namespace {

void collect_mul_chain(const TermStore& st, TermId t, std::vector<TermId>& out) {
    const TermNode& n = st.at(t);
    if (n.kind == TermKind::Mul) {
        collect_mul_chain(st, n.a, out);
        collect_mul_chain(st, n.b, out);
    } else {
        out.push_back(t);
    }
}

// sort descending and merge equal factors, reducing exponents; folds the
// coefficient of a zero factor... (coeff may become 0; callers decide)
void sort_and_merge(const TermStore& st, const Field& field, Monomial& m) {
    std::sort(m.factors.begin(), m.factors.end(),
              [&](const FactorPow& x, const FactorPow& y) {
                  return cmp_factor(st, x.base, y.base) > 0;
              });
    std::vector<FactorPow> merged;
    for (auto& fp : m.factors) {
        if (!merged.empty() &&
            cmp_factor(st, merged.back().base, fp.base) == 0) {
            std::uint64_t k =
                static_cast<std::uint64_t>(merged.back().exp) + fp.exp;
            merged.back().exp =
                static_cast<std::uint32_t>(field.reduce_exponent(k));
        } else {
            merged.push_back(std::move(fp));
        }
    }
    m.factors = std::move(merged);
}

} // namespace

Monomial monomial_view(TermStore& st, TermId t, const Field& field) {
    std::vector<TermId> chain;
    collect_mul_chain(st, t, chain);
    Monomial m;
    for (TermId el : chain) {
        const TermNode& n = st.at(el);
        switch (n.kind) {
        case TermKind::Const:
            m.coeff = field.mul(m.coeff, n.a);
            break;
        case TermKind::Var:
            m.factors.push_back({Factor::variable(n.a), 1});
            break;
        case TermKind::App: {
            Monomial arg = monomial_view(st, n.b, field);
            m.factors.push_back({make_app_factor(st, n.a, arg), 1});
            break;
        }
        case TermKind::Add:
            throw SemanticError("term is not XOR-free");
        case TermKind::Mul:
            break; // flattened already
        }
    }
    sort_and_merge(st, field, m);
    return m;
}

namespace {

TermId factor_term(TermStore& st, const Factor& f) {
    switch (f.kind) {
    case Factor::Kind::Const:
        return st.konst(f.value);
    case Factor::Kind::Var:
        return st.var_term(f.var);
    case Factor::Kind::App:
        return st.app(f.sym, f.arg);
    }
    return 0;
}

// α^k as a product of repeated squarings chosen by the bits of k
TermId power_term(TermStore& st, TermId base, std::uint32_t k) {
    std::vector<TermId> squares{base};
    std::uint32_t top = 0;
    for (std::uint32_t b = k >> 1; b; b >>= 1) ++top;
    for (std::uint32_t i = 0; i < top; ++i)
        squares.push_back(st.mul(squares.back(), squares.back()));
    TermId acc = 0;
    bool first = true;
    for (int i = static_cast<int>(top); i >= 0; --i) {
        if (!(k >> i & 1)) continue;
        acc = first ? squares[i] : st.mul(acc, squares[i]);
        first = false;
    }
    return acc;
}

} // namespace

TermId mono_to_term(TermStore& st, const Monomial& m) {
    std::vector<TermId> parts;
    for (const auto& fp : m.factors)
        parts.push_back(power_term(st, factor_term(st, fp.base), fp.exp));
    if (m.coeff != 1 || parts.empty()) parts.push_back(st.konst(m.coeff));
    TermId acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;)
        acc = st.mul(parts[i], acc);
    return acc;
}

TermId poly_to_term(TermStore& st, const Polynomial& p) {
    if (p.monomials.empty()) return st.konst(0);
    TermId acc = mono_to_term(st, p.monomials.back());
    for (std::size_t i = p.monomials.size() - 1; i-- > 0;)
        acc = st.add(mono_to_term(st, p.monomials[i]), acc);
    return acc;
}

std::string to_string(const TermStore& st, const Monomial& m) {
    std::string s;
    for (const auto& fp : m.factors) {
        if (!s.empty()) s += "*";
        std::string base;
        switch (fp.base.kind) {
        case Factor::Kind::Const:
            base = std::to_string(fp.base.value);
            break;
        case Factor::Kind::Var:
            base = st.var_name(fp.base.var);
            break;
        case Factor::Kind::App:
            base = st.sym_name(fp.base.sym) + "(" +
                   to_string(st, *fp.base.arg_view) + ")";
            break;
        }
        s += base;
        if (fp.exp > 1) s += "^" + std::to_string(fp.exp);
    }
    if (m.coeff != 1 || s.empty()) {
        std::string c = std::to_string(m.coeff);
        s = s.empty() ? c : c + "*" + s;
    }
    return s;
}

std::string to_string(const TermStore& st, const Polynomial& p) {
    if (p.monomials.empty()) return "0";
    std::string s;
    for (const auto& m : p.monomials) {
        if (!s.empty()) s += " ^ ";
        s += to_string(st, m);
    }
    return s;
}

bool is_normal_form(const TermStore& st, const Field& field,
                    const Polynomial& p) {
    for (std::size_t i = 0; i < p.monomials.size(); ++i) {
        const Monomial& m = p.monomials[i];
        if (m.coeff == 0) return false;
        if (i + 1 < p.monomials.size() &&
            cmp_monomial_body(st, m, p.monomials[i + 1]) <= 0)
            return false;
        for (std::size_t j = 0; j < m.factors.size(); ++j) {
            const FactorPow& fp = m.factors[j];
            if (fp.base.kind == Factor::Kind::Const) return false;
            if (fp.exp < 1 || fp.exp > field.order()) return false;
            if (j + 1 < m.factors.size() &&
                cmp_factor(st, fp.base, m.factors[j + 1].base) <= 0)
                return false;
            if (fp.base.kind == Factor::Kind::App &&
                !is_normal_form(st, field,
                                Polynomial{{*fp.base.arg_view}}))
                return false;
        }
    }
    return true;
}

Elem eval_monomial(const TermStore& st, const Monomial& m, const Field& field,
                   const std::map<VarId, Elem>& sigma, const Tables& iota) {
    Elem acc = m.coeff;
    for (const auto& fp : m.factors) {
        Elem v = 0;
        switch (fp.base.kind) {
        case Factor::Kind::Const:
            v = fp.base.value;
            break;
        case Factor::Kind::Var: {
            auto it = sigma.find(fp.base.var);
            if (it == sigma.end())
                throw SemanticError("no value for variable '" +
                                    st.var_name(fp.base.var) + "'");
            v = it->second;
            break;
        }
        case Factor::Kind::App: {
            auto it = iota.find(fp.base.sym);
            if (it == iota.end())
                throw SemanticError("no table for symbol '" +
                                    st.sym_name(fp.base.sym) + "'");
            v = it->second[eval_monomial(st, *fp.base.arg_view, field, sigma,
                                         iota)];
            break;
        }
        }
        acc = field.mul(acc, field.pow(v, fp.exp));
    }
    return acc;
}

Elem eval_poly(const TermStore& st, const Polynomial& p, const Field& field,
               const std::map<VarId, Elem>& sigma, const Tables& iota) {
    Elem acc = 0;
    for (const auto& m : p.monomials)
        acc ^= eval_monomial(st, m, field, sigma, iota);
    return acc;
}

void vars_of_poly(const TermStore& st, const Polynomial& p,
                  std::set<VarId>& out) {
    for (const auto& m : p.monomials)
        for (const auto& fp : m.factors) {
            if (fp.base.kind == Factor::Kind::Var) out.insert(fp.base.var);
            if (fp.base.kind == Factor::Kind::App)
                vars_of_poly(st, Polynomial{{*fp.base.arg_view}}, out);
        }
}

void syms_of_poly(const TermStore& st, const Polynomial& p,
                  std::set<SymId>& out) {
    for (const auto& m : p.monomials)
        for (const auto& fp : m.factors)
            if (fp.base.kind == Factor::Kind::App) {
                out.insert(fp.base.sym);
                syms_of_poly(st, Polynomial{{*fp.base.arg_view}}, out);
            }
}

} // namespace maskeq
