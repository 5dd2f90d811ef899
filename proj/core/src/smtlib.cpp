// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/smtlib.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "maskeq/diag.hpp"

namespace maskeq {

Elem peasant_eval(const Field& field, Elem a, Elem b) {
    const unsigned n = field.width();
    const Elem mask = field.mask();
    const Elem msb = static_cast<Elem>(1) << (n - 1);
    const Elem pred = field.modulus() & mask;
    Elem acc = 0;
    for (unsigned i = 0; i < n; ++i) {
        if (b & 1) acc ^= a;
        a = ((a << 1) & mask) ^ ((a & msb) ? pred : 0);
        b >>= 1;
    }
    return acc;
}

namespace {

std::string bv_type(unsigned n) {
    return "(_ BitVec " + std::to_string(n) + ")";
}

std::string bv_lit(Elem v, unsigned n) {
    if (n % 4 == 0) {
        static const char* digits = "0123456789abcdef";
        std::string hex;
        for (unsigned i = 0; i < n / 4; ++i) {
            hex.insert(hex.begin(), digits[v & 0xF]);
            v >>= 4;
        }
        return "#x" + hex;
    }
    std::string bits;
    for (unsigned i = 0; i < n; ++i) {
        bits.insert(bits.begin(), (v & 1) ? '1' : '0');
        v >>= 1;
    }
    return "#b" + bits;
}

// "gmul" is the one global the scripts claim for themselves
std::string sm(const std::string& name) {
    return name == "gmul" ? "gmul_" : name;
}

void emit_gmul(std::ostringstream& os, const Field& field) {
    const unsigned n = field.width();
    const std::string bv = bv_type(n);
    const std::string zero = bv_lit(0, n);
    const std::string one = bv_lit(1, n);
    const std::string msb = bv_lit(static_cast<Elem>(1) << (n - 1), n);
    const std::string pred = bv_lit(field.modulus() & field.mask(), n);
    os << "(define-fun gmul ((a " << bv << ") (b " << bv << ")) " << bv
       << "\n";
    os << "  (let ((acc0 " << zero << ") (a0 a) (b0 b))\n";
    for (unsigned i = 0; i < n; ++i) {
        os << "  (let ((acc" << i + 1 << " (bvxor acc" << i
           << " (ite (= (bvand b" << i << " " << one << ") " << one << ") a"
           << i << " " << zero << ")))\n";
        os << "        (a" << i + 1 << " (bvxor (bvshl a" << i << " " << one
           << ") (ite (= (bvand a" << i << " " << msb << ") " << msb << ") "
           << pred << " " << zero << ")))\n";
        os << "        (b" << i + 1 << " (bvlshr b" << i << " " << one
           << ")))\n";
    }
    os << "  acc" << n << std::string(n + 1, ')') << ")\n";
}

std::string expr_smt(const Expr& e, const Field& field) {
    const unsigned n = field.width();
    switch (e.kind) {
    case Expr::Kind::Const:
        return bv_lit(e.value, n);
    case Expr::Kind::Ident:
        return sm(e.name);
    case Expr::Kind::Xor:
        return "(bvxor " + expr_smt(*e.args[0], field) + " " +
               expr_smt(*e.args[1], field) + ")";
    case Expr::Kind::Mul:
        return "(gmul " + expr_smt(*e.args[0], field) + " " +
               expr_smt(*e.args[1], field) + ")";
    case Expr::Kind::Call: {
        std::string arg = expr_smt(*e.args[0], field);
        if (!is_builtin_name(e.name)) return "(" + sm(e.name) + " " + arg + ")";
        if (e.name == "bnot") return "(bvnot " + arg + ")";
        Elem k = e.args[1]->value;
        if (e.name == "rotl")
            return "((_ rotate_left " + std::to_string(k % n) + ") " + arg +
                   ")";
        if (e.name == "shl") return "(bvshl " + arg + " " + bv_lit(k, n) + ")";
        if (e.name == "shr")
            return "(bvlshr " + arg + " " + bv_lit(k, n) + ")";
        if (e.name == "band")
            return "(bvand " + arg + " " + bv_lit(k, n) + ")";
        if (e.name == "bor") return "(bvor " + arg + " " + bv_lit(k, n) + ")";
        throw SemanticError("unknown builtin '" + e.name + "'", e.pos);
    }
    case Expr::Kind::Index:
        break;
    }
    throw SemanticError("expression has no bitvector form", e.pos);
}

void collect_called(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::Call && !is_builtin_name(e.name))
        out.insert(e.name);
    for (const auto& a : e.args) collect_called(*a, out);
}

void emit_def(std::ostringstream& os, const AffineDef& def,
              const Field& field) {
    const std::string bv = bv_type(field.width());
    os << "(define-fun " << sm(def.name) << " ((" << sm(def.input) << " "
       << bv << ")) " << bv << "\n";
    std::size_t lets = 0;
    for (const Stmt& s : def.body) {
        if (s.kind != Stmt::Kind::Assign)
            throw SemanticError("affine body is not straight-line", s.pos);
        os << "  (let ((" << sm(s.lhs) << " " << expr_smt(*s.rhs, field)
           << "))\n";
        ++lets;
    }
    os << "  " << sm(def.output) << std::string(lets, ')') << ")\n";
}

// DFS postorder over the call graph so callees appear before callers;
// declared-only symbols become uninterpreted functions with linearity
void emit_symbols(std::ostringstream& os, const Program& prog,
                  const Field& field, const std::set<std::string>& roots,
                  bool* used_uf) {
    const std::string bv = bv_type(field.width());
    std::set<std::string> visited;
    std::function<void(const std::string&)> visit =
        [&](const std::string& name) {
            if (!visited.insert(name).second) return;
            const AffineDef* def = prog.find_affine_def(name);
            if (!def) {
                if (used_uf) *used_uf = true;
                os << "(declare-fun " << sm(name) << " (" << bv << ") " << bv
                   << ")\n";
                os << "(assert (forall ((lx " << bv << ") (ly " << bv
                   << ")) (= (" << sm(name) << " (bvxor lx ly)) (bvxor ("
                   << sm(name) << " lx) (" << sm(name) << " ly)))))\n";
                return;
            }
            std::set<std::string> callees;
            for (const Stmt& s : def->body)
                if (s.rhs) collect_called(*s.rhs, callees);
            for (const std::string& c : callees) visit(c);
            emit_def(os, *def, field);
        };
    for (const std::string& r : roots) visit(r);
}

// renders a term bottom-up, let-binding every shared interior node
std::string term_smt(TermStore& st, TermId root, const Field& field,
                     std::ostringstream& lets, std::size_t& let_count) {
    std::map<TermId, std::size_t> refs;
    std::function<void(TermId)> count = [&](TermId t) {
        if (++refs[t] > 1) return;
        const TermNode node = st.at(t);
        switch (node.kind) {
        case TermKind::Const:
        case TermKind::Var:
            break;
        case TermKind::Add:
        case TermKind::Mul:
            count(node.a);
            count(node.b);
            break;
        case TermKind::App:
            count(node.b);
            break;
        }
    };
    count(root);

    std::map<TermId, std::string> named;
    std::function<std::string(TermId)> render = [&](TermId t) -> std::string {
        auto hit = named.find(t);
        if (hit != named.end()) return hit->second;
        const TermNode node = st.at(t);
        std::string body;
        bool leaf = false;
        switch (node.kind) {
        case TermKind::Const:
            body = bv_lit(node.a, field.width());
            leaf = true;
            break;
        case TermKind::Var:
            body = sm(st.var_name(node.a));
            leaf = true;
            break;
        case TermKind::Add:
            body = "(bvxor " + render(node.a) + " " + render(node.b) + ")";
            break;
        case TermKind::Mul:
            body = "(gmul " + render(node.a) + " " + render(node.b) + ")";
            break;
        case TermKind::App:
            body = "(" + sm(st.sym_name(node.a)) + " " + render(node.b) + ")";
            break;
        }
        if (!leaf && refs[t] > 1 && t != root) {
            std::string nm = "t" + std::to_string(t);
            lets << "(let ((" << nm << " " << body << ")) ";
            ++let_count;
            named.emplace(t, nm);
            return nm;
        }
        named.emplace(t, body);
        return body;
    };
    return render(root);
}

} // namespace

std::string emit_smtlib_equivalence(TermStore& st, const Program& prog,
                                    const Proc& proc, TermId tau) {
    Field field(prog.field_n, prog.field_poly);
    std::set<SymId> syms;
    st.syms_of(tau, syms);
    std::set<std::string> roots;
    for (SymId s : syms) roots.insert(st.sym_name(s));

    std::ostringstream defs;
    bool used_uf = false;
    emit_symbols(defs, prog, field, roots, &used_uf);

    std::ostringstream lets;
    std::size_t let_count = 0;
    std::string body = term_smt(st, tau, field, lets, let_count);

    std::set<VarId> vars;
    st.vars_of(tau, vars);
    std::vector<std::string> names;
    for (VarId v : vars) names.push_back(st.var_name(v));
    std::sort(names.begin(), names.end());

    std::ostringstream os;
    os << "(set-info :smt-lib-version 2.6)\n";
    os << "(set-logic " << (used_uf ? "UFBV" : "QF_BV") << ")\n";
    os << "; procedure " << proc.name << ", field width "
       << field.width() << ", modulus " << field.modulus() << "\n";
    os << "; unsat means the masked procedure is equivalent\n";
    emit_gmul(os, field);
    os << defs.str();
    for (const std::string& nm : names)
        os << "(declare-const " << sm(nm) << " " << bv_type(field.width())
           << ")\n";
    os << "(assert " << lets.str() << "(distinct " << body << " "
       << bv_lit(0, field.width()) << ")" << std::string(let_count, ')')
       << ")\n";
    os << "(check-sat)\n";
    return os.str();
}

std::string emit_smtlib_affine(const Program& prog, const AffineDef& def) {
    Field field(prog.field_n, prog.field_poly);
    std::ostringstream defs;
    bool used_uf = false;
    emit_symbols(defs, prog, field, {def.name}, &used_uf);

    // pick quantified variable names no global symbol uses
    std::set<std::string> taken{"gmul"};
    for (const auto& d : prog.affine_defs) taken.insert(sm(d.name));
    for (const auto& d : prog.affine_decls) taken.insert(sm(d));
    auto fresh = [&](std::string base) {
        while (taken.count(base)) base += "_";
        taken.insert(base);
        return base;
    };
    std::string x = fresh("x"), y = fresh("y"), c = fresh("c");
    const std::string bv = bv_type(field.width());
    const std::string f = sm(def.name);

    std::ostringstream os;
    os << "(set-info :smt-lib-version 2.6)\n";
    os << "(set-logic " << (used_uf ? "UFBV" : "BV") << ")\n";
    os << "; affine constant query for " << def.name << ", field width "
       << field.width() << ", modulus " << field.modulus() << "\n";
    os << "; sat with model value " << c << " confirms affineness\n";
    emit_gmul(os, field);
    os << defs.str();
    os << "(declare-const " << c << " " << bv << ")\n";
    os << "(assert (forall ((" << x << " " << bv << ") (" << y << " " << bv
       << ")) (= (bvxor (" << f << " (bvxor " << x << " " << y
       << ")) (bvxor (" << f << " " << x << ") (" << f << " " << y << "))) "
       << c << ")))\n";
    os << "(check-sat)\n";
    return os.str();
}

} // namespace maskeq
