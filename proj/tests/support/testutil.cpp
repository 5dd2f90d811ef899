// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "testutil.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "maskeq/affine.hpp"
#include "maskeq/oracle.hpp"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/smtlib.hpp"
#include "maskeq/symexec.hpp"

namespace maskeq::test {

TermId build_tau(TermStore& st, const Program& prog, const Proc& proc,
                 const std::map<SymId, Elem>& lambda) {
    TermId xi = exec_origin(st, prog, proc);
    std::vector<TermId> shares = exec_masked(st, prog, proc, lambda);
    TermId folded = xor_fold(st, shares);
    std::map<VarId, TermId> to_sum;
    for (const std::string& in : proc.inputs) {
        TermId sum = st.var(in + "0");
        for (int i = 1; i < proc.shares; ++i)
            sum = st.add(sum, st.var(in + std::to_string(i)));
        to_sum[st.var_id(in)] = sum;
    }
    return st.add(st.substitute(xi, to_sum), folded);
}

Elem naive_mul(unsigned n, std::uint32_t poly, Elem a, Elem b) {
    // carry-less schoolbook product, up to 2n-1 bits wide
    std::uint64_t prod = 0;
    for (unsigned i = 0; i < n; ++i)
        if (b & (1u << i)) prod ^= static_cast<std::uint64_t>(a) << i;
    // long division by the reduction polynomial
    for (int bit = 2 * static_cast<int>(n) - 2; bit >= static_cast<int>(n);
         --bit)
        if (prod & (1ull << bit))
            prod ^= static_cast<std::uint64_t>(poly) << (bit - n);
    return static_cast<Elem>(prod & ((1u << n) - 1));
}

TermId random_term(TermStore& st, const Field& field, std::mt19937_64& rng,
                   int size, const std::vector<std::string>& vars,
                   const std::vector<std::string>& syms) {
    auto leaf = [&]() -> TermId {
        if (!vars.empty() && rng() % 4 != 0)
            return st.var(vars[rng() % vars.size()]);
        return st.konst(static_cast<Elem>(rng() & field.mask()));
    };
    if (size <= 1) return leaf();
    switch (rng() % (syms.empty() ? 3 : 4)) {
    case 0: {
        int ls = 1 + static_cast<int>(rng() % static_cast<unsigned>(size - 1));
        return st.add(random_term(st, field, rng, ls, vars, syms),
                      random_term(st, field, rng, size - ls, vars, syms));
    }
    case 1: {
        int ls = 1 + static_cast<int>(rng() % static_cast<unsigned>(size - 1));
        return st.mul(random_term(st, field, rng, ls, vars, syms),
                      random_term(st, field, rng, size - ls, vars, syms));
    }
    case 2:
        return leaf();
    default: {
        SymId f = st.sym_id(syms[rng() % syms.size()]);
        return st.app(f, random_term(st, field, rng, size - 1, vars, syms));
    }
    }
}

AffineTable random_affine_table(const Field& field, std::mt19937_64& rng) {
    unsigned n = field.width();
    // random bit matrix: column j is the image of basis vector 1<<j
    std::vector<Elem> col(n);
    for (unsigned j = 0; j < n; ++j)
        col[j] = static_cast<Elem>(rng() & field.mask());
    Elem c = static_cast<Elem>(rng() & field.mask());
    AffineTable out;
    out.c = c;
    out.table.resize(std::size_t{1} << n);
    for (std::size_t x = 0; x < out.table.size(); ++x) {
        Elem acc = c;
        for (unsigned j = 0; j < n; ++j)
            if (x & (1u << j)) acc ^= col[j];
        out.table[x] = acc;
    }
    return out;
}

bool decode_agrees(const Program& prog, const Proc& proc, const Field& field,
                const std::map<std::string, Elem>& lambda) {
    const int shares = proc.shares;
    std::vector<std::string> free_vars;
    for (const auto& in : proc.inputs)
        for (int i = 0; i < shares; ++i)
            free_vars.push_back(in + std::to_string(i));
    std::size_t n_inputs = free_vars.size();
    for (const auto& s : proc.masked)
        if (s.kind == Stmt::Kind::Rand)
            free_vars.push_back(s.lhs);

    const std::uint64_t q = 1ull << field.width();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < free_vars.size(); ++i) {
        total *= q;
        if (total > (1ull << 22))
            throw std::logic_error("decode_agrees: enumeration too large");
    }

    InterpCtx mctx{field, &prog, nullptr, {}, &proc, &lambda};
    InterpCtx octx{field, &prog, nullptr, {}, nullptr, nullptr};

    std::vector<Elem> assign(free_vars.size(), 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        std::size_t next_rand = n_inputs;
        mctx.rand_source = [&]() { return assign[next_rand++]; };

        std::map<std::string, Elem> menv;
        for (std::size_t i = 0; i < n_inputs; ++i)
            menv[free_vars[i]] = assign[i];
        interp_block(proc.masked, menv, mctx);
        Elem decoded = 0;
        for (int i = 0; i < shares; ++i)
            decoded ^= menv.at(proc.output + std::to_string(i));

        std::map<std::string, Elem> oenv;
        for (std::size_t j = 0; j < proc.inputs.size(); ++j) {
            Elem sum = 0;
            for (int i = 0; i < shares; ++i)
                sum ^= assign[j * static_cast<std::size_t>(shares) +
                              static_cast<std::size_t>(i)];
            oenv[proc.inputs[j]] = sum;
        }
        interp_block(proc.orig, oenv, octx);
        if (oenv.at(proc.output) != decoded) return false;

        // odometer, last variable fastest
        for (std::size_t i = assign.size(); i-- > 0;) {
            assign[i] = static_cast<Elem>((assign[i] + 1) & field.mask());
            if (assign[i] != 0) break;
        }
    }
    return true;
}

namespace {

// tiny expression menu for the random gadgets; kinds: input 0/1, const,
// xor, mul
struct GNode {
    char kind;
    int a = -1, b = -1;
    Elem k = 0;
};

struct GTree {
    std::vector<GNode> nodes;
    int root = -1;
    int n_inputs = 1;

    int add(GNode n) {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }
};

std::string orig_src(const GTree& t, int id) {
    const GNode& n = t.nodes[static_cast<std::size_t>(id)];
    switch (n.kind) {
    case 'a': return "a";
    case 'b': return "b";
    case 'k': return std::to_string(n.k);
    case '^':
        return "(" + orig_src(t, n.a) + " ^ " + orig_src(t, n.b) + ")";
    default:
        return "(" + orig_src(t, n.a) + " * " + orig_src(t, n.b) + ")";
    }
}

struct MaskBuild {
    std::vector<std::string> stmts;
    int tmp = 0, rnd = 0;
};

struct SharePair {
    std::string s0, s1;
};

SharePair compile_shares(const GTree& t, int id, int shares, MaskBuild& mb) {
    const GNode& n = t.nodes[static_cast<std::size_t>(id)];
    switch (n.kind) {
    case 'a': return {"a0", shares == 2 ? "a1" : ""};
    case 'b': return {"b0", shares == 2 ? "b1" : ""};
    case 'k': return {std::to_string(n.k), shares == 2 ? "0" : ""};
    case '^': {
        SharePair l = compile_shares(t, n.a, shares, mb);
        SharePair r = compile_shares(t, n.b, shares, mb);
        SharePair out;
        out.s0 = "(" + l.s0 + " ^ " + r.s0 + ")";
        if (shares == 2)
            out.s1 = r.s1 == "0" ? l.s1 : "(" + l.s1 + " ^ " + r.s1 + ")";
        return out;
    }
    default: {
        SharePair l = compile_shares(t, n.a, shares, mb);
        SharePair r = compile_shares(t, n.b, shares, mb);
        if (shares == 1) return {"(" + l.s0 + " * " + r.s0 + ")", ""};
        std::string rv = "r" + std::to_string(mb.rnd++);
        std::string t0 = "t" + std::to_string(mb.tmp++);
        std::string t1 = "t" + std::to_string(mb.tmp++);
        mb.stmts.push_back("    " + rv + " <- rand;");
        mb.stmts.push_back("    " + t0 + " <- " + l.s0 + " * " + r.s0 +
                           " ^ " + rv + ";");
        mb.stmts.push_back("    " + t1 + " <- " + l.s1 + " * " + r.s1 +
                           " ^ (" + rv + " ^ " + l.s0 + " * " + r.s1 +
                           " ^ " + l.s1 + " * " + r.s0 + ");");
        return {t0, t1};
    }
    }
}

bool replace_first(std::string& s, const std::string& from,
                   const std::string& to) {
    auto pos = s.find(from);
    if (pos == std::string::npos) return false;
    s.replace(pos, from.size(), to);
    return true;
}

} // namespace

std::string random_gadget(std::mt19937_64& rng) {
    auto pick = [&](unsigned m) { return static_cast<int>(rng() % m); };
    auto nz_const = [&]() { return static_cast<Elem>(1 + pick(15)); };

    GTree t;
    int shares = pick(4) == 0 ? 1 : 2;
    // keep the exhaustive enumeration small: two-input multiplications
    // (five free variables at two shares) stay the exception
    bool two_input_mul = shares == 2 && pick(5) == 0;
    int pattern = two_input_mul ? 10 + pick(3) : pick(10);

    auto in_a = [&]() { return t.add({'a'}); };
    auto in_b = [&]() { return t.add({'b'}); };
    auto cst = [&]() { return t.add({'k', -1, -1, nz_const()}); };
    auto op = [&](char kind, int l, int r) {
        GNode n{kind};
        n.a = l;
        n.b = r;
        return t.add(n);
    };

    switch (pattern) {
    case 0: t.root = in_a(); break;
    case 1: t.root = op('^', in_a(), cst()); break;
    case 2: t.root = op('*', in_a(), in_a()); break;
    case 3: t.root = op('^', op('*', in_a(), in_a()), cst()); break;
    case 4: t.root = op('*', op('^', in_a(), cst()), in_a()); break;
    case 5: t.root = op('^', in_a(), op('*', in_a(), in_a())); break;
    case 6: t.n_inputs = 2; t.root = op('^', in_a(), in_b()); break;
    case 7:
        t.n_inputs = 2;
        t.root = op('^', op('^', in_a(), in_b()), cst());
        break;
    case 8: t.n_inputs = 2; t.root = in_b(); break;
    case 9:
        t.n_inputs = 2;
        t.root = op('^', in_b(), op('^', in_a(), cst()));
        break;
    case 10: t.n_inputs = 2; t.root = op('*', in_a(), in_b()); break;
    case 11:
        t.n_inputs = 2;
        t.root = op('^', op('*', in_a(), in_b()), cst());
        break;
    default:
        t.n_inputs = 2;
        t.root = op('^', op('*', in_a(), in_b()), in_a());
        break;
    }

    MaskBuild mb;
    SharePair out = compile_shares(t, t.root, shares, mb);
    mb.stmts.push_back("    c0 <- " + out.s0 + ";");
    if (shares == 2) mb.stmts.push_back("    c1 <- " + out.s1 + ";");

    // about half the gadgets get one fault
    if (pick(2) == 0) {
        int m = pick(3);
        bool done = false;
        if (m == 1 && shares == 2) {
            // redirect one read to the sibling share
            int idx = pick(static_cast<unsigned>(mb.stmts.size()));
            std::string& s = mb.stmts[static_cast<std::size_t>(idx)];
            std::string body = s.substr(s.find("<-"));
            for (const char* fr : {"a0", "a1", "b0", "b1"}) {
                if (body.find(fr) == std::string::npos) continue;
                std::string to(fr);
                to[1] = to[1] == '0' ? '1' : '0';
                done = replace_first(body, fr, to);
                if (done) {
                    s = s.substr(0, s.find("<-")) + body;
                    break;
                }
            }
        } else if (m == 2) {
            int idx = pick(static_cast<unsigned>(mb.stmts.size()));
            std::string& s = mb.stmts[static_cast<std::size_t>(idx)];
            std::string body = s.substr(s.find("<-"));
            done = replace_first(body, " * ", " ^ ") ||
                   replace_first(body, " ^ ", " * ");
            if (done) s = s.substr(0, s.find("<-")) + body;
        }
        if (!done) {
            std::string extra =
                pick(2) == 0 || t.n_inputs < 1
                    ? std::to_string(nz_const())
                    : std::string(t.n_inputs == 2 && pick(2) == 0 ? "b" : "a") +
                          (shares == 2 && pick(2) == 0 ? "1" : "0");
            mb.stmts.push_back("    c0 <- c0 ^ " + extra + ";");
        }
    }

    std::ostringstream os;
    os << "field 4 0x13;\n\n";
    os << "proc g(" << (t.n_inputs == 2 ? "a, b" : "a") << ") -> c {\n";
    os << "    c <- " << orig_src(t, t.root) << ";\n";
    os << "shares " << shares << ";\n";
    for (const auto& s : mb.stmts) os << s << "\n";
    os << "}\n";
    return os.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

EmittedScripts emit_scripts(const std::string& text) {
    EmittedScripts out{preprocess(parse(text)), {}, {}};
    Field field(out.prog.field_n, out.prog.field_poly);
    TermStore ast;
    AffineOutcome aff = aff_const_all(ast, out.prog, field, OracleConfig{});
    for (const Proc& proc : out.prog.procs) {
        TermStore st;
        TermId tau = build_tau(st, out.prog, proc,
                               intern_lambda(st, aff.lambda));
        out.equivalence[proc.name] =
            emit_smtlib_equivalence(st, out.prog, proc, tau);
    }
    for (const AffineDef& def : out.prog.affine_defs)
        out.affine[def.name] = emit_smtlib_affine(out.prog, def);
    return out;
}

namespace {

// minimal subjects covering the uninterpreted-function route and a
// rotation builtin, frozen alongside the inverse pipeline scripts
const char* kUfSubject = R"(
field 4 0x13;
affine g;
proc pass(x) -> y {
    y <- g(x);
shares 2;
    y <- g(x);
}
)";

const char* kRotSubject = R"(
field 4 0x13;
affine rot(x) -> y { y <- rotl(x, 1) ^ 9; }
)";

} // namespace

std::vector<std::pair<std::string, std::string>> smt_golden_set(
    const std::string& corpus_dir) {
    EmittedScripts inv = emit_scripts(slurp(corpus_dir + "/masked_inverse.msl"));
    EmittedScripts uf = emit_scripts(kUfSubject);
    EmittedScripts rot = emit_scripts(kRotSubject);
    return {
        {"equivalence_sec_mult.smt2", inv.equivalence.at("sec_mult")},
        {"equivalence_uf.smt2", uf.equivalence.at("pass")},
        {"affine_exp2.smt2", inv.affine.at("exp2")},
        {"affine_rot.smt2", rot.affine.at("rot")},
    };
}

} // namespace maskeq::test
