// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/parser.hpp"

#include <algorithm>
#include <cctype>

#include "maskeq/preprocess.hpp"

namespace maskeq {

// ---------------------------------------------------------------- ast helpers

ExprPtr mk_const(std::uint32_t v, SourcePos p) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Const;
    e->value = v;
    e->pos = p;
    return e;
}

ExprPtr mk_ident(std::string name, SourcePos p) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Ident;
    e->name = std::move(name);
    e->pos = p;
    return e;
}

ExprPtr mk_binary(Expr::Kind k, ExprPtr l, ExprPtr r, SourcePos p) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->pos = p;
    e->args.push_back(std::move(l));
    e->args.push_back(std::move(r));
    return e;
}

ExprPtr mk_call(std::string name, std::vector<ExprPtr> args, SourcePos p) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Call;
    e->name = std::move(name);
    e->args = std::move(args);
    e->pos = p;
    return e;
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    e->value = value;
    e->name = name;
    e->args.reserve(args.size());
    for (const auto& a : args) e->args.push_back(a->clone());
    return e;
}

Stmt Stmt::clone() const {
    Stmt s;
    s.kind = kind;
    s.pos = pos;
    s.lhs = lhs;
    if (lhs_index) s.lhs_index = lhs_index->clone();
    if (rhs) s.rhs = rhs->clone();
    if (rhs2) s.rhs2 = rhs2->clone();
    s.lo = lo;
    s.hi = hi;
    for (const auto& b : body) s.body.push_back(b.clone());
    for (const auto& b : else_body) s.else_body.push_back(b.clone());
    return s;
}

Proc Proc::clone() const {
    Proc p;
    p.name = name;
    p.inputs = inputs;
    p.output = output;
    p.shares = shares;
    p.pos = pos;
    p.encodings = encodings;
    for (const auto& s : orig) p.orig.push_back(s.clone());
    for (const auto& s : masked) p.masked.push_back(s.clone());
    return p;
}

Program Program::clone() const {
    Program q;
    q.field_n = field_n;
    q.field_poly = field_poly;
    q.field_directive = field_directive;
    q.affine_decls = affine_decls;
    for (const auto& d : affine_defs) {
        AffineDef c;
        c.name = d.name;
        c.input = d.input;
        c.output = d.output;
        c.pos = d.pos;
        c.has_builtins = d.has_builtins;
        for (const auto& s : d.body) c.body.push_back(s.clone());
        q.affine_defs.push_back(std::move(c));
    }
    for (const auto& p : procs) q.procs.push_back(p.clone());
    return q;
}

const AffineDef* Program::find_affine_def(const std::string& n) const {
    for (const auto& d : affine_defs)
        if (d.name == n) return &d;
    return nullptr;
}

const Proc* Program::find_proc(const std::string& n) const {
    for (const auto& p : procs)
        if (p.name == n) return &p;
    return nullptr;
}

bool Program::is_affine_name(const std::string& n) const {
    if (find_affine_def(n)) return true;
    return std::find(affine_decls.begin(), affine_decls.end(), n) !=
           affine_decls.end();
}

bool Program::is_declared_only(const std::string& n) const {
    return !find_affine_def(n) &&
           std::find(affine_decls.begin(), affine_decls.end(), n) !=
               affine_decls.end();
}

bool is_builtin_name(const std::string& n) {
    return n == "rotl" || n == "shl" || n == "shr" || n == "band" ||
           n == "bor" || n == "bnot";
}

bool split_share_ref(const std::string& ident, std::string& base, int& index) {
    size_t i = ident.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(ident[i - 1]))) --i;
    if (i == ident.size() || i == 0) return false;
    if (ident.size() - i > 4) return false; // index way out of range
    base = ident.substr(0, i);
    index = std::stoi(ident.substr(i));
    return true;
}

// --------------------------------------------------------------------- lexer

namespace {

enum class Tok {
    End, Ident, Int,
    KwProc, KwAffine, KwShares, KwRand, KwFor, KwIn, KwIf, KwElse,
    KwAssume, KwAssert, KwField,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Semi, Comma, Caret, Star, Arrow, LeftArrow, DotDot, EqEq,
};

struct Lexer {
    std::string_view src;
    size_t pos = 0;
    int line = 1, col = 1;

    Tok tok = Tok::End;
    std::string text;
    std::uint64_t ival = 0;
    SourcePos tok_pos;

    explicit Lexer(std::string_view s) : src(s) { next(); }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, tok_pos);
    }

    char peek(size_t off = 0) const {
        return pos + off < src.size() ? src[pos + off] : '\0';
    }

    void advance() {
        if (peek() == '\n') { ++line; col = 1; } else { ++col; }
        ++pos;
    }

    void skip_ws() {
        for (;;) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#' || (c == '/' && peek(1) == '/')) {
                while (peek() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void next() {
        skip_ws();
        tok_pos = {line, col};
        char c = peek();
        if (!c) { tok = Tok::End; return; }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            text.clear();
            while (std::isalnum(static_cast<unsigned char>(peek())) ||
                   peek() == '_') {
                text += peek();
                advance();
            }
            if (text == "proc") tok = Tok::KwProc;
            else if (text == "affine") tok = Tok::KwAffine;
            else if (text == "shares") tok = Tok::KwShares;
            else if (text == "rand") tok = Tok::KwRand;
            else if (text == "for") tok = Tok::KwFor;
            else if (text == "in") tok = Tok::KwIn;
            else if (text == "if") tok = Tok::KwIf;
            else if (text == "else") tok = Tok::KwElse;
            else if (text == "assume") tok = Tok::KwAssume;
            else if (text == "assert") tok = Tok::KwAssert;
            else if (text == "field") tok = Tok::KwField;
            else tok = Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ival = 0;
            if (c == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
                advance();
                advance();
                if (!std::isxdigit(static_cast<unsigned char>(peek())))
                    fail("expected hex digits after 0x");
                while (std::isxdigit(static_cast<unsigned char>(peek()))) {
                    char h = peek();
                    unsigned d = std::isdigit(static_cast<unsigned char>(h))
                                     ? h - '0'
                                     : (std::tolower(h) - 'a' + 10);
                    ival = ival * 16 + d;
                    advance();
                }
            } else {
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    ival = ival * 10 + (peek() - '0');
                    advance();
                }
            }
            tok = Tok::Int;
            return;
        }
        advance();
        switch (c) {
        case '(': tok = Tok::LParen; return;
        case ')': tok = Tok::RParen; return;
        case '{': tok = Tok::LBrace; return;
        case '}': tok = Tok::RBrace; return;
        case '[': tok = Tok::LBracket; return;
        case ']': tok = Tok::RBracket; return;
        case ';': tok = Tok::Semi; return;
        case ',': tok = Tok::Comma; return;
        case '^': tok = Tok::Caret; return;
        case '*': tok = Tok::Star; return;
        case '-':
            if (peek() == '>') { advance(); tok = Tok::Arrow; return; }
            fail("stray '-'");
        case '<':
            if (peek() == '-') { advance(); tok = Tok::LeftArrow; return; }
            fail("stray '<'");
        case '.':
            if (peek() == '.') { advance(); tok = Tok::DotDot; return; }
            fail("stray '.'");
        case '=':
            if (peek() == '=') { advance(); tok = Tok::EqEq; return; }
            fail("stray '='");
        default:
            fail(std::string("unexpected character '") + c + "'");
        }
    }
};

// ------------------------------------------------------------------- parser

struct Parser {
    Lexer lx;

    explicit Parser(std::string_view s) : lx(s) {}

    [[noreturn]] void fail(const std::string& msg) { lx.fail(msg); }

    void expect(Tok t, const char* what) {
        if (lx.tok != t) fail(std::string("expected ") + what);
        lx.next();
    }

    std::string expect_ident(const char* what) {
        if (lx.tok != Tok::Ident) fail(std::string("expected ") + what);
        std::string s = lx.text;
        lx.next();
        return s;
    }

    std::uint64_t expect_int(const char* what) {
        if (lx.tok != Tok::Int) fail(std::string("expected ") + what);
        std::uint64_t v = lx.ival;
        lx.next();
        return v;
    }

    ExprPtr parse_primary() {
        SourcePos p = lx.tok_pos;
        if (lx.tok == Tok::Int) {
            auto v = lx.ival;
            lx.next();
            return mk_const(static_cast<std::uint32_t>(v), p);
        }
        if (lx.tok == Tok::LParen) {
            lx.next();
            auto e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (lx.tok != Tok::Ident) fail("expected expression");
        std::string name = lx.text;
        lx.next();
        if (lx.tok == Tok::LParen) {
            lx.next();
            std::vector<ExprPtr> args;
            if (lx.tok != Tok::RParen) {
                args.push_back(parse_expr());
                while (lx.tok == Tok::Comma) {
                    lx.next();
                    args.push_back(parse_expr());
                }
            }
            expect(Tok::RParen, "')'");
            return mk_call(std::move(name), std::move(args), p);
        }
        if (lx.tok == Tok::LBracket) {
            lx.next();
            auto idx = parse_expr();
            expect(Tok::RBracket, "']'");
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Index;
            e->name = std::move(name);
            e->pos = p;
            e->args.push_back(std::move(idx));
            return e;
        }
        return mk_ident(std::move(name), p);
    }

    ExprPtr parse_mul() {
        auto e = parse_primary();
        while (lx.tok == Tok::Star) {
            SourcePos p = lx.tok_pos;
            lx.next();
            e = mk_binary(Expr::Kind::Mul, std::move(e), parse_primary(), p);
        }
        return e;
    }

    // '^' is XOR (field addition) and binds looser than '*'
    ExprPtr parse_expr() {
        auto e = parse_mul();
        while (lx.tok == Tok::Caret) {
            SourcePos p = lx.tok_pos;
            lx.next();
            e = mk_binary(Expr::Kind::Xor, std::move(e), parse_mul(), p);
        }
        return e;
    }

    Stmt parse_stmt() {
        Stmt s;
        s.pos = lx.tok_pos;
        if (lx.tok == Tok::KwFor) {
            lx.next();
            s.kind = Stmt::Kind::For;
            s.lhs = expect_ident("loop variable");
            expect(Tok::KwIn, "'in'");
            s.lo = static_cast<long>(expect_int("loop lower bound"));
            expect(Tok::DotDot, "'..'");
            s.hi = static_cast<long>(expect_int("loop upper bound"));
            expect(Tok::LBrace, "'{'");
            while (lx.tok != Tok::RBrace) s.body.push_back(parse_stmt());
            lx.next();
            return s;
        }
        if (lx.tok == Tok::KwIf) {
            lx.next();
            s.kind = Stmt::Kind::If;
            s.rhs = parse_expr();
            expect(Tok::LBrace, "'{'");
            while (lx.tok != Tok::RBrace) s.body.push_back(parse_stmt());
            lx.next();
            if (lx.tok == Tok::KwElse) {
                lx.next();
                expect(Tok::LBrace, "'{'");
                while (lx.tok != Tok::RBrace)
                    s.else_body.push_back(parse_stmt());
                lx.next();
            }
            return s;
        }
        if (lx.tok == Tok::KwAssume || lx.tok == Tok::KwAssert) {
            s.kind = lx.tok == Tok::KwAssume ? Stmt::Kind::Assume
                                             : Stmt::Kind::Assert;
            lx.next();
            s.rhs = parse_expr();
            if (lx.tok == Tok::EqEq) {
                lx.next();
                s.rhs2 = parse_expr();
            }
            expect(Tok::Semi, "';'");
            return s;
        }
        s.lhs = expect_ident("assignment target");
        if (lx.tok == Tok::LBracket) {
            lx.next();
            s.lhs_index = parse_expr();
            expect(Tok::RBracket, "']'");
        }
        expect(Tok::LeftArrow, "'<-'");
        if (lx.tok == Tok::KwRand) {
            lx.next();
            s.kind = Stmt::Kind::Rand;
            if (s.lhs_index) fail("indexed target cannot be random");
        } else {
            s.kind = Stmt::Kind::Assign;
            s.rhs = parse_expr();
        }
        expect(Tok::Semi, "';'");
        return s;
    }

    Program parse_program() {
        Program prog;
        while (lx.tok != Tok::End) {
            if (lx.tok == Tok::KwField) {
                SourcePos p = lx.tok_pos;
                lx.next();
                if (prog.field_directive)
                    throw ParseError("duplicate field directive", p);
                if (!prog.affine_defs.empty() || !prog.procs.empty() ||
                    !prog.affine_decls.empty())
                    throw ParseError("field directive must precede definitions", p);
                prog.field_n = static_cast<unsigned>(expect_int("field width"));
                prog.field_poly =
                    static_cast<std::uint32_t>(expect_int("field modulus"));
                prog.field_directive = true;
                expect(Tok::Semi, "';'");
                continue;
            }
            if (lx.tok == Tok::KwAffine) {
                SourcePos p = lx.tok_pos;
                lx.next();
                std::string name = expect_ident("affine name");
                if (lx.tok == Tok::Semi) {
                    lx.next();
                    prog.affine_decls.push_back(std::move(name));
                    continue;
                }
                AffineDef d;
                d.name = std::move(name);
                d.pos = p;
                expect(Tok::LParen, "'('");
                d.input = expect_ident("input name");
                expect(Tok::RParen, "')'");
                expect(Tok::Arrow, "'->'");
                d.output = expect_ident("output name");
                expect(Tok::LBrace, "'{'");
                while (lx.tok != Tok::RBrace) d.body.push_back(parse_stmt());
                lx.next();
                prog.affine_defs.push_back(std::move(d));
                continue;
            }
            if (lx.tok == Tok::KwProc) {
                Proc pr;
                pr.pos = lx.tok_pos;
                lx.next();
                pr.name = expect_ident("procedure name");
                expect(Tok::LParen, "'('");
                pr.inputs.push_back(expect_ident("input name"));
                while (lx.tok == Tok::Comma) {
                    lx.next();
                    pr.inputs.push_back(expect_ident("input name"));
                }
                expect(Tok::RParen, "')'");
                expect(Tok::Arrow, "'->'");
                pr.output = expect_ident("output name");
                expect(Tok::LBrace, "'{'");
                while (lx.tok != Tok::RBrace && lx.tok != Tok::KwShares)
                    pr.orig.push_back(parse_stmt());
                expect(Tok::KwShares, "'shares'");
                pr.shares = static_cast<int>(expect_int("share count"));
                expect(Tok::Semi, "';'");
                while (lx.tok != Tok::RBrace) pr.masked.push_back(parse_stmt());
                lx.next();
                prog.procs.push_back(std::move(pr));
                continue;
            }
            fail("expected 'proc', 'affine' or 'field'");
        }
        return prog;
    }
};

// --------------------------------------------------------- name resolution

void check_expr_names(const Expr& e, const Program& prog, bool in_affine) {
    switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Ident:
        return;
    case Expr::Kind::Index:
        if (in_affine)
            throw SemanticError("share indexing is not allowed in affine bodies",
                                e.pos);
        check_expr_names(*e.args[0], prog, in_affine);
        return;
    case Expr::Kind::Xor:
    case Expr::Kind::Mul:
        check_expr_names(*e.args[0], prog, in_affine);
        check_expr_names(*e.args[1], prog, in_affine);
        return;
    case Expr::Kind::Call:
        if (is_builtin_name(e.name)) {
            if (!in_affine)
                throw SemanticError(
                    "builtin '" + e.name + "' is only allowed in affine bodies",
                    e.pos);
            size_t want = e.name == "bnot" ? 1 : 2;
            if (e.args.size() != want)
                throw SemanticError("builtin '" + e.name + "' expects " +
                                        std::to_string(want) + " argument(s)",
                                    e.pos);
            if (want == 2 && e.args[1]->kind != Expr::Kind::Const)
                throw SemanticError(
                    "builtin '" + e.name + "' needs a constant second argument",
                    e.pos);
        } else if (prog.is_affine_name(e.name)) {
            if (e.args.size() != 1)
                throw SemanticError("affine '" + e.name +
                                        "' takes exactly one argument",
                                    e.pos);
        } else if (const Proc* p = prog.find_proc(e.name)) {
            if (in_affine)
                throw SemanticError(
                    "affine bodies cannot call procedure '" + e.name + "'",
                    e.pos);
            if (e.args.size() != p->inputs.size())
                throw SemanticError("procedure '" + e.name + "' expects " +
                                        std::to_string(p->inputs.size()) +
                                        " argument(s)",
                                    e.pos);
        } else {
            throw SemanticError("unresolved name '" + e.name + "'", e.pos);
        }
        for (const auto& a : e.args) check_expr_names(*a, prog, in_affine);
        return;
    }
}

// a procedure call may only appear as the entire right-hand side
bool has_nested_proc_call(const Expr& e, const Program& prog, bool top) {
    if (e.kind == Expr::Kind::Call && !is_builtin_name(e.name) &&
        prog.find_proc(e.name)) {
        if (!top) return true;
    }
    for (const auto& a : e.args)
        if (has_nested_proc_call(*a, prog, false)) return true;
    return false;
}

void check_stmts(const std::vector<Stmt>& stmts, const Program& prog,
                 bool in_affine) {
    for (const auto& s : stmts) {
        switch (s.kind) {
        case Stmt::Kind::Assign:
            check_expr_names(*s.rhs, prog, in_affine);
            if (has_nested_proc_call(*s.rhs, prog, true))
                throw SemanticError(
                    "procedure call must be the whole right-hand side", s.pos);
            if (s.lhs_index) check_expr_names(*s.lhs_index, prog, in_affine);
            break;
        case Stmt::Kind::Rand:
            if (in_affine)
                throw SemanticError("affine bodies cannot draw randomness",
                                    s.pos);
            break;
        case Stmt::Kind::For:
        case Stmt::Kind::If:
            if (s.rhs) check_expr_names(*s.rhs, prog, in_affine);
            check_stmts(s.body, prog, in_affine);
            check_stmts(s.else_body, prog, in_affine);
            break;
        case Stmt::Kind::Assume:
        case Stmt::Kind::Assert:
            check_expr_names(*s.rhs, prog, in_affine);
            if (s.rhs2) check_expr_names(*s.rhs2, prog, in_affine);
            break;
        }
    }
}

bool expr_has_builtin(const Expr& e) {
    if (e.kind == Expr::Kind::Call && is_builtin_name(e.name)) return true;
    for (const auto& a : e.args)
        if (expr_has_builtin(*a)) return true;
    return false;
}

bool stmts_have_builtin(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
        if (s.rhs && expr_has_builtin(*s.rhs)) return true;
        if (s.rhs2 && expr_has_builtin(*s.rhs2)) return true;
        if (stmts_have_builtin(s.body) || stmts_have_builtin(s.else_body))
            return true;
    }
    return false;
}

void ends_with_digit(const std::string& n, SourcePos pos, const char* role) {
    if (!n.empty() && std::isdigit(static_cast<unsigned char>(n.back())))
        throw SemanticError(std::string(role) + " name '" + n +
                                "' must not end with a digit (reserved for "
                                "share indexing)",
                            pos);
}

void resolve(Program& prog) {
    std::vector<std::string> names;
    auto declare = [&](const std::string& n, SourcePos pos) {
        if (is_builtin_name(n))
            throw SemanticError("'" + n + "' is a reserved builtin name", pos);
        if (std::find(names.begin(), names.end(), n) != names.end())
            throw SemanticError("duplicate definition of '" + n + "'", pos);
        names.push_back(n);
    };
    for (const auto& d : prog.affine_defs) declare(d.name, d.pos);
    for (const auto& n : prog.affine_decls) declare(n, {});
    for (const auto& p : prog.procs) declare(p.name, p.pos);

    for (auto& d : prog.affine_defs) {
        check_stmts(d.body, prog, true);
        d.has_builtins = stmts_have_builtin(d.body);
    }
    for (const auto& p : prog.procs) {
        if (p.shares < 1)
            throw SemanticError("share count must be at least 1", p.pos);
        for (const auto& in : p.inputs) ends_with_digit(in, p.pos, "input");
        ends_with_digit(p.output, p.pos, "output");
        check_stmts(p.orig, prog, false);
        check_stmts(p.masked, prog, false);
    }
    build_call_graph(prog); // rejects recursion
}

} // namespace

Program parse(std::string_view text) {
    Parser parser(text);
    Program prog = parser.parse_program();
    resolve(prog);
    return prog;
}

} // namespace maskeq
