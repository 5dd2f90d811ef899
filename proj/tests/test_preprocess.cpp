// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "doctest.h"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/verify.hpp"
#include "testutil.hpp"

using namespace maskeq;

namespace {

Program pp(const char* text) { return preprocess(parse(text)); }

bool flat(const std::vector<Stmt>& stmts) {
    return std::all_of(stmts.begin(), stmts.end(), [](const Stmt& s) {
        return s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::Rand;
    });
}

} // namespace

TEST_CASE("loops unroll with the index substituted") {
    Program p = pp(R"(
proc f(a) -> c {
    c <- a;
shares 3;
    for i in 0 .. 3 {
        c[i] <- a[i];
    }
}
)");
    const auto& m = p.procs[0].masked;
    REQUIRE(m.size() == 3);
    CHECK(flat(m));
    CHECK(m[0].lhs == "c0");
    CHECK(m[1].lhs == "c1");
    CHECK(m[2].lhs == "c2");
    CHECK(m[2].rhs->name == "a2");
}

TEST_CASE("loop variables appear in guard arithmetic") {
    Program p = pp(R"(
proc f(a) -> c {
    c <- a;
shares 2;
    c0 <- a0;
    c1 <- a1;
    for i in 0 .. 2 {
        if i {
            c[i] <- c[i] ^ 0;
        }
    }
}
)");
    // only the i=1 iteration survives the constant guard
    const auto& m = p.procs[0].masked;
    REQUIRE(m.size() == 3);
    CHECK(m[2].lhs == "c1");
}

TEST_CASE("assume and assert are documentation") {
    Program p = pp(R"(
proc f(a) -> c {
    c <- a;
shares 1;
    c0 <- a0;
    assert c0 == a0;
    assume a0;
}
)");
    CHECK(p.procs[0].masked.size() == 1);
}

TEST_CASE("rand redrawn inside a loop gets fresh versions") {
    Program p = pp(R"(
proc f(a) -> c {
    c <- a;
shares 2;
    c0 <- a0;
    c1 <- a1;
    for i in 0 .. 2 {
        r <- rand;
        c0 <- c0 ^ r;
        c1 <- c1 ^ r;
    }
}
)");
    const auto& m = p.procs[0].masked;
    REQUIRE(m.size() == 8);
    CHECK(m[2].kind == Stmt::Kind::Rand);
    CHECK(m[5].kind == Stmt::Kind::Rand);
    CHECK(m[2].lhs != m[5].lhs);
    // each draw masks with its own version
    CHECK(m[3].rhs->args[1]->name == m[2].lhs);
    CHECK(m[6].rhs->args[1]->name == m[5].lhs);
    // still a correct refresh after versioning
    Field f = Field::aes();
    VerifyConfig cfg;
    CHECK(verify_proc(p, p.procs[0], {}, cfg).kind == Verdict::Kind::Correct);
}

TEST_CASE("scalar calls inline with renamed locals") {
    Program p = pp(R"(
proc sq(a) -> c {
    c <- a * a;
shares 1;
    c0 <- a0 * a0;
}
proc f(x) -> y {
    t <- sq(x);
    y <- sq(t);
shares 1;
    t0 <- x0 * x0;
    y0 <- t0 * t0;
}
)");
    const Proc* f = p.find_proc("f");
    REQUIRE(f != nullptr);
    CHECK(flat(f->orig));
    // two bind statements and two body statements
    REQUIRE(f->orig.size() == 4);
    CHECK(f->orig[1].lhs == "t");
    CHECK(f->orig[3].lhs == "y");
    // no call expressions left anywhere
    for (const auto& s : f->orig) CHECK(s.rhs->kind != Expr::Kind::Call);
}

TEST_CASE("masked calls inline share-wise") {
    Program p = pp(R"(
proc r2(x) -> y {
    y <- x;
shares 2;
    r <- rand;
    y0 <- x0 ^ r;
    y1 <- x1 ^ r;
}
proc f(a) -> c {
    c <- a;
shares 2;
    c <- r2(a);
}
)");
    const Proc* f = p.find_proc("f");
    REQUIRE(f->masked.size() == 3);
    CHECK(f->masked[0].kind == Stmt::Kind::Rand);
    CHECK(f->masked[1].lhs == "c0");
    CHECK(f->masked[1].rhs->args[0]->name == "a0");
    CHECK(f->masked[2].lhs == "c1");
    // callee-local randomness is renamed apart
    CHECK(f->masked[0].lhs.find("r2$") == 0);
}

TEST_CASE("aliased masked call arguments read the pre-call value") {
    // the callee writes its output share before the last read of the
    // input, so calling it with argument == target used to corrupt
    Program p = pp(R"(
field 4 0x13;
proc swap2(a) -> c {
    c <- a;
shares 2;
    c0 <- a1;
    c1 <- a0;
}
proc f(x) -> y {
    y <- x;
shares 2;
    y <- swap2(x);
    y <- swap2(y);
}
)");
    const Proc* f = p.find_proc("f");
    Field gf16 = Field::present();
    CHECK(test::decode_agrees(p, *f, gf16));
    VerifyConfig cfg;
    CHECK(verify_proc(p, *f, {}, cfg).kind == Verdict::Kind::Correct);
}

TEST_CASE("self-composition of a sharp refresh stays correct") {
    Program p = pp(R"(
field 4 0x13;
proc r2(x) -> y {
    y <- x;
shares 2;
    r <- rand;
    y0 <- x0 ^ r;
    y1 <- x1 ^ r;
}
proc f(a) -> c {
    c <- a;
shares 2;
    c <- r2(a);
    c <- r2(c);
}
)");
    const Proc* f = p.find_proc("f");
    CHECK(test::decode_agrees(p, *f, Field::present()));
}

TEST_CASE("nested inlining keeps prefixes distinct") {
    Program p = pp(R"(
proc m(a, b) -> c {
    c <- a * b;
shares 2;
    r <- rand;
    c0 <- a0 * b0 ^ r;
    c1 <- a1 * b1 ^ (r ^ a0 * b1 ^ a1 * b0);
}
proc g(x) -> y {
    y <- x * x * x;
shares 2;
    t <- m(x, x);
    y <- m(t, x);
}
proc h(x) -> y {
    y <- g(x);
shares 2;
    y <- g(x);
}
)");
    const Proc* h = p.find_proc("h");
    CHECK(flat(h->masked));
    // two rand draws from the two multiplications, distinct names
    std::vector<std::string> rands;
    for (const auto& s : h->masked)
        if (s.kind == Stmt::Kind::Rand) rands.push_back(s.lhs);
    REQUIRE(rands.size() == 2);
    CHECK(rands[0] != rands[1]);
}

TEST_CASE("masked call arguments must be encodings") {
    CHECK_THROWS_WITH_AS(pp(R"(
proc r2(x) -> y {
    y <- x;
shares 2;
    y0 <- x0;
    y1 <- x1;
}
proc f(a) -> c {
    c <- a;
shares 2;
    t <- a0 ^ a1;
    c <- r2(t);
}
)"),
                         doctest::Contains("must be an encoding variable"),
                         SemanticError);
}

TEST_CASE("share-count mismatches across calls are rejected") {
    CHECK_THROWS_AS(pp(R"(
proc r3(x) -> y {
    y <- x;
shares 3;
    y0 <- x0;
    y1 <- x1;
    y2 <- x2;
}
proc f(a) -> c {
    c <- a;
shares 2;
    c <- r3(a);
}
)"),
                    SemanticError);
}

TEST_CASE("validation catches stream errors") {
    // use before definition
    CHECK_THROWS_AS(pp("proc f(a) -> c { c <- a; shares 1; c0 <- t ^ a0; }"),
                    SemanticError);
    // inputs are read-only
    CHECK_THROWS_AS(pp("proc f(a) -> c { a <- a; c <- a; shares 1;"
                       " c0 <- a0; }"),
                    SemanticError);
    CHECK_THROWS_AS(pp("proc f(a) -> c { c <- a; shares 2; a0 <- a1;"
                       " c0 <- a0; c1 <- a1; }"),
                    SemanticError);
    // randoms cannot be reassigned
    CHECK_THROWS_AS(pp("proc f(a) -> c { c <- a; shares 1; r <- rand;"
                       " r <- a0; c0 <- a0 ^ r ^ r; }"),
                    SemanticError);
    // the original block is deterministic
    CHECK_THROWS_AS(pp("proc f(a) -> c { r <- rand; c <- a ^ r; shares 1;"
                       " c0 <- a0; }"),
                    SemanticError);
    // every output share must be written
    CHECK_THROWS_AS(pp("proc f(a) -> c { c <- a; shares 2; c0 <- a0; }"),
                    SemanticError);
    // literals must fit the field
    CHECK_THROWS_AS(pp("field 4 0x13;\nproc f(a) -> c { c <- a ^ 16;"
                       " shares 1; c0 <- a0; }"),
                    SemanticError);
    CHECK_NOTHROW(pp("field 4 0x13;\nproc f(a) -> c { c <- a ^ 15;"
                     " shares 1; c0 <- a0; }"));
}

TEST_CASE("affine applications survive preprocessing") {
    Program p = pp(R"(
affine sq(x) -> y { y <- x * x; }
proc f(a) -> c {
    c <- sq(a);
shares 2;
    c <- sq(a);
}
)");
    const Proc* f = p.find_proc("f");
    REQUIRE(f->masked.size() == 1);
    CHECK(f->masked[0].rhs->kind == Expr::Kind::Call);
    CHECK(f->masked[0].rhs->name == "sq");
    // and the encoding list records the tuple-level names
    CHECK(std::find(f->encodings.begin(), f->encodings.end(), "c") !=
          f->encodings.end());
    CHECK(std::find(f->encodings.begin(), f->encodings.end(), "a") !=
          f->encodings.end());
}
