// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/verify.hpp"
#include "testutil.hpp"

using namespace maskeq;

namespace {

Report run_verify(const std::string& text, VerifyConfig cfg = {},
                  unsigned jobs = 1) {
    Program prog = preprocess(parse(text));
    Field field(prog.field_n, prog.field_poly);
    TermStore st;
    AffineOutcome aff =
        aff_const_all(st, prog, field, cfg.oracle, cfg.step_budget);
    return verify_all(prog, aff.lambda, cfg, jobs);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kCorpus = MASKEQ_CORPUS_DIR;

} // namespace

TEST_CASE("the first-order inversion chain verifies by rewriting alone") {
    Report rep = run_verify(slurp(std::string(kCorpus) + "/masked_inverse.msl"));
    REQUIRE(rep.procs.size() == 3);
    for (const auto& pr : rep.procs) {
        CAPTURE(pr.name);
        CHECK(pr.verdict.kind == Verdict::Kind::Correct);
        CHECK(pr.verdict.method == "trs");
        CHECK(pr.normal_form_monomials == 0);
        CHECK(pr.oracle_evals == 0);
        CHECK(pr.rewrite.steps > 0);
    }
    CHECK(rep.exit_code() == 0);
    std::string text = to_text(rep);
    CHECK(text.find("sec_mult: Correct [trs]") != std::string::npos);
    CHECK(text.find("sec_exp254: Correct [trs]") != std::string::npos);
}

TEST_CASE("dropped cross terms are caught by testing with a witness") {
    Report rep = run_verify(R"(
proc bad_mult(a, b) -> c {
    c <- a * b;
shares 2;
    r0 <- rand;
    c0 <- a0 * b0 ^ r0;
    c1 <- a1 * b1 ^ r0;
}
)");
    REQUIRE(rep.procs.size() == 1);
    const Verdict& v = rep.procs[0].verdict;
    CHECK(v.kind == Verdict::Kind::Incorrect);
    CHECK(v.method == "testing");
    CHECK(v.witness.value != 0);
    CHECK(v.witness.reevaluated);
    CHECK_FALSE(v.witness.assignment.empty());
    CHECK(rep.exit_code() == 1);

    // recompute the equivalence value at the reported assignment
    Field f = Field::aes();
    auto at = [&](const char* n) { return v.witness.assignment.at(n); };
    Elem lhs = f.mul(at("a0") ^ at("a1"), at("b0") ^ at("b1"));
    Elem c0 = f.mul(at("a0"), at("b0")) ^ at("r0");
    Elem c1 = f.mul(at("a1"), at("b1")) ^ at("r0");
    CHECK((lhs ^ c0 ^ c1) == v.witness.value);
}

TEST_CASE("constant discrepancies come straight out of the rewriter") {
    Report rep = run_verify(R"(
proc off_by_one(a) -> c {
    c <- a ^ 1;
shares 2;
    c0 <- a0;
    c1 <- a1;
}
)");
    const Verdict& v = rep.procs[0].verdict;
    CHECK(v.kind == Verdict::Kind::Incorrect);
    CHECK(v.method == "trs");
    CHECK(v.witness.value == 1);
    CHECK(v.witness.reevaluated);
}

TEST_CASE("a correct gadget whose residue needs enumeration") {
    // nb1(x) ^ nb2(x) = x identically, but neither map is affine, so the
    // rewriter cannot cancel the applications and the oracle closes it
    Report rep = run_verify(R"(
field 4 0x13;
affine nb1(x) -> y { y <- band(x, 3) * x; }
affine nb2(x) -> y { y <- band(x, 3) * x ^ x; }
proc f(a) -> c {
    c <- a;
shares 2;
    c0 <- nb1(a0) ^ nb2(a0);
    c1 <- a1;
}
)");
    const ProcReport& pr = rep.procs[0];
    CHECK(pr.verdict.kind == Verdict::Kind::Correct);
    CHECK(pr.verdict.method == "oracle");
    CHECK(pr.oracle_evals > 0);
    CHECK(pr.normal_form_monomials > 0);
}

TEST_CASE("a near-everywhere-zero fault is still found exhaustively") {
    // the defect fires only at a0=b0=c0=0; sampling is switched off so
    // exhaustive enumeration alone has to find the needle
    VerifyConfig cfg;
    cfg.oracle.trials = 0;
    Report rep = run_verify(R"(
field 4 0x13;
proc needle(a, b, c) -> y {
    s <- a * a;
    t <- s * s;
    u <- t * t;
    p <- u * t;
    p <- p * s;
    p <- p * a;
    s <- b * b;
    t <- s * s;
    u <- t * t;
    q <- u * t;
    q <- q * s;
    q <- q * b;
    s <- c * c;
    t <- s * s;
    u <- t * t;
    w <- u * t;
    w <- w * s;
    w <- w * c;
    y <- (1 ^ p) * (1 ^ q) * (1 ^ w);
shares 1;
    y0 <- 0;
}
)",
                            cfg);
    const ProcReport& pr = rep.procs[0];
    CHECK(pr.verdict.kind == Verdict::Kind::Incorrect);
    CHECK(pr.verdict.method == "oracle");
    const Witness& w = pr.verdict.witness;
    CHECK(w.value == 1);
    CHECK(w.reevaluated);
    for (const auto& [name, val] : w.assignment) {
        CAPTURE(name);
        CHECK(val == 0);
    }
}

TEST_CASE("declared-only symbols in a residue stay undecided") {
    Report rep = run_verify(R"(
field 4 0x13;
affine g;
proc f(x) -> y {
    y <- g(x) * x;
shares 2;
    z <- g(x);
    y0 <- z0 * x0;
    y1 <- z1 * x1;
}
)");
    const Verdict& v = rep.procs[0].verdict;
    CHECK(v.kind == Verdict::Kind::MaybeIncorrect);
    CHECK(v.residual.find("g(") != std::string::npos);
    CHECK_FALSE(v.reason.empty());
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("assumed linearity still proves tuple-level pipelines") {
    Report rep = run_verify(R"(
affine g;
proc f(x) -> y {
    y <- g(x);
shares 2;
    y <- g(x);
}
)");
    CHECK(rep.procs[0].verdict.kind == Verdict::Kind::Correct);
    CHECK(rep.procs[0].verdict.method == "trs");
}

TEST_CASE("the step budget turns into an explicit unknown") {
    VerifyConfig cfg;
    cfg.step_budget = 10;
    Report rep = run_verify(R"(
proc m(a, b) -> c {
    c <- a * b;
shares 3;
    r0 <- rand;
    r1 <- rand;
    r2 <- rand;
    t01 <- (r0 ^ a0 * b1) ^ a1 * b0;
    t02 <- (r1 ^ a0 * b2) ^ a2 * b0;
    t12 <- (r2 ^ a1 * b2) ^ a2 * b1;
    c0 <- a0 * b0 ^ r0 ^ r1;
    c1 <- a1 * b1 ^ t01 ^ r2;
    c2 <- a2 * b2 ^ t02 ^ t12;
}
)",
                            cfg);
    const Verdict& v = rep.procs[0].verdict;
    CHECK(v.kind == Verdict::Kind::Unknown);
    CHECK(v.reason.find("budget") != std::string::npos);
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("exit codes rank incorrect above undecided") {
    std::string mixed = R"(
field 4 0x13;
affine g;
proc ok(a) -> c {
    c <- a;
shares 2;
    c0 <- a0;
    c1 <- a1;
}
proc bad(a) -> c {
    c <- a ^ 1;
shares 2;
    c0 <- a0;
    c1 <- a1;
}
proc open(x) -> y {
    y <- g(x) * x;
shares 2;
    z <- g(x);
    y0 <- z0 * x0;
    y1 <- z1 * x1;
}
)";
    Report rep = run_verify(mixed);
    REQUIRE(rep.procs.size() == 3);
    CHECK(rep.procs[0].verdict.kind == Verdict::Kind::Correct);
    CHECK(rep.procs[1].verdict.kind == Verdict::Kind::Incorrect);
    CHECK(rep.procs[2].verdict.kind == Verdict::Kind::MaybeIncorrect);
    CHECK(rep.exit_code() == 1);
}

TEST_CASE("parallel verification is deterministic and ordered") {
    std::string text = slurp(std::string(kCorpus) + "/masked_inverse.msl");
    Report one = run_verify(text, {}, 1);
    Report four = run_verify(text, {}, 4);
    REQUIRE(one.procs.size() == four.procs.size());
    for (std::size_t i = 0; i < one.procs.size(); ++i) {
        CHECK(one.procs[i].name == four.procs[i].name);
        CHECK(one.procs[i].verdict.kind == four.procs[i].verdict.kind);
        CHECK(one.procs[i].verdict.method == four.procs[i].verdict.method);
        CHECK(one.procs[i].rewrite.steps == four.procs[i].rewrite.steps);
        CHECK(one.procs[i].seed == four.procs[i].seed);
    }
}

TEST_CASE("each procedure draws an independent seed") {
    VerifyConfig cfg;
    Report rep = run_verify(slurp(std::string(kCorpus) + "/masked_inverse.msl"), cfg);
    for (const auto& pr : rep.procs)
        CHECK(pr.seed == (cfg.oracle.seed ^ fnv1a(pr.name)));
}

TEST_CASE("applying a non-affine map to an encoding stays undecided") {
    // share-wise application is only meaningful for affine maps; the
    // verifier reports the problem instead of guessing a semantics
    Report rep = run_verify(R"(
field 4 0x13;
affine cube(x) -> y { y <- x * x * x; }
proc f(x) -> y {
    y <- cube(x);
shares 2;
    y <- cube(x);
}
)");
    REQUIRE(rep.procs.size() == 1);
    const ProcReport& pr = rep.procs[0];
    CHECK(pr.verdict.kind == Verdict::Kind::Unknown);
    CHECK(pr.verdict.reason.find("not known to be affine") !=
          std::string::npos);
    CHECK(rep.exit_code() == 2);
}

TEST_CASE("report text carries the landmark fields") {
    Report rep = run_verify(R"(
proc id2(a) -> c {
    c <- a;
shares 2;
    c0 <- a0;
    c1 <- a1;
}
)");
    std::string text = to_text(rep);
    CHECK(text.find("id2: Correct [trs]") != std::string::npos);
    CHECK(text.find("monomials") != std::string::npos);
    CHECK(text.find("steps") != std::string::npos);
    CHECK(text.find("ms)") != std::string::npos);
}
