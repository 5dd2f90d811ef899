// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include <map>
#include <string>

#include "doctest.h"
#include "maskeq/affine.hpp"
#include "maskeq/gadgets.hpp"
#include "maskeq/oracle.hpp"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/verify.hpp"
#include "testutil.hpp"

using namespace maskeq;

namespace {

int count_rands(const std::vector<Stmt>& body) {
    int n = 0;
    for (const Stmt& s : body)
        if (s.kind == Stmt::Kind::Rand) ++n;
    return n;
}

Report run(const std::string& text) {
    Program prog = preprocess(parse(text));
    Field field(prog.field_n, prog.field_poly);
    TermStore st;
    AffineOutcome aff = aff_const_all(st, prog, field, OracleConfig{});
    return verify_all(prog, aff.lambda, VerifyConfig{}, 1);
}

void expect_all_correct(const std::string& text) {
    Report rep = run(text);
    REQUIRE(!rep.procs.empty());
    for (const ProcReport& pr : rep.procs) {
        CAPTURE(pr.name);
        CHECK(pr.verdict.kind == Verdict::Kind::Correct);
    }
    CHECK(rep.exit_code() == 0);
}

} // namespace

TEST_CASE("order zero collapses to the unmasked statement") {
    Program isw = preprocess(parse(gen_isw_mult(0)));
    const Proc* p = isw.find_proc("sec_mult");
    REQUIRE(p);
    CHECK(p->shares == 1);
    CHECK(count_rands(p->masked) == 0);
    CHECK(p->masked.size() == 1);

    Program rfm = preprocess(parse(gen_refreshm(0)));
    CHECK(count_rands(rfm.find_proc("refreshm")->masked) == 0);
    Program rm = preprocess(parse(gen_refresh_masks(0)));
    CHECK(count_rands(rm.find_proc("refresh_masks")->masked) == 0);
}

TEST_CASE("randomness budgets scale with the order") {
    for (int d : {1, 2, 3, 5}) {
        CAPTURE(d);
        Program isw = preprocess(parse(gen_isw_mult(d)));
        CHECK(count_rands(isw.find_proc("sec_mult")->masked) ==
              d * (d + 1) / 2);
        Program rfm = preprocess(parse(gen_refreshm(d)));
        CHECK(count_rands(rfm.find_proc("refreshm")->masked) == d);
        Program rm = preprocess(parse(gen_refresh_masks(d)));
        CHECK(count_rands(rm.find_proc("refresh_masks")->masked) == 1);
    }
}

TEST_CASE("the inversion program carries its helpers") {
    std::string text = gen_aes_sbox_inverse(1);
    Program prog = preprocess(parse(text));
    CHECK(prog.find_proc("sec_mult"));
    CHECK(prog.find_proc("refreshm"));
    CHECK(prog.find_proc("sec_exp254"));
    CHECK(prog.find_affine_def("exp2"));
    CHECK(prog.find_affine_def("exp4"));
    CHECK(prog.find_affine_def("exp16"));
}

TEST_CASE("the unmasked inversion chain computes x^254") {
    Program prog = preprocess(parse(gen_aes_sbox_inverse(1)));
    Field field(prog.field_n, prog.field_poly);
    const Proc* p = prog.find_proc("sec_exp254");
    REQUIRE(p);
    InterpCtx ctx{field, &prog, nullptr, {}, nullptr, nullptr};
    for (unsigned v = 0; v < field.size(); ++v) {
        std::map<std::string, Elem> env{{"x", static_cast<Elem>(v)}};
        interp_block(p->orig, env, ctx);
        Elem y = env.at("y");
        CHECK(y == field.pow(static_cast<Elem>(v), 254));
        if (v != 0) CHECK(field.mul(static_cast<Elem>(v), y) == 1);
        if (v == 0) CHECK(y == 0);
    }
}

TEST_CASE("generated gadgets verify across orders") {
    for (int d : {0, 1, 2, 3, 10}) {
        CAPTURE(d);
        expect_all_correct(gen_isw_mult(d));
    }
    for (int d : {0, 1, 3, 10}) {
        CAPTURE(d);
        expect_all_correct(gen_refreshm(d));
    }
    for (int d : {0, 1, 2, 10, 20}) {
        CAPTURE(d);
        expect_all_correct(gen_refresh_masks(d));
    }
    for (int d : {0, 1, 2}) {
        CAPTURE(d);
        expect_all_correct(gen_aes_sbox_inverse(d));
    }
}

TEST_CASE("small orders agree with direct decode-and-compare") {
    for (const char* kind : {"refresh-masks", "refreshm"}) {
        CAPTURE(kind);
        Program prog = preprocess(parse(gen_gadget(kind, 1, 4, 0x13)));
        Field field(prog.field_n, prog.field_poly);
        CHECK(test::decode_agrees(prog, prog.procs.at(0), field));
    }
    Program zero = preprocess(parse(gen_isw_mult(0, 4, 0x13)));
    CHECK(test::decode_agrees(zero, zero.procs.at(0), Field::present()));
    Program one = preprocess(parse(gen_isw_mult(1, 4, 0x13)));
    CHECK(test::decode_agrees(one, one.procs.at(0), Field::present()));
}

TEST_CASE("field arguments flow into the directive") {
    std::string text = gen_isw_mult(1, 4, 0x13);
    CHECK(text.find("field 4 0x13;") != std::string::npos);
    CHECK(gen_refreshm(2).find("field 8 0x11B;") != std::string::npos);
    Program prog = preprocess(parse(text));
    CHECK(prog.field_n == 4);
    CHECK(prog.field_poly == 0x13);
}

TEST_CASE("dispatch matches the direct generators") {
    CHECK(gen_gadget("isw-mult", 3) == gen_isw_mult(3));
    CHECK(gen_gadget("refreshm", 3) == gen_refreshm(3));
    CHECK(gen_gadget("refresh-masks", 3) == gen_refresh_masks(3));
    CHECK(gen_gadget("aes-sbox-inverse", 1) == gen_aes_sbox_inverse(1));
}

TEST_CASE("orders outside the supported range are rejected") {
    CHECK_THROWS_WITH_AS(gen_isw_mult(-1),
                         doctest::Contains("between 0 and 200"),
                         SemanticError);
    CHECK_THROWS_WITH_AS(gen_refreshm(201),
                         doctest::Contains("between 0 and 200"),
                         SemanticError);
    CHECK_THROWS_WITH_AS(gen_gadget("nope", 1),
                         doctest::Contains("unknown gadget kind"),
                         SemanticError);
}
