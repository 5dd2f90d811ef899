// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "maskeq/affine.hpp"
#include "maskeq/field.hpp"
#include "maskeq/gadgets.hpp"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/rewrite.hpp"
#include "maskeq/verify.hpp"

using namespace maskeq;

static void BM_FieldMul(benchmark::State& state) {
    Field f(8, 0x11B);
    Elem x = 3, y = 7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(x = f.mul(x, y));
        y ^= 1;
    }
}
BENCHMARK(BM_FieldMul);

static void BM_FieldMulTable(benchmark::State& state) {
    // full multiplication table, the oracle's hot path
    Field f(4, 0x13);
    for (auto _ : state) {
        Elem acc = 0;
        for (Elem a = 0; a < 16; ++a)
            for (Elem b = 0; b < 16; ++b) acc ^= f.mul(a, b);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_FieldMulTable);

static void BM_NormalizeSquareSum(benchmark::State& state) {
    // (x1 ^ ... ^ xk)^2 expands to k^2 products that collapse to k squares
    Field f(8, 0x11B);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        TermStore st;
        RewriteCtx ctx(st, f);
        TermId sum = st.var("x1");
        for (int i = 2; i <= k; ++i)
            sum = st.add(sum, st.var("x" + std::to_string(i)));
        Polynomial p = normalize(st.mul(sum, sum), ctx);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_NormalizeSquareSum)->Arg(4)->Arg(16)->Arg(64);

static void BM_VerifyIswMult(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    Program prog = preprocess(parse(gen_isw_mult(d)));
    Field f(prog.field_n, prog.field_poly);
    for (auto _ : state) {
        VerifyConfig cfg;
        Verdict v = verify_proc(prog, prog.procs[0], {}, cfg);
        if (v.kind != Verdict::Kind::Correct) state.SkipWithError("not Correct");
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_VerifyIswMult)->Arg(1)->Arg(5)->Arg(10)->Arg(20);

static void BM_VerifySbox(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    Program prog = preprocess(parse(gen_aes_sbox_inverse(d)));
    Field f(prog.field_n, prog.field_poly);
    for (auto _ : state) {
        TermStore st;
        OracleConfig ocfg;
        AffineOutcome aff = aff_const_all(st, prog, f, ocfg);
        VerifyConfig cfg;
        cfg.oracle = ocfg;
        Report rep = verify_all(prog, aff.lambda, cfg);
        if (rep.exit_code() != 0) state.SkipWithError("not Correct");
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(BM_VerifySbox)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
