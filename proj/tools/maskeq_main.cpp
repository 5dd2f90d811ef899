// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver. Subcommands:
//   verify FILE    prove or refute each masked procedure
//   affine FILE    report the affine constant of every unary map
//   gen KIND       print a generated benchmark gadget
//   selftest       run the shipped corpus and check expected outcomes

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maskeq/affine.hpp"
#include "maskeq/diag.hpp"
#include "maskeq/gadgets.hpp"
#include "maskeq/parser.hpp"
#include "maskeq/preprocess.hpp"
#include "maskeq/smtlib.hpp"
#include "maskeq/symexec.hpp"
#include "maskeq/verify.hpp"

#ifndef MASKEQ_CORPUS_DIR
#define MASKEQ_CORPUS_DIR "corpus"
#endif

namespace {

using json = nlohmann::ordered_json;
using namespace maskeq;

struct CommonOpts {
    std::string file;
    unsigned n = 8;
    std::string poly = "0x11B";
    unsigned trials = 64;
    std::uint64_t step_budget = 10'000'000;
    std::uint64_t oracle_budget = 1ull << 20;
    std::string seed = "0xF15C";
    std::string emit_smt;
    unsigned jobs = 1;
    bool json_out = false;
    bool trace = false;
    bool timings = false;
    bool n_set = false, poly_set = false;
};

std::uint64_t parse_num(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(s, &used, 0);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SemanticError(std::string("cannot parse ") + what + " '" + s +
                            "'");
    }
}

std::string hex(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::uppercase << std::hex << v;
    return os.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SemanticError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void add_field_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--n", o.n, "field width in bits (used when the file has "
                                "no field directive)")
        ->check(CLI::Range(1u, 16u));
    cmd->add_option("--poly", o.poly,
                    "irreducible reduction polynomial, e.g. 0x11B");
}

void add_run_opts(CLI::App* cmd, CommonOpts& o) {
    add_field_opts(cmd, o);
    cmd->add_option("--trials", o.trials, "random assignments before "
                                          "exhaustive enumeration");
    cmd->add_option("--step-budget", o.step_budget,
                    "rewrite step budget per subject");
    cmd->add_option("--oracle-budget", o.oracle_budget,
                    "max evaluations for exhaustive enumeration");
    cmd->add_option("--seed", o.seed, "base RNG seed, e.g. 0xF15C");
    cmd->add_option("--emit-smt", o.emit_smt,
                    "also write SMT-LIB2 scripts into this directory");
    cmd->add_flag("--json", o.json_out, "machine-readable report on stdout");
    cmd->add_flag("--trace", o.trace, "log rewrite rule applications to "
                                      "stderr");
    cmd->add_flag("--timings", o.timings,
                  "include wall-clock times in the report (breaks "
                  "byte-for-byte determinism)");
}

// parse + preprocess with the command-line field applied when the file
// carries no directive
Program load(const CommonOpts& o) {
    Program prog = parse(slurp(o.file));
    std::uint32_t poly =
        static_cast<std::uint32_t>(parse_num(o.poly, "polynomial"));
    if (!prog.field_directive) {
        prog.field_n = o.n;
        prog.field_poly = poly;
    } else if ((o.n_set && prog.field_n != o.n) ||
               (o.poly_set && prog.field_poly != poly)) {
        throw SemanticError("'" + o.file + "' sets field " +
                            std::to_string(prog.field_n) + " " +
                            hex(prog.field_poly) +
                            ", which conflicts with --n/--poly");
    }
    return preprocess(prog);
}

OracleConfig oracle_config(const CommonOpts& o) {
    OracleConfig ocfg;
    ocfg.seed = parse_num(o.seed, "seed");
    ocfg.trials = o.trials;
    ocfg.budget = o.oracle_budget;
    return ocfg;
}

TraceFn make_trace(const CommonOpts& o) {
    if (!o.trace) return nullptr;
    return [](Rule r, const std::string& detail) {
        std::cerr << "  " << rule_name(r) << " " << detail << "\n";
    };
}

// equivalence term of a procedure: original output over share sums, XORed
// with the folded masked output
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

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw SemanticError("cannot write '" + p.string() + "'");
    out << text;
}

void emit_smt_equivalence(const Program& prog, const AffineOutcome& aff,
                          const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const Proc& proc : prog.procs) {
        TermStore st;
        TermId tau = build_tau(st, prog, proc, intern_lambda(st, aff.lambda));
        write_file(std::filesystem::path(dir) / (proc.name + ".smt2"),
                   emit_smtlib_equivalence(st, prog, proc, tau));
    }
}

void emit_smt_affine(const Program& prog, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const AffineDef& def : prog.affine_defs)
        write_file(std::filesystem::path(dir) / (def.name + ".smt2"),
                   emit_smtlib_affine(prog, def));
}

const char* kind_str(AffineResult::Kind k) {
    switch (k) {
    case AffineResult::Kind::Constant: return "constant";
    case AffineResult::Kind::NotAffine: return "not-affine";
    case AffineResult::Kind::AssumedLinear: return "assumed-linear";
    case AffineResult::Kind::Unknown: return "unknown";
    }
    return "?";
}

json affine_json(const AffineOutcome& aff) {
    json arr = json::array();
    for (const auto& [name, r] : aff.results) {
        json e;
        e["name"] = name;
        e["result"] = kind_str(r.kind);
        if (r.kind == AffineResult::Kind::Constant ||
            r.kind == AffineResult::Kind::AssumedLinear)
            e["c"] = r.c;
        e["method"] = r.method;
        if (r.kind == AffineResult::Kind::NotAffine)
            e["witness"] = {{"x1", r.witness.x1}, {"y1", r.witness.y1},
                            {"t1", r.witness.t1}, {"x2", r.witness.x2},
                            {"y2", r.witness.y2}, {"t2", r.witness.t2}};
        if (!r.note.empty()) e["note"] = r.note;
        if (!r.residual.empty()) e["residual"] = r.residual;
        arr.push_back(std::move(e));
    }
    return arr;
}

json stats_json(const AffineOutcome& aff) {
    json s;
    s["rewrite_steps"] = aff.rewrite_stats.steps;
    s["table_builds"] = aff.cache.builds();
    s["oracle_calls"] = aff.oracle_calls;
    s["table_checks"] = aff.table_checks;
    return s;
}

json report_json(const Report& rep, bool timings) {
    json arr = json::array();
    for (const ProcReport& p : rep.procs) {
        json e;
        e["name"] = p.name;
        e["verdict"] = to_string(p.verdict.kind);
        if (!p.verdict.method.empty()) e["method"] = p.verdict.method;
        e["monomials"] = p.normal_form_monomials;
        e["rewrite_steps"] = p.rewrite.steps;
        e["inlined"] = p.inlined_symbols;
        e["oracle_evals"] = p.oracle_evals;
        e["table_builds"] = p.table_builds;
        e["seed"] = p.seed;
        if (p.verdict.kind == Verdict::Kind::Incorrect) {
            json w;
            w["assignment"] = json::object();
            for (const auto& [name, val] : p.verdict.witness.assignment)
                w["assignment"][name] = val;
            w["value"] = p.verdict.witness.value;
            w["reevaluated"] = p.verdict.witness.reevaluated;
            e["witness"] = std::move(w);
        }
        if (!p.verdict.residual.empty()) e["residual"] = p.verdict.residual;
        if (!p.verdict.reason.empty()) e["reason"] = p.verdict.reason;
        if (timings) e["wall_ms"] = p.wall_ms;
        arr.push_back(std::move(e));
    }
    return arr;
}

json header_json(const char* cmd, const CommonOpts& o, const Program& prog) {
    json doc;
    doc["schema"] = "maskeq-report/1";
    doc["command"] = cmd;
    doc["file"] = o.file;
    doc["field"] = {{"n", prog.field_n}, {"poly", hex(prog.field_poly)}};
    return doc;
}

std::string affine_text(const AffineOutcome& aff) {
    std::ostringstream os;
    for (const auto& [name, r] : aff.results) {
        os << name << ": ";
        switch (r.kind) {
        case AffineResult::Kind::Constant:
            os << r.c;
            break;
        case AffineResult::Kind::AssumedLinear:
            os << r.c << " (assumed linear)";
            break;
        case AffineResult::Kind::NotAffine:
            os << "NOT-AFFINE";
            break;
        case AffineResult::Kind::Unknown:
            os << "unknown";
            break;
        }
        if (!r.method.empty()) os << "  [" << r.method << "]";
        os << "\n";
        if (r.kind == AffineResult::Kind::NotAffine)
            os << "  witness: t(" << r.witness.x1 << "," << r.witness.y1
               << ")=" << r.witness.t1 << "  t(" << r.witness.x2 << ","
               << r.witness.y2 << ")=" << r.witness.t2 << "\n";
        if (!r.note.empty()) os << "  note: " << r.note << "\n";
        if (!r.residual.empty()) os << "  residual: " << r.residual << "\n";
    }
    os << "stats: " << aff.rewrite_stats.steps << " rewrite steps, "
       << aff.cache.builds() << " table builds, " << aff.oracle_calls
       << " oracle calls, " << aff.table_checks << " table checks\n";
    return os.str();
}

int run_verify(const CommonOpts& o) {
    Program prog = load(o);
    Field field(prog.field_n, prog.field_poly);
    TermStore st;
    OracleConfig ocfg = oracle_config(o);
    AffineOutcome aff = aff_const_all(st, prog, field, ocfg, o.step_budget);

    VerifyConfig cfg;
    cfg.step_budget = o.step_budget;
    cfg.oracle = ocfg;
    cfg.trace = make_trace(o);
    Report rep = verify_all(prog, aff.lambda, cfg, o.jobs);

    if (!o.emit_smt.empty()) emit_smt_equivalence(prog, aff, o.emit_smt);

    if (o.json_out) {
        json doc = header_json("verify", o, prog);
        doc["affine"] = affine_json(aff);
        doc["procs"] = report_json(rep, o.timings);
        doc["affine_stats"] = stats_json(aff);
        doc["exit"] = rep.exit_code();
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << to_text(rep);
    }
    return rep.exit_code();
}

int run_affine(const CommonOpts& o) {
    Program prog = load(o);
    Field field(prog.field_n, prog.field_poly);
    TermStore st;
    AffineOutcome aff =
        aff_const_all(st, prog, field, oracle_config(o), o.step_budget);

    if (!o.emit_smt.empty()) emit_smt_affine(prog, o.emit_smt);

    int code = 0;
    for (const auto& [name, r] : aff.results)
        if (r.kind == AffineResult::Kind::Unknown) code = 2;

    if (o.json_out) {
        json doc = header_json("affine", o, prog);
        doc["affine"] = affine_json(aff);
        doc["stats"] = stats_json(aff);
        doc["exit"] = code;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << affine_text(aff);
    }
    return code;
}

struct GenOpts {
    std::string kind;
    int order = 1;
    std::string out;
    unsigned n = 8;
    std::string poly = "0x11B";
};

int run_gen(const GenOpts& g) {
    std::string text = gen_gadget(
        g.kind, g.order, g.n,
        static_cast<std::uint32_t>(parse_num(g.poly, "polynomial")));
    if (g.out.empty())
        std::cout << text;
    else
        write_file(g.out, text);
    return 0;
}

// ---- selftest -------------------------------------------------------------

struct SelfTest {
    int failures = 0;
    bool json_out = false;
    json checks = json::array();

    void record(const std::string& name, bool ok, const std::string& detail) {
        if (!ok) ++failures;
        if (json_out) {
            json e;
            e["name"] = name;
            e["ok"] = ok;
            if (!detail.empty()) e["detail"] = detail;
            checks.push_back(std::move(e));
        } else {
            std::cout << (ok ? "ok   - " : "FAIL - ") << name;
            if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
            std::cout << "\n";
        }
    }
};

Program load_path(const std::string& path) {
    return preprocess(parse(slurp(path)));
}

void selftest_verify_correct(SelfTest& t, const std::string& path) {
    std::string name = "verify " + std::filesystem::path(path).filename()
                                       .string();
    try {
        Program prog = load_path(path);
        Field field(prog.field_n, prog.field_poly);
        TermStore st;
        OracleConfig ocfg;
        AffineOutcome aff = aff_const_all(st, prog, field, ocfg);
        VerifyConfig cfg;
        cfg.oracle = ocfg;
        Report rep = verify_all(prog, aff.lambda, cfg);
        for (const ProcReport& p : rep.procs)
            if (p.verdict.kind != Verdict::Kind::Correct) {
                t.record(name, false,
                         p.name + " is " + to_string(p.verdict.kind));
                return;
            }
        t.record(name, true, "");
    } catch (const std::exception& e) {
        t.record(name, false, e.what());
    }
}

void selftest_mutant(SelfTest& t, const std::string& path) {
    std::string name = "mutant " + std::filesystem::path(path).filename()
                                       .string();
    try {
        Program prog = load_path(path);
        Field field(prog.field_n, prog.field_poly);
        TermStore st;
        OracleConfig ocfg;
        AffineOutcome aff = aff_const_all(st, prog, field, ocfg);
        VerifyConfig cfg;
        cfg.oracle = ocfg;
        Report rep = verify_all(prog, aff.lambda, cfg);
        bool found = false;
        for (const ProcReport& p : rep.procs) {
            if (p.verdict.kind != Verdict::Kind::Incorrect) continue;
            found = true;
            if (p.verdict.witness.reevaluated &&
                p.verdict.witness.value == 0) {
                t.record(name, false, p.name + " witness evaluates to 0");
                return;
            }
        }
        t.record(name, found, found ? "" : "no Incorrect verdict");
    } catch (const std::exception& e) {
        t.record(name, false, e.what());
    }
}

void selftest_affine(SelfTest& t, const std::string& path,
                     const std::vector<std::pair<std::string, int>>& expect) {
    // expected constant per symbol; -1 encodes NOT-AFFINE
    std::string name = "affine " + std::filesystem::path(path).filename()
                                       .string();
    try {
        Program prog = load_path(path);
        Field field(prog.field_n, prog.field_poly);
        TermStore st;
        OracleConfig ocfg;
        AffineOutcome aff = aff_const_all(st, prog, field, ocfg);
        for (const auto& [sym, want] : expect) {
            const AffineResult* r = aff.find(sym);
            if (!r) {
                t.record(name, false, "no result for " + sym);
                return;
            }
            if (want < 0) {
                if (r->kind != AffineResult::Kind::NotAffine) {
                    t.record(name, false, sym + " not flagged NOT-AFFINE");
                    return;
                }
            } else if (r->kind != AffineResult::Kind::Constant ||
                       r->c != static_cast<Elem>(want)) {
                t.record(name, false, sym + " constant mismatch");
                return;
            }
        }
        t.record(name, true, "");
    } catch (const std::exception& e) {
        t.record(name, false, e.what());
    }
}

int run_selftest(const std::string& corpus, bool json_out) {
    namespace fs = std::filesystem;
    SelfTest t;
    t.json_out = json_out;

    selftest_verify_correct(t, corpus + "/masked_inverse.msl");
    selftest_affine(t, corpus + "/affine_battery.msl",
                    {{"exp2", 0},
                     {"exp4", 0},
                     {"exp8", 0},
                     {"exp16", 0},
                     {"rotl1", 0},
                     {"rotl2", 0},
                     {"rotl3", 0},
                     {"rotl4", 0},
                     {"af", 99},
                     {"f1", -1},
                     {"f2", 1},
                     {"f3", -1},
                     {"f4", 99}});
    selftest_affine(t, corpus + "/affine_battery_gf16.msl",
                    {{"L1", 0}, {"L3", 0}, {"L5", 0}, {"L7", 0}});

    std::vector<std::string> mutants;
    fs::path mdir = fs::path(corpus) / "mutants";
    if (fs::is_directory(mdir)) {
        for (const auto& e : fs::directory_iterator(mdir))
            if (e.path().extension() == ".msl")
                mutants.push_back(e.path().string());
        std::sort(mutants.begin(), mutants.end());
    }
    if (mutants.empty())
        t.record("mutant corpus", false, "no mutants under " + mdir.string());
    for (const std::string& m : mutants) selftest_mutant(t, m);

    // generated gadgets re-parse and verify
    for (const char* kind :
         {"isw-mult", "refreshm", "refresh-masks", "aes-sbox-inverse"}) {
        std::string name = std::string("gen ") + kind + " d=2";
        try {
            Program prog = preprocess(parse(gen_gadget(kind, 2)));
            Field field(prog.field_n, prog.field_poly);
            TermStore st;
            OracleConfig ocfg;
            AffineOutcome aff = aff_const_all(st, prog, field, ocfg);
            VerifyConfig cfg;
            cfg.oracle = ocfg;
            Report rep = verify_all(prog, aff.lambda, cfg);
            bool ok = true;
            for (const ProcReport& p : rep.procs)
                ok = ok && p.verdict.kind == Verdict::Kind::Correct;
            t.record(name, ok, ok ? "" : "not Correct");
        } catch (const std::exception& e) {
            t.record(name, false, e.what());
        }
    }

    if (json_out) {
        json doc;
        doc["schema"] = "maskeq-report/1";
        doc["command"] = "selftest";
        doc["checks"] = std::move(t.checks);
        doc["failures"] = t.failures;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << (t.failures ? "FAILED (" + std::to_string(t.failures) +
                                       " checks)"
                                 : "all checks passed")
                  << "\n";
    }
    return t.failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maskeq: functional equivalence checking of masked "
                 "finite-field programs"};
    app.require_subcommand(1);

    CommonOpts vo, ao;
    CLI::App* verify = app.add_subcommand(
        "verify", "prove or refute each masked procedure in FILE");
    verify->add_option("file", vo.file, "MSL source file")->required();
    add_run_opts(verify, vo);
    verify->add_option("--jobs", vo.jobs,
                       "verify procedures with this many worker threads");

    CLI::App* affine = app.add_subcommand(
        "affine", "report the affine constant of every unary map in FILE");
    affine->add_option("file", ao.file, "MSL source file")->required();
    add_run_opts(affine, ao);

    GenOpts go;
    CLI::App* gen =
        app.add_subcommand("gen", "print a generated benchmark gadget");
    gen->add_option("kind", go.kind,
                    "isw-mult | refreshm | refresh-masks | aes-sbox-inverse")
        ->required();
    gen->add_option("--order", go.order, "masking order d")->required();
    gen->add_option("--out", go.out, "write to FILE instead of stdout");
    gen->add_option("--n", go.n, "field width in bits")
        ->check(CLI::Range(1u, 16u));
    gen->add_option("--poly", go.poly, "irreducible reduction polynomial");

    std::string corpus = MASKEQ_CORPUS_DIR;
    bool st_json = false;
    CLI::App* selftest = app.add_subcommand(
        "selftest", "run the shipped corpus and check expected outcomes");
    selftest->add_option("--corpus", corpus, "corpus directory");
    selftest->add_flag("--json", st_json, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    vo.n_set = verify->count("--n") > 0;
    vo.poly_set = verify->count("--poly") > 0;
    ao.n_set = affine->count("--n") > 0;
    ao.poly_set = affine->count("--poly") > 0;

    try {
        if (verify->parsed()) return run_verify(vo);
        if (affine->parsed()) return run_affine(ao);
        if (gen->parsed()) return run_gen(go);
        if (selftest->parsed()) return run_selftest(corpus, st_json);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SemanticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
