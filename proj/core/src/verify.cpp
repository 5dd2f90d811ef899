// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/verify.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include "maskeq/diag.hpp"
#include "maskeq/symexec.hpp"

namespace maskeq {

const char* to_string(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::Correct: return "Correct";
    case Verdict::Kind::Incorrect: return "Incorrect";
    case Verdict::Kind::MaybeIncorrect: return "MaybeIncorrect";
    case Verdict::Kind::Unknown: return "Unknown";
    }
    return "?";
}

int Report::exit_code() const {
    bool maybe = false;
    for (const ProcReport& p : procs) {
        if (p.verdict.kind == Verdict::Kind::Incorrect) return 1;
        if (p.verdict.kind != Verdict::Kind::Correct) maybe = true;
    }
    return maybe ? 2 : 0;
}

namespace {

// the symbol of a deepest-nested application that is still inlinable
std::optional<std::string> innermost_defined_sym(
    TermStore& st, const Program& prog, TermId t,
    const std::set<std::string>& inlined) {
    std::optional<std::string> best;
    std::map<TermId, bool> memo;
    std::function<bool(TermId)> rec = [&](TermId u) -> bool {
        auto hit = memo.find(u);
        if (hit != memo.end()) return hit->second;
        const TermNode node = st.at(u);
        bool has = false;
        switch (node.kind) {
        case TermKind::Const:
        case TermKind::Var:
            break;
        case TermKind::Add:
        case TermKind::Mul: {
            bool l = rec(node.a);
            bool r = rec(node.b);
            has = l || r;
            break;
        }
        case TermKind::App: {
            bool inside = rec(node.b);
            const std::string& nm = st.sym_name(node.a);
            const AffineDef* def = prog.find_affine_def(nm);
            bool cand = def && !def->has_builtins && !inlined.count(nm);
            if (cand && !inside && !best) best = nm;
            has = inside || cand;
            break;
        }
        }
        memo.emplace(u, has);
        return has;
    };
    rec(t);
    return best;
}

struct ProcTask {
    TermStore st;
    Field field;
    const Program& prog;
    const Proc& proc;
    const VerifyConfig& cfg;
    ProcReport* report;
    RewriteCtx ctx;
    TableCache cache;
    TermId tau0 = 0;
    OracleConfig ocfg;

    ProcTask(const Program& p, const Proc& pr,
             const std::map<std::string, Elem>& lambda,
             const VerifyConfig& c, ProcReport* rep)
        : field(p.field_n, p.field_poly), prog(p), proc(pr), cfg(c),
          report(rep), ctx(st, field) {
        ctx.lambda = intern_lambda(st, lambda);
        ctx.budget = cfg.step_budget;
        ctx.trace = cfg.trace;
        ocfg = cfg.oracle;
        ocfg.seed ^= fnv1a(proc.name);
    }

    bool iota_for(const std::set<SymId>& syms, Tables& iota) {
        for (SymId s : syms) {
            const std::vector<Elem>* tbl =
                cache.get(st.sym_name(s), prog, field);
            if (!tbl) return false;
            iota[s] = *tbl;
        }
        return true;
    }

    // fills the assignment with every variable of the uninlined term and
    // re-evaluates there whenever the needed tables exist
    Verdict incorrect(const std::map<VarId, Elem>& sigma, Elem fallback,
                      const std::string& method) {
        Verdict v;
        v.kind = Verdict::Kind::Incorrect;
        v.method = method;
        std::set<VarId> vars;
        st.vars_of(tau0, vars);
        std::map<VarId, Elem> full;
        for (VarId var : vars) {
            auto it = sigma.find(var);
            full[var] = it == sigma.end() ? 0 : it->second;
        }
        for (const auto& [var, val] : full)
            v.witness.assignment[st.var_name(var)] = val;
        v.witness.value = fallback;
        std::set<SymId> syms;
        st.syms_of(tau0, syms);
        Tables iota;
        if (iota_for(syms, iota)) {
            v.witness.value = eval(st, tau0, field, full, iota);
            v.witness.reevaluated = true;
        }
        return v;
    }

    Verdict run() {
        Verdict v;
        std::vector<TermId> shares;
        TermId folded = 0;
        TermId xi = 0;
        try {
            xi = exec_origin(st, prog, proc);
            shares = exec_masked(st, prog, proc, ctx.lambda);
            folded = xor_fold(st, shares);
        } catch (const SemanticError& e) {
            v.kind = Verdict::Kind::Unknown;
            v.reason = e.what();
            return v;
        }
        std::map<VarId, TermId> to_share_sum;
        for (const std::string& in : proc.inputs) {
            TermId sum = st.var(in + "0");
            for (int i = 1; i < proc.shares; ++i)
                sum = st.add(sum, st.var(in + std::to_string(i)));
            to_share_sum[st.var_id(in)] = sum;
        }
        tau0 = st.add(st.substitute(xi, to_share_sum), folded);

        TermId tau = tau0;
        std::set<std::string> inlined;
        std::optional<Polynomial> residual;
        std::string norm_note;
        for (;;) {
            residual.reset();
            try {
                Polynomial p = normalize(tau, ctx);
                if (report) report->normal_form_monomials = p.monomials.size();
                if (p.is_zero()) {
                    v.kind = Verdict::Kind::Correct;
                    v.method = "trs";
                    return v;
                }
                if (p.is_const())
                    return incorrect({}, p.const_value(), "trs");
                residual = std::move(p);
            } catch (const BudgetError& e) {
                v.kind = Verdict::Kind::Unknown;
                v.reason = e.what();
                return v;
            } catch (const SemanticError& e) {
                norm_note = e.what();
            }
            auto next = innermost_defined_sym(st, prog, tau, inlined);
            if (!next) break;
            tau = inline_affine(st, prog, tau, *next);
            inlined.insert(*next);
            if (report) report->inlined_symbols = inlined.size();
        }
        if (!residual) {
            v.kind = Verdict::Kind::Unknown;
            v.reason = norm_note.empty() ? "normalization failed" : norm_note;
            return v;
        }

        std::set<SymId> syms;
        syms_of_poly(st, *residual, syms);
        Tables iota;
        if (!iota_for(syms, iota)) {
            v.kind = Verdict::Kind::MaybeIncorrect;
            v.reason = "uninterpreted symbols in residual";
            v.residual = to_string(st, *residual);
            return v;
        }

        OracleResult smp = sample_check_zero(st, *residual, field, iota, ocfg);
        if (report) report->oracle_evals += smp.evals;
        if (smp.kind == OracleResult::Kind::Nonzero) {
            Elem value = eval_poly(st, *residual, field, smp.witness, iota);
            return incorrect(smp.witness, value, "testing");
        }

        try {
            OracleResult exh =
                exhaustive_check_zero(st, *residual, field, iota, ocfg);
            if (report) report->oracle_evals += exh.evals;
            if (exh.kind == OracleResult::Kind::Nonzero) {
                Elem value =
                    eval_poly(st, *residual, field, exh.witness, iota);
                return incorrect(exh.witness, value, "oracle");
            }
            v.kind = Verdict::Kind::Correct;
            v.method = "oracle";
            return v;
        } catch (const BudgetError&) {
            v.kind = Verdict::Kind::MaybeIncorrect;
            v.reason = "oracle budget exceeded";
            v.residual = to_string(st, *residual);
            return v;
        }
    }
};

} // namespace

Verdict verify_proc(const Program& prog, const Proc& proc,
                    const std::map<std::string, Elem>& lambda,
                    const VerifyConfig& cfg, ProcReport* report) {
    auto start = std::chrono::steady_clock::now();
    ProcTask task(prog, proc, lambda, cfg, report);
    Verdict v = task.run();
    if (report) {
        report->name = proc.name;
        report->verdict = v;
        report->rewrite = task.ctx.stats;
        report->table_builds = task.cache.builds();
        report->seed = task.ocfg.seed;
        report->wall_ms =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - start)
                .count();
    }
    return v;
}

Report verify_all(const Program& prog,
                  const std::map<std::string, Elem>& lambda,
                  const VerifyConfig& cfg, unsigned jobs) {
    Report rep;
    rep.procs.resize(prog.procs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= prog.procs.size()) break;
            ProcReport pr;
            verify_proc(prog, prog.procs[i], lambda, cfg, &pr);
            rep.procs[i] = std::move(pr);
        }
    };
    if (jobs <= 1 || prog.procs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        unsigned count = std::min<std::size_t>(jobs, prog.procs.size());
        pool.reserve(count);
        for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rep;
}

std::string to_text(const Report& report) {
    std::ostringstream os;
    for (const ProcReport& p : report.procs) {
        os << p.name << ": " << to_string(p.verdict.kind);
        if (!p.verdict.method.empty()) os << " [" << p.verdict.method << "]";
        os << " (" << p.normal_form_monomials << " monomials, "
           << p.rewrite.steps << " steps";
        if (p.inlined_symbols) os << ", " << p.inlined_symbols << " inlined";
        if (p.oracle_evals) os << ", " << p.oracle_evals << " oracle evals";
        os << ", " << p.wall_ms << " ms)\n";
        if (p.verdict.kind == Verdict::Kind::Incorrect) {
            os << "  witness:";
            for (const auto& [name, val] : p.verdict.witness.assignment)
                os << " " << name << "=" << val;
            os << " -> " << p.verdict.witness.value;
            if (p.verdict.witness.reevaluated) os << " (re-evaluated)";
            os << "\n";
        }
        if (!p.verdict.residual.empty())
            os << "  residual: " << p.verdict.residual << "\n";
        if (!p.verdict.reason.empty())
            os << "  reason: " << p.verdict.reason << "\n";
    }
    return os.str();
}

} // namespace maskeq
