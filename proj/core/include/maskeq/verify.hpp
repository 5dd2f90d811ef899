// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "maskeq/affine.hpp"
#include "maskeq/oracle.hpp"
#include "maskeq/rewrite.hpp"

namespace maskeq {

struct Witness {
    std::map<std::string, Elem> assignment; // input shares and randoms
    Elem value = 0;                         // the equivalence term there
    bool reevaluated = false; // confirmed against the uninlined term
};

struct Verdict {
    enum class Kind { Correct, Incorrect, MaybeIncorrect, Unknown };

    Kind kind = Kind::Unknown;
    std::string method;   // "trs", "testing", "oracle"
    Witness witness;      // Incorrect
    std::string residual; // MaybeIncorrect: pretty-printed leftover
    std::string reason;   // MaybeIncorrect / Unknown diagnostics
};

const char* to_string(Verdict::Kind k);

struct VerifyConfig {
    std::uint64_t step_budget = 10'000'000;
    OracleConfig oracle; // seed is a base, xored with a per-proc hash
    TraceFn trace;
};

struct ProcReport {
    std::string name;
    Verdict verdict;
    std::size_t normal_form_monomials = 0;
    std::size_t inlined_symbols = 0;
    RewriteStats rewrite;
    std::uint64_t oracle_evals = 0;
    std::uint64_t table_builds = 0;
    std::uint64_t seed = 0; // effective per-proc seed
    double wall_ms = 0;
};

struct Report {
    std::vector<ProcReport> procs;

    // 0 when everything is Correct, 1 on any Incorrect, else 2 when some
    // verdict is MaybeIncorrect or Unknown
    int exit_code() const;
};

// Decides one procedure: builds the equivalence term (original output with
// every input replaced by the XOR of its shares, XORed with the folded
// masked outputs), then loops normalize / inline innermost / random test /
// exhaustive enumeration.
Verdict verify_proc(const Program& prog, const Proc& proc,
                    const std::map<std::string, Elem>& lambda,
                    const VerifyConfig& cfg, ProcReport* report = nullptr);

Report verify_all(const Program& prog,
                  const std::map<std::string, Elem>& lambda,
                  const VerifyConfig& cfg, unsigned jobs = 1);

std::string to_text(const Report& report);

} // namespace maskeq
