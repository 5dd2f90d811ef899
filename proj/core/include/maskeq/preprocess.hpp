// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "maskeq/ast.hpp"

namespace maskeq {

struct CallGraph {
    std::vector<std::string> nodes; // definition order
    std::map<std::string, std::vector<std::string>> edges; // caller -> callees

    // callees before callers; throws SemanticError on a cycle
    std::vector<std::string> topo_order() const;
};

CallGraph build_call_graph(const Program& prog);

// Inlines procedure calls bottom-up with fresh renaming, unrolls loops,
// eliminates constant-guarded conditionals and drops assume/assert markers.
// Affine applications are left in place (they are expanded lazily during
// rewriting). The result contains straight-line assign/rand bodies only.
Program preprocess(const Program& prog);

} // namespace maskeq
