// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "maskeq/ast.hpp"

namespace maskeq {

// Parses MSL text into a Program and runs name resolution (duplicate
// definitions, unresolved calls, builtin placement, acyclic call graph).
Program parse(std::string_view text);

} // namespace maskeq
