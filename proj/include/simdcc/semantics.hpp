#pragma once

#include <string>
#include <vector>

#include "simdcc/ast.hpp"
#include "simdcc/types.hpp"

namespace simdcc {

/// Resolves names, types every expression, materializes implicit
/// promotions as Convert nodes and enforces the CP/NP rules. Throws
/// TypeError on the first violation.
TypedProgram typecheck_program(SyntaxTree tree);

/// Re-walks a typed program and reports every violated invariant: Convert
/// nodes outside the promotion table, Cast nodes outside the cast table,
/// and if/for/while/where conditions in the wrong processor group. Empty
/// when the program is well formed.
std::vector<std::string> typed_invariant_violations(const TypedProgram& program);

/// Built-in identifiers that look like calls.
Intrinsic intrinsic_for(const std::string& name);

}  // namespace simdcc
