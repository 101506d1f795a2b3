#pragma once

#include <string_view>

#include "simdcc/ir.hpp"
#include "simdcc/layout.hpp"
#include "simdcc/types.hpp"

namespace simdcc {

/// Everything produced from one source text. `layout` points into `program`.
struct Compilation {
  TypedProgram program;
  LayoutPlan layout;
  IrProgram ir;
};

/// tokenize -> parse -> typecheck -> layout -> lower. Throws the first
/// CompileError.
Compilation compile_source(std::string_view source, const MemoryConfig& memory = {});

}  // namespace simdcc
