#include "simdcc/driver.hpp"

#include "simdcc/lower.hpp"
#include "simdcc/parser.hpp"
#include "simdcc/semantics.hpp"

namespace simdcc {

Compilation compile_source(std::string_view source, const MemoryConfig& memory) {
  Compilation c{typecheck_program(parse_source(source)), {}, {}};
  c.layout = compute_layout(c.program, memory);
  c.ir = lower_program(c.program, c.layout);
  return c;
}

}  // namespace simdcc
