#pragma once

#include "simdcc/ir.hpp"
#include "simdcc/layout.hpp"
#include "simdcc/types.hpp"

namespace simdcc {

IrProgram lower_program(const TypedProgram& program, const LayoutPlan& plan);

struct NeighborConstant {
  int axis = 0;
  int sign = 1;
  std::int64_t value = 0;
};

/// value = (2*axis + (sign < 0 ? 2 : 1)) * np_words. Throws ConfigError when
/// the axis does not exist in a topology of `rank` dimensions, when a named
/// constant (XPLUS_NP...) is used with rank > 3, or when the value does not
/// fit a CP word.
NeighborConstant neighbor_constant(int axis, int sign, std::int64_t np_words, int rank, bool named = false);

}  // namespace simdcc
