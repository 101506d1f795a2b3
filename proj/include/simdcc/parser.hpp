#pragma once

#include <string_view>
#include <vector>

#include "simdcc/ast.hpp"
#include "simdcc/lexer.hpp"

namespace simdcc {

/// Recursive-descent parser for the dialect. Stops at the first error.
SyntaxTree parse(const std::vector<Token>& tokens);

inline SyntaxTree parse_source(std::string_view source) { return parse(tokenize(source)); }

}  // namespace simdcc
