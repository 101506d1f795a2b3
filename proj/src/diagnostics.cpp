#include "simdcc/diagnostics.hpp"

namespace simdcc {

std::string CompileError::format(std::string_view file) const {
  std::string out(file);
  if (loc_.line > 0) out += ":" + std::to_string(loc_.line) + ":" + std::to_string(loc_.column);
  out += ": error: ";
  out += what();
  return out;
}

namespace {
std::string describe_parse_error(const std::vector<std::string>& expected, const std::string& found) {
  std::string msg = "expected ";
  for (size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  msg += " but found " + found;
  return msg;
}
}  // namespace

ParseError::ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found)
    : CompileError(ErrorKind::Parse, loc, describe_parse_error(expected, found)),
      expected_(std::move(expected)) {}

}  // namespace simdcc
