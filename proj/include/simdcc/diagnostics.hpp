#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace simdcc {

struct SourceLoc {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

enum class ErrorKind { Lex, Parse, Type, Lower, Capacity, Config, Internal };

/// Base of every diagnostic raised while turning source text into IR.
/// `what()` holds the bare message; use format() for the
/// `file:line:col: error: message` rendering.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrorKind kind, SourceLoc loc, std::string message)
      : std::runtime_error(message), kind_(kind), loc_(loc) {}

  ErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }
  std::string message() const { return what(); }

  std::string format(std::string_view file) const;

 private:
  ErrorKind kind_;
  SourceLoc loc_;
};

class LexError : public CompileError {
 public:
  LexError(SourceLoc loc, std::string message)
      : CompileError(ErrorKind::Lex, loc, std::move(message)) {}
};

class ParseError : public CompileError {
 public:
  ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found);
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

class TypeError : public CompileError {
 public:
  TypeError(SourceLoc loc, std::string message)
      : CompileError(ErrorKind::Type, loc, std::move(message)) {}
};

class LowerError : public CompileError {
 public:
  LowerError(SourceLoc loc, std::string message)
      : CompileError(ErrorKind::Lower, loc, std::move(message)) {}
};

class CapacityError : public CompileError {
 public:
  CapacityError(std::string message)
      : CompileError(ErrorKind::Capacity, {}, std::move(message)) {}
};

/// Raised when a program and a run configuration are incompatible
/// (topology rank vs. neighbor constants, memory sizes).
class ConfigError : public CompileError {
 public:
  ConfigError(std::string message)
      : CompileError(ErrorKind::Config, {}, std::move(message)) {}
};

class InternalError : public CompileError {
 public:
  InternalError(std::string message)
      : CompileError(ErrorKind::Internal, {}, std::move(message)) {}
};

}  // namespace simdcc
