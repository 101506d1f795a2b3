#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simdcc/diagnostics.hpp"

namespace simdcc {

struct TypeDesc;
struct Symbol;
struct FunctionInfo;
struct RecordInfo;
struct FieldInfo;

/// A type as written: base name plus pointer stars. `base` is a keyword
/// spelling (`float`, `localint`, ...) or a typedef/record name.
struct TypeSpec {
  bool is_const = false;
  std::string base;
  int pointer_depth = 0;
  SourceLoc loc;
};

enum class ExprKind {
  IntLit,
  FloatLit,
  StringLit,
  Name,
  This,
  Unary,     // op: "-", "+", "!", "~"
  AddrOf,
  Deref,
  Binary,    // op: arithmetic, comparison, logical, bitwise
  Assign,
  CompoundAssign,  // op: the arithmetic operator without '='
  IncDec,    // op: "++"/"--", `prefix` selects the form
  Conditional,
  Call,      // args[0] is the callee (Name or Member), rest are arguments
  Index,
  Member,    // args[0] is the object; `arrow` selects "->"
  Cast,
  // Inserted by semantic analysis only.
  Convert,   // implicit promotion; `broadcast` when CP -> NP
  Decay,     // array -> pointer to first element
};

enum class Intrinsic {
  None,
  LocalOffset,
  Any,
  All,
  NoneOf,
  DistributedLoad,
  DistributedStore,
  NeighborNp,
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  std::string op;
  std::string name;  // Name, Member, StringLit (unquoted contents)
  std::int64_t int_value = 0;
  double float_value = 0.0;
  bool float_suffix = false;  // `1.0f`
  bool prefix = false;
  bool arrow = false;
  std::optional<TypeSpec> cast_type;
  std::vector<std::unique_ptr<Expr>> args;

  // Semantic annotations.
  const TypeDesc* type = nullptr;
  const TypeDesc* operand_type = nullptr;   // Binary/CompoundAssign: type the operation runs in
  const Symbol* symbol = nullptr;           // Name
  const FieldInfo* field = nullptr;         // Member on a data field
  const FunctionInfo* callee = nullptr;     // Call of a user function/method
  Intrinsic intrinsic = Intrinsic::None;    // Call of a built-in
  bool lvalue = false;
  bool broadcast = false;
  int neighbor_axis = -1;                   // NEIGHBOR_NP(axis, sign)
  int neighbor_sign = 0;

  static std::unique_ptr<Expr> make(ExprKind kind, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->loc = loc;
    return e;
  }
};

using ExprPtr = std::unique_ptr<Expr>;

struct Declarator {
  int pointer_depth = 0;  // stars written before the name
  std::string name;
  SourceLoc loc;
  std::vector<ExprPtr> dims;
  ExprPtr init;
  bool has_ctor_args = false;
  std::vector<ExprPtr> ctor_args;
  const Symbol* symbol = nullptr;
  const FunctionInfo* ctor = nullptr;       // constructor to run, if any
  const Symbol* loop_temp = nullptr;        // counter for constructing arrays
};

struct VarDecl {
  TypeSpec type;
  std::vector<Declarator> declarators;
  SourceLoc loc;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind { Expr, Block, If, Where, For, While, Return, Decl, Empty };

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  SourceLoc loc;
  ExprPtr expr;                 // expression / condition / return value
  std::vector<StmtPtr> body;    // Block
  StmtPtr then_branch;          // If/Where/For/While body
  StmtPtr else_branch;          // else / elsewhere
  StmtPtr init;                 // For
  ExprPtr step;                 // For
  std::unique_ptr<VarDecl> decl;

  static StmtPtr make(StmtKind kind, SourceLoc loc) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->loc = loc;
    return s;
  }
};

struct Param {
  TypeSpec type;
  std::string name;
  SourceLoc loc;
};

struct FuncDef {
  TypeSpec result;
  std::string name;
  std::vector<Param> params;
  StmtPtr body;  // null for a prototype
  SourceLoc loc;
  FunctionInfo* info = nullptr;
};

struct MemberInit {
  std::string name;
  SourceLoc loc;
  std::vector<ExprPtr> args;
  const FieldInfo* field = nullptr;
  const FunctionInfo* base_ctor = nullptr;
};

struct CtorDef {
  std::string name;
  std::vector<Param> params;
  std::vector<MemberInit> inits;
  StmtPtr body;
  SourceLoc loc;
  FunctionInfo* info = nullptr;
};

enum class RecordKind { Struct, Class, Union };
enum class Access { Public, Private };

struct AccessSpec {
  Access access;
  SourceLoc loc;
};

using Member = std::variant<AccessSpec, VarDecl, FuncDef, CtorDef>;

struct RecordDef {
  RecordKind kind = RecordKind::Struct;
  std::string name;
  std::optional<std::string> base;
  bool base_public = false;
  std::vector<Member> members;
  SourceLoc loc;
  RecordInfo* info = nullptr;
};

struct TypedefDecl {
  TypeSpec type;
  std::string name;
  std::vector<ExprPtr> dims;
  SourceLoc loc;
};

using TopLevel = std::variant<VarDecl, TypedefDecl, RecordDef, FuncDef>;

struct SyntaxTree {
  std::vector<TopLevel> items;
};

/// Renders a tree back to compilable source. Binary expressions are fully
/// parenthesized so that re-parsing yields the same structure.
std::string print_source(const SyntaxTree& tree);

/// Location-free S-expression of the tree; two trees are structurally equal
/// iff their dumps are equal.
std::string dump_tree(const SyntaxTree& tree);

}  // namespace simdcc
