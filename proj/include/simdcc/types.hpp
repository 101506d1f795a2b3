#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simdcc/ast.hpp"

namespace simdcc {

enum class TypeKind {
  Void,
  Int,
  PtrCP,
  PtrNP,
  Float,
  Double,
  Vector,
  Complex,
  LocalInt,
  Array,
  Record,
  Function,
};

/// The eight kinds that index the promotion and cast tables, in table order.
enum class TableKind { Int, PtrCP, PtrNP, Float, Double, Vector, Complex, LocalInt };
inline constexpr int kTableKinds = 8;
inline constexpr std::array<TableKind, kTableKinds> kAllTableKinds = {
    TableKind::Int,    TableKind::PtrCP,   TableKind::PtrNP,   TableKind::Float,
    TableKind::Double, TableKind::Vector, TableKind::Complex, TableKind::LocalInt,
};

/// Which processor holds a value. Records may occupy both (Mixed) or
/// neither (Empty).
enum class Group { CP, NP, Mixed, Empty };

struct TypeDesc {
  TypeKind kind = TypeKind::Void;
  const TypeDesc* elem = nullptr;  // pointee for pointers, element for arrays
  std::int64_t count = 0;          // arrays
  const RecordInfo* record = nullptr;
  const TypeDesc* result = nullptr;  // functions
  std::vector<const TypeDesc*> params;

  bool is_pointer() const { return kind == TypeKind::PtrCP || kind == TypeKind::PtrNP; }
  bool is_record_pointer() const { return is_pointer() && elem && elem->kind == TypeKind::Record; }
  bool is_scalar() const { return table_kind().has_value(); }
  bool is_np_scalar() const;
  bool is_arithmetic() const;

  /// Table axis for this type, or nothing for arrays, records, functions,
  /// void and pointers to records.
  std::optional<TableKind> table_kind() const;
};

/// Interns types so that structurally equal types share one address.
class TypeTable {
 public:
  TypeTable();
  TypeTable(const TypeTable&) = delete;
  TypeTable& operator=(const TypeTable&) = delete;

  const TypeDesc* void_type() const { return void_; }
  const TypeDesc* scalar(TypeKind kind) const;
  const TypeDesc* scalar(TableKind kind) const;
  const TypeDesc* pointer_to(const TypeDesc* pointee);
  const TypeDesc* array_of(const TypeDesc* elem, std::int64_t count);
  const TypeDesc* record(const RecordInfo* info);
  const TypeDesc* function(const TypeDesc* result, std::vector<const TypeDesc*> params);

 private:
  const TypeDesc* intern(TypeDesc desc);
  std::deque<TypeDesc> storage_;
  const TypeDesc* void_ = nullptr;
};

std::string type_name(const TypeDesc* t);
const char* table_kind_name(TableKind k);

/// Processor group of a type. Throws InternalError for Void and Function.
Group group_of(const TypeDesc& t);
Group group_of(TableKind k);

bool promotion_allowed(TableKind from, TableKind to);
bool cast_allowed(TableKind from, TableKind to);

/// Least kind in the order Int < LocalInt < Float < Double < {Vector, Complex}
/// that is at or above both operands and that both promote to. Nothing when
/// no such kind exists (e.g. vector with complex).
std::optional<TableKind> common_kind(TableKind a, TableKind b);

/// Operand-combination rule for binary operators. Throws TypeError when the
/// operands have no common promotion target.
const TypeDesc* binary_result_type(TypeTable& types, const std::string& op, const TypeDesc* lhs,
                                   const TypeDesc* rhs, SourceLoc loc = {});

// ---- program entities -------------------------------------------------------

enum class SymbolKind { Global, Local, Param, Function, Neighbor };

struct Symbol {
  SymbolKind kind = SymbolKind::Global;
  std::string name;
  const TypeDesc* type = nullptr;
  bool is_const = false;
  std::optional<std::int64_t> const_value;
  SourceLoc loc;
  FunctionInfo* function = nullptr;  // Function symbols; owner for locals/params
  int axis = 0;                      // Neighbor constants
  int sign = 0;
  std::optional<std::string> string_value;  // `const char *name = "...";` file names
};

struct FieldInfo {
  std::string name;
  const TypeDesc* type = nullptr;
  Access access = Access::Public;
  const RecordInfo* owner = nullptr;
  SourceLoc loc;
};

struct RecordInfo {
  std::string name;
  RecordKind kind = RecordKind::Struct;
  const RecordInfo* base = nullptr;
  std::vector<std::unique_ptr<FieldInfo>> fields;  // own fields, declaration order
  std::map<std::string, FunctionInfo*> methods;
  std::map<std::string, Access> method_access;
  std::vector<FunctionInfo*> ctors;
  SourceLoc loc;

  const FieldInfo* find_field(const std::string& name) const;
  FunctionInfo* find_method(const std::string& name) const;
  bool derives_from(const RecordInfo* other) const;
  /// Base fields first, then own fields.
  std::vector<const FieldInfo*> all_fields() const;
};

struct FunctionInfo {
  std::string name;
  std::string qualified_name;  // `Class::method` for members
  const TypeDesc* result = nullptr;
  std::vector<Symbol*> params;  // excludes the hidden `this`
  Symbol* this_param = nullptr;
  std::vector<Symbol*> locals;  // every block-scoped variable and temporary
  const RecordInfo* owner = nullptr;
  bool is_ctor = false;
  bool defined = false;
  const Stmt* body = nullptr;
  const CtorDef* ctor_def = nullptr;
  SourceLoc loc;
};

/// The syntax tree with every expression typed and every implicit promotion
/// made explicit, plus the symbol, record and function tables it refers to.
struct TypedProgram {
  SyntaxTree tree;
  std::unique_ptr<TypeTable> types = std::make_unique<TypeTable>();
  std::deque<Symbol> symbols;
  std::deque<RecordInfo> records;
  std::deque<FunctionInfo> functions;
  std::vector<Symbol*> globals;  // declaration order
  std::vector<Symbol*> neighbor_constants;
  std::vector<const RecordInfo*> record_order;
  std::vector<FunctionInfo*> function_order;
  FunctionInfo* main = nullptr;
  FunctionInfo* init = nullptr;  // runs global initializers and constructors
};

}  // namespace simdcc
