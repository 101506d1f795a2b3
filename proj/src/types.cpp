#include "simdcc/types.hpp"

#include <algorithm>

namespace simdcc {

namespace {

constexpr bool Y = true;
constexpr bool N = false;

// Row = source kind, column = destination kind, both in TableKind order:
// int, CP pointer, NP pointer, float, double, vector, complex, localint.
constexpr bool kPromotions[kTableKinds][kTableKinds] = {
    /* int      */ {Y, Y, Y, Y, Y, Y, Y, Y},
    /* CP ptr   */ {Y, Y, Y, N, N, N, N, N},
    /* NP ptr   */ {Y, Y, Y, N, N, N, N, N},
    /* float    */ {N, N, N, Y, Y, Y, Y, Y},
    /* double   */ {N, N, N, Y, Y, Y, Y, Y},
    /* vector   */ {N, N, N, N, N, Y, N, N},
    /* complex  */ {N, N, N, N, N, N, Y, N},
    /* localint */ {N, N, Y, Y, Y, Y, Y, Y},
};

constexpr bool kCasts[kTableKinds][kTableKinds] = {
    /* int      */ {Y, N, N, Y, Y, Y, Y, Y},
    /* CP ptr   */ {N, Y, N, N, N, N, N, N},
    /* NP ptr   */ {N, Y, N, N, N, N, N, N},
    /* float    */ {N, N, N, Y, Y, Y, Y, N},
    /* double   */ {N, N, N, N, Y, N, N, N},
    /* vector   */ {N, N, N, N, N, Y, N, N},
    /* complex  */ {N, N, N, N, N, N, Y, N},
    /* localint */ {N, N, N, N, N, N, N, Y},
};

int idx(TableKind k) { return static_cast<int>(k); }

// Operator result order: Int < LocalInt < Float < Double < {Vector, Complex}.
int rank_of(TableKind k) {
  switch (k) {
    case TableKind::Int: return 0;
    case TableKind::LocalInt: return 1;
    case TableKind::Float: return 2;
    case TableKind::Double: return 3;
    case TableKind::Vector:
    case TableKind::Complex: return 4;
    default: return -1;
  }
}

bool same_shape(const TypeDesc& a, const TypeDesc& b) {
  return a.kind == b.kind && a.elem == b.elem && a.count == b.count && a.record == b.record &&
         a.result == b.result && a.params == b.params;
}

}  // namespace

std::optional<TableKind> common_kind(TableKind a, TableKind b) {
  const int floor = std::max(rank_of(a), rank_of(b));
  if (rank_of(a) < 0 || rank_of(b) < 0) return std::nullopt;
  std::optional<TableKind> found;
  for (TableKind t : {TableKind::Int, TableKind::LocalInt, TableKind::Float, TableKind::Double,
                      TableKind::Vector, TableKind::Complex}) {
    if (rank_of(t) < floor) continue;
    if (found && rank_of(t) > rank_of(*found)) break;
    if (promotion_allowed(a, t) && promotion_allowed(b, t)) {
      if (found) return std::nullopt;  // Vector and Complex both qualify: ambiguous
      found = t;
    }
  }
  return found;
}

bool promotion_allowed(TableKind from, TableKind to) { return kPromotions[idx(from)][idx(to)]; }
bool cast_allowed(TableKind from, TableKind to) { return kCasts[idx(from)][idx(to)]; }

const char* table_kind_name(TableKind k) {
  switch (k) {
    case TableKind::Int: return "int";
    case TableKind::PtrCP: return "CP pointer";
    case TableKind::PtrNP: return "NP pointer";
    case TableKind::Float: return "float";
    case TableKind::Double: return "double";
    case TableKind::Vector: return "vector";
    case TableKind::Complex: return "complex";
    case TableKind::LocalInt: return "localint";
  }
  return "?";
}

// ---- TypeDesc ---------------------------------------------------------------

std::optional<TableKind> TypeDesc::table_kind() const {
  switch (kind) {
    case TypeKind::Int: return TableKind::Int;
    case TypeKind::PtrCP: return is_record_pointer() ? std::nullopt : std::optional(TableKind::PtrCP);
    case TypeKind::PtrNP: return TableKind::PtrNP;
    case TypeKind::Float: return TableKind::Float;
    case TypeKind::Double: return TableKind::Double;
    case TypeKind::Vector: return TableKind::Vector;
    case TypeKind::Complex: return TableKind::Complex;
    case TypeKind::LocalInt: return TableKind::LocalInt;
    default: return std::nullopt;
  }
}

bool TypeDesc::is_np_scalar() const {
  switch (kind) {
    case TypeKind::Float:
    case TypeKind::Double:
    case TypeKind::Vector:
    case TypeKind::Complex:
    case TypeKind::LocalInt: return true;
    default: return false;
  }
}

bool TypeDesc::is_arithmetic() const { return kind == TypeKind::Int || is_np_scalar(); }

Group group_of(TableKind k) {
  switch (k) {
    case TableKind::Int:
    case TableKind::PtrCP:
    case TableKind::PtrNP: return Group::CP;
    default: return Group::NP;
  }
}

Group group_of(const TypeDesc& t) {
  switch (t.kind) {
    case TypeKind::Void:
    case TypeKind::Function: throw InternalError("group_of: " + type_name(&t) + " has no processor group");
    case TypeKind::Array: return group_of(*t.elem);
    case TypeKind::PtrCP:
    case TypeKind::PtrNP: return Group::CP;
    case TypeKind::Record: {
      bool cp = false;
      bool np = false;
      for (const FieldInfo* f : t.record->all_fields()) {
        Group g = group_of(*f->type);
        cp = cp || g == Group::CP || g == Group::Mixed;
        np = np || g == Group::NP || g == Group::Mixed;
      }
      if (cp && np) return Group::Mixed;
      if (cp) return Group::CP;
      if (np) return Group::NP;
      return Group::Empty;
    }
    default: return group_of(*t.table_kind());
  }
}

// ---- TypeTable --------------------------------------------------------------

TypeTable::TypeTable() {
  for (TypeKind k : {TypeKind::Void, TypeKind::Int, TypeKind::Float, TypeKind::Double,
                     TypeKind::Vector, TypeKind::Complex, TypeKind::LocalInt}) {
    TypeDesc d;
    d.kind = k;
    intern(d);
  }
  void_ = &storage_.front();
}

const TypeDesc* TypeTable::intern(TypeDesc desc) {
  for (const TypeDesc& t : storage_)
    if (same_shape(t, desc)) return &t;
  storage_.push_back(std::move(desc));
  return &storage_.back();
}

const TypeDesc* TypeTable::scalar(TypeKind kind) const {
  for (const TypeDesc& t : storage_)
    if (t.kind == kind && !t.elem && !t.record) return &t;
  throw InternalError("scalar(): not a scalar kind");
}

const TypeDesc* TypeTable::scalar(TableKind kind) const {
  switch (kind) {
    case TableKind::Int: return scalar(TypeKind::Int);
    case TableKind::Float: return scalar(TypeKind::Float);
    case TableKind::Double: return scalar(TypeKind::Double);
    case TableKind::Vector: return scalar(TypeKind::Vector);
    case TableKind::Complex: return scalar(TypeKind::Complex);
    case TableKind::LocalInt: return scalar(TypeKind::LocalInt);
    default: throw InternalError("scalar(): pointer kinds need a pointee");
  }
}

const TypeDesc* TypeTable::pointer_to(const TypeDesc* pointee) {
  TypeDesc d;
  d.elem = pointee;
  // The pointer value always lives on the CP; the kind records where the
  // pointee lives. Record pointers are CP-kind fat handles.
  bool np_target = pointee->kind != TypeKind::Void && pointee->kind != TypeKind::Function &&
                   pointee->kind != TypeKind::Record && group_of(*pointee) == Group::NP;
  d.kind = np_target ? TypeKind::PtrNP : TypeKind::PtrCP;
  return intern(std::move(d));
}

const TypeDesc* TypeTable::array_of(const TypeDesc* elem, std::int64_t count) {
  TypeDesc d;
  d.kind = TypeKind::Array;
  d.elem = elem;
  d.count = count;
  return intern(std::move(d));
}

const TypeDesc* TypeTable::record(const RecordInfo* info) {
  TypeDesc d;
  d.kind = TypeKind::Record;
  d.record = info;
  return intern(std::move(d));
}

const TypeDesc* TypeTable::function(const TypeDesc* result, std::vector<const TypeDesc*> params) {
  TypeDesc d;
  d.kind = TypeKind::Function;
  d.result = result;
  d.params = std::move(params);
  return intern(std::move(d));
}

std::string type_name(const TypeDesc* t) {
  if (!t) return "<untyped>";
  switch (t->kind) {
    case TypeKind::Void: return "void";
    case TypeKind::Int: return "int";
    case TypeKind::Float: return "float";
    case TypeKind::Double: return "double";
    case TypeKind::Vector: return "vector";
    case TypeKind::Complex: return "complex";
    case TypeKind::LocalInt: return "localint";
    case TypeKind::PtrCP:
    case TypeKind::PtrNP: return type_name(t->elem) + "*";
    case TypeKind::Array: return type_name(t->elem) + "[" + std::to_string(t->count) + "]";
    case TypeKind::Record: return t->record->name;
    case TypeKind::Function: {
      std::string s = type_name(t->result) + "(";
      for (size_t i = 0; i < t->params.size(); ++i) s += (i ? ", " : "") + type_name(t->params[i]);
      return s + ")";
    }
  }
  return "?";
}

// ---- operator typing --------------------------------------------------------

const TypeDesc* binary_result_type(TypeTable& types, const std::string& op, const TypeDesc* lhs,
                                   const TypeDesc* rhs, SourceLoc loc) {
  auto fail = [&](const std::string& why) -> const TypeDesc* {
    throw TypeError(loc, "invalid operands to '" + op + "' (" + type_name(lhs) + " and " +
                             type_name(rhs) + "): " + why);
  };
  const bool comparison = op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
  const bool logical = op == "&&" || op == "||";
  const bool additive = op == "+" || op == "-";

  if (lhs->is_record_pointer() || rhs->is_record_pointer()) {
    if (comparison && (op == "==" || op == "!=") && lhs == rhs) return types.scalar(TypeKind::Int);
    return fail("pointer arithmetic on record pointers is not allowed; records span two memories");
  }

  auto lk = lhs->table_kind();
  auto rk = rhs->table_kind();
  if (!lk || !rk) return fail("operands must be scalars");

  // Pointer arithmetic and comparison.
  if (lhs->is_pointer() || rhs->is_pointer()) {
    if (comparison) {
      if (lhs->is_pointer() && rhs->is_pointer()) return types.scalar(TypeKind::Int);
      const TypeDesc* other = lhs->is_pointer() ? rhs : lhs;
      if (other->kind == TypeKind::Int) return types.scalar(TypeKind::Int);
      return fail("a pointer can only be compared with a pointer or an int");
    }
    if (logical) {
      if (group_of(*lk) == Group::CP && group_of(*rk) == Group::CP) return types.scalar(TypeKind::Int);
      return types.scalar(TypeKind::LocalInt);
    }
    if (additive && lhs->is_pointer() && rhs->is_pointer()) {
      if (op == "-" && lhs == rhs) return types.scalar(TypeKind::Int);
      return fail("pointers can only be subtracted from pointers of the same type");
    }
    const TypeDesc* ptr = lhs->is_pointer() ? lhs : rhs;
    const TypeDesc* other = lhs->is_pointer() ? rhs : lhs;
    if (!additive || (op == "-" && rhs->is_pointer())) return fail("unsupported pointer operation");
    if (other->kind == TypeKind::LocalInt)
      return fail("a localint cannot offset a CP pointer; use localoffset() for per-node addressing");
    if (other->kind != TypeKind::Int) return fail("pointer offsets must be int");
    if (ptr->elem->kind == TypeKind::Void) return fail("arithmetic on void pointer");
    return ptr;
  }

  if (logical) {
    for (TableKind k : {*lk, *rk})
      if (k == TableKind::Vector || k == TableKind::Complex)
        return fail("vector/complex values are not truth values");
    if (group_of(*lk) == Group::CP && group_of(*rk) == Group::CP) return types.scalar(TypeKind::Int);
    return types.scalar(TypeKind::LocalInt);
  }

  auto common = common_kind(*lk, *rk);
  if (!common) return fail("no common promotion exists; add an explicit cast");
  TableKind result = *common;

  const bool bitwise = op == "%" || op == "&" || op == "|" || op == "^" || op == "<<" || op == ">>";
  if (bitwise && result != TableKind::Int && result != TableKind::LocalInt)
    return fail("'" + op + "' is defined only for int and localint");
  if (comparison) {
    if ((result == TableKind::Vector || result == TableKind::Complex) && op != "==" && op != "!=")
      return fail("vector/complex values are unordered");
    return types.scalar(group_of(result) == Group::CP ? TypeKind::Int : TypeKind::LocalInt);
  }
  if (!bitwise && op != "+" && op != "-" && op != "*" && op != "/")
    return fail("unknown operator");
  return types.scalar(result);
}

// ---- RecordInfo -------------------------------------------------------------

const FieldInfo* RecordInfo::find_field(const std::string& n) const {
  for (const auto& f : fields)
    if (f->name == n) return f.get();
  return base ? base->find_field(n) : nullptr;
}

FunctionInfo* RecordInfo::find_method(const std::string& n) const {
  auto it = methods.find(n);
  if (it != methods.end()) return it->second;
  return base ? base->find_method(n) : nullptr;
}

bool RecordInfo::derives_from(const RecordInfo* other) const {
  for (const RecordInfo* r = this; r; r = r->base)
    if (r == other) return true;
  return false;
}

std::vector<const FieldInfo*> RecordInfo::all_fields() const {
  std::vector<const FieldInfo*> out;
  if (base) out = base->all_fields();
  for (const auto& f : fields) out.push_back(f.get());
  return out;
}

}  // namespace simdcc
