#include "simdcc/semantics.hpp"

#include <functional>
#include <set>

namespace simdcc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const std::set<std::string> kUnsupportedTypeWords = {
    "char", "unsigned", "signed", "long", "short", "bool", "wchar_t",
};

struct NeighborName {
  const char* name;
  int axis;
  int sign;
};
constexpr NeighborName kNeighborNames[] = {
    {"XPLUS_NP", 0, +1}, {"XMINUS_NP", 0, -1}, {"YPLUS_NP", 1, +1},
    {"YMINUS_NP", 1, -1}, {"ZPLUS_NP", 2, +1}, {"ZMINUS_NP", 2, -1},
};

bool is_comparison(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}
bool is_logical(const std::string& op) { return op == "&&" || op == "||"; }

class Checker {
 public:
  explicit Checker(SyntaxTree tree) { p_.tree = std::move(tree); }

  TypedProgram run() {
    scopes_.emplace_back();
    for (const auto& n : kNeighborNames) {
      Symbol& s = new_symbol(SymbolKind::Neighbor, n.name, types().scalar(TypeKind::Int), {});
      s.is_const = true;
      s.axis = n.axis;
      s.sign = n.sign;
      p_.neighbor_constants.push_back(&s);
      scopes_.front()[n.name] = &s;
    }
    FunctionInfo& init = new_function("$init", "$init", types().void_type(), {});
    init.defined = true;
    p_.init = &init;

    for (auto& item : p_.tree.items) {
      std::visit(Overloaded{
                     [&](VarDecl& v) { global_var_decl(v); },
                     [&](TypedefDecl& t) { typedef_decl(t); },
                     [&](RecordDef& r) { record_def(r); },
                     [&](FuncDef& f) { function_def(f); },
                 },
                 item);
    }
    for (FunctionInfo* f : p_.function_order)
      if (!f->defined) throw TypeError(f->loc, "function '" + f->name + "' is declared but never defined");
    if (auto it = scopes_.front().find("main"); it != scopes_.front().end()) {
      if (it->second->kind != SymbolKind::Function) throw TypeError(it->second->loc, "'main' must be a function");
      FunctionInfo* m = it->second->function;
      if (!m->params.empty()) throw TypeError(m->loc, "main takes no parameters");
      if (m->result->kind != TypeKind::Int && m->result->kind != TypeKind::Void)
        throw TypeError(m->loc, "main must return int or void");
      p_.main = m;
    }
    return std::move(p_);
  }

 private:
  TypeTable& types() { return *p_.types; }

  Symbol& new_symbol(SymbolKind kind, std::string name, const TypeDesc* type, SourceLoc loc) {
    Symbol& s = p_.symbols.emplace_back();
    s.kind = kind;
    s.name = std::move(name);
    s.type = type;
    s.loc = loc;
    return s;
  }

  FunctionInfo& new_function(std::string name, std::string qualified, const TypeDesc* result,
                             SourceLoc loc) {
    FunctionInfo& f = p_.functions.emplace_back();
    f.name = std::move(name);
    f.qualified_name = std::move(qualified);
    f.result = result;
    f.loc = loc;
    return f;
  }

  // ---- scopes -------------------------------------------------------------

  Symbol* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    return nullptr;
  }

  void declare(Symbol& s) {
    auto& scope = scopes_.back();
    if (scope.count(s.name)) throw TypeError(s.loc, "redeclaration of '" + s.name + "'");
    if (scopes_.size() == 1 && (typedefs_.count(s.name) || records_.count(s.name)))
      throw TypeError(s.loc, "'" + s.name + "' already names a type");
    scope[s.name] = &s;
  }

  struct ScopeGuard {
    Checker& c;
    explicit ScopeGuard(Checker& checker) : c(checker) { c.scopes_.emplace_back(); }
    ~ScopeGuard() { c.scopes_.pop_back(); }
  };

  // ---- types --------------------------------------------------------------

  const TypeDesc* base_type(const TypeSpec& spec) {
    const std::string& b = spec.base;
    if (b == "int") return types().scalar(TypeKind::Int);
    if (b == "float") return types().scalar(TypeKind::Float);
    if (b == "double") return types().scalar(TypeKind::Double);
    if (b == "vector") return types().scalar(TypeKind::Vector);
    if (b == "complex") return types().scalar(TypeKind::Complex);
    if (b == "localint") return types().scalar(TypeKind::LocalInt);
    if (b == "void") return types().void_type();
    if (auto it = typedefs_.find(b); it != typedefs_.end()) return it->second;
    if (auto it = records_.find(b); it != records_.end()) return types().record(it->second);
    if (kUnsupportedTypeWords.count(b))
      throw TypeError(spec.loc, "type '" + b + "' is not supported; available basic types are int, "
                                "float, double, vector, complex and localint");
    throw TypeError(spec.loc, "unknown type '" + b + "'");
  }

  const TypeDesc* resolve_type(const TypeSpec& spec, int extra_stars,
                               const std::vector<ExprPtr>& dims) {
    const TypeDesc* t = base_type(spec);
    for (int i = 0; i < spec.pointer_depth + extra_stars; ++i) t = types().pointer_to(t);
    for (auto it = dims.rbegin(); it != dims.rend(); ++it) {
      std::int64_t n = require_constant(**it, "array bound");
      if (n <= 0) throw TypeError((*it)->loc, "array bound must be positive");
      if (t->kind == TypeKind::Void) throw TypeError(spec.loc, "array of void");
      if (t->kind == TypeKind::Array && innermost(t)->kind == TypeKind::Record)
        throw TypeError(spec.loc, "arrays of records must be one-dimensional");
      t = types().array_of(t, n);
    }
    return t;
  }

  std::optional<std::int64_t> constant_value(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::IntLit: return e.int_value;
      case ExprKind::Name: {
        const Symbol* s = e.symbol ? e.symbol : lookup(e.name);
        if (s && s->const_value) return s->const_value;
        return std::nullopt;
      }
      case ExprKind::Convert:
        if (e.type && e.type->kind == TypeKind::Int) return constant_value(*e.args[0]);
        return std::nullopt;
      case ExprKind::Unary: {
        auto v = constant_value(*e.args[0]);
        if (!v) return std::nullopt;
        if (e.op == "-") return -*v;
        if (e.op == "+") return *v;
        if (e.op == "!") return std::int64_t(!*v);
        if (e.op == "~") return ~*v;
        return std::nullopt;
      }
      case ExprKind::Binary: {
        auto a = constant_value(*e.args[0]);
        auto b = constant_value(*e.args[1]);
        if (!a || !b) return std::nullopt;
        const std::string& op = e.op;
        if (op == "+") return *a + *b;
        if (op == "-") return *a - *b;
        if (op == "*") return *a * *b;
        if ((op == "/" || op == "%") && *b == 0) return std::nullopt;
        if (op == "/") return *a / *b;
        if (op == "%") return *a % *b;
        if (op == "<<") return *a << *b;
        if (op == ">>") return *a >> *b;
        if (op == "&") return *a & *b;
        if (op == "|") return *a | *b;
        if (op == "^") return *a ^ *b;
        if (op == "==") return std::int64_t(*a == *b);
        if (op == "!=") return std::int64_t(*a != *b);
        if (op == "<") return std::int64_t(*a < *b);
        if (op == "<=") return std::int64_t(*a <= *b);
        if (op == ">") return std::int64_t(*a > *b);
        if (op == ">=") return std::int64_t(*a >= *b);
        if (op == "&&") return std::int64_t(*a && *b);
        if (op == "||") return std::int64_t(*a || *b);
        return std::nullopt;
      }
      default: return std::nullopt;
    }
  }

  std::int64_t require_constant(const Expr& e, const char* what) const {
    auto v = constant_value(e);
    if (!v) throw TypeError(e.loc, std::string(what) + " must be an integer constant expression");
    if (*v < INT32_MIN || *v > INT32_MAX) throw TypeError(e.loc, std::string(what) + " out of range");
    return *v;
  }

  static const TypeDesc* innermost(const TypeDesc* t) {
    while (t->kind == TypeKind::Array) t = t->elem;
    return t;
  }

  void check_storable(const TypeDesc* t, SourceLoc loc, const std::string& name) {
    if (t->kind == TypeKind::Void) throw TypeError(loc, "variable '" + name + "' has type void");
    const TypeDesc* base = t;
    while (base->kind == TypeKind::Array) base = base->elem;
    if (base->kind == TypeKind::Void) throw TypeError(loc, "array of void");
  }

  // ---- top level ----------------------------------------------------------

  void typedef_decl(TypedefDecl& td) {
    if (typedefs_.count(td.name) || records_.count(td.name) || scopes_.front().count(td.name))
      throw TypeError(td.loc, "redefinition of '" + td.name + "'");
    typedefs_[td.name] = resolve_type(td.type, 0, td.dims);
  }

  void global_var_decl(VarDecl& v) {
    FunctionInfo* saved = fn_;
    fn_ = p_.init;
    for (auto& d : v.declarators) {
      if (string_constant(v, d, SymbolKind::Global)) continue;
      const TypeDesc* t = resolve_type(v.type, d.pointer_depth, d.dims);
      check_storable(t, d.loc, d.name);
      Symbol& s = new_symbol(SymbolKind::Global, d.name, t, d.loc);
      s.is_const = v.type.is_const;
      declare(s);
      p_.globals.push_back(&s);
      d.symbol = &s;
      initializer(d, s);
    }
    fn_ = saved;
  }

  void local_var_decl(VarDecl& v) {
    for (auto& d : v.declarators) {
      if (string_constant(v, d, SymbolKind::Local)) continue;
      const TypeDesc* t = resolve_type(v.type, d.pointer_depth, d.dims);
      check_storable(t, d.loc, d.name);
      Symbol& s = new_symbol(SymbolKind::Local, d.name, t, d.loc);
      s.is_const = v.type.is_const;
      s.function = fn_;
      // The initializer cannot see the variable it initializes.
      d.symbol = &s;
      initializer(d, s);
      declare(s);
      fn_->locals.push_back(&s);
    }
  }

  // `const char *name = "file";` binds a compile-time file name. It occupies
  // no storage and is only accepted where a file name is expected.
  bool string_constant(const VarDecl& v, Declarator& d, SymbolKind kind) {
    if (v.type.base != "char") return false;
    if (!v.type.is_const || v.type.pointer_depth + d.pointer_depth != 1 || !d.dims.empty() || !d.init ||
        d.init->kind != ExprKind::StringLit)
      return false;
    Symbol& s = new_symbol(kind, d.name, types().void_type(), d.loc);
    s.is_const = true;
    s.string_value = d.init->name;
    s.function = kind == SymbolKind::Local ? fn_ : nullptr;
    d.init->type = types().void_type();
    declare(s);
    d.symbol = &s;
    return true;
  }

  void initializer(Declarator& d, Symbol& s) {
    const TypeDesc* t = s.type;
    const TypeDesc* elem = t;
    while (elem->kind == TypeKind::Array) elem = elem->elem;
    if (d.init) {
      if (t->kind == TypeKind::Array || t->kind == TypeKind::Record)
        throw TypeError(d.loc, "'" + d.name + "': only scalars and pointers take '=' initializers");
      rvalue(d.init);
      convert(d.init, t, "initialization of '" + d.name + "'");
      if (s.is_const && t->kind == TypeKind::Int) s.const_value = constant_value(*d.init);
    }
    if (elem->kind == TypeKind::Record) {
      const RecordInfo* rec = elem->record;
      if (d.has_ctor_args) {
        if (t->kind == TypeKind::Array) throw TypeError(d.loc, "arrays of records take no constructor arguments");
        d.ctor = pick_ctor(rec, d.ctor_args, d.loc);
      } else {
        d.ctor = default_ctor(rec, d.loc);
      }
      if (t->kind == TypeKind::Array && needs_construction(rec)) {
        Symbol& tmp = new_symbol(SymbolKind::Local, "$i" + std::to_string(temp_counter_++),
                                 types().scalar(TypeKind::Int), d.loc);
        tmp.function = fn_;
        fn_->locals.push_back(&tmp);
        d.loop_temp = &tmp;
      }
    } else if (d.has_ctor_args) {
      if (d.ctor_args.size() != 1)
        throw TypeError(d.loc, "'" + d.name + "' takes exactly one initializer");
      if (t->kind == TypeKind::Array) throw TypeError(d.loc, "arrays cannot be initialized this way");
      d.init = std::move(d.ctor_args.front());
      d.ctor_args.clear();
      d.has_ctor_args = false;
      rvalue(d.init);
      convert(d.init, t, "initialization of '" + d.name + "'");
      if (s.is_const && t->kind == TypeKind::Int) s.const_value = constant_value(*d.init);
    }
  }

  bool needs_construction(const RecordInfo* rec) const {
    for (const RecordInfo* r = rec; r; r = r->base)
      if (!r->ctors.empty()) return true;
    return false;
  }

  const FunctionInfo* default_ctor(const RecordInfo* rec, SourceLoc loc) {
    if (rec->ctors.empty()) {
      if (rec->base && needs_construction(rec->base)) default_ctor(rec->base, loc);
      return nullptr;
    }
    for (const FunctionInfo* c : rec->ctors)
      if (c->params.empty()) return c;
    throw TypeError(loc, "'" + rec->name + "' has no default constructor");
  }

  const FunctionInfo* pick_ctor(const RecordInfo* rec, std::vector<ExprPtr>& args, SourceLoc loc) {
    const FunctionInfo* found = nullptr;
    for (const FunctionInfo* c : rec->ctors) {
      if (c->params.size() != args.size()) continue;
      if (found) throw TypeError(loc, "ambiguous constructor call for '" + rec->name + "'");
      found = c;
    }
    if (!found)
      throw TypeError(loc, "no constructor of '" + rec->name + "' takes " + std::to_string(args.size()) +
                               " argument(s)");
    call_arguments(*found, args, 0, loc);
    return found;
  }

  void record_def(RecordDef& r) {
    if (records_.count(r.name) || typedefs_.count(r.name) || scopes_.front().count(r.name))
      throw TypeError(r.loc, "redefinition of '" + r.name + "'");
    RecordInfo& info = p_.records.emplace_back();
    info.name = r.name;
    info.kind = r.kind;
    info.loc = r.loc;
    r.info = &info;
    records_[r.name] = &info;  // visible to its own members, e.g. `Node* next`
    if (r.base) {
      auto it = records_.find(*r.base);
      if (it == records_.end()) throw TypeError(r.loc, "unknown base class '" + *r.base + "'");
      if (r.kind == RecordKind::Union || it->second->kind == RecordKind::Union)
        throw TypeError(r.loc, "unions cannot take part in inheritance");
      info.base = it->second;
    }
    Access access = r.kind == RecordKind::Class ? Access::Private : Access::Public;

    // Collect every member signature first so bodies can refer to any member.
    std::vector<std::pair<FuncDef*, FunctionInfo*>> methods;
    std::vector<std::pair<CtorDef*, FunctionInfo*>> ctors;
    for (auto& m : r.members) {
      std::visit(Overloaded{
                     [&](AccessSpec& a) { access = a.access; },
                     [&](VarDecl& v) {
                       for (auto& d : v.declarators) {
                         const TypeDesc* t = resolve_type(v.type, d.pointer_depth, d.dims);
                         check_storable(t, d.loc, d.name);
                         const TypeDesc* e = t;
                         while (e->kind == TypeKind::Array) e = e->elem;
                         if (e->kind == TypeKind::Record && e->record == &info)
                           throw TypeError(d.loc, "field '" + d.name + "' has incomplete type");
                         if (d.init || d.has_ctor_args)
                           throw TypeError(d.loc, "fields cannot have initializers; use a constructor");
                         if (info.find_field(d.name) || info.methods.count(d.name))
                           throw TypeError(d.loc, "duplicate member '" + d.name + "'");
                         auto f = std::make_unique<FieldInfo>();
                         f->name = d.name;
                         f->type = t;
                         f->access = access;
                         f->owner = &info;
                         f->loc = d.loc;
                         info.fields.push_back(std::move(f));
                       }
                     },
                     [&](FuncDef& f) {
                       if (info.find_field(f.name) || info.methods.count(f.name))
                         throw TypeError(f.loc, "duplicate member '" + f.name + "'");
                       FunctionInfo& fi = signature(f.result, f.name, r.name + "::" + f.name, f.params, f.loc);
                       fi.owner = &info;
                       f.info = &fi;
                       info.methods[f.name] = &fi;
                       info.method_access[f.name] = access;
                       methods.emplace_back(&f, &fi);
                     },
                     [&](CtorDef& c) {
                       FunctionInfo& fi = signature(TypeSpec{false, "void", 0, c.loc}, r.name,
                                                    r.name + "::" + r.name, c.params, c.loc);
                       fi.owner = &info;
                       fi.is_ctor = true;
                       fi.ctor_def = &c;
                       c.info = &fi;
                       for (const FunctionInfo* other : info.ctors)
                         if (other->params.size() == fi.params.size())
                           throw TypeError(c.loc, "constructors of '" + r.name +
                                                      "' must differ in parameter count");
                       info.ctors.push_back(&fi);
                       ctors.emplace_back(&c, &fi);
                     },
                 },
                 m);
    }

    if (info.kind == RecordKind::Union) {
      std::optional<Group> g;
      for (const auto& f : info.fields) {
        Group fg = group_of(*f->type);
        if (fg == Group::Empty) continue;
        if (fg == Group::Mixed || (g && *g != fg))
          throw TypeError(f->loc, "union '" + info.name +
                                      "' mixes CP and NP fields; union members must all live on the "
                                      "same kind of processor");
        g = fg;
      }
    }

    p_.record_order.push_back(&info);

    const RecordInfo* saved_record = record_;
    record_ = &info;
    for (auto& [ctor, fi] : ctors) ctor_body(*ctor, *fi);
    for (auto& [def, fi] : methods) function_body(*def, *fi);
    record_ = saved_record;
  }

  FunctionInfo& signature(const TypeSpec& result_spec, const std::string& name,
                          const std::string& qualified, const std::vector<Param>& params, SourceLoc loc) {
    const TypeDesc* result = resolve_type(result_spec, 0, {});
    if (result->kind == TypeKind::Record || result->kind == TypeKind::Array)
      throw TypeError(loc, "functions cannot return records or arrays; return a pointer instead");
    FunctionInfo& fi = new_function(name, qualified, result, loc);
    std::set<std::string> seen;
    for (const Param& pa : params) {
      const TypeDesc* t = resolve_type(pa.type, 0, {});
      if (t->kind == TypeKind::Void) throw TypeError(pa.loc, "parameter '" + pa.name + "' has type void");
      if (t->kind == TypeKind::Record)
        throw TypeError(pa.loc, "records cannot be passed by value; pass a pointer to '" + type_name(t) + "'");
      if (!seen.insert(pa.name).second) throw TypeError(pa.loc, "duplicate parameter '" + pa.name + "'");
      Symbol& s = new_symbol(SymbolKind::Param, pa.name, t, pa.loc);
      s.is_const = pa.type.is_const;
      s.function = &fi;
      fi.params.push_back(&s);
    }
    return fi;
  }

  void enter_function(FunctionInfo& fi) {
    fn_ = &fi;
    scopes_.emplace_back();
    if (fi.owner) {
      Symbol& self = new_symbol(SymbolKind::Param, "this", types().pointer_to(types().record(fi.owner)), fi.loc);
      self.is_const = true;
      self.function = &fi;
      fi.this_param = &self;
    }
    for (Symbol* s : fi.params) declare(*s);
  }

  void leave_function() {
    scopes_.pop_back();
    fn_ = nullptr;
  }

  void function_body(FuncDef& f, FunctionInfo& fi) {
    if (intrinsic_for(f.name) != Intrinsic::None)
      throw TypeError(f.loc, "'" + f.name + "' is a built-in and cannot be redefined");
    enter_function(fi);
    fi.body = f.body.get();
    fi.defined = true;
    statement(*f.body);
    leave_function();
  }

  void ctor_body(CtorDef& c, FunctionInfo& fi) {
    enter_function(fi);
    fi.body = c.body.get();
    fi.defined = true;
    const RecordInfo* rec = fi.owner;
    bool base_done = false;
    for (auto& init : c.inits) {
      if (rec->base && init.name == rec->base->name) {
        init.base_ctor = pick_ctor(rec->base, init.args, init.loc);
        base_done = true;
        continue;
      }
      const FieldInfo* field = nullptr;
      for (const auto& f : rec->fields)
        if (f->name == init.name) field = f.get();
      if (!field) throw TypeError(init.loc, "'" + init.name + "' is not a field or base of '" + rec->name + "'");
      if (!field->type->is_scalar() && !field->type->is_record_pointer())
        throw TypeError(init.loc, "member initializer for '" + init.name + "' must be a scalar");
      if (init.args.size() != 1) throw TypeError(init.loc, "member initializer takes one argument");
      init.field = field;
      rvalue(init.args[0]);
      convert(init.args[0], field->type, "initialization of '" + init.name + "'");
    }
    if (!base_done && rec->base && needs_construction(rec->base)) default_ctor(rec->base, c.loc);
    statement(*c.body);
    leave_function();
  }

  void function_def(FuncDef& f) {
    if (intrinsic_for(f.name) != Intrinsic::None)
      throw TypeError(f.loc, "'" + f.name + "' is a built-in and cannot be redefined");
    FunctionInfo* fi = nullptr;
    if (Symbol* existing = scopes_.front().count(f.name) ? scopes_.front()[f.name] : nullptr) {
      if (existing->kind != SymbolKind::Function) throw TypeError(f.loc, "redefinition of '" + f.name + "'");
      fi = existing->function;
      FunctionInfo& probe = signature(f.result, f.name, f.name, f.params, f.loc);
      bool same = probe.result == fi->result && probe.params.size() == fi->params.size();
      for (size_t i = 0; same && i < probe.params.size(); ++i)
        same = probe.params[i]->type == fi->params[i]->type;
      if (!same) throw TypeError(f.loc, "conflicting declaration of '" + f.name + "'");
      if (f.body && fi->defined) throw TypeError(f.loc, "redefinition of '" + f.name + "'");
      if (f.body) fi->params = probe.params;  // keep the definition's parameter names
      for (Symbol* s : fi->params) s->function = fi;
    } else {
      fi = &signature(f.result, f.name, f.name, f.params, f.loc);
      Symbol& s = new_symbol(SymbolKind::Function, f.name, nullptr, f.loc);
      s.function = fi;
      std::vector<const TypeDesc*> ptypes;
      for (Symbol* pa : fi->params) ptypes.push_back(pa->type);
      s.type = types().function(fi->result, ptypes);
      declare(s);
      p_.function_order.push_back(fi);
    }
    f.info = fi;
    if (f.body) {
      fi->loc = f.loc;
      function_body(f, *fi);
    }
  }

  // ---- statements ---------------------------------------------------------

  void statement(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Empty: break;
      case StmtKind::Expr: expr(s.expr); break;
      case StmtKind::Decl: local_var_decl(*s.decl); break;
      case StmtKind::Block: {
        ScopeGuard g(*this);
        for (auto& b : s.body) statement(*b);
        break;
      }
      case StmtKind::If:
      case StmtKind::While:
        cp_condition(s.expr, s.kind == StmtKind::If ? "if" : "while");
        nested_statement(*s.then_branch);
        if (s.else_branch) nested_statement(*s.else_branch);
        break;
      case StmtKind::For: {
        ScopeGuard g(*this);
        if (s.init) statement(*s.init);
        if (s.expr) cp_condition(s.expr, "for");
        if (s.step) expr(s.step);
        nested_statement(*s.then_branch);
        break;
      }
      case StmtKind::Where: {
        rvalue(s.expr);
        const TypeDesc* t = s.expr->type;
        if (!t->is_np_scalar())
          throw TypeError(s.expr->loc, "where condition must be an NP (numeric processor) value, found " +
                                           type_name(t) + "; use if for CP conditions");
        if (t->kind == TypeKind::Vector || t->kind == TypeKind::Complex)
          throw TypeError(s.expr->loc, "vector/complex values are not truth values");
        nested_statement(*s.then_branch);
        if (s.else_branch) nested_statement(*s.else_branch);
        break;
      }
      case StmtKind::Return: {
        const TypeDesc* want = fn_->result;
        if (!s.expr) {
          if (want->kind != TypeKind::Void) throw TypeError(s.loc, "non-void function must return a value");
          break;
        }
        if (want->kind == TypeKind::Void) throw TypeError(s.loc, "void function cannot return a value");
        rvalue(s.expr);
        convert(s.expr, want, "return value");
        break;
      }
    }
  }

  void nested_statement(Stmt& s) {
    ScopeGuard g(*this);
    statement(s);
  }

  void cp_condition(ExprPtr& e, const char* what) {
    rvalue(e);
    const TypeDesc* t = e->type;
    if (t->is_record_pointer()) return;
    auto k = t->table_kind();
    if (!k) throw TypeError(e->loc, std::string(what) + " condition must be a scalar");
    if (group_of(*k) == Group::NP)
      throw TypeError(e->loc, std::string(what) + " condition must be a CP value, found NP type " + type_name(t) +
                                  "; use where for per-node conditions or any()/all()/none() to branch");
  }

  // ---- expressions --------------------------------------------------------

  static void wrap(ExprPtr& e, ExprKind kind, const TypeDesc* t) {
    auto w = Expr::make(kind, e->loc);
    w->type = t;
    w->args.push_back(std::move(e));
    e = std::move(w);
  }

  void rvalue(ExprPtr& e) {
    expr(e);
    decay(e);
  }

  void decay(ExprPtr& e) {
    if (e->type->kind == TypeKind::Array) {
      const TypeDesc* p = types().pointer_to(e->type->elem);
      wrap(e, ExprKind::Decay, p);
    } else if (e->type->kind == TypeKind::Function) {
      throw TypeError(e->loc, "function pointers are not supported");
    }
  }

  [[noreturn]] void conversion_error(const Expr& e, const TypeDesc* to, const std::string& context) {
    const TypeDesc* from = e.type;
    auto fk = from->table_kind();
    auto tk = to->table_kind();
    if (fk == TableKind::LocalInt && tk == TableKind::PtrNP)
      throw TypeError(e.loc, context + ": a localint cannot be used as a pointer; use localoffset() for "
                                       "per-node addressing");
    if (fk && tk && group_of(*fk) == Group::NP && group_of(*tk) == Group::CP)
      throw TypeError(e.loc, context + ": conversion from NP type '" + type_name(from) + "' to CP type '" +
                                 type_name(to) + "' is never allowed");
    throw TypeError(e.loc, context + ": cannot convert '" + type_name(from) + "' to '" + type_name(to) + "'");
  }

  void convert(ExprPtr& e, const TypeDesc* to, const std::string& context) {
    const TypeDesc* from = e->type;
    if (from == to) return;
    if (from->is_record_pointer() || to->is_record_pointer()) {
      if (to->is_record_pointer() && e->kind == ExprKind::IntLit && e->int_value == 0) {
        wrap(e, ExprKind::Convert, to);  // null pointer constant
        return;
      }
      if (from->is_record_pointer() && to->is_record_pointer() &&
          from->elem->record->derives_from(to->elem->record)) {
        wrap(e, ExprKind::Convert, to);
        return;
      }
      conversion_error(*e, to, context);
    }
    auto fk = from->table_kind();
    auto tk = to->table_kind();
    if (!fk || !tk) conversion_error(*e, to, context);
    if (*fk == TableKind::LocalInt && *tk == TableKind::PtrNP) conversion_error(*e, to, context);
    if (!promotion_allowed(*fk, *tk)) conversion_error(*e, to, context);
    bool broadcast = group_of(*fk) == Group::CP && group_of(*tk) == Group::NP;
    wrap(e, ExprKind::Convert, to);
    e->broadcast = broadcast;
  }

  void convert_kind(ExprPtr& e, TableKind k, const std::string& context) {
    if (e->type->table_kind() == k) return;
    convert(e, types().scalar(k), context);
  }

  void require_modifiable(const Expr& e, const char* what) {
    if (!e.lvalue) throw TypeError(e.loc, std::string(what) + " requires an lvalue");
    if (e.kind == ExprKind::Name && e.symbol && e.symbol->is_const)
      throw TypeError(e.loc, "cannot modify const '" + e.name + "'");
    if (e.type->kind == TypeKind::Array) throw TypeError(e.loc, "arrays are not assignable");
  }

  bool can_access(const RecordInfo* owner, Access access) const {
    if (access == Access::Public) return true;
    return fn_ && fn_->owner == owner;
  }

  void expr(ExprPtr& e) {
    Expr& x = *e;
    switch (x.kind) {
      case ExprKind::IntLit: x.type = types().scalar(TypeKind::Int); return;
      case ExprKind::FloatLit:
        x.type = types().scalar(x.float_suffix ? TypeKind::Float : TypeKind::Double);
        return;
      case ExprKind::StringLit:
        throw TypeError(x.loc, "string literals are only accepted as file names by distributed_load/store");
      case ExprKind::Name: return name(e);
      case ExprKind::This:
        if (!fn_ || !fn_->this_param) throw TypeError(x.loc, "'this' outside a member function");
        x.type = fn_->this_param->type;
        x.symbol = fn_->this_param;
        return;
      case ExprKind::Unary: return unary(x);
      case ExprKind::AddrOf:
        expr(x.args[0]);
        if (!x.args[0]->lvalue) throw TypeError(x.loc, "cannot take the address of an rvalue");
        if (x.args[0]->type->kind == TypeKind::Array && innermost(x.args[0]->type)->kind == TypeKind::Record)
          throw TypeError(x.loc, "cannot take the address of an array of records; use &a[0]");
        x.type = types().pointer_to(x.args[0]->type);
        return;
      case ExprKind::Deref:
        rvalue(x.args[0]);
        if (!x.args[0]->type->is_pointer()) throw TypeError(x.loc, "cannot dereference " + type_name(x.args[0]->type));
        if (x.args[0]->type->elem->kind == TypeKind::Void) throw TypeError(x.loc, "cannot dereference void*");
        x.type = x.args[0]->type->elem;
        x.lvalue = true;
        return;
      case ExprKind::Binary: return binary(x);
      case ExprKind::Assign: return assign(x);
      case ExprKind::CompoundAssign: return compound_assign(x);
      case ExprKind::IncDec: {
        expr(x.args[0]);
        require_modifiable(*x.args[0], "increment/decrement");
        const TypeDesc* t = x.args[0]->type;
        bool ok = t->kind == TypeKind::Int || t->kind == TypeKind::LocalInt || t->kind == TypeKind::Float ||
                  t->kind == TypeKind::Double || (t->is_pointer() && !t->is_record_pointer());
        if (!ok) throw TypeError(x.loc, "cannot increment or decrement " + type_name(t));
        x.type = t;
        return;
      }
      case ExprKind::Conditional: return conditional(x);
      case ExprKind::Call: return call(x);
      case ExprKind::Index: return index(x);
      case ExprKind::Member: return member(e);
      case ExprKind::Cast: return cast(x);
      case ExprKind::Convert:
      case ExprKind::Decay: return;  // already typed
    }
  }

  void name(ExprPtr& e) {
    Expr& x = *e;
    Symbol* s = lookup(x.name);
    if (!s && fn_ && fn_->owner) {
      if (const FieldInfo* f = fn_->owner->find_field(x.name)) {
        // Implicit `this->field`.
        auto self = Expr::make(ExprKind::This, x.loc);
        auto m = Expr::make(ExprKind::Member, x.loc);
        m->arrow = true;
        m->name = f->name;
        m->args.push_back(std::move(self));
        e = std::move(m);
        return member(e);
      }
    }
    if (!s) {
      if (intrinsic_for(x.name) != Intrinsic::None)
        throw TypeError(x.loc, "built-in '" + x.name + "' can only be called");
      throw TypeError(x.loc, "use of undeclared identifier '" + x.name + "'");
    }
    if (s->kind == SymbolKind::Function) throw TypeError(x.loc, "function pointers are not supported");
    if (s->string_value)
      throw TypeError(x.loc, "'" + x.name + "' is a file name; it can only be passed to distributed_load/store");
    x.symbol = s;
    x.type = s->type;
    x.lvalue = s->kind != SymbolKind::Neighbor;
  }

  void unary(Expr& x) {
    rvalue(x.args[0]);
    const TypeDesc* t = x.args[0]->type;
    auto k = t->table_kind();
    if (x.op == "-" || x.op == "+") {
      if (!t->is_arithmetic()) throw TypeError(x.loc, "unary '" + x.op + "' needs an arithmetic operand");
      x.type = t;
    } else if (x.op == "!") {
      if (!k || t->kind == TypeKind::Vector || t->kind == TypeKind::Complex)
        throw TypeError(x.loc, "'!' needs a scalar truth value");
      x.type = types().scalar(group_of(*k) == Group::CP ? TypeKind::Int : TypeKind::LocalInt);
    } else {
      if (t->kind != TypeKind::Int && t->kind != TypeKind::LocalInt)
        throw TypeError(x.loc, "'~' is defined only for int and localint");
      x.type = t;
    }
  }

  void binary(Expr& x) {
    rvalue(x.args[0]);
    rvalue(x.args[1]);
    const TypeDesc* l = x.args[0]->type;
    const TypeDesc* r = x.args[1]->type;
    x.type = binary_result_type(types(), x.op, l, r, x.loc);
    if (l->is_pointer() || r->is_pointer() || l->is_record_pointer() || r->is_record_pointer()) {
      x.operand_type = l->is_pointer() ? l : r;
      return;
    }
    if (is_logical(x.op)) {
      x.operand_type = x.type;
      if (x.type->kind == TypeKind::LocalInt) {
        for (auto& a : x.args)
          if (a->type->kind == TypeKind::Int) convert(a, x.type, "operand of '" + x.op + "'");
      }
      return;
    }
    TableKind common = *common_kind(*l->table_kind(), *r->table_kind());
    x.operand_type = types().scalar(common);
    convert_kind(x.args[0], common, "operand of '" + x.op + "'");
    convert_kind(x.args[1], common, "operand of '" + x.op + "'");
  }

  void assign(Expr& x) {
    expr(x.args[0]);
    require_modifiable(*x.args[0], "assignment");
    const TypeDesc* t = x.args[0]->type;
    if (t->kind == TypeKind::Record) {
      expr(x.args[1]);
      const TypeDesc* rt = x.args[1]->type;
      if (rt != t || !x.args[1]->lvalue)
        throw TypeError(x.loc, "cannot assign " + type_name(rt) + " to " + type_name(t));
      x.type = types().void_type();
      return;
    }
    rvalue(x.args[1]);
    convert(x.args[1], t, "assignment");
    x.type = t;
  }

  void compound_assign(Expr& x) {
    expr(x.args[0]);
    require_modifiable(*x.args[0], "compound assignment");
    rvalue(x.args[1]);
    const TypeDesc* l = x.args[0]->type;
    const TypeDesc* r = x.args[1]->type;
    if (is_comparison(x.op) || is_logical(x.op)) throw TypeError(x.loc, "invalid compound operator");
    const TypeDesc* result = binary_result_type(types(), x.op, l, r, x.loc);
    x.type = l;
    if (l->is_pointer()) {
      if (result != l) throw TypeError(x.loc, "invalid pointer compound assignment");
      x.operand_type = l;
      return;
    }
    x.operand_type = result;
    convert_kind(x.args[1], *result->table_kind(), "operand of '" + x.op + "='");
    // The result must flow back into the left operand.
    auto rk = *result->table_kind();
    auto lk = *l->table_kind();
    if (rk != lk && !promotion_allowed(rk, lk)) {
      Expr probe;
      probe.type = result;
      probe.loc = x.loc;
      conversion_error(probe, l, "compound assignment");
    }
  }

  void conditional(Expr& x) {
    rvalue(x.args[0]);
    rvalue(x.args[1]);
    rvalue(x.args[2]);
    const TypeDesc* c = x.args[0]->type;
    auto ck = c->table_kind();
    if (!ck || c->kind == TypeKind::Vector || c->kind == TypeKind::Complex)
      throw TypeError(x.loc, "condition of '?:' must be a scalar truth value");
    const TypeDesc* a = x.args[1]->type;
    const TypeDesc* b = x.args[2]->type;
    bool np_cond = group_of(*ck) == Group::NP;
    if (a->is_pointer() || b->is_pointer() || a->is_record_pointer() || b->is_record_pointer()) {
      if (np_cond) throw TypeError(x.loc, "per-node selection between pointers is not possible");
      if (a != b) throw TypeError(x.loc, "'?:' branches have different pointer types");
      x.type = a;
      return;
    }
    auto ak = a->table_kind();
    auto bk = b->table_kind();
    if (!ak || !bk) throw TypeError(x.loc, "'?:' branches must be scalars");
    auto common = common_kind(*ak, *bk);
    if (!common) throw TypeError(x.loc, "'?:' branches " + type_name(a) + " and " + type_name(b) +
                                            " have no common type; add an explicit cast");
    if (np_cond && group_of(*common) == Group::CP) common = TableKind::LocalInt;
    convert_kind(x.args[1], *common, "'?:' branch");
    convert_kind(x.args[2], *common, "'?:' branch");
    x.type = types().scalar(*common);
  }

  void index(Expr& x) {
    rvalue(x.args[0]);
    const TypeDesc* base = x.args[0]->type;
    if (!base->is_pointer()) throw TypeError(x.loc, "subscripted value is not an array or pointer");
    if (base->elem->kind == TypeKind::Void) throw TypeError(x.loc, "subscript of void*");
    rvalue(x.args[1]);
    const TypeDesc* it = x.args[1]->type;
    if (it->kind == TypeKind::LocalInt)
      throw TypeError(x.args[1]->loc, "array subscripts are generated on the CP and cannot be localint; "
                                      "set a per-node displacement with localoffset() instead");
    if (it->kind != TypeKind::Int)
      throw TypeError(x.args[1]->loc, "array subscript must be int, found " + type_name(it));
    x.type = base->elem;
    x.lvalue = true;
  }

  const RecordInfo* member_object(Expr& x) {
    if (x.arrow) {
      rvalue(x.args[0]);
      const TypeDesc* t = x.args[0]->type;
      if (!t->is_record_pointer()) throw TypeError(x.loc, "'->' needs a pointer to a struct or class");
      return t->elem->record;
    }
    expr(x.args[0]);
    const TypeDesc* t = x.args[0]->type;
    if (t->kind != TypeKind::Record) throw TypeError(x.loc, "'.' needs a struct or class, found " + type_name(t));
    return t->record;
  }

  void member(ExprPtr& e) {
    Expr& x = *e;
    const RecordInfo* rec = member_object(x);
    const FieldInfo* f = rec->find_field(x.name);
    if (!f) {
      if (rec->find_method(x.name)) throw TypeError(x.loc, "method '" + x.name + "' must be called");
      throw TypeError(x.loc, "'" + rec->name + "' has no member '" + x.name + "'");
    }
    if (!can_access(f->owner, f->access))
      throw TypeError(x.loc, "'" + x.name + "' is a private member of '" + f->owner->name + "'");
    x.field = f;
    x.type = f->type;
    x.lvalue = true;
  }

  void cast(Expr& x) {
    const TypeDesc* to = resolve_type(*x.cast_type, 0, {});
    rvalue(x.args[0]);
    const TypeDesc* from = x.args[0]->type;
    auto fk = from->table_kind();
    auto tk = to->table_kind();
    if (!fk || !tk) throw TypeError(x.loc, "cannot cast " + type_name(from) + " to " + type_name(to));
    if (!cast_allowed(*fk, *tk)) {
      std::string why = group_of(*fk) == Group::NP && group_of(*tk) == Group::CP
                            ? "casts from NP to CP types are never allowed"
                            : "not permitted by the cast table";
      throw TypeError(x.loc, "cast from " + type_name(from) + " to " + type_name(to) + ": " + why);
    }
    x.type = to;
    x.broadcast = group_of(*fk) == Group::CP && group_of(*tk) == Group::NP;
  }

  void call_arguments(const FunctionInfo& f, std::vector<ExprPtr>& args, size_t first, SourceLoc loc) {
    size_t n = args.size() - first;
    if (n != f.params.size())
      throw TypeError(loc, "'" + f.qualified_name + "' expects " + std::to_string(f.params.size()) +
                               " argument(s), got " + std::to_string(n));
    for (size_t i = 0; i < n; ++i) {
      rvalue(args[first + i]);
      convert(args[first + i], f.params[i]->type, "argument " + std::to_string(i + 1) + " of '" + f.qualified_name + "'");
    }
  }

  void call(Expr& x) {
    Expr& callee = *x.args[0];
    if (callee.kind == ExprKind::Name) {
      Intrinsic in = intrinsic_for(callee.name);
      if (in != Intrinsic::None && !lookup(callee.name)) return intrinsic(x, in);
      Symbol* s = lookup(callee.name);
      if (!s && fn_ && fn_->owner && fn_->owner->find_method(callee.name)) {
        // Implicit `this->method(...)`.
        auto m = Expr::make(ExprKind::Member, callee.loc);
        m->arrow = true;
        m->name = callee.name;
        m->args.push_back(Expr::make(ExprKind::This, callee.loc));
        x.args[0] = std::move(m);
        return call(x);
      }
      if (!s) throw TypeError(callee.loc, "call to undeclared function '" + callee.name + "'");
      if (s->kind != SymbolKind::Function) throw TypeError(callee.loc, "'" + callee.name + "' is not a function");
      callee.symbol = s;
      callee.type = s->type;
      x.callee = s->function;
      call_arguments(*s->function, x.args, 1, x.loc);
      x.type = s->function->result;
      return;
    }
    if (callee.kind == ExprKind::Member) {
      const RecordInfo* rec = member_object(callee);
      FunctionInfo* m = rec->find_method(callee.name);
      if (!m) throw TypeError(callee.loc, "'" + rec->name + "' has no method '" + callee.name + "'");
      const RecordInfo* owner = m->owner;
      if (!can_access(owner, owner->method_access.at(callee.name)))
        throw TypeError(callee.loc, "'" + callee.name + "' is a private member of '" + owner->name + "'");
      x.callee = m;
      call_arguments(*m, x.args, 1, x.loc);
      x.type = m->result;
      return;
    }
    throw TypeError(x.loc, "called object is not a function");
  }

  void intrinsic(Expr& x, Intrinsic in) {
    x.intrinsic = in;
    x.args[0]->type = types().void_type();
    const std::string& nm = x.args[0]->name;
    auto arity = [&](size_t n) {
      if (x.args.size() - 1 != n)
        throw TypeError(x.loc, "'" + nm + "' expects " + std::to_string(n) + " argument(s)");
    };
    switch (in) {
      case Intrinsic::LocalOffset:
        arity(1);
        rvalue(x.args[1]);
        convert(x.args[1], types().scalar(TypeKind::LocalInt), "argument of localoffset");
        x.type = types().void_type();
        return;
      case Intrinsic::Any:
      case Intrinsic::All:
      case Intrinsic::NoneOf: {
        arity(1);
        rvalue(x.args[1]);
        const TypeDesc* t = x.args[1]->type;
        if (!t->is_np_scalar() || t->kind == TypeKind::Vector || t->kind == TypeKind::Complex)
          throw TypeError(x.args[1]->loc, "'" + nm + "' needs a per-node (NP) condition, found " + type_name(t));
        x.type = types().scalar(TypeKind::Int);
        return;
      }
      case Intrinsic::DistributedLoad:
      case Intrinsic::DistributedStore: {
        arity(3);
        rvalue(x.args[1]);
        const TypeDesc* t = x.args[1]->type;
        const TypeDesc* elem = t->is_pointer() ? t->elem : nullptr;
        while (elem && elem->kind == TypeKind::Array) elem = elem->elem;
        if (!elem || !elem->is_np_scalar())
          throw TypeError(x.args[1]->loc, "'" + nm + "' needs an array of an NP type, found " + type_name(t));
        Expr& file = *x.args[2];
        if (file.kind == ExprKind::Name) {
          const Symbol* fs = lookup(file.name);
          if (fs && fs->string_value) {
            file.symbol = fs;
            file.kind = ExprKind::StringLit;
            file.name = *fs->string_value;
          }
        }
        if (file.kind != ExprKind::StringLit)
          throw TypeError(file.loc, "'" + nm + "' needs a file name: a string literal or a const char* bound to one");
        file.type = types().void_type();
        rvalue(x.args[3]);
        convert(x.args[3], types().scalar(TypeKind::Int), "size argument of '" + nm + "'");
        x.operand_type = elem;
        x.type = types().void_type();
        return;
      }
      case Intrinsic::NeighborNp: {
        arity(2);
        rvalue(x.args[1]);
        rvalue(x.args[2]);
        std::int64_t axis = require_constant(*x.args[1], "NEIGHBOR_NP axis");
        std::int64_t sign = require_constant(*x.args[2], "NEIGHBOR_NP direction");
        if (axis < 0) throw TypeError(x.args[1]->loc, "NEIGHBOR_NP axis must be non-negative");
        if (sign != 1 && sign != -1) throw TypeError(x.args[2]->loc, "NEIGHBOR_NP direction must be +1 or -1");
        x.neighbor_axis = static_cast<int>(axis);
        x.neighbor_sign = static_cast<int>(sign);
        x.type = types().scalar(TypeKind::Int);
        return;
      }
      case Intrinsic::None: break;
    }
  }

  TypedProgram p_;
  std::vector<std::map<std::string, Symbol*>> scopes_;
  std::map<std::string, const TypeDesc*> typedefs_;
  std::map<std::string, RecordInfo*> records_;
  FunctionInfo* fn_ = nullptr;
  const RecordInfo* record_ = nullptr;
  int temp_counter_ = 0;
};

// ---- invariant walker -------------------------------------------------------

class InvariantWalker {
 public:
  std::vector<std::string> run(const TypedProgram& p) {
    for (const auto& item : p.tree.items) {
      if (auto* v = std::get_if<VarDecl>(&item)) decl(*v);
      if (auto* f = std::get_if<FuncDef>(&item); f && f->body) stmt(*f->body);
      if (auto* r = std::get_if<RecordDef>(&item)) {
        for (const auto& m : r->members) {
          if (auto* f = std::get_if<FuncDef>(&m); f && f->body) stmt(*f->body);
          if (auto* c = std::get_if<CtorDef>(&m)) {
            for (const auto& init : c->inits)
              for (const auto& a : init.args) expr(*a);
            stmt(*c->body);
          }
        }
      }
    }
    return out_;
  }

 private:
  void decl(const VarDecl& v) {
    for (const auto& d : v.declarators) {
      if (d.init) expr(*d.init);
      for (const auto& a : d.ctor_args) expr(*a);
    }
  }

  void condition(const Expr& e, bool want_np, const char* what) {
    expr(e);
    if (!e.type) return out_.push_back(std::string(what) + " condition is untyped");
    auto k = e.type->table_kind();
    if (!k) {
      if (!want_np && e.type->is_record_pointer()) return;
      return out_.push_back(std::string(what) + " condition is not a scalar");
    }
    bool np = group_of(*k) == Group::NP;
    if (np != want_np) out_.push_back(std::string(what) + " condition has the wrong processor group");
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Expr: expr(*s.expr); break;
      case StmtKind::Decl: decl(*s.decl); break;
      case StmtKind::Return: if (s.expr) expr(*s.expr); break;
      case StmtKind::Block: for (const auto& b : s.body) stmt(*b); break;
      case StmtKind::If:
      case StmtKind::While:
      case StmtKind::Where:
        condition(*s.expr, s.kind == StmtKind::Where, s.kind == StmtKind::Where ? "where" : "if/while");
        stmt(*s.then_branch);
        if (s.else_branch) stmt(*s.else_branch);
        break;
      case StmtKind::For:
        if (s.init) stmt(*s.init);
        if (s.expr) condition(*s.expr, false, "for");
        if (s.step) expr(*s.step);
        stmt(*s.then_branch);
        break;
      case StmtKind::Empty: break;
    }
  }

  void expr(const Expr& e) {
    if (!e.type) out_.push_back("untyped expression at " + std::to_string(e.loc.line));
    if (e.kind == ExprKind::Convert) {
      const TypeDesc* from = e.args[0]->type;
      auto fk = from ? from->table_kind() : std::nullopt;
      auto tk = e.type ? e.type->table_kind() : std::nullopt;
      if (fk && tk) {
        if (!promotion_allowed(*fk, *tk))
          out_.push_back("conversion " + type_name(from) + " -> " + type_name(e.type) + " is not a promotion");
        bool bc = group_of(*fk) == Group::CP && group_of(*tk) == Group::NP;
        if (bc != e.broadcast) out_.push_back("broadcast flag mismatch on conversion");
      } else if (!(from && e.type && e.type->is_record_pointer() &&
                   (from->is_record_pointer() || from->kind == TypeKind::Int))) {
        out_.push_back("conversion between non-table types");
      }
    }
    if (e.kind == ExprKind::Cast) {
      auto fk = e.args[0]->type ? e.args[0]->type->table_kind() : std::nullopt;
      auto tk = e.type ? e.type->table_kind() : std::nullopt;
      if (!fk || !tk || !cast_allowed(*fk, *tk)) out_.push_back("cast outside the cast table");
    }
    if (e.kind == ExprKind::Call && (e.callee || e.intrinsic != Intrinsic::None)) {
      // The callee names a function, not a value; only its object is typed.
      for (const auto& a : e.args[0]->args)
        if (a) expr(*a);
      for (size_t i = 1; i < e.args.size(); ++i) expr(*e.args[i]);
      return;
    }
    for (const auto& a : e.args)
      if (a) expr(*a);
  }

  std::vector<std::string> out_;
};

}  // namespace

Intrinsic intrinsic_for(const std::string& name) {
  if (name == "localoffset") return Intrinsic::LocalOffset;
  if (name == "any") return Intrinsic::Any;
  if (name == "all") return Intrinsic::All;
  if (name == "none") return Intrinsic::NoneOf;
  if (name == "distributed_load") return Intrinsic::DistributedLoad;
  if (name == "distributed_store") return Intrinsic::DistributedStore;
  if (name == "NEIGHBOR_NP") return Intrinsic::NeighborNp;
  return Intrinsic::None;
}

TypedProgram typecheck_program(SyntaxTree tree) { return Checker(std::move(tree)).run(); }

std::vector<std::string> typed_invariant_violations(const TypedProgram& program) {
  return InvariantWalker().run(program);
}

}  // namespace simdcc
