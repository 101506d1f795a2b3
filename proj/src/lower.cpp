#include "simdcc/lower.hpp"

#include <climits>
#include <cstring>
#include <map>

namespace simdcc {

NeighborConstant neighbor_constant(int axis, int sign, std::int64_t np_words, int rank, bool named) {
  if (np_words <= 0) throw ConfigError("NP memory size must be positive");
  if (sign != 1 && sign != -1) throw ConfigError("neighbor direction must be +1 or -1");
  if (named && rank > 3)
    throw ConfigError("named neighbor constants (XPLUS_NP ...) exist only for topologies of rank <= 3; use "
                      "NEIGHBOR_NP(axis, sign) on a rank-" + std::to_string(rank) + " topology");
  if (axis < 0 || axis >= rank)
    throw ConfigError("neighbor axis " + std::to_string(axis) + " does not exist in a rank-" +
                      std::to_string(rank) + " topology");
  NeighborConstant c;
  c.axis = axis;
  c.sign = sign;
  c.value = (2 * static_cast<std::int64_t>(axis) + (sign < 0 ? 2 : 1)) * np_words;
  if (c.value > INT32_MAX) throw ConfigError("neighbor constant does not fit a CP word; reduce --np-mem");
  return c;
}

namespace {

enum class AddrKind { CP, NP, Fat };

const TypeDesc* innermost(const TypeDesc* t) {
  while (t->kind == TypeKind::Array) t = t->elem;
  return t;
}

AddrKind addr_kind(const TypeDesc* t) {
  t = innermost(t);
  if (t->kind == TypeKind::Record) return AddrKind::Fat;
  if (t->is_np_scalar()) return AddrKind::NP;
  return AddrKind::CP;
}

std::int64_t addr_words(AddrKind k) { return k == AddrKind::Fat ? 2 : 1; }

struct LValue {
  AddrKind kind = AddrKind::CP;
  std::int64_t stride = 0;  // local-offset scale for NP accesses; 0 = not offset
};

bool is_comparison(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

Op op_for(const std::string& op) {
  static const std::map<std::string, Op> table = {
      {"+", Op::Add}, {"-", Op::Sub}, {"*", Op::Mul}, {"/", Op::Div}, {"%", Op::Mod},
      {"&", Op::And}, {"|", Op::Or},  {"^", Op::Xor}, {"<<", Op::Shl}, {">>", Op::Shr},
      {"==", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt},  {"<=", Op::Le}, {">", Op::Gt},
      {">=", Op::Ge},
  };
  auto it = table.find(op);
  if (it == table.end()) throw InternalError("no opcode for operator '" + op + "'");
  return it->second;
}

class Lowerer {
 public:
  Lowerer(const TypedProgram& p, const LayoutPlan& plan) : p_(p), plan_(plan) {}

  IrProgram run() {
    out_.cp_static_size = plan_.cp_static_size;
    out_.np_static_size = plan_.np_static_size;
    out_.entry = 0;
    call(p_.init);
    if (p_.main) call(p_.main);
    cp(Op::Halt, p_.main && p_.main->result->kind == TypeKind::Int ? 1 : 0);

    init_function();
    for (const FunctionInfo& f : p_.functions)
      if (f.defined && &f != p_.init) function(f);

    for (auto [at, fn] : fixups_) {
      auto it = entries_.find(fn);
      if (it == entries_.end()) throw InternalError("call to unlowered function '" + fn->qualified_name + "'");
      out_.code[at].a = it->second;
    }
    dump_cells();
    auto problems = verify_ir(out_);
    if (!problems.empty()) throw InternalError("lowering produced invalid IR: " + problems.front());
    return std::move(out_);
  }

 private:
  // ---- emission -----------------------------------------------------------

  std::int64_t emit(Stream s, Op op, std::int64_t a = 0, std::int64_t b = 0, std::int64_t c = 0) {
    out_.code.push_back(Instr{s, op, a, b, c});
    return static_cast<std::int64_t>(out_.code.size()) - 1;
  }
  std::int64_t cp(Op op, std::int64_t a = 0, std::int64_t b = 0, std::int64_t c = 0) {
    return emit(Stream::CP, op, a, b, c);
  }
  std::int64_t np(Op op, std::int64_t a = 0, std::int64_t b = 0, std::int64_t c = 0) {
    return emit(Stream::NP, op, a, b, c);
  }
  std::int64_t np(Op op, ElemKind k, std::int64_t b = 0) { return emit(Stream::NP, op, static_cast<int>(k), b); }
  std::int64_t here() const { return static_cast<std::int64_t>(out_.code.size()); }
  void patch(std::int64_t at) { out_.code[at].a = here(); }

  void call(const FunctionInfo* f) { fixups_.emplace_back(cp(Op::Call), f); }

  void add_const(std::int64_t v) {
    if (v == 0) return;
    cp(Op::Push, v);
    cp(Op::Add);
  }

  std::int64_t intern(const std::string& s) {
    auto [it, fresh] = strings_.emplace(s, static_cast<std::int64_t>(out_.strings.size()));
    if (fresh) out_.strings.push_back(s);
    return it->second;
  }

  static ElemKind kind_of(const TypeDesc* t) {
    auto k = elem_kind_of(t);
    if (!k) throw InternalError("'" + type_name(t) + "' is not an NP element type");
    return *k;
  }

  // ---- functions ----------------------------------------------------------

  void begin_function(const FunctionInfo& f) {
    fn_ = &f;
    frame_ = &plan_.frame(&f);
    where_depth_ = 0;
    entries_[&f] = here();
    cp(Op::Enter, frame_->cp_size, frame_->np_size);
    // Arguments arrive in call order; the last one is on top of each stack.
    for (auto it = f.params.rbegin(); it != f.params.rend(); ++it) store_param(*it);
    if (f.this_param) store_param(f.this_param);
    np(Op::ResetOff);
  }

  void end_function(const FunctionInfo& f, std::int64_t entry) {
    if (f.result->kind != TypeKind::Void) push_zero(f.result);
    np(Op::ResetOff);
    cp(Op::Ret);
    out_.functions.push_back({f.qualified_name, entry, here()});
  }

  void store_param(const Symbol* s) {
    const Placement& pl = frame_->slots.at(s);
    if (s->type->is_np_scalar()) {
      np_frame_address(pl.np_offset);
      np(Op::Store, kind_of(s->type), 0);
    } else {
      cp(Op::FrameAddr, pl.cp_offset);
      cp(Op::Store, cp_words_of(s->type));
    }
  }

  void np_frame_address(std::int64_t off) { cp(Op::NpFrameAddr, off); }

  void push_zero(const TypeDesc* t) {
    if (t->is_np_scalar()) {
      cp(Op::Push, 0);
      np(Op::Broadcast, kind_of(t), static_cast<int>(BroadcastSource::Int));
      return;
    }
    for (std::int64_t i = 0; i < cp_words_of(t); ++i) cp(Op::Push, 0);
  }

  void init_function() {
    const FunctionInfo& f = *p_.init;
    std::int64_t entry = here();
    begin_function(f);
    for (const auto& item : p_.tree.items)
      if (auto* v = std::get_if<VarDecl>(&item))
        for (const auto& d : v->declarators) declarator(d);
    end_function(f, entry);
  }

  void function(const FunctionInfo& f) {
    std::int64_t entry = here();
    begin_function(f);
    if (f.is_ctor) ctor_prologue(f);
    statement(*f.body);
    end_function(f, entry);
  }

  void push_this() {
    cp(Op::FrameAddr, frame_->slots.at(fn_->this_param).cp_offset);
    cp(Op::Load, 2);
  }

  static const FunctionInfo* implicit_ctor(const RecordInfo* rec) {
    for (const RecordInfo* r = rec; r; r = r->base) {
      if (r->ctors.empty()) continue;
      for (const FunctionInfo* c : r->ctors)
        if (c->params.empty()) return c;
      return nullptr;
    }
    return nullptr;
  }

  void ctor_prologue(const FunctionInfo& f) {
    const CtorDef& def = *f.ctor_def;
    bool base_done = false;
    for (const auto& init : def.inits) {
      if (!init.base_ctor) continue;
      push_this();
      for (const auto& a : init.args) value(*a);
      call(init.base_ctor);
      base_done = true;
    }
    if (!base_done && f.owner->base) {
      if (const FunctionInfo* c = implicit_ctor(f.owner->base)) {
        push_this();
        call(c);
      }
    }
    for (const auto& init : def.inits) {
      if (!init.field) continue;
      value(*init.args[0]);
      push_this();
      LValue lv = select_field(init.field, 0);
      store(init.field->type, lv);
    }
  }

  // ---- declarations -------------------------------------------------------

  void push_symbol_address(const Symbol* s) {
    AddrKind k = addr_kind(s->type);
    if (s->kind == SymbolKind::Global) {
      const Placement& pl = plan_.global(s);
      if (k != AddrKind::NP) cp(Op::Push, pl.cp_offset);
      if (k != AddrKind::CP) cp(Op::Push, pl.np_offset);
      return;
    }
    auto it = frame_->slots.find(s);
    if (it == frame_->slots.end()) throw InternalError("'" + s->name + "' has no frame slot");
    if (k != AddrKind::NP) cp(Op::FrameAddr, it->second.cp_offset);
    if (k != AddrKind::CP) cp(Op::NpFrameAddr, it->second.np_offset);
  }

  void declarator(const Declarator& d) {
    const Symbol* s = d.symbol;
    if (!s || s->string_value) return;
    if (d.init) {
      value(*d.init);
      push_symbol_address(s);
      store(s->type, LValue{addr_kind(s->type), 0});
    }
    const TypeDesc* elem = innermost(s->type);
    if (elem->kind != TypeKind::Record) return;
    const FunctionInfo* ctor = d.ctor ? d.ctor : implicit_ctor(elem->record);
    if (!ctor) return;
    if (s->type->kind != TypeKind::Array) {
      push_symbol_address(s);
      for (const auto& a : d.ctor_args) value(*a);
      call(ctor);
      return;
    }
    const Symbol* i = d.loop_temp;
    if (!i) throw InternalError("array of records without a loop counter");
    auto counter = [&] { push_symbol_address(i); };
    cp(Op::Push, 0);
    counter();
    cp(Op::Store, 1);
    std::int64_t top = here();
    counter();
    cp(Op::Load, 1);
    cp(Op::Push, s->type->count);
    cp(Op::Lt);
    std::int64_t exit = cp(Op::Jz);
    push_symbol_address(s);
    counter();
    cp(Op::Load, 1);
    cp(Op::FatIdx, cp_words_of(elem), np_words_of(elem));
    call(ctor);
    counter();
    cp(Op::Load, 1);
    cp(Op::Push, 1);
    cp(Op::Add);
    counter();
    cp(Op::Store, 1);
    cp(Op::Jmp, top);
    patch(exit);
  }

  // ---- statements ---------------------------------------------------------

  void statement(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Empty: break;
      case StmtKind::Expr: discard(*s.expr); break;
      case StmtKind::Decl:
        for (const auto& d : s.decl->declarators) declarator(d);
        break;
      case StmtKind::Block:
        for (const auto& b : s.body) statement(*b);
        break;
      case StmtKind::If: {
        truth(*s.expr);
        std::int64_t to_else = cp(Op::Jz);
        statement(*s.then_branch);
        if (s.else_branch) {
          std::int64_t to_end = cp(Op::Jmp);
          patch(to_else);
          statement(*s.else_branch);
          patch(to_end);
        } else {
          patch(to_else);
        }
        break;
      }
      case StmtKind::While: {
        std::int64_t top = here();
        truth(*s.expr);
        std::int64_t exit = cp(Op::Jz);
        statement(*s.then_branch);
        cp(Op::Jmp, top);
        patch(exit);
        break;
      }
      case StmtKind::For: {
        if (s.init) statement(*s.init);
        std::int64_t top = here();
        std::int64_t exit = -1;
        if (s.expr) {
          truth(*s.expr);
          exit = cp(Op::Jz);
        }
        statement(*s.then_branch);
        if (s.step) discard(*s.step);
        cp(Op::Jmp, top);
        if (exit >= 0) patch(exit);
        break;
      }
      case StmtKind::Where: {
        value(*s.expr);
        np(Op::WherePush, kind_of(s.expr->type));
        ++where_depth_;
        statement(*s.then_branch);
        if (s.else_branch) {
          np(Op::WhereElse);
          statement(*s.else_branch);
        }
        np(Op::WherePop);
        --where_depth_;
        break;
      }
      case StmtKind::Return:
        if (s.expr) value(*s.expr);
        np(Op::ResetOff);
        for (int i = 0; i < where_depth_; ++i) np(Op::WherePop);
        cp(Op::Ret);
        break;
    }
  }

  // CP truth value of a CP scalar: one word, non-zero means true.
  void truth(const Expr& e) {
    value(e);
    if (cp_words_of(e.type) == 2) cp(Op::Or);
  }

  // NP condition plane (localint 0/1) for any scalar operand.
  void np_truth(const Expr& e) {
    value(e);
    if (e.type->is_np_scalar()) {
      np(Op::Test, kind_of(e.type));
      return;
    }
    if (cp_words_of(e.type) == 2) cp(Op::Or);
    cp(Op::Push, 0);
    cp(Op::Ne);
    np(Op::Broadcast, ElemKind::LocalInt, static_cast<int>(BroadcastSource::Int));
  }

  void pop_value(const TypeDesc* t) {
    if (t->kind == TypeKind::Void) return;
    if (t->is_np_scalar()) {
      np(Op::Pop);
      return;
    }
    if (std::int64_t n = cp_words_of(t)) cp(Op::Pop, n);
  }

  void discard(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Assign: return assign(e, false);
      case ExprKind::CompoundAssign: return compound_assign(e, false);
      case ExprKind::IncDec: return inc_dec(e, false);
      case ExprKind::Call: return call_expr(e, false);
      default: break;
    }
    if (e.type->kind == TypeKind::Record || e.type->kind == TypeKind::Array) {
      LValue lv = lvalue(e);
      cp(Op::Pop, addr_words(lv.kind));
      return;
    }
    value(e);
    pop_value(e.type);
  }

  // ---- lvalues ------------------------------------------------------------

  void load(const TypeDesc* t, const LValue& lv) {
    if (lv.kind == AddrKind::NP) np(Op::Load, kind_of(t), lv.stride);
    else if (lv.kind == AddrKind::CP) cp(Op::Load, cp_words_of(t));
    else throw LowerError({}, "a record is not a value");
  }

  void store(const TypeDesc* t, const LValue& lv) {
    if (lv.kind == AddrKind::NP) np(Op::Store, kind_of(t), lv.stride);
    else if (lv.kind == AddrKind::CP) cp(Op::Store, cp_words_of(t));
    else throw LowerError({}, "a record is not a value");
  }

  LValue select_field(const FieldInfo* f, std::int64_t stride) {
    const FieldSlot& slot = plan_.record(f->owner).slot(f);
    switch (addr_kind(f->type)) {
      case AddrKind::CP:
        cp(Op::Pop, 1);
        add_const(slot.cp_offset);
        return {AddrKind::CP, 0};
      case AddrKind::NP:
        cp(Op::Swap);
        cp(Op::Pop, 1);
        add_const(slot.np_offset);
        return {AddrKind::NP, stride};
      case AddrKind::Fat:
        if (slot.cp_offset || slot.np_offset) cp(Op::HAdd, slot.cp_offset, slot.np_offset);
        return {AddrKind::Fat, stride};
    }
    return {};
  }

  LValue lvalue(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
        push_symbol_address(e.symbol);
        return {addr_kind(e.type), 0};
      case ExprKind::Deref: {
        value(*e.args[0]);
        AddrKind k = addr_kind(e.type);
        return {k, k == AddrKind::CP ? 0 : np_words_of(e.type)};
      }
      case ExprKind::Index: {
        value(*e.args[0]);
        value(*e.args[1]);
        const TypeDesc* elem = e.type;
        switch (addr_kind(elem)) {
          case AddrKind::CP:
            cp(Op::IdxScale, cp_words_of(elem), static_cast<int>(IndexMode::CP));
            cp(Op::Add);
            return {AddrKind::CP, 0};
          case AddrKind::NP:
            cp(Op::IdxScale, np_words_of(elem), static_cast<int>(IndexMode::NP));
            cp(Op::Add);
            return {AddrKind::NP, np_words_of(elem)};
          case AddrKind::Fat:
            cp(Op::FatIdx, cp_words_of(elem), np_words_of(elem));
            return {AddrKind::Fat, np_words_of(elem)};
        }
        break;
      }
      case ExprKind::Member: {
        const Expr& obj = *e.args[0];
        std::int64_t stride = 0;
        if (e.arrow) {
          value(obj);
          stride = np_words_of(obj.type->elem);
        } else {
          stride = lvalue(obj).stride;
        }
        return select_field(e.field, stride);
      }
      default: break;
    }
    throw LowerError(e.loc, "expression is not addressable");
  }

  // ---- values -------------------------------------------------------------

  void convert_value(const TypeDesc* from, const TypeDesc* to) {
    if (from == to) return;
    if (to->is_record_pointer() && from->kind == TypeKind::Int) {
      cp(Op::Dup, 1);  // null handle (0, 0)
      return;
    }
    auto fk = from->table_kind();
    auto tk = to->table_kind();
    if (!fk || !tk) return;  // record pointer to base pointer: same handle
    bool from_np = group_of(*fk) == Group::NP;
    bool to_np = group_of(*tk) == Group::NP;
    if (!from_np && !to_np) return;
    if (!from_np) {
      np(Op::Broadcast, kind_of(to), static_cast<int>(BroadcastSource::Int));
      return;
    }
    if (!to_np) throw LowerError({}, "NP to CP conversion");
    np(Op::Cvt, static_cast<int>(kind_of(from)), static_cast<int>(kind_of(to)));
  }

  void float_literal(const Expr& e) {
    if (e.type->kind == TypeKind::Float) {
      float f = static_cast<float>(e.float_value);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      cp(Op::Push, static_cast<std::int32_t>(bits));
      np(Op::Broadcast, ElemKind::Float, static_cast<int>(BroadcastSource::Raw));
      return;
    }
    std::uint64_t bits;
    std::memcpy(&bits, &e.float_value, 8);
    cp(Op::Push, static_cast<std::int32_t>(static_cast<std::uint32_t>(bits)));
    cp(Op::Push, static_cast<std::int32_t>(static_cast<std::uint32_t>(bits >> 32)));
    np(Op::Broadcast, ElemKind::Double, static_cast<int>(BroadcastSource::Raw));
  }

  void value(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: cp(Op::Push, static_cast<std::int32_t>(e.int_value)); return;
      case ExprKind::FloatLit: return float_literal(e);
      case ExprKind::Name:
        if (e.symbol->kind == SymbolKind::Neighbor) {
          cp(Op::Neighbor, e.symbol->axis, e.symbol->sign, 1);
          return;
        }
        [[fallthrough]];
      case ExprKind::Deref:
      case ExprKind::Index:
      case ExprKind::Member: {
        if (e.type->kind == TypeKind::Record || e.type->kind == TypeKind::Array)
          throw LowerError(e.loc, "aggregate used as a value");
        LValue lv = lvalue(e);
        load(e.type, lv);
        return;
      }
      case ExprKind::This: push_this(); return;
      case ExprKind::AddrOf:
      case ExprKind::Decay: lvalue(*e.args[0]); return;
      case ExprKind::Unary: return unary(e);
      case ExprKind::Binary: return binary(e);
      case ExprKind::Assign: return assign(e, true);
      case ExprKind::CompoundAssign: return compound_assign(e, true);
      case ExprKind::IncDec: return inc_dec(e, true);
      case ExprKind::Conditional: return conditional(e);
      case ExprKind::Call: return call_expr(e, true);
      case ExprKind::Cast:
      case ExprKind::Convert:
        value(*e.args[0]);
        convert_value(e.args[0]->type, e.type);
        return;
      case ExprKind::StringLit: break;
    }
    throw LowerError(e.loc, "expression cannot be evaluated here");
  }

  void unary(const Expr& e) {
    const Expr& a = *e.args[0];
    value(a);
    if (e.op == "+") return;
    if (!e.type->is_np_scalar()) {
      if (e.op == "!" && cp_words_of(a.type) == 2) cp(Op::Or);
      cp(e.op == "-" ? Op::Neg : e.op == "!" ? Op::LNot : Op::BNot);
      return;
    }
    if (e.op == "-") np(Op::Neg, kind_of(e.type));
    else if (e.op == "~") np(Op::BNot);
    else {
      if (!a.type->is_np_scalar()) throw InternalError("'!' on a CP operand with an NP result");
      np(Op::Test, kind_of(a.type));
      np(Op::LNot);
    }
  }

  std::int64_t pointer_step(const TypeDesc* ptr) const {
    return ptr->kind == TypeKind::PtrNP ? np_words_of(ptr->elem) : cp_words_of(ptr->elem);
  }
  int pointer_mode(const TypeDesc* ptr) const {
    return static_cast<int>(ptr->kind == TypeKind::PtrNP ? IndexMode::NP : IndexMode::CP);
  }

  void binary(const Expr& e) {
    const Expr& a = *e.args[0];
    const Expr& b = *e.args[1];
    const TypeDesc* l = a.type;
    const TypeDesc* r = b.type;
    if (e.op == "&&" || e.op == "||") {
      if (e.type->kind == TypeKind::Int) return cp_logical(e);
      np_truth(a);
      np_truth(b);
      np(e.op == "&&" ? Op::And : Op::Or);
      return;
    }
    if (l->is_pointer() || r->is_pointer()) {
      if (is_comparison(e.op)) {
        if (l->is_record_pointer() && r->is_record_pointer()) return handle_equality(e);
        value(a);
        value(b);
        cp(op_for(e.op));
        return;
      }
      if (l->is_pointer() && r->is_pointer()) {  // difference
        value(a);
        value(b);
        cp(Op::Sub);
        cp(Op::Push, pointer_step(l));
        cp(Op::Div);
        return;
      }
      const TypeDesc* ptr = l->is_pointer() ? l : r;
      if (l->is_pointer()) {
        value(a);
        value(b);
        cp(Op::IdxScale, pointer_step(ptr), pointer_mode(ptr));
      } else {
        value(a);
        cp(Op::IdxScale, pointer_step(ptr), pointer_mode(ptr));
        value(b);
      }
      cp(e.op == "+" ? Op::Add : Op::Sub);
      return;
    }
    value(a);
    value(b);
    const TypeDesc* ot = e.operand_type;
    if (ot->is_np_scalar()) np(op_for(e.op), kind_of(ot));
    else cp(op_for(e.op));
  }

  // Two fat handles: equal when both words match.
  void handle_equality(const Expr& e) {
    value(*e.args[0]);  // acp anp
    value(*e.args[1]);  // acp anp bcp bnp
    cp(Op::Pick, 2);    // ... bnp anp
    cp(Op::Eq);         // acp anp bcp e1
    cp(Op::Swap);       // acp anp e1 bcp
    cp(Op::Pick, 3);    // acp anp e1 bcp acp
    cp(Op::Eq);         // acp anp e1 e2
    cp(Op::And);        // acp anp e
    cp(Op::Swap);
    cp(Op::Pop, 1);
    cp(Op::Swap);
    cp(Op::Pop, 1);
    if (e.op == "!=") cp(Op::LNot);
  }

  void cp_logical(const Expr& e) {
    bool is_and = e.op == "&&";
    truth(*e.args[0]);
    std::int64_t j1 = cp(is_and ? Op::Jz : Op::Jnz);
    truth(*e.args[1]);
    std::int64_t j2 = cp(is_and ? Op::Jz : Op::Jnz);
    cp(Op::Push, is_and ? 1 : 0);
    std::int64_t end = cp(Op::Jmp);
    patch(j1);
    patch(j2);
    cp(Op::Push, is_and ? 0 : 1);
    patch(end);
  }

  void conditional(const Expr& e) {
    const Expr& c = *e.args[0];
    if (c.type->is_np_scalar()) {
      np_truth(c);
      value(*e.args[1]);
      value(*e.args[2]);
      np(Op::Select, kind_of(e.type));
      return;
    }
    truth(c);
    std::int64_t to_else = cp(Op::Jz);
    value(*e.args[1]);
    std::int64_t to_end = cp(Op::Jmp);
    patch(to_else);
    value(*e.args[2]);
    patch(to_end);
  }

  // [addr value] -> stored; leaves value when `keep`.
  void cp_store_top(bool keep) {
    cp(Op::Swap);
    if (keep) {
      cp(Op::Pick, 1);
      cp(Op::Swap);
    }
    cp(Op::Store, 1);
  }

  void assign(const Expr& e, bool want) {
    const Expr& lhs = *e.args[0];
    const Expr& rhs = *e.args[1];
    const TypeDesc* t = lhs.type;
    if (t->kind == TypeKind::Record) {
      const StructLayout& sl = plan_.record(t->record);
      lvalue(lhs);
      lvalue(rhs);
      cp(Op::Copy2, sl.cp_size);
      if (sl.np_size) np(Op::Copy, sl.np_size);
      else cp(Op::Pop, 2);
      return;
    }
    value(rhs);
    if (want) {
      if (t->is_np_scalar()) np(Op::Dup);
      else cp(Op::Dup, cp_words_of(t));
    }
    LValue lv = lvalue(lhs);
    store(t, lv);
  }

  void compound_assign(const Expr& e, bool want) {
    const Expr& lhs = *e.args[0];
    const Expr& rhs = *e.args[1];
    const TypeDesc* lt = lhs.type;
    const TypeDesc* ot = e.operand_type;
    LValue lv = lvalue(lhs);
    cp(Op::Dup, 1);
    if (lt->is_pointer()) {
      cp(Op::Load, 1);
      value(rhs);
      cp(Op::IdxScale, pointer_step(lt), pointer_mode(lt));
      cp(e.op == "+" ? Op::Add : Op::Sub);
      cp_store_top(want);
      return;
    }
    if (!lt->is_np_scalar()) {
      cp(Op::Load, 1);
      value(rhs);
      cp(op_for(e.op));
      cp_store_top(want);
      return;
    }
    np(Op::Load, kind_of(lt), lv.stride);
    convert_value(lt, ot);
    value(rhs);
    np(op_for(e.op), kind_of(ot));
    convert_value(ot, lt);
    if (want) np(Op::Dup);
    np(Op::Store, kind_of(lt), lv.stride);
  }

  void inc_dec(const Expr& e, bool want) {
    const Expr& x = *e.args[0];
    const TypeDesc* t = x.type;
    Op op = e.op == "++" ? Op::Add : Op::Sub;
    LValue lv = lvalue(x);
    cp(Op::Dup, 1);
    if (!t->is_np_scalar()) {
      std::int64_t step = t->is_pointer() ? pointer_step(t) : 1;
      cp(Op::Load, 1);  // addr old
      if (want && !e.prefix) {
        cp(Op::Pick, 0);
        cp(Op::Push, step);
        cp(op);           // addr old new
        cp(Op::Pick, 2);  // addr old new addr
        cp(Op::Store, 1);
        cp(Op::Swap);
        cp(Op::Pop, 1);
        return;
      }
      cp(Op::Push, step);
      cp(op);
      cp_store_top(want);
      return;
    }
    ElemKind k = kind_of(t);
    np(Op::Load, k, lv.stride);
    if (want && !e.prefix) np(Op::Dup);
    cp(Op::Push, 1);
    np(Op::Broadcast, k, static_cast<int>(BroadcastSource::Int));
    np(op, k);
    if (want && e.prefix) np(Op::Dup);
    np(Op::Store, k, lv.stride);
  }

  void call_expr(const Expr& e, bool want) {
    if (e.intrinsic != Intrinsic::None) {
      intrinsic(e);
      if (!want) pop_value(e.type);
      return;
    }
    const FunctionInfo* f = e.callee;
    if (f->owner) {
      const Expr& m = *e.args[0];
      if (m.arrow) value(*m.args[0]);
      else lvalue(*m.args[0]);
    }
    for (size_t i = 1; i < e.args.size(); ++i) value(*e.args[i]);
    call(f);
    if (!want) pop_value(f->result);
  }

  void intrinsic(const Expr& e) {
    switch (e.intrinsic) {
      case Intrinsic::LocalOffset:
        value(*e.args[1]);
        np(Op::SetOff);
        return;
      case Intrinsic::Any:
      case Intrinsic::All:
      case Intrinsic::NoneOf: {
        np_truth(*e.args[1]);
        ReduceKind r = e.intrinsic == Intrinsic::Any   ? ReduceKind::Any
                       : e.intrinsic == Intrinsic::All ? ReduceKind::All
                                                       : ReduceKind::None;
        cp(Op::Reduce, static_cast<int>(r));
        return;
      }
      case Intrinsic::DistributedLoad:
      case Intrinsic::DistributedStore: {
        value(*e.args[1]);
        value(*e.args[3]);
        std::int64_t s = intern(e.args[2]->name);
        cp(e.intrinsic == Intrinsic::DistributedLoad ? Op::DLoad : Op::DStore,
           static_cast<int>(kind_of(e.operand_type)), s);
        return;
      }
      case Intrinsic::NeighborNp:
        cp(Op::Neighbor, e.neighbor_axis, e.neighbor_sign, 0);
        return;
      case Intrinsic::None: break;
    }
    throw InternalError("unknown intrinsic");
  }

  // ---- dump cells ---------------------------------------------------------

  void flatten(const std::string& name, const TypeDesc* t, std::int64_t cpa, std::int64_t npa) {
    switch (t->kind) {
      case TypeKind::Int: out_.cells.push_back({name, Space::CP, cpa, "int"}); return;
      case TypeKind::PtrCP:
      case TypeKind::PtrNP:
        out_.cells.push_back({name, Space::CP, cpa, "ptr"});
        if (t->is_record_pointer()) out_.cells.push_back({name, Space::CP, cpa + 1, "ptr"});
        return;
      case TypeKind::Array:
        for (std::int64_t i = 0; i < t->count; ++i)
          flatten(name + "[" + std::to_string(i) + "]", t->elem, cpa + i * cp_words_of(t->elem),
                  npa + i * np_words_of(t->elem));
        return;
      case TypeKind::Record: {
        const StructLayout& sl = plan_.record(t->record);
        for (const FieldInfo* f : t->record->all_fields()) {
          const FieldSlot& s = sl.slot(f);
          flatten(name + "." + f->name, f->type, cpa + s.cp_offset, npa + s.np_offset);
          if (t->record->kind == RecordKind::Union) break;  // members overlap
        }
        return;
      }
      default:
        if (auto k = elem_kind_of(t)) out_.cells.push_back({name, Space::NP, npa, elem_kind_name(*k)});
        return;
    }
  }

  void dump_cells() {
    for (const Symbol* g : p_.globals) {
      if (g->string_value) continue;
      const Placement& pl = plan_.global(g);
      flatten(g->name, g->type, pl.cp_offset, pl.np_offset);
    }
    // main's frame sits right above the statics once it has run.
    if (p_.main) {
      const FrameLayout& fr = plan_.frame(p_.main);
      for (const Symbol* s : p_.main->locals) {
        if (s->string_value) continue;
        const Placement& pl = fr.slots.at(s);
        flatten("main::" + s->name, s->type, plan_.cp_static_size + pl.cp_offset,
                plan_.np_static_size + pl.np_offset);
      }
    }
  }

  const TypedProgram& p_;
  const LayoutPlan& plan_;
  IrProgram out_;
  std::vector<std::pair<std::int64_t, const FunctionInfo*>> fixups_;
  std::map<const FunctionInfo*, std::int64_t> entries_;
  std::map<std::string, std::int64_t> strings_;
  const FunctionInfo* fn_ = nullptr;
  const FrameLayout* frame_ = nullptr;
  int where_depth_ = 0;
};

}  // namespace

IrProgram lower_program(const TypedProgram& program, const LayoutPlan& plan) {
  return Lowerer(program, plan).run();
}

}  // namespace simdcc
