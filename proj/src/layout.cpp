#include "simdcc/layout.hpp"

#include <algorithm>
#include <sstream>

namespace simdcc {

const char* space_name(Space s) { return s == Space::CP ? "CP" : "NP"; }

std::int64_t cp_words_of(const TypeDesc* t) {
  switch (t->kind) {
    case TypeKind::Int: return 1;
    case TypeKind::PtrCP:
    case TypeKind::PtrNP: return t->is_record_pointer() ? 2 : 1;
    case TypeKind::Array: return t->count * cp_words_of(t->elem);
    case TypeKind::Record: return split_record(*t->record).cp_size;
    default: return 0;
  }
}

std::int64_t np_words_of(const TypeDesc* t) {
  switch (t->kind) {
    case TypeKind::Float:
    case TypeKind::LocalInt: return 1;
    case TypeKind::Double:
    case TypeKind::Vector:
    case TypeKind::Complex: return 2;
    case TypeKind::Array: return t->count * np_words_of(t->elem);
    case TypeKind::Record: return split_record(*t->record).np_size;
    default: return 0;
  }
}

const FieldSlot& StructLayout::slot(const FieldInfo* f) const {
  auto it = by_field.find(f);
  if (it == by_field.end()) throw InternalError("no layout slot for field '" + f->name + "'");
  return it->second;
}

StructLayout split_record(const RecordInfo& record) {
  StructLayout out;
  out.record = &record;
  if (record.base) {
    StructLayout base = split_record(*record.base);
    out = std::move(base);
    out.record = &record;
  }
  const bool is_union = record.kind == RecordKind::Union;
  for (const auto& f : record.fields) {
    FieldSlot s;
    s.field = f.get();
    s.cp_size = cp_words_of(f->type);
    s.np_size = np_words_of(f->type);
    if (is_union) {
      out.cp_size = std::max(out.cp_size, s.cp_size);
      out.np_size = std::max(out.np_size, s.np_size);
    } else {
      s.cp_offset = out.cp_size;
      s.np_offset = out.np_size;
      out.cp_size += s.cp_size;
      out.np_size += s.np_size;
    }
    if (s.cp_size) out.cp_part.push_back(s);
    if (s.np_size) out.np_part.push_back(s);
    out.by_field[s.field] = s;
  }
  return out;
}

const StructLayout& LayoutPlan::record(const RecordInfo* r) const {
  auto it = records.find(r);
  if (it == records.end()) throw InternalError("no layout for record '" + r->name + "'");
  return it->second;
}

const Placement& LayoutPlan::global(const Symbol* s) const {
  auto it = globals.find(s);
  if (it == globals.end()) throw InternalError("no placement for global '" + s->name + "'");
  return it->second;
}

const FrameLayout& LayoutPlan::frame(const FunctionInfo* f) const {
  auto it = frames.find(f);
  if (it == frames.end()) throw InternalError("no frame for function '" + f->qualified_name + "'");
  return it->second;
}

namespace {

Placement place(const TypeDesc* t, std::int64_t& cp_top, std::int64_t& np_top) {
  Placement p;
  p.cp_size = cp_words_of(t);
  p.np_size = np_words_of(t);
  p.cp_offset = cp_top;
  p.np_offset = np_top;
  cp_top += p.cp_size;
  np_top += p.np_size;
  return p;
}

void add_entries(std::vector<LayoutEntry>& out, const std::string& name, const Placement& p) {
  if (p.cp_size) out.push_back({name, Space::CP, p.cp_offset, p.cp_size});
  if (p.np_size) out.push_back({name, Space::NP, p.np_offset, p.np_size});
}

}  // namespace

LayoutPlan compute_layout(const TypedProgram& program, const MemoryConfig& memory) {
  LayoutPlan plan;
  std::int64_t cp = 0;
  std::int64_t np = 0;
  for (const Symbol* g : program.globals) {
    if (g->string_value) continue;
    Placement p = place(g->type, cp, np);
    plan.globals[g] = p;
    add_entries(plan.entries, g->name, p);
  }
  plan.cp_static_size = cp;
  plan.np_static_size = np;
  if (cp > memory.cp_words)
    throw CapacityError("CP statics need " + std::to_string(cp) + " words but CP memory has " +
                        std::to_string(memory.cp_words));
  if (np > memory.np_words)
    throw CapacityError("NP statics need " + std::to_string(np) + " words but each NP memory has " +
                        std::to_string(memory.np_words));

  for (const RecordInfo* r : program.record_order) {
    StructLayout s = split_record(*r);
    for (const auto& f : r->fields) {
      const FieldSlot& slot = s.slot(f.get());
      add_entries(plan.entries, r->name + "." + f->name,
                  Placement{slot.cp_offset, slot.np_offset, slot.cp_size, slot.np_size});
    }
    plan.records[r] = std::move(s);
  }

  for (const FunctionInfo& f : program.functions) {
    if (!f.defined) continue;
    FrameLayout frame;
    std::int64_t fcp = 0;
    std::int64_t fnp = 0;
    std::vector<const Symbol*> order;
    if (f.this_param) order.push_back(f.this_param);
    order.insert(order.end(), f.params.begin(), f.params.end());
    order.insert(order.end(), f.locals.begin(), f.locals.end());
    for (const Symbol* s : order) {
      if (s->string_value) continue;
      Placement p = place(s->type, fcp, fnp);
      frame.slots[s] = p;
      add_entries(plan.entries, f.qualified_name + "::" + s->name, p);
    }
    frame.cp_size = fcp;
    frame.np_size = fnp;
    plan.frames[&f] = std::move(frame);
  }
  return plan;
}

std::string format_layout(const LayoutPlan& plan) {
  std::ostringstream os;
  for (const LayoutEntry& e : plan.entries)
    os << e.name << ' ' << space_name(e.space) << ' ' << e.offset << ' ' << e.size << '\n';
  return os.str();
}

}  // namespace simdcc
