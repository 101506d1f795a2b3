#include "simdcc/ir.hpp"

#include <map>
#include <sstream>

#include "json.hpp"

namespace simdcc {

using json = nlohmann::json;

int elem_words(ElemKind k) {
  switch (k) {
    case ElemKind::Float:
    case ElemKind::LocalInt: return 1;
    default: return 2;
  }
}

const char* elem_kind_name(ElemKind k) {
  switch (k) {
    case ElemKind::Float: return "float";
    case ElemKind::Double: return "double";
    case ElemKind::LocalInt: return "localint";
    case ElemKind::Vector: return "vector";
    case ElemKind::Complex: return "complex";
  }
  return "?";
}

std::optional<ElemKind> elem_kind_from_name(std::string_view name) {
  for (ElemKind k : {ElemKind::Float, ElemKind::Double, ElemKind::LocalInt, ElemKind::Vector, ElemKind::Complex})
    if (name == elem_kind_name(k)) return k;
  return std::nullopt;
}

std::optional<ElemKind> elem_kind_of(const TypeDesc* t) {
  switch (t->kind) {
    case TypeKind::Float: return ElemKind::Float;
    case TypeKind::Double: return ElemKind::Double;
    case TypeKind::LocalInt: return ElemKind::LocalInt;
    case TypeKind::Vector: return ElemKind::Vector;
    case TypeKind::Complex: return ElemKind::Complex;
    default: return std::nullopt;
  }
}

namespace {

constexpr const char* kOpNames[] = {
#define SIMDCC_OP_NAME(name, text) text,
    SIMDCC_OPCODES(SIMDCC_OP_NAME)
#undef SIMDCC_OP_NAME
};

const char* reduce_name(std::int64_t r) {
  switch (static_cast<ReduceKind>(r)) {
    case ReduceKind::Any: return "any";
    case ReduceKind::All: return "all";
    case ReduceKind::None: return "none";
  }
  return "?";
}

bool is_branch(Op op) { return op == Op::Jmp || op == Op::Jz || op == Op::Jnz || op == Op::Call || op == Op::Ret; }

}  // namespace

const char* op_name(Op op) { return kOpNames[static_cast<int>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
  for (size_t i = 0; i < std::size(kOpNames); ++i)
    if (name == kOpNames[i]) return static_cast<Op>(i);
  return std::nullopt;
}

std::optional<std::string_view> operand_signature(Stream s, Op op) {
  if (s == Stream::CP) {
    switch (op) {
      case Op::Push:
      case Op::Pop:
      case Op::Dup:
      case Op::Pick:
      case Op::Load:
      case Op::Store:
      case Op::FrameAddr:
      case Op::NpFrameAddr:
      case Op::Copy2:
      case Op::Halt: return "i";
      case Op::Swap:
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Mod:
      case Op::And:
      case Op::Or:
      case Op::Xor:
      case Op::Shl:
      case Op::Shr:
      case Op::Eq:
      case Op::Ne:
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
      case Op::LNot:
      case Op::Neg:
      case Op::BNot:
      case Op::Ret: return "";
      case Op::Neighbor: return "iii";
      case Op::IdxScale: return "im";
      case Op::FatIdx:
      case Op::HAdd:
      case Op::Enter: return "ii";
      case Op::Jmp:
      case Op::Jz:
      case Op::Jnz:
      case Op::Call: return "t";
      case Op::Reduce: return "r";
      case Op::DLoad:
      case Op::DStore: return "ks";
      default: return std::nullopt;
    }
  }
  switch (op) {
    case Op::Broadcast: return "kb";
    case Op::Load:
    case Op::Store: return "ki";
    case Op::Dup:
    case Op::Pop:
    case Op::Swap:
    case Op::LNot:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Shl:
    case Op::Shr:
    case Op::BNot:
    case Op::WhereElse:
    case Op::WherePop:
    case Op::SetOff:
    case Op::ResetOff: return "";
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod:
    case Op::Neg:
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Test:
    case Op::Select:
    case Op::WherePush: return "k";
    case Op::Cvt: return "kk";
    case Op::Copy: return "i";
    default: return std::nullopt;
  }
}

namespace {

std::int64_t operand(const Instr& in, size_t i) { return i == 0 ? in.a : i == 1 ? in.b : in.c; }
void set_operand(Instr& in, size_t i, std::int64_t v) { (i == 0 ? in.a : i == 1 ? in.b : in.c) = v; }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_instr(const IrProgram& p, std::int64_t idx) {
  const Instr& in = p.code.at(idx);
  std::ostringstream os;
  os << idx << ' ' << (in.stream == Stream::CP ? "CP" : "NP") << ' ' << op_name(in.op);
  auto sig = operand_signature(in.stream, in.op);
  if (!sig) return os.str() + " <invalid>";
  for (size_t i = 0; i < sig->size(); ++i) {
    std::int64_t v = operand(in, i);
    os << ' ';
    switch ((*sig)[i]) {
      case 'k': os << elem_kind_name(static_cast<ElemKind>(v)); break;
      case 'r': os << reduce_name(v); break;
      case 'm': os << (v == static_cast<int>(IndexMode::NP) ? "np" : "cp"); break;
      case 'b': os << (v == static_cast<int>(BroadcastSource::Raw) ? "raw" : "int"); break;
      case 's': os << (v >= 0 && v < static_cast<std::int64_t>(p.strings.size()) ? quote(p.strings[v]) : "?"); break;
      default: os << v; break;
    }
  }
  return os.str();
}

std::string format_ir(const IrProgram& p) {
  std::ostringstream os;
  std::map<std::int64_t, const IrFunction*> starts;
  for (const auto& f : p.functions) starts[f.entry] = &f;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(p.code.size()); ++i) {
    if (auto it = starts.find(i); it != starts.end()) os << "; " << it->second->name << '\n';
    os << format_instr(p, i) << '\n';
  }
  return os.str();
}

// ---- serialization ----------------------------------------------------------

std::string serialize_ir(const IrProgram& p) {
  json j;
  j["format"] = "simdcc-ir";
  j["version"] = IrProgram::kVersion;
  j["entry"] = p.entry;
  j["cp_static_size"] = p.cp_static_size;
  j["np_static_size"] = p.np_static_size;
  j["strings"] = p.strings;
  json fns = json::array();
  for (const auto& f : p.functions) fns.push_back({{"name", f.name}, {"entry", f.entry}, {"end", f.end}});
  j["functions"] = fns;
  json cells = json::array();
  for (const auto& c : p.cells)
    cells.push_back({{"name", c.name}, {"space", space_name(c.space)}, {"addr", c.addr}, {"kind", c.kind}});
  j["cells"] = cells;
  json code = json::array();
  for (const auto& in : p.code) {
    json row = json::array({in.stream == Stream::CP ? "CP" : "NP", op_name(in.op)});
    auto sig = operand_signature(in.stream, in.op);
    for (size_t i = 0; sig && i < sig->size(); ++i) row.push_back(operand(in, i));
    code.push_back(row);
  }
  j["code"] = code;
  return j.dump(1) + "\n";
}

IrProgram deserialize_ir(const std::string& text) {
  IrProgram p;
  try {
    json j = json::parse(text);
    if (j.value("format", "") != "simdcc-ir") throw InternalError("not an IR artifact");
    int version = j.at("version").get<int>();
    if (version != IrProgram::kVersion)
      throw InternalError("IR artifact version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(IrProgram::kVersion) + ")");
    p.entry = j.at("entry").get<std::int64_t>();
    p.cp_static_size = j.at("cp_static_size").get<std::int64_t>();
    p.np_static_size = j.at("np_static_size").get<std::int64_t>();
    p.strings = j.at("strings").get<std::vector<std::string>>();
    for (const auto& f : j.at("functions"))
      p.functions.push_back({f.at("name").get<std::string>(), f.at("entry").get<std::int64_t>(),
                             f.at("end").get<std::int64_t>()});
    for (const auto& c : j.at("cells")) {
      DumpCell cell;
      cell.name = c.at("name").get<std::string>();
      cell.space = c.at("space").get<std::string>() == "NP" ? Space::NP : Space::CP;
      cell.addr = c.at("addr").get<std::int64_t>();
      cell.kind = c.at("kind").get<std::string>();
      p.cells.push_back(cell);
    }
    for (const auto& row : j.at("code")) {
      Instr in;
      std::string tag = row.at(0).get<std::string>();
      if (tag != "CP" && tag != "NP") throw InternalError("bad stream tag '" + tag + "'");
      in.stream = tag == "CP" ? Stream::CP : Stream::NP;
      std::string name = row.at(1).get<std::string>();
      auto op = op_from_name(name);
      if (!op) throw InternalError("unknown opcode '" + name + "'");
      in.op = *op;
      auto sig = operand_signature(in.stream, in.op);
      if (!sig) throw InternalError("opcode " + name + " does not exist in the " + tag + " stream");
      if (row.size() != sig->size() + 2) throw InternalError("wrong operand count for " + name);
      for (size_t i = 0; i < sig->size(); ++i) set_operand(in, i, row.at(i + 2).get<std::int64_t>());
      p.code.push_back(in);
    }
  } catch (const json::exception& e) {
    throw InternalError(std::string("malformed IR artifact: ") + e.what());
  }
  auto problems = verify_ir(p);
  if (!problems.empty()) throw InternalError("invalid IR artifact: " + problems.front());
  return p;
}

// ---- verification -----------------------------------------------------------

std::vector<std::string> verify_ir(const IrProgram& p) {
  std::vector<std::string> out;
  const auto n = static_cast<std::int64_t>(p.code.size());
  auto where = [&](std::int64_t pc) { return "instruction " + std::to_string(pc) + " (" + format_instr(p, pc) + ")"; };

  for (std::int64_t pc = 0; pc < n; ++pc) {
    const Instr& in = p.code[pc];
    auto sig = operand_signature(in.stream, in.op);
    if (!sig) {
      out.push_back(where(pc) + ": opcode not valid in this stream");
      continue;
    }
    if (is_branch(in.op) && in.stream != Stream::CP) out.push_back(where(pc) + ": branch on the NP stream");
    for (size_t i = 0; i < sig->size(); ++i) {
      std::int64_t v = operand(in, i);
      char c = (*sig)[i];
      bool ok = true;
      if (c == 'k') ok = v >= 1 && v <= 5;
      if (c == 't') ok = v >= 0 && v < n;
      if (c == 's') ok = v >= 0 && v < static_cast<std::int64_t>(p.strings.size());
      if (c == 'r') ok = v >= 0 && v <= 2;
      if (c == 'm' || c == 'b') ok = v == 0 || v == 1;
      if (!ok) out.push_back(where(pc) + ": operand " + std::to_string(i + 1) + " out of range");
    }
  }
  if (!out.empty()) return out;
  if (n > 0 && (p.entry < 0 || p.entry >= n)) out.push_back("entry point out of range");

  // Regions: the entry stub and every function body.
  std::vector<std::pair<std::int64_t, std::int64_t>> regions;
  std::int64_t first = n;
  for (const auto& f : p.functions) {
    if (f.entry < 0 || f.end > n || f.entry >= f.end) {
      out.push_back("function '" + f.name + "' has an invalid extent");
      continue;
    }
    regions.emplace_back(f.entry, f.end);
    first = std::min(first, f.entry);
  }
  if (first > 0) regions.emplace_back(0, first);

  for (auto [lo, hi] : regions) {
    std::map<std::int64_t, int> depth;
    std::vector<std::int64_t> work{lo};
    depth[lo] = 0;
    auto flow = [&](std::int64_t from, std::int64_t to, int d) {
      if (to < lo || to >= hi) {
        out.push_back(where(from) + ": control leaves its function");
        return;
      }
      auto [it, fresh] = depth.emplace(to, d);
      if (fresh) work.push_back(to);
      else if (it->second != d)
        out.push_back("instruction " + std::to_string(to) + ": where-mask depth " + std::to_string(it->second) +
                      " and " + std::to_string(d) + " meet");
    };
    while (!work.empty() && out.size() < 50) {
      std::int64_t pc = work.back();
      work.pop_back();
      int d = depth[pc];
      const Instr& in = p.code[pc];
      switch (in.op) {
        case Op::WherePush: flow(pc, pc + 1, d + 1); break;
        case Op::WhereElse:
        case Op::WherePop:
          if (d == 0) {
            out.push_back(where(pc) + ": no open where");
            break;
          }
          flow(pc, pc + 1, in.op == Op::WherePop ? d - 1 : d);
          break;
        case Op::Jmp: flow(pc, in.a, d); break;
        case Op::Jz:
        case Op::Jnz:
          flow(pc, in.a, d);
          flow(pc, pc + 1, d);
          break;
        case Op::Ret:
          if (d != 0) out.push_back(where(pc) + ": returns with " + std::to_string(d) + " open where(s)");
          break;
        case Op::Halt: break;
        default: flow(pc, pc + 1, d); break;
      }
    }
  }
  return out;
}

}  // namespace simdcc
