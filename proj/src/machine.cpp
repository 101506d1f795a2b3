#include "simdcc/machine.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <sstream>

#include "simdcc/lower.hpp"
#include "simdcc/runtime_io.hpp"

namespace simdcc {

// ---- lane encoding ----------------------------------------------------------

std::uint64_t float_bits(float f) {
  std::uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}
std::uint64_t double_bits(double d) {
  std::uint64_t b;
  std::memcpy(&b, &d, 8);
  return b;
}
std::uint64_t int_bits(std::int32_t i) { return static_cast<std::uint32_t>(i); }
std::uint64_t pair_bits(float x, float y) { return float_bits(x) | float_bits(y) << 32; }
float bits_float(std::uint64_t b) {
  std::uint32_t w = static_cast<std::uint32_t>(b);
  float f;
  std::memcpy(&f, &w, 4);
  return f;
}
double bits_double(std::uint64_t b) {
  double d;
  std::memcpy(&d, &b, 8);
  return d;
}
std::int32_t bits_int(std::uint64_t b) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(b)); }
float bits_x(std::uint64_t b) { return bits_float(b); }
float bits_y(std::uint64_t b) { return bits_float(b >> 32); }

// ---- masks and reductions ---------------------------------------------------

void MaskStack::push(const std::vector<std::uint8_t>& cond) {
  const auto& outer = effective();
  std::vector<std::uint8_t> top(outer.size());
  for (size_t i = 0; i < top.size(); ++i) top[i] = outer[i] && cond.at(i);
  stack_.push_back(std::move(top));
}

void MaskStack::else_branch() {
  if (stack_.empty()) throw TrapError("WHERE_ELSE without an open where");
  const auto& outer = stack_.size() > 1 ? stack_[stack_.size() - 2] : all_;
  auto& top = stack_.back();
  // top == outer & cond, so outer & !top == outer & !cond.
  for (size_t i = 0; i < top.size(); ++i) top[i] = outer[i] && !top[i];
}

void MaskStack::pop() {
  if (stack_.empty()) throw TrapError("WHERE_POP without an open where");
  stack_.pop_back();
}

const std::vector<std::uint8_t>& MaskStack::effective() const { return stack_.empty() ? all_ : stack_.back(); }

int reduce(ReduceKind kind, const std::vector<std::uint8_t>& cond, const std::vector<std::uint8_t>& mask) {
  bool any = false;
  bool all = true;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    any = any || cond[i];
    all = all && cond[i];
  }
  switch (kind) {
    case ReduceKind::Any: return any;
    case ReduceKind::All: return all;
    case ReduceKind::None: return !any;
  }
  return 0;
}

std::pair<std::int64_t, std::int64_t> resolve_address(const Topology& t, std::int64_t W, std::int64_t node,
                                                      std::int64_t eff) {
  if (eff < 0) throw TrapError("negative NP address " + std::to_string(eff));
  const std::int64_t w = eff / W;
  const std::int64_t local = eff % W;
  if (w == 0) return {node, local};
  if (w > 2 * t.rank())
    throw TrapError("NP address " + std::to_string(eff) + " selects window " + std::to_string(w) +
                    ", but a rank-" + std::to_string(t.rank()) + " torus has only " + std::to_string(2 * t.rank()));
  const int axis = static_cast<int>((w - 1) / 2);
  const int sign = (w - 1) % 2 == 0 ? +1 : -1;
  return {t.neighbor(node, axis, sign), local};
}

// ---- lane arithmetic --------------------------------------------------------

namespace {

constexpr std::size_t kMaxCpStack = 1 << 20;
constexpr std::size_t kMaxNpStack = 1 << 12;
constexpr std::size_t kMaxFrames = 1 << 16;

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

std::int32_t int_op(Op op, std::int32_t x, std::int32_t y, const char* where) {
  switch (op) {
    case Op::Add: return wrap(static_cast<std::int64_t>(x) + y);
    case Op::Sub: return wrap(static_cast<std::int64_t>(x) - y);
    case Op::Mul: return wrap(static_cast<std::int64_t>(x) * y);
    case Op::Div:
    case Op::Mod:
      if (y == 0) throw TrapError(std::string("integer division by zero on ") + where);
      if (x == INT32_MIN && y == -1) return op == Op::Div ? INT32_MIN : 0;
      return op == Op::Div ? x / y : x % y;
    case Op::And: return x & y;
    case Op::Or: return x | y;
    case Op::Xor: return x ^ y;
    case Op::Shl: return wrap(static_cast<std::int64_t>(static_cast<std::uint32_t>(x) << (y & 31)));
    case Op::Shr: return x >> (y & 31);
    case Op::Eq: return x == y;
    case Op::Ne: return x != y;
    case Op::Lt: return x < y;
    case Op::Le: return x <= y;
    case Op::Gt: return x > y;
    case Op::Ge: return x >= y;
    default: throw TrapError(std::string("bad integer operation ") + op_name(op));
  }
}

template <class T>
bool compare(Op op, T x, T y) {
  switch (op) {
    case Op::Eq: return x == y;
    case Op::Ne: return x != y;
    case Op::Lt: return x < y;
    case Op::Le: return x <= y;
    case Op::Gt: return x > y;
    case Op::Ge: return x >= y;
    default: throw TrapError("bad comparison");
  }
}

template <class T>
T real_op(Op op, T x, T y) {
  switch (op) {
    case Op::Add: return x + y;
    case Op::Sub: return x - y;
    case Op::Mul: return x * y;
    case Op::Div: return x / y;
    default: throw TrapError(std::string("operation ") + op_name(op) + " is not defined on real lanes");
  }
}

std::uint64_t lane_arith(Op op, ElemKind k, std::uint64_t a, std::uint64_t b, std::int64_t lane) {
  switch (k) {
    case ElemKind::LocalInt: {
      std::string where = "NP lane " + std::to_string(lane);
      return int_bits(int_op(op, bits_int(a), bits_int(b), where.c_str()));
    }
    case ElemKind::Float: return float_bits(real_op(op, bits_float(a), bits_float(b)));
    case ElemKind::Double: return double_bits(real_op(op, bits_double(a), bits_double(b)));
    case ElemKind::Vector: return pair_bits(real_op(op, bits_x(a), bits_x(b)), real_op(op, bits_y(a), bits_y(b)));
    case ElemKind::Complex: {
      const float p = bits_x(a), q = bits_y(a), r = bits_x(b), s = bits_y(b);
      switch (op) {
        case Op::Add: return pair_bits(p + r, q + s);
        case Op::Sub: return pair_bits(p - r, q - s);
        case Op::Mul: return pair_bits(p * r - q * s, p * s + q * r);
        case Op::Div: {
          const float d = r * r + s * s;
          return pair_bits((p * r + q * s) / d, (q * r - p * s) / d);
        }
        default: throw TrapError(std::string("operation ") + op_name(op) + " is not defined on complex lanes");
      }
    }
  }
  return 0;
}

bool lane_compare(Op op, ElemKind k, std::uint64_t a, std::uint64_t b) {
  switch (k) {
    case ElemKind::LocalInt: return compare(op, bits_int(a), bits_int(b));
    case ElemKind::Float: return compare(op, bits_float(a), bits_float(b));
    case ElemKind::Double: return compare(op, bits_double(a), bits_double(b));
    case ElemKind::Vector:
    case ElemKind::Complex: {
      const bool eq = bits_x(a) == bits_x(b) && bits_y(a) == bits_y(b);
      if (op == Op::Eq) return eq;
      if (op == Op::Ne) return !eq;
      throw TrapError("vector/complex lanes are unordered");
    }
  }
  return false;
}

bool truthy(ElemKind k, std::uint64_t b) {
  switch (k) {
    case ElemKind::LocalInt: return bits_int(b) != 0;
    case ElemKind::Float: return bits_float(b) != 0.0f;
    case ElemKind::Double: return bits_double(b) != 0.0;
    default: return bits_x(b) != 0.0f || bits_y(b) != 0.0f;
  }
}

// Round toward zero; NaN becomes 0 and out-of-range values saturate.
std::int32_t to_int(double d) {
  if (std::isnan(d)) return 0;
  if (d >= 2147483647.0) return INT32_MAX;
  if (d <= -2147483648.0) return INT32_MIN;
  return static_cast<std::int32_t>(d);
}

std::uint64_t convert_lane(ElemKind from, ElemKind to, std::uint64_t b) {
  if (from == to) return b;
  double real = 0;
  float single = 0;
  switch (from) {
    case ElemKind::LocalInt:
      real = bits_int(b);
      single = static_cast<float>(bits_int(b));
      break;
    case ElemKind::Float:
      single = bits_float(b);
      real = single;
      break;
    case ElemKind::Double:
      real = bits_double(b);
      single = static_cast<float>(real);
      break;
    default:
      throw TrapError(std::string("no conversion from ") + elem_kind_name(from) + " to " + elem_kind_name(to));
  }
  switch (to) {
    case ElemKind::LocalInt: return int_bits(from == ElemKind::Float ? to_int(single) : to_int(real));
    case ElemKind::Float: return float_bits(single);
    case ElemKind::Double: return double_bits(real);
    case ElemKind::Vector: return pair_bits(single, single);
    case ElemKind::Complex: return pair_bits(single, 0.0f);
  }
  return 0;
}

std::string format_value(const std::string& kind, std::uint64_t bits) {
  char buf[96];
  if (kind == "float") std::snprintf(buf, sizeof buf, "%.9g", bits_float(bits));
  else if (kind == "double") std::snprintf(buf, sizeof buf, "%.17g", bits_double(bits));
  else if (kind == "vector" || kind == "complex") std::snprintf(buf, sizeof buf, "%.9g,%.9g", bits_x(bits), bits_y(bits));
  else std::snprintf(buf, sizeof buf, "%d", bits_int(bits));
  return buf;
}

}  // namespace

// ---- machine ----------------------------------------------------------------

Machine::Machine(const IrProgram& program, RunConfig config)
    : prog_(program), cfg_(std::move(config)), masks_(1) {
  nodes_ = cfg_.topology.nodes();
  W_ = cfg_.np_words;
  if (cfg_.cp_words <= 0 || cfg_.np_words <= 0) throw ConfigError("memory sizes must be positive");
  if (cfg_.cp_words > (1 << 28) || nodes_ * W_ > (std::int64_t{1} << 28))
    throw ConfigError("simulated memory is too large (limit 2^28 words in total per space)");
  if (W_ > INT32_MAX / (2 * cfg_.topology.rank() + 1))
    throw ConfigError("--np-mem is too large for the neighbor windows to fit a CP word");
  if (prog_.cp_static_size > cfg_.cp_words)
    throw ConfigError("program needs " + std::to_string(prog_.cp_static_size) + " CP words of statics, CP memory has " +
                      std::to_string(cfg_.cp_words));
  if (prog_.np_static_size > W_)
    throw ConfigError("program needs " + std::to_string(prog_.np_static_size) +
                      " NP words of statics, each NP memory has " + std::to_string(W_));
  auto problems = verify_ir(prog_);
  if (!problems.empty()) throw InternalError("refusing to run invalid IR: " + problems.front());

  neighbor_values_.assign(prog_.code.size(), 0);
  for (size_t i = 0; i < prog_.code.size(); ++i) {
    const Instr& in = prog_.code[i];
    if (in.stream == Stream::CP && in.op == Op::Neighbor)
      neighbor_values_[i] = neighbor_constant(static_cast<int>(in.a), static_cast<int>(in.b), W_,
                                              cfg_.topology.rank(), in.c != 0)
                                .value;
  }

  cp_mem_.assign(cfg_.cp_words, 0);
  np_mem_.assign(nodes_, std::vector<std::uint32_t>(W_, 0));
  masks_ = MaskStack(nodes_);
  offset_.assign(nodes_, 0);
  cp_sp_ = cp_fp_ = prog_.cp_static_size;
  np_sp_ = np_fp_ = prog_.np_static_size;
  pc_ = prog_.entry;
  halted_ = prog_.code.empty();
}

RunResult Machine::run() {
  RunResult r;
  try {
    while (!halted_) {
      if (steps_ >= cfg_.limit)
        throw TrapError("instruction limit of " + std::to_string(cfg_.limit) + " exceeded");
      step();
    }
    r.halted = true;
    r.exit_code = exit_code_;
  } catch (const TrapError& e) {
    r.trap = Trap{pc_, e.what()};
  }
  r.steps = steps_;
  return r;
}

bool Machine::step() {
  if (halted_) return false;
  if (pc_ < 0 || pc_ >= static_cast<std::int64_t>(prog_.code.size()))
    throw TrapError("program counter " + std::to_string(pc_) + " is outside the code");
  const Instr& in = prog_.code[pc_];
  if (cfg_.trace) {
    const auto& m = masks_.effective();
    *cfg_.trace << pc_ << ' ' << (in.stream == Stream::CP ? "CP" : "NP") << ' ' << op_name(in.op) << ' '
                << std::count(m.begin(), m.end(), 1) << '\n';
  }
  ++steps_;
  exec(in);
  return !halted_;
}

std::int32_t Machine::pop_cp() {
  if (cp_stack_.empty()) throw TrapError("CP operand stack underflow");
  std::int32_t v = cp_stack_.back();
  cp_stack_.pop_back();
  return v;
}

void Machine::push_cp(std::int32_t v) {
  if (cp_stack_.size() >= kMaxCpStack) throw TrapError("CP operand stack overflow");
  cp_stack_.push_back(v);
}

Plane Machine::pop_plane(std::optional<ElemKind> kind) {
  if (np_stack_.empty()) throw TrapError("NP operand stack underflow");
  Plane p = std::move(np_stack_.back());
  np_stack_.pop_back();
  if (kind && p.kind != *kind)
    throw TrapError(std::string("NP operand is ") + elem_kind_name(p.kind) + ", instruction expects " +
                    elem_kind_name(*kind));
  return p;
}

void Machine::push_plane(Plane p) {
  if (np_stack_.size() >= kMaxNpStack) throw TrapError("NP operand stack overflow");
  np_stack_.push_back(std::move(p));
}

Plane Machine::blank(ElemKind k) const { return Plane{k, std::vector<std::uint64_t>(nodes_, 0)}; }

std::int64_t Machine::scale_np(std::int64_t idx, std::int64_t size) const {
  if (idx < 0) return idx * size;
  return (idx / W_) * W_ + (idx % W_) * size;
}

std::int64_t Machine::strip_window(std::int64_t idx) const { return idx < 0 ? idx : idx % W_; }

void Machine::check_cp_range(std::int64_t addr, std::int64_t n) const {
  if (addr < 0 || addr + n > cp_sp_)
    throw TrapError("CP address " + std::to_string(addr) + " (+" + std::to_string(n) +
                    ") is outside the live CP segment [0, " + std::to_string(cp_sp_) + ")");
}

std::pair<std::int64_t, std::int64_t> Machine::np_target(std::int64_t lane, std::int64_t eff,
                                                         std::int64_t words) const {
  auto t = resolve_address(cfg_.topology, W_, lane, eff);
  if (t.second + words > np_sp_)
    throw TrapError("NP address " + std::to_string(t.second) + " (+" + std::to_string(words) + ") on node " +
                    std::to_string(t.first) + " is outside the live NP segment [0, " + std::to_string(np_sp_) + ")");
  return t;
}

void Machine::check_distinct(const std::vector<std::pair<std::int64_t, std::int64_t>>& targets,
                             const std::vector<std::uint8_t>& mask) const {
  std::vector<std::pair<std::int64_t, std::int64_t>> live;
  for (size_t i = 0; i < targets.size(); ++i)
    if (mask[i]) live.push_back(targets[i]);
  std::sort(live.begin(), live.end());
  if (std::adjacent_find(live.begin(), live.end()) != live.end())
    throw TrapError("two nodes store to the same remote word");
}

std::uint64_t Machine::read_np(std::int64_t node, std::int64_t addr, ElemKind kind) const {
  const auto& m = np_mem_.at(node);
  std::uint64_t b = m.at(addr);
  if (elem_words(kind) == 2) b |= static_cast<std::uint64_t>(m.at(addr + 1)) << 32;
  return b;
}

void Machine::write_np(std::int64_t node, std::int64_t addr, ElemKind kind, std::uint64_t bits) {
  auto& m = np_mem_.at(node);
  m.at(addr) = static_cast<std::uint32_t>(bits);
  if (elem_words(kind) == 2) m.at(addr + 1) = static_cast<std::uint32_t>(bits >> 32);
}

void Machine::exec(const Instr& in) {
  if (in.stream == Stream::CP) exec_cp(in);
  else exec_np(in);
}

void Machine::exec_cp(const Instr& in) {
  std::int64_t next = pc_ + 1;
  switch (in.op) {
    case Op::Push: push_cp(static_cast<std::int32_t>(in.a)); break;
    case Op::Pop:
      for (std::int64_t i = 0; i < in.a; ++i) pop_cp();
      break;
    case Op::Dup: {
      if (static_cast<std::int64_t>(cp_stack_.size()) < in.a) throw TrapError("CP operand stack underflow");
      const size_t base = cp_stack_.size() - in.a;
      for (std::int64_t i = 0; i < in.a; ++i) push_cp(cp_stack_[base + i]);
      break;
    }
    case Op::Pick:
      if (static_cast<std::int64_t>(cp_stack_.size()) <= in.a) throw TrapError("CP operand stack underflow");
      push_cp(cp_stack_[cp_stack_.size() - 1 - in.a]);
      break;
    case Op::Swap: {
      std::int32_t b = pop_cp(), a = pop_cp();
      push_cp(b);
      push_cp(a);
      break;
    }
    case Op::Load: {
      std::int64_t addr = pop_cp();
      check_cp_range(addr, in.a);
      for (std::int64_t i = 0; i < in.a; ++i) push_cp(static_cast<std::int32_t>(cp_mem_[addr + i]));
      break;
    }
    case Op::Store: {
      std::int64_t addr = pop_cp();
      check_cp_range(addr, in.a);
      for (std::int64_t i = in.a - 1; i >= 0; --i) cp_mem_[addr + i] = static_cast<std::uint32_t>(pop_cp());
      break;
    }
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
    case Op::Ge: {
      std::int32_t b = pop_cp(), a = pop_cp();
      push_cp(int_op(in.op, a, b, "the CP"));
      break;
    }
    case Op::LNot: push_cp(pop_cp() == 0); break;
    case Op::Neg: push_cp(wrap(-static_cast<std::int64_t>(pop_cp()))); break;
    case Op::BNot: push_cp(~pop_cp()); break;
    case Op::FrameAddr: push_cp(wrap(cp_fp_ + in.a)); break;
    case Op::NpFrameAddr: push_cp(wrap(np_fp_ + in.a)); break;
    case Op::Neighbor: push_cp(wrap(neighbor_values_[pc_])); break;
    case Op::IdxScale: {
      std::int64_t idx = pop_cp();
      std::int64_t r = in.b == static_cast<int>(IndexMode::NP) ? scale_np(idx, in.a) : idx * in.a;
      push_cp(wrap(r));
      break;
    }
    case Op::FatIdx: {
      std::int64_t idx = pop_cp();
      std::int64_t np = pop_cp();
      std::int64_t cpa = pop_cp();
      push_cp(wrap(cpa + strip_window(idx) * in.a));
      push_cp(wrap(np + scale_np(idx, in.b)));
      break;
    }
    case Op::HAdd: {
      std::int64_t np = pop_cp();
      std::int64_t cpa = pop_cp();
      push_cp(wrap(cpa + in.a));
      push_cp(wrap(np + in.b));
      break;
    }
    case Op::Copy2: {
      std::int32_t snp = pop_cp(), scp = pop_cp(), dnp = pop_cp(), dcp = pop_cp();
      if (in.a > 0) {
        check_cp_range(scp, in.a);
        check_cp_range(dcp, in.a);
        std::memmove(&cp_mem_[dcp], &cp_mem_[scp], in.a * sizeof(std::uint32_t));
      }
      push_cp(dnp);
      push_cp(snp);
      break;
    }
    case Op::Jmp: next = in.a; break;
    case Op::Jz:
      if (pop_cp() == 0) next = in.a;
      break;
    case Op::Jnz:
      if (pop_cp() != 0) next = in.a;
      break;
    case Op::Call:
      if (frames_.size() >= kMaxFrames) throw TrapError("call depth limit exceeded");
      frames_.push_back(Frame{pc_ + 1, cp_fp_, np_fp_, cp_sp_, np_sp_});
      next = in.a;
      break;
    case Op::Enter:
      if (cp_sp_ + in.a > cfg_.cp_words) throw TrapError("CP stack overflow");
      if (np_sp_ + in.b > W_) throw TrapError("NP stack overflow");
      cp_fp_ = cp_sp_;
      np_fp_ = np_sp_;
      std::fill(cp_mem_.begin() + cp_sp_, cp_mem_.begin() + cp_sp_ + in.a, 0);
      for (auto& m : np_mem_) std::fill(m.begin() + np_sp_, m.begin() + np_sp_ + in.b, 0);
      cp_sp_ += in.a;
      np_sp_ += in.b;
      break;
    case Op::Ret: {
      if (frames_.empty()) throw TrapError("return with an empty call stack");
      Frame f = frames_.back();
      frames_.pop_back();
      cp_fp_ = f.cp_fp;
      np_fp_ = f.np_fp;
      cp_sp_ = f.cp_sp;
      np_sp_ = f.np_sp;
      next = f.ret;
      break;
    }
    case Op::Halt:
      exit_code_ = in.a ? pop_cp() : 0;
      halted_ = true;
      next = pc_;
      break;
    case Op::Reduce: {
      Plane p = pop_plane();
      std::vector<std::uint8_t> cond(nodes_);
      for (std::int64_t i = 0; i < nodes_; ++i) cond[i] = truthy(p.kind, p.lanes[i]);
      push_cp(reduce(static_cast<ReduceKind>(in.a), cond, masks_.effective()));
      break;
    }
    case Op::DLoad: distributed_load(static_cast<ElemKind>(in.a), in.b); break;
    case Op::DStore: distributed_store(static_cast<ElemKind>(in.a), in.b); break;
    default: throw TrapError(std::string("opcode ") + op_name(in.op) + " is not a CP instruction");
  }
  pc_ = next;
}

void Machine::exec_np(const Instr& in) {
  const auto& mask = masks_.effective();
  const ElemKind k = static_cast<ElemKind>(in.a);
  switch (in.op) {
    case Op::Broadcast: {
      std::uint64_t bits = 0;
      ElemKind from = ElemKind::LocalInt;
      if (in.b == static_cast<int>(BroadcastSource::Raw)) {
        from = k;
        if (elem_words(k) == 2) {
          std::uint64_t hi = static_cast<std::uint32_t>(pop_cp());
          std::uint64_t lo = static_cast<std::uint32_t>(pop_cp());
          bits = lo | hi << 32;
        } else {
          bits = static_cast<std::uint32_t>(pop_cp());
        }
      } else {
        bits = int_bits(pop_cp());
      }
      const std::uint64_t v = convert_lane(from, k, bits);
      Plane p = blank(k);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) p.lanes[i] = v;
      push_plane(std::move(p));
      break;
    }
    case Op::Load: {
      const std::int64_t addr = pop_cp();
      const int words = elem_words(k);
      Plane p = blank(k);
      for (std::int64_t i = 0; i < nodes_; ++i) {
        if (!mask[i]) continue;
        const std::int64_t eff = addr + (in.b ? static_cast<std::int64_t>(offset_[i]) * in.b : 0);
        auto [node, local] = np_target(i, eff, words);
        p.lanes[i] = read_np(node, local, k);
      }
      push_plane(std::move(p));
      break;
    }
    case Op::Store: {
      const std::int64_t addr = pop_cp();
      Plane v = pop_plane(k);
      const int words = elem_words(k);
      std::vector<std::pair<std::int64_t, std::int64_t>> targets(nodes_);
      for (std::int64_t i = 0; i < nodes_; ++i) {
        if (!mask[i]) continue;
        const std::int64_t eff = addr + (in.b ? static_cast<std::int64_t>(offset_[i]) * in.b : 0);
        targets[i] = np_target(i, eff, words);
      }
      check_distinct(targets, mask);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) write_np(targets[i].first, targets[i].second, k, v.lanes[i]);
      break;
    }
    case Op::Copy: {
      const std::int64_t src = pop_cp();
      const std::int64_t dst = pop_cp();
      std::vector<std::pair<std::int64_t, std::int64_t>> to(nodes_);
      std::vector<std::vector<std::uint32_t>> data(nodes_);
      for (std::int64_t i = 0; i < nodes_; ++i) {
        if (!mask[i]) continue;
        auto [sn, sl] = np_target(i, src, in.a);
        to[i] = np_target(i, dst, in.a);
        data[i].assign(np_mem_[sn].begin() + sl, np_mem_[sn].begin() + sl + in.a);
      }
      check_distinct(to, mask);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) std::copy(data[i].begin(), data[i].end(), np_mem_[to[i].first].begin() + to[i].second);
      break;
    }
    case Op::Dup: {
      if (np_stack_.empty()) throw TrapError("NP operand stack underflow");
      Plane p = np_stack_.back();
      push_plane(std::move(p));
      break;
    }
    case Op::Pop: pop_plane(); break;
    case Op::Swap: {
      Plane b = pop_plane(), a = pop_plane();
      push_plane(std::move(b));
      push_plane(std::move(a));
      break;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod: {
      Plane b = pop_plane(k), a = pop_plane(k);
      if (in.op == Op::Mod && k != ElemKind::LocalInt) throw TrapError("MOD is defined only on localint");
      Plane r = blank(k);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = lane_arith(in.op, k, a.lanes[i], b.lanes[i], i);
      push_plane(std::move(r));
      break;
    }
    case Op::Neg: {
      Plane a = pop_plane(k);
      Plane r = blank(k);
      for (std::int64_t i = 0; i < nodes_; ++i) {
        if (!mask[i]) continue;
        const std::uint64_t b = a.lanes[i];
        switch (k) {
          case ElemKind::LocalInt: r.lanes[i] = int_bits(wrap(-static_cast<std::int64_t>(bits_int(b)))); break;
          case ElemKind::Float: r.lanes[i] = float_bits(-bits_float(b)); break;
          case ElemKind::Double: r.lanes[i] = double_bits(-bits_double(b)); break;
          default: r.lanes[i] = pair_bits(-bits_x(b), -bits_y(b)); break;
        }
      }
      push_plane(std::move(r));
      break;
    }
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      Plane b = pop_plane(k), a = pop_plane(k);
      Plane r = blank(ElemKind::LocalInt);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = lane_compare(in.op, k, a.lanes[i], b.lanes[i]);
      push_plane(std::move(r));
      break;
    }
    case Op::Test: {
      Plane a = pop_plane(k);
      Plane r = blank(ElemKind::LocalInt);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = truthy(k, a.lanes[i]);
      push_plane(std::move(r));
      break;
    }
    case Op::LNot:
    case Op::BNot: {
      Plane a = pop_plane(ElemKind::LocalInt);
      Plane r = blank(ElemKind::LocalInt);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = int_bits(in.op == Op::LNot ? bits_int(a.lanes[i]) == 0 : ~bits_int(a.lanes[i]));
      push_plane(std::move(r));
      break;
    }
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Shl:
    case Op::Shr: {
      Plane b = pop_plane(ElemKind::LocalInt), a = pop_plane(ElemKind::LocalInt);
      Plane r = blank(ElemKind::LocalInt);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = int_bits(int_op(in.op, bits_int(a.lanes[i]), bits_int(b.lanes[i]), "NP"));
      push_plane(std::move(r));
      break;
    }
    case Op::Cvt: {
      const ElemKind to = static_cast<ElemKind>(in.b);
      Plane a = pop_plane(k);
      Plane r = blank(to);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = convert_lane(k, to, a.lanes[i]);
      push_plane(std::move(r));
      break;
    }
    case Op::Select: {
      Plane e = pop_plane(k), t = pop_plane(k), c = pop_plane();
      Plane r = blank(k);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) r.lanes[i] = truthy(c.kind, c.lanes[i]) ? t.lanes[i] : e.lanes[i];
      push_plane(std::move(r));
      break;
    }
    case Op::WherePush: {
      Plane c = pop_plane(k);
      std::vector<std::uint8_t> cond(nodes_);
      for (std::int64_t i = 0; i < nodes_; ++i) cond[i] = truthy(k, c.lanes[i]);
      masks_.push(cond);
      break;
    }
    case Op::WhereElse: masks_.else_branch(); break;
    case Op::WherePop: masks_.pop(); break;
    case Op::SetOff: {
      Plane li = pop_plane(ElemKind::LocalInt);
      for (std::int64_t i = 0; i < nodes_; ++i)
        if (mask[i]) offset_[i] = bits_int(li.lanes[i]);
      break;
    }
    case Op::ResetOff: std::fill(offset_.begin(), offset_.end(), 0); break;
    default: throw TrapError(std::string("opcode ") + op_name(in.op) + " is not an NP instruction");
  }
  ++pc_;
}

// ---- distributed I/O --------------------------------------------------------

std::string Machine::data_path(std::int64_t str) const {
  const std::string& name = prog_.strings.at(str);
  auto it = cfg_.bindings.find(name);
  return it == cfg_.bindings.end() ? name : it->second;
}

void Machine::distributed_load(ElemKind kind, std::int64_t str) {
  const std::int64_t size = pop_cp();
  const std::int64_t addr = pop_cp();
  if (size < 0) throw TrapError("distributed_load: negative size_per_node");
  if (size == 0) return;
  const std::int64_t words = size * elem_words(kind);
  if (addr < 0 || addr + words > np_sp_)
    throw TrapError("distributed_load: destination [" + std::to_string(addr) + ", " + std::to_string(addr + words) +
                    ") overflows the live NP segment");
  try {
    DistFile f = read_dist_file(data_path(str));
    check_dist_shape(f, kind, static_cast<std::uint32_t>(nodes_));
    if (size > f.elems_per_node)
      throw ShapeError("size_per_node " + std::to_string(size) + " exceeds the " +
                       std::to_string(f.elems_per_node) + " elements per node in the file");
    for (std::int64_t n = 0; n < nodes_; ++n) {
      auto w = f.node_words(static_cast<std::uint32_t>(n));
      std::copy(w.begin(), w.begin() + words, np_mem_[n].begin() + addr);
    }
  } catch (const IoError& e) {
    throw TrapError(std::string("distributed_load: ") + e.what());
  } catch (const ShapeError& e) {
    throw TrapError(std::string("distributed_load: ") + e.what());
  }
}

void Machine::distributed_store(ElemKind kind, std::int64_t str) {
  const std::int64_t size = pop_cp();
  const std::int64_t addr = pop_cp();
  if (size < 0) throw TrapError("distributed_store: negative size_per_node");
  const std::int64_t words = size * elem_words(kind);
  if (addr < 0 || addr + words > np_sp_)
    throw TrapError("distributed_store: source overflows the live NP segment");
  DistFile f = DistFile::make(kind, static_cast<std::uint32_t>(nodes_), static_cast<std::uint32_t>(size));
  for (std::int64_t n = 0; n < nodes_; ++n)
    f.set_node_words(static_cast<std::uint32_t>(n),
                     std::vector<std::uint32_t>(np_mem_[n].begin() + addr, np_mem_[n].begin() + addr + words));
  try {
    write_dist_file(data_path(str), f);
  } catch (const IoError& e) {
    throw TrapError(std::string("distributed_store: ") + e.what());
  }
}

// ---- dump -------------------------------------------------------------------

std::string Machine::dump_state() const {
  std::vector<const DumpCell*> np_cells, cp_cells;
  for (const auto& c : prog_.cells) (c.space == Space::NP ? np_cells : cp_cells).push_back(&c);
  auto by_addr = [](const DumpCell* a, const DumpCell* b) { return a->addr < b->addr; };
  std::stable_sort(np_cells.begin(), np_cells.end(), by_addr);
  std::stable_sort(cp_cells.begin(), cp_cells.end(), by_addr);
  std::ostringstream os;
  for (std::int64_t n = 0; n < nodes_; ++n) {
    for (const DumpCell* c : np_cells) {
      auto k = elem_kind_from_name(c->kind);
      if (!k || c->addr + elem_words(*k) > W_) continue;
      os << n << ' ' << c->addr << ' ' << c->kind << ' ' << format_value(c->kind, read_np(n, c->addr, *k)) << '\n';
    }
  }
  for (const DumpCell* c : cp_cells) {
    if (c->addr >= cfg_.cp_words) continue;
    os << "CP " << c->addr << ' ' << c->kind << ' ' << format_value(c->kind, cp_mem_[c->addr]) << '\n';
  }
  return os.str();
}

}  // namespace simdcc
