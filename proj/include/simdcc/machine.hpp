#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simdcc/ir.hpp"
#include "simdcc/topology.hpp"

namespace simdcc {

struct RunConfig {
  Topology topology;
  std::int64_t cp_words = 65536;
  std::int64_t np_words = 65536;  // per node; also the neighbor window size
  std::uint64_t limit = 100'000'000;
  std::ostream* trace = nullptr;
  std::map<std::string, std::string> bindings;  // data file name -> path
};

/// Lane values are raw bit patterns: float/localint in the low 32 bits,
/// double in all 64, vector/complex as x (low) and y (high) binary32.
struct Plane {
  ElemKind kind = ElemKind::LocalInt;
  std::vector<std::uint64_t> lanes;
};

std::uint64_t float_bits(float f);
std::uint64_t double_bits(double d);
std::uint64_t int_bits(std::int32_t i);
std::uint64_t pair_bits(float x, float y);
float bits_float(std::uint64_t b);
double bits_double(std::uint64_t b);
std::int32_t bits_int(std::uint64_t b);
float bits_x(std::uint64_t b);
float bits_y(std::uint64_t b);

/// Raised inside the machine; run() turns it into a RunResult.
class TrapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Trap {
  std::int64_t pc = 0;
  std::string reason;
};

struct RunResult {
  bool halted = false;
  int exit_code = 0;
  std::optional<Trap> trap;
  std::uint64_t steps = 0;
};

/// Stack of effective masks: every entry already includes its parents.
class MaskStack {
 public:
  explicit MaskStack(std::size_t lanes = 1) : all_(lanes, 1) {}
  void push(const std::vector<std::uint8_t>& cond);
  void else_branch();  // top := enclosing & !cond
  void pop();
  const std::vector<std::uint8_t>& effective() const;
  std::size_t depth() const { return stack_.size(); }

 private:
  std::vector<std::uint8_t> all_;
  std::vector<std::vector<std::uint8_t>> stack_;
};

/// any = OR over active lanes, all = AND over active lanes, none = !any.
/// An empty active set gives any = 0, all = 1, none = 1.
int reduce(ReduceKind kind, const std::vector<std::uint8_t>& cond, const std::vector<std::uint8_t>& mask);

/// Splits an effective NP address into (target node, local address). The
/// window eff div W selects the node: 0 is local, 2a+1 is +1 on axis a,
/// 2a+2 is -1 on axis a. Throws TrapError for negative addresses and
/// windows beyond 2N.
std::pair<std::int64_t, std::int64_t> resolve_address(const Topology& t, std::int64_t np_words, std::int64_t node,
                                                      std::int64_t eff);

class Machine {
 public:
  /// Throws ConfigError when the program does not fit the configuration.
  Machine(const IrProgram& program, RunConfig config);

  RunResult run();
  /// Executes one instruction. False once halted.
  bool step();

  const Topology& topology() const { return cfg_.topology; }
  std::int64_t nodes() const { return nodes_; }
  std::int64_t pc() const { return pc_; }
  bool halted() const { return halted_; }

  const std::vector<std::uint32_t>& cp_memory() const { return cp_mem_; }
  const std::vector<std::uint32_t>& np_memory(std::int64_t node) const { return np_mem_.at(node); }
  std::vector<std::uint32_t>& np_memory(std::int64_t node) { return np_mem_.at(node); }
  std::vector<std::uint32_t>& cp_memory() { return cp_mem_; }
  std::uint64_t read_np(std::int64_t node, std::int64_t addr, ElemKind kind) const;
  void write_np(std::int64_t node, std::int64_t addr, ElemKind kind, std::uint64_t bits);

  const std::vector<std::int32_t>& cp_stack() const { return cp_stack_; }
  const std::vector<Plane>& np_stack() const { return np_stack_; }
  const MaskStack& masks() const { return masks_; }
  const std::vector<std::int32_t>& local_offset() const { return offset_; }
  std::int64_t cp_sp() const { return cp_sp_; }
  std::int64_t np_sp() const { return np_sp_; }

  /// `node addr kind value` per NP cell and node, then `CP addr kind value`.
  std::string dump_state() const;

 private:
  struct Frame {
    std::int64_t ret = 0;
    std::int64_t cp_fp = 0, np_fp = 0, cp_sp = 0, np_sp = 0;
  };

  void exec(const Instr& in);
  void exec_cp(const Instr& in);
  void exec_np(const Instr& in);

  std::int32_t pop_cp();
  void push_cp(std::int32_t v);
  Plane pop_plane(std::optional<ElemKind> kind = std::nullopt);
  void push_plane(Plane p);
  Plane blank(ElemKind k) const;
  std::int64_t scale_np(std::int64_t idx, std::int64_t size) const;
  std::int64_t strip_window(std::int64_t idx) const;
  void check_cp_range(std::int64_t addr, std::int64_t n) const;
  std::pair<std::int64_t, std::int64_t> np_target(std::int64_t lane, std::int64_t eff, std::int64_t words) const;
  void check_distinct(const std::vector<std::pair<std::int64_t, std::int64_t>>& targets,
                      const std::vector<std::uint8_t>& mask) const;
  std::string data_path(std::int64_t str) const;
  void distributed_load(ElemKind kind, std::int64_t str);
  void distributed_store(ElemKind kind, std::int64_t str);

  IrProgram prog_;
  RunConfig cfg_;
  std::int64_t nodes_ = 1;
  std::int64_t W_ = 0;
  std::vector<std::int64_t> neighbor_values_;  // per instruction, NEIGHBOR only

  std::vector<std::uint32_t> cp_mem_;
  std::vector<std::vector<std::uint32_t>> np_mem_;
  std::vector<std::int32_t> cp_stack_;
  std::vector<Plane> np_stack_;
  std::vector<Frame> frames_;
  MaskStack masks_;
  std::vector<std::int32_t> offset_;
  std::int64_t pc_ = 0;
  std::int64_t cp_fp_ = 0, np_fp_ = 0, cp_sp_ = 0, np_sp_ = 0;
  bool halted_ = false;
  int exit_code_ = 0;
  std::uint64_t steps_ = 0;
};

}  // namespace simdcc
