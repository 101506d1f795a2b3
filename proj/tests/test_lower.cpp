#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "programs.hpp"
#include "simdcc/driver.hpp"
#include "simdcc/lower.hpp"

using namespace simdcc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IrProgram ir_of(const std::string& src) { return compile_source(src).ir; }

const IrFunction& function(const IrProgram& p, const std::string& name) {
  for (const auto& f : p.functions)
    if (f.name == name) return f;
  throw std::runtime_error("no function " + name);
}

// "TAG OPCODE" for each instruction of a function, operands dropped.
std::vector<std::string> shape(const IrProgram& p, const std::string& fn) {
  std::vector<std::string> out;
  const IrFunction& f = function(p, fn);
  for (std::int64_t i = f.entry; i < f.end; ++i)
    out.push_back(std::string(p.code[i].stream == Stream::CP ? "CP " : "NP ") + op_name(p.code[i].op));
  return out;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<std::string> all_sources() {
  std::vector<std::string> out = {programs::kWhere, programs::kNeighborRead, programs::kRemoteMethod,
                                  programs::kLocalOffset, programs::kMatrixSum};
  for (const auto& p : programs::corpus()) out.push_back(p.source);
  return out;
}

}  // namespace

// Set SIMDCC_UPDATE_GOLDEN=1 to rewrite the .ir files after an intended change.
TEST(Golden, IrText) {
  const fs::path dir = SIMDCC_GOLDEN_DIR;
  const bool update = std::getenv("SIMDCC_UPDATE_GOLDEN") != nullptr;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".cpp") continue;
    ++seen;
    const std::string text = format_ir(ir_of(slurp(entry.path())));
    fs::path expected = entry.path();
    expected.replace_extension(".ir");
    if (update) {
      std::ofstream(expected, std::ios::binary) << text;
      continue;
    }
    ASSERT_TRUE(fs::exists(expected)) << expected;
    EXPECT_EQ(text, slurp(expected)) << entry.path().filename();
  }
  EXPECT_GE(seen, 6);
}

TEST(Lower, IntIncrementIsCpOnly) {
  IrProgram p = ir_of("int k; int main() { k++; return 0; }");
  auto s = shape(p, "main");
  EXPECT_TRUE(contains_run(s, {"CP LOAD", "CP PUSH", "CP ADD", "CP SWAP", "CP STORE"}));
  for (std::int64_t i = function(p, "main").entry; i < function(p, "main").end; ++i)
    if (p.code[i].stream == Stream::NP) {
      EXPECT_EQ(p.code[i].op, Op::ResetOff) << format_instr(p, i);
    }
}

TEST(Lower, DoubleArithmeticIsNp) {
  IrProgram p = ir_of("double a, b, c; int main() { b = a*c-b; return 0; }");
  auto s = shape(p, "main");
  EXPECT_TRUE(contains_run(s, {"CP PUSH", "NP LOAD", "CP PUSH", "NP LOAD", "NP MUL", "CP PUSH", "NP LOAD", "NP SUB",
                               "CP PUSH", "NP STORE"}));
  for (const auto& in : p.code)
    if (in.op == Op::Mul || in.op == Op::Sub) {
      EXPECT_EQ(in.stream, Stream::NP);
    }
}

TEST(Lower, LiteralToNpIsBroadcast) {
  IrProgram p = ir_of("double a; int main() { a = 1.0; return 0; }");
  EXPECT_TRUE(contains_run(shape(p, "main"), {"CP PUSH", "CP PUSH", "NP BROADCAST", "CP PUSH", "NP STORE"}));
  // 1.0 as binary64, low word then high word
  bool found = false;
  for (std::size_t i = 0; i + 1 < p.code.size(); ++i)
    if (p.code[i].op == Op::Push && p.code[i + 1].op == Op::Push && p.code[i].a == 0 &&
        p.code[i + 1].a == static_cast<std::int64_t>(oracle::f64(1.0) >> 32))
      found = true;
  EXPECT_TRUE(found);
}

TEST(Lower, WhereWithoutElsewhere) {
  IrProgram p = ir_of("float x; int main() { where (x > 1.0f) x = 1.0f; return 0; }");
  int push = 0, els = 0, pop = 0;
  for (const auto& in : p.code) {
    push += in.op == Op::WherePush;
    els += in.op == Op::WhereElse;
    pop += in.op == Op::WherePop;
  }
  EXPECT_EQ(push, 1);
  EXPECT_EQ(els, 0);
  EXPECT_EQ(pop, 1);
}

TEST(Lower, MethodTakesHiddenHandle) {
  IrProgram p = ir_of(programs::kRemoteMethod);
  const IrFunction& f = function(p, "C::f");
  // ENTER cp_args np_args: the two handle words plus nothing else on the CP side
  EXPECT_EQ(p.code[f.entry].op, Op::Enter);
  EXPECT_EQ(p.code[f.entry].a, 2);
  EXPECT_EQ(p.code[f.entry].b, 1);
}

TEST(Lower, StreamPurity) {
  for (const auto& src : all_sources()) {
    IrProgram p = ir_of(src);
    for (std::size_t i = 0; i < p.code.size(); ++i) {
      const Op op = p.code[i].op;
      if (op == Op::Jmp || op == Op::Jz || op == Op::Jnz || op == Op::Call || op == Op::Ret || op == Op::Enter ||
          op == Op::Halt) {
        EXPECT_EQ(p.code[i].stream, Stream::CP) << format_instr(p, i);
      }
      // remote access is plain address arithmetic computed on the CP
      if (op == Op::Neighbor || op == Op::IdxScale || op == Op::FatIdx) {
        EXPECT_EQ(p.code[i].stream, Stream::CP) << format_instr(p, i);
      }
    }
    EXPECT_TRUE(verify_ir(p).empty()) << src;
  }
  for (Op op : {Op::Jmp, Op::Jz, Op::Jnz, Op::Call, Op::Ret, Op::Neighbor})
    EXPECT_FALSE(operand_signature(Stream::NP, op).has_value()) << op_name(op);
}

TEST(Lower, VerifyCatchesUnbalancedMasks) {
  IrProgram p = ir_of("float x; int main() { where (x > 0.0f) x = 0.0f; return 0; }");
  for (auto& in : p.code)
    if (in.op == Op::WherePop) {
      in.op = Op::ResetOff;
      break;
    }
  auto problems = verify_ir(p);
  ASSERT_FALSE(problems.empty());
  EXPECT_NE(problems.front().find("where"), std::string::npos) << problems.front();

  IrProgram q = ir_of("int main() { return 0; }");
  q.code.insert(q.code.begin() + function(q, "main").entry + 1, Instr{Stream::NP, Op::Jmp, 0});
  EXPECT_FALSE(verify_ir(q).empty());
}

// Nested where, if and loops in random order: every path must leave the
// mask stack where it found it.
TEST(Lower, RandomControlFlowKeepsMasksBalanced) {
  std::mt19937 rng(4242);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::function<std::string(int)> stmt = [&](int d) -> std::string {
    switch (d == 0 ? 0 : pick(6)) {
      case 0: return pick(2) ? "x = x + 1.0f;" : "i = i + 1;";
      case 1: return "where (x > " + std::to_string(pick(5)) + ".0f) { " + stmt(d - 1) + " }";
      case 2: return "where (x < 2.0f) " + stmt(d - 1) + " elsewhere { " + stmt(d - 1) + " }";
      case 3: return "if (i < 3) { " + stmt(d - 1) + " } else " + stmt(d - 1);
      case 4: return "for (int k = 0; k < 2; k++) { " + stmt(d - 1) + " if (any(x > 9.0f)) return 1; }";
      default: return "while (i < 5) { i = i + 1; " + stmt(d - 1) + " }";
    }
  };
  for (int n = 0; n < 150; ++n) {
    const std::string src = "int i; float x;\nint main() {\n  " + stmt(4) + "\n  " + stmt(3) + "\n  return 0;\n}\n";
    IrProgram p = ir_of(src);
    auto problems = verify_ir(p);
    EXPECT_TRUE(problems.empty()) << src << "\n" << (problems.empty() ? "" : problems.front());
    if (HasFailure()) break;
  }
}

TEST(Neighbor, ConstantValues) {
  EXPECT_EQ(neighbor_constant(0, +1, 65536, 1).value, 65536);
  EXPECT_EQ(neighbor_constant(0, -1, 65536, 1).value, 131072);
  EXPECT_EQ(neighbor_constant(1, +1, 100, 2).value, 300);
  EXPECT_EQ(neighbor_constant(2, -1, 100, 3).value, 600);
  EXPECT_EQ(neighbor_constant(4, -1, 10, 5).value, 100);
}

TEST(Neighbor, DistinctWindows) {
  const int rank = 4;
  const std::int64_t W = 1000;
  std::set<std::int64_t> windows;
  for (int a = 0; a < rank; ++a)
    for (int s : {1, -1}) {
      auto c = neighbor_constant(a, s, W, rank);
      EXPECT_EQ(c.value % W, 0);
      EXPECT_GT(c.value, 0);
      EXPECT_TRUE(windows.insert(c.value / W).second);
    }
  EXPECT_EQ(windows.size(), 8u);
}

TEST(Neighbor, ConfigErrors) {
  EXPECT_THROW(neighbor_constant(5, 1, 65536, 2), ConfigError);
  EXPECT_THROW(neighbor_constant(0, 1, 65536, 4, true), ConfigError);
  EXPECT_NO_THROW(neighbor_constant(0, 1, 65536, 4, false));
  EXPECT_THROW(neighbor_constant(0, 1, 0, 1), ConfigError);
  EXPECT_THROW(neighbor_constant(0, 2, 16, 1), ConfigError);
  EXPECT_THROW(neighbor_constant(3, -1, 1 << 28, 4), ConfigError);  // 8 * 2^28 overflows a word
}

TEST(Artifact, SerializeRoundTrip) {
  for (const auto& src : all_sources()) {
    IrProgram p = ir_of(src);
    IrProgram q = deserialize_ir(serialize_ir(p));
    EXPECT_EQ(format_ir(p), format_ir(q));
    EXPECT_EQ(q.entry, p.entry);
    EXPECT_EQ(q.strings, p.strings);
    EXPECT_EQ(q.cp_static_size, p.cp_static_size);
    EXPECT_EQ(q.np_static_size, p.np_static_size);
    ASSERT_EQ(q.cells.size(), p.cells.size());
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      EXPECT_EQ(q.cells[i].name, p.cells[i].name);
      EXPECT_EQ(q.cells[i].addr, p.cells[i].addr);
      EXPECT_EQ(q.cells[i].kind, p.cells[i].kind);
    }
  }
}

TEST(Artifact, MalformedIsInternalError) {
  EXPECT_THROW(deserialize_ir("not json"), InternalError);
  EXPECT_THROW(deserialize_ir("{}"), InternalError);
  std::string text = serialize_ir(ir_of("int main() { return 0; }"));
  auto pos = text.find("\"version\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(text.find_first_of("0123456789", pos), 1, "9");
  EXPECT_THROW(deserialize_ir(text), InternalError);
}
