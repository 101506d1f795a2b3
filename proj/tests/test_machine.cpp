#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <set>
#include <unistd.h>

#include "oracles.hpp"
#include "programs.hpp"
#include "simdcc/lower.hpp"
#include "simdcc/machine.hpp"

using namespace simdcc;

namespace {

// Hand-assembled IR for single-instruction checks.
struct Asm {
  IrProgram p;
  explicit Asm(std::int64_t np_static, std::int64_t cp_static = 4) {
    p.np_static_size = np_static;
    p.cp_static_size = cp_static;
  }
  Asm& cp(Op op, std::int64_t a = 0, std::int64_t b = 0, std::int64_t c = 0) {
    p.code.push_back({Stream::CP, op, a, b, c});
    return *this;
  }
  Asm& np(Op op, std::int64_t a = 0, std::int64_t b = 0) {
    p.code.push_back({Stream::NP, op, a, b, 0});
    return *this;
  }
  Asm& halt() {
    cp(Op::Push, 0);
    return cp(Op::Halt, 1);
  }
  std::int64_t here() const { return static_cast<std::int64_t>(p.code.size()); }
  IrProgram done() {
    p.functions = {{"main", 0, here()}};
    return p;
  }
};

constexpr std::int64_t F = static_cast<std::int64_t>(ElemKind::Float);
constexpr std::int64_t LI = static_cast<std::int64_t>(ElemKind::LocalInt);

RunConfig config(std::vector<std::int64_t> dims, std::int64_t np_words = 256) {
  RunConfig c;
  c.topology = Topology(std::move(dims));
  c.np_words = np_words;
  c.cp_words = 1024;
  return c;
}

std::vector<std::uint8_t> bools(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

}  // namespace

// a@0 b@1 c@2 floats, m@3 localint: where (m) c = a + b;
TEST(Step, MaskedAddStoresActiveLanesOnly) {
  Asm a(4);
  a.cp(Op::Push, 3).np(Op::Load, LI).np(Op::WherePush, LI);
  a.cp(Op::Push, 0).np(Op::Load, F).cp(Op::Push, 1).np(Op::Load, F).np(Op::Add, F);
  a.cp(Op::Push, 2).np(Op::Store, F).np(Op::WherePop).halt();
  Machine m(a.done(), config({4}));
  const float lhs[] = {1, 2, 3, 4}, rhs[] = {10, 20, 30, 40};
  const int mask[] = {1, 0, 1, 0};
  for (int n = 0; n < 4; ++n) {
    m.np_memory(n)[0] = oracle::f32(lhs[n]);
    m.np_memory(n)[1] = oracle::f32(rhs[n]);
    m.np_memory(n)[2] = oracle::f32(-1);
    m.np_memory(n)[3] = mask[n];
  }
  RunResult r = m.run();
  ASSERT_TRUE(r.halted);
  for (int n = 0; n < 4; ++n)
    EXPECT_EQ(m.np_memory(n)[2], oracle::f32(mask[n] ? lhs[n] + rhs[n] : -1.0f)) << n;
  EXPECT_EQ(m.masks().depth(), 0u);
}

TEST(Step, AllFalseWhereLeavesMemoryUnchanged) {
  Asm a(4);
  a.cp(Op::Push, 3).np(Op::Load, LI).np(Op::WherePush, LI);
  a.cp(Op::Push, 7).np(Op::Broadcast, F, static_cast<int>(BroadcastSource::Int));
  a.cp(Op::Push, 0).np(Op::Store, F).np(Op::WherePop).halt();
  Machine m(a.done(), config({2, 2}));
  for (int n = 0; n < 4; ++n) m.np_memory(n)[0] = oracle::f32(0.5f * n);
  auto before = std::vector<std::vector<std::uint32_t>>{m.np_memory(0), m.np_memory(1), m.np_memory(2),
                                                        m.np_memory(3)};
  ASSERT_TRUE(m.run().halted);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(m.np_memory(n), before[n]);
}

// CP instructions inside a where block run even when no node is active.
TEST(Step, CpJumpInsideWhereIsTaken) {
  Asm a(1);
  a.cp(Op::Push, 0).np(Op::Load, LI).np(Op::WherePush, LI);
  const std::int64_t jmp = a.here();
  a.cp(Op::Jmp, 0);
  a.cp(Op::Push, 111).cp(Op::Push, 0).cp(Op::Store, 1);  // skipped
  a.p.code[jmp].a = a.here();
  a.cp(Op::Push, 222).cp(Op::Push, 1).cp(Op::Store, 1);
  a.np(Op::WherePop).halt();
  Machine m(a.done(), config({4}));
  ASSERT_TRUE(m.run().halted);
  EXPECT_EQ(m.cp_memory()[0], 0u);
  EXPECT_EQ(m.cp_memory()[1], 222u);
}

TEST(Step, TraceShowsActiveLanes) {
  Asm a(1);
  a.cp(Op::Push, 0).np(Op::Load, LI).np(Op::WherePush, LI).np(Op::WherePop).halt();
  RunConfig c = config({4});
  std::ostringstream trace;
  c.trace = &trace;
  Machine m(a.done(), c);
  m.np_memory(1)[0] = 1;
  m.run();
  std::istringstream in(trace.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0].rfind("0 CP PUSH", 0), 0u) << lines[0];
  EXPECT_EQ(lines[3].substr(lines[3].rfind(' ') + 1), "1") << lines[3];  // WHERE_POP with one lane active
}

TEST(Run, CpDivisionByZeroTraps) {
  Asm a(0);
  a.cp(Op::Push, 1).cp(Op::Push, 0).cp(Op::Div).halt();
  Machine m(a.done(), config({1}));
  RunResult r = m.run();
  ASSERT_TRUE(r.trap);
  EXPECT_EQ(r.trap->pc, 2);
  EXPECT_NE(r.trap->reason.find("division by zero"), std::string::npos) << r.trap->reason;
}

TEST(Run, InstructionLimitTraps) {
  Asm a(0);
  a.cp(Op::Jmp, 0);
  RunConfig c = config({1});
  c.limit = 50;
  Machine m(a.done(), c);
  RunResult r = m.run();
  ASSERT_TRUE(r.trap);
  EXPECT_EQ(r.steps, 50u);
}

TEST(Run, MaskedLaneDivisionByZeroIsNoOp) {
  oracle::Harness h("localint a, b, q;\nint main() {\n  where (b != 0) q = a / b;\n  return 0;\n}\n", {4});
  const int b[] = {2, 0, 5, 0};
  for (int n = 0; n < 4; ++n) {
    h.poke("a", n, static_cast<std::uint32_t>(10 * (n + 1)));
    h.poke("b", n, static_cast<std::uint32_t>(b[n]));
    h.poke("q", n, static_cast<std::uint32_t>(-7));
  }
  RunResult r = h.run();
  ASSERT_FALSE(r.trap) << r.trap->reason;
  EXPECT_EQ(static_cast<std::int32_t>(h.peek("q", 0)), 5);
  EXPECT_EQ(static_cast<std::int32_t>(h.peek("q", 1)), -7);
  EXPECT_EQ(static_cast<std::int32_t>(h.peek("q", 2)), 6);
  EXPECT_EQ(static_cast<std::int32_t>(h.peek("q", 3)), -7);
}

TEST(Run, ActiveLaneIntegerDivisionByZeroTraps) {
  oracle::Harness h("localint a, b, q;\nint main() { q = a / b; return 0; }\n", {2});
  h.poke("b", 0, 1);
  EXPECT_TRUE(h.run().trap);
}

TEST(Run, ActiveLaneFloatDivisionGivesInfinity) {
  oracle::Harness h("float x, y;\nint main() { y = 1/x; return 0; }\n", {2});
  h.poke("x", 1, oracle::f32(-0.0f));
  ASSERT_FALSE(h.run().trap);
  EXPECT_EQ(h.peek("y", 0), oracle::f32(INFINITY));
  EXPECT_EQ(h.peek("y", 1), oracle::f32(-INFINITY));
}

TEST(Run, EmptyMainExitsZero) {
  oracle::Harness h("int main() { }", {2});
  RunResult r = h.run();
  EXPECT_TRUE(r.halted);
  EXPECT_FALSE(r.trap);
  EXPECT_EQ(r.exit_code, 0);
  for (std::uint32_t w : h.machine->np_memory(1)) ASSERT_EQ(w, 0u);
}

TEST(Run, MainReturnValueIsExitCode) {
  oracle::Harness h("int f(int n) { if (n < 2) return n; return f(n-1) + f(n-2); }\nint main() { return f(10); }",
                    {1});
  EXPECT_EQ(h.run().exit_code, 55);
}

// Per node sequential evaluation of the nested conditionals.
TEST(Run, NestedWhereMatchesPerNodeOracle) {
  const char* src = R"(float x, y;
int main() {
  where (x > 1.0f) {
    where (x < 5.0f) y = 1.0f;
    elsewhere y = 2.0f;
  } elsewhere {
    where (x < 0.0f) y = 3.0f;
  }
  return 0;
}
)";
  oracle::Harness h(src, {8});
  const float xs[] = {0.5f, 2, 6, -1, 1, 5, 4.5f, -3};
  for (int n = 0; n < 8; ++n) {
    h.poke("x", n, oracle::f32(xs[n]));
    h.poke("y", n, oracle::f32(9));
  }
  ASSERT_FALSE(h.run().trap);
  for (int n = 0; n < 8; ++n) {
    float x = xs[n], y = 9;
    if (x > 1) {
      if (x < 5) y = 1;
      else y = 2;
    } else if (x < 0) {
      y = 3;
    }
    EXPECT_EQ(h.peek("y", n), oracle::f32(y)) << n;
  }
}

TEST(ResolveAddress, Examples) {
  Topology t({2, 2});
  const std::int64_t W = 65536;
  const std::int64_t xplus = neighbor_constant(0, 1, W, 2).value;
  EXPECT_EQ(resolve_address(t, W, t.node_at({0, 0}), 3 + xplus), std::make_pair(t.node_at({1, 0}), std::int64_t{3}));
  EXPECT_EQ(resolve_address(t, W, 3, 17), std::make_pair(std::int64_t{3}, std::int64_t{17}));
  EXPECT_THROW(resolve_address(t, W, 0, -1), TrapError);
  EXPECT_THROW(resolve_address(t, W, 0, 5 * W), TrapError);
  EXPECT_NO_THROW(resolve_address(t, W, 0, 5 * W - 1));
}

// Every direction is a permutation that matches the independent torus
// arithmetic, and composes with its opposite to the identity.
TEST(ResolveAddress, NeighborsAreBijections) {
  for (std::vector<std::int64_t> dims : {std::vector<std::int64_t>{2, 2, 2}, {3, 1, 4}, {5}, {2, 3}}) {
    Topology t(dims);
    const std::int64_t W = 64;
    for (int axis = 0; axis < t.rank(); ++axis)
      for (int sign : {1, -1}) {
        const std::int64_t there = neighbor_constant(axis, sign, W, t.rank()).value;
        const std::int64_t back = neighbor_constant(axis, -sign, W, t.rank()).value;
        std::set<std::int64_t> targets;
        for (std::int64_t n = 0; n < t.nodes(); ++n) {
          auto [to, local] = resolve_address(t, W, n, there + 9);
          EXPECT_EQ(local, 9);
          EXPECT_EQ(to, oracle::torus_neighbor(dims, n, axis, sign));
          targets.insert(to);
          EXPECT_EQ(resolve_address(t, W, to, back + 9).first, n);
        }
        EXPECT_EQ(static_cast<std::int64_t>(targets.size()), t.nodes());
      }
  }
}

TEST(ResolveAddress, ShiftRoundTripRestoresValues) {
  oracle::Harness h(programs::kNeighborRead, {2, 2});
  for (int n = 0; n < 4; ++n)
    for (int k = 0; k < 100; ++k) h.poke("v[" + std::to_string(k) + "]", n, oracle::f32(n * 1000.0f + k));
  ASSERT_FALSE(h.run().trap);
  const Topology& t = h.machine->topology();
  for (int n = 0; n < 4; ++n) {
    EXPECT_EQ(h.peek("r", n), oracle::f32(t.neighbor(n, 0, 1) * 1000.0f + 3));
    for (int k = 0; k < 100; k += 11) {
      const std::string i = "[" + std::to_string(k) + "]";
      EXPECT_EQ(h.peek("there" + i, n), oracle::f32(oracle::torus_neighbor({2, 2}, n, 0, 1) * 1000.0f + k));
      EXPECT_EQ(h.peek("back" + i, n), h.peek("v" + i, n));
    }
  }
}

// Offset first, then window resolution: a[i + li] on the +x neighbor.
TEST(ResolveAddress, LocalOffsetBeforeWindow) {
  const char* src = R"(int i;
localint li;
float r, a[16];
int main() {
  i = 2;
  localoffset(li);
  r = a[i+XPLUS_NP];
  localoffset(0);
  return 0;
}
)";
  oracle::Harness h(src, {4});
  for (int n = 0; n < 4; ++n) {
    h.poke("li", n, static_cast<std::uint32_t>(n));
    for (int k = 0; k < 16; ++k) h.poke("a[" + std::to_string(k) + "]", n, oracle::f32(n * 100.0f + k));
  }
  ASSERT_FALSE(h.run().trap);
  for (int n = 0; n < 4; ++n) {
    const std::int64_t target = oracle::torus_neighbor({4}, n, 0, 1);
    EXPECT_EQ(h.peek("r", n), oracle::f32(target * 100.0f + 2 + n)) << n;
  }
  for (std::int32_t o : h.machine->local_offset()) EXPECT_EQ(o, 0);
}

TEST(ResolveAddress, LocalOffsetExample) {
  oracle::Harness h(programs::kLocalOffset, {2, 2});
  for (int n = 0; n < 4; ++n) {
    h.poke("li", n, static_cast<std::uint32_t>(3 * n));
    for (int k = 0; k < 100; ++k) h.poke("a[" + std::to_string(k) + "]", n, oracle::f32(k + 0.25f));
  }
  ASSERT_FALSE(h.run().trap);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(h.peek("r", n), oracle::f32(5 + 3 * n + 0.25f));
}

TEST(Reduce, Examples) {
  const auto full = bools({1, 1, 1, 1});
  const auto cond = bools({1, 0, 0, 0});
  EXPECT_EQ(reduce(ReduceKind::Any, cond, full), 1);
  EXPECT_EQ(reduce(ReduceKind::All, cond, full), 0);
  EXPECT_EQ(reduce(ReduceKind::None, cond, full), 0);
  EXPECT_EQ(reduce(ReduceKind::All, full, full), 1);
  const auto off = bools({0, 0, 0, 0});
  EXPECT_EQ(reduce(ReduceKind::Any, full, off), 0);
  EXPECT_EQ(reduce(ReduceKind::All, off, off), 1);
  EXPECT_EQ(reduce(ReduceKind::None, full, off), 1);
  // inactive lanes are ignored
  EXPECT_EQ(reduce(ReduceKind::All, bools({1, 0, 1, 0}), bools({1, 0, 1, 0})), 1);
}

TEST(Reduce, RandomAgainstFold) {
  std::mt19937 rng(5);
  for (int n = 0; n < 500; ++n) {
    std::vector<std::uint8_t> c(1 + rng() % 9), m(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = rng() & 1;
      m[i] = rng() & 1;
    }
    bool any = false, all = true;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (m[i]) {
        any = any || c[i];
        all = all && c[i];
      }
    EXPECT_EQ(reduce(ReduceKind::Any, c, m), any);
    EXPECT_EQ(reduce(ReduceKind::All, c, m), all);
    EXPECT_EQ(reduce(ReduceKind::None, c, m), !any);
  }
}

TEST(MaskStack, ElseIsComplementWithinEnclosing) {
  MaskStack s(2);
  s.push(bools({1, 0}));
  s.else_branch();
  EXPECT_EQ(s.effective(), bools({0, 1}));
}

TEST(MaskStack, NestedIsConjunctionAndPopRestores) {
  MaskStack s(4);
  s.push(bools({1, 1, 0, 0}));
  const auto outer = s.effective();
  s.push(bools({1, 0, 1, 0}));
  EXPECT_EQ(s.effective(), bools({1, 0, 0, 0}));
  s.else_branch();
  EXPECT_EQ(s.effective(), bools({0, 1, 0, 0}));
  s.pop();
  EXPECT_EQ(s.effective(), outer);
  s.pop();
  EXPECT_EQ(s.effective(), bools({1, 1, 1, 1}));
  EXPECT_THROW(s.pop(), TrapError);
  EXPECT_THROW(s.else_branch(), TrapError);
}

TEST(MaskStack, RandomNestingIsMonotone) {
  std::mt19937 rng(8);
  for (int n = 0; n < 200; ++n) {
    MaskStack s(6);
    std::vector<std::vector<std::uint8_t>> seen = {s.effective()};
    for (int d = 0; d < 5; ++d) {
      std::vector<std::uint8_t> c(6);
      for (auto& b : c) b = rng() & 1;
      s.push(c);
      if (rng() & 1) s.else_branch();
      for (int i = 0; i < 6; ++i) EXPECT_LE(s.effective()[i], seen.back()[i]);
      seen.push_back(s.effective());
    }
    for (int d = 5; d > 0; --d) {
      s.pop();
      EXPECT_EQ(s.effective(), seen[d - 1]);
    }
  }
}

TEST(Machine, DumpStateIsDeterministic) {
  auto once = [] {
    oracle::Harness h(programs::kNeighborRead, {2, 2});
    for (int n = 0; n < 4; ++n) h.poke("v[7]", n, oracle::f32(n + 0.5f));
    h.run();
    return h.machine->dump_state();
  };
  const std::string a = once();
  EXPECT_EQ(a, once());
  EXPECT_NE(a.find("0 "), std::string::npos);
  EXPECT_NE(a.find("\nCP "), std::string::npos);
}

TEST(Machine, ConfigErrors) {
  Asm a(10);
  a.halt();
  IrProgram p = a.done();
  EXPECT_THROW(Machine(p, config({2}, 5)), ConfigError);  // statics do not fit
  EXPECT_THROW(Machine(p, config({2}, 0)), ConfigError);
  RunConfig c = config({2});
  c.cp_words = 2;  // 4 CP statics
  EXPECT_THROW(Machine(p, c), ConfigError);
  IrProgram bad = p;
  bad.code.push_back({Stream::NP, Op::Jmp, 0, 0, 0});
  EXPECT_THROW(Machine(bad, config({2})), InternalError);
}

TEST(Machine, NamedNeighborOnRankFourIsConfigError) {
  Compilation c = compile_source("float r, v[4];\nint main() { r = v[1+XPLUS_NP]; return 0; }", {65536, 256});
  EXPECT_THROW(Machine(c.ir, config({2, 2, 2, 2})), ConfigError);
  EXPECT_NO_THROW(Machine(c.ir, config({2, 2, 2})));
  Compilation z = compile_source("float r, v[4];\nint main() { r = v[1+ZPLUS_NP]; return 0; }", {65536, 256});
  EXPECT_THROW(Machine(z.ir, config({4})), ConfigError);
}

TEST(Machine, RemoteMethodWritesNeighbor) {
  oracle::Harness h(programs::kRemoteMethod, {4});
  for (int n = 0; n < 4; ++n) h.poke("seed", n, oracle::f32(n + 1.0f));
  ASSERT_FALSE(h.run().trap);
  // node n ran v[0+XPLUS].f(a) so its +x neighbor's v[0].x holds n's seed
  for (int n = 0; n < 4; ++n)
    EXPECT_EQ(h.peek("main::v[0].x", oracle::torus_neighbor({4}, n, 0, 1)), oracle::f32(n + 1.0f));
}

// P = 1 lockstep run against the scalar reference interpreter.
TEST(Machine, SingleNodeMatchesScalarReference) {
  std::mt19937 rng(31337);
  for (int n = 0; n < 40; ++n) {
    oracle::RandomProgram rp = oracle::random_np_program(rng, 8);
    oracle::Harness h(rp.source, {1});
    RunResult r = h.run();
    ASSERT_FALSE(r.trap) << rp.source << r.trap->reason;
    for (const auto& [name, kind] : rp.vars) {
      const oracle::Value& want = rp.expected.at(name);
      const std::uint64_t got = h.peek(name, 0);
      switch (kind) {
        case oracle::K::Float: EXPECT_EQ(got, oracle::f32(want.f)) << rp.source << name; break;
        case oracle::K::Double: EXPECT_EQ(got, oracle::f64(want.d)) << rp.source << name; break;
        default: EXPECT_EQ(static_cast<std::int32_t>(got), want.i) << rp.source << name; break;
      }
    }
    if (HasFailure()) break;
  }
}

TEST(Machine, MatrixSumOnTwoByTwo) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("simdcc_msum_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const Topology t({2, 2});
  const std::vector<std::int64_t> block = {4, 4};
  std::vector<float> g1(64), g2(64);
  for (int i = 0; i < 64; ++i) {
    g1[i] = i * 0.5f;
    g2[i] = 100.0f - i;
  }
  auto write = [&](const std::string& name, const std::vector<float>& flat) {
    std::vector<float> sliced = oracle::block_slice(flat, {2, 2}, block);
    DistFile f = DistFile::make(ElemKind::Float, 4, 16);
    for (std::uint32_t n = 0; n < 4; ++n) {
      std::vector<std::uint32_t> w(16);
      for (int k = 0; k < 16; ++k) w[k] = oracle::f32(sliced[n * 16 + k]);
      f.set_node_words(n, w);
    }
    write_dist_file((dir / name).string(), f);
  };
  write("m1.data", g1);
  write("m2.data", g2);
  oracle::Harness h(programs::kMatrixSum, {2, 2}, 4096,
                    {{"m1.data", (dir / "m1.data").string()},
                     {"m2.data", (dir / "m2.data").string()},
                     {"m3.data", (dir / "m3.data").string()}});
  RunResult r = h.run();
  ASSERT_FALSE(r.trap) << r.trap->reason;
  DistFile out = read_dist_file((dir / "m3.data").string());
  std::vector<float> sliced(64);
  for (std::uint32_t n = 0; n < 4; ++n) {
    auto w = out.node_words(n);
    for (int k = 0; k < 16; ++k) std::memcpy(&sliced[n * 16 + k], &w[k], 4);
  }
  std::vector<float> flat = oracle::block_unslice(sliced, {2, 2}, block);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(flat[i], g1[i] + g2[i]) << i;
  fs::remove_all(dir);
}
