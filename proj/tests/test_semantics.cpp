#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "oracles.hpp"
#include "programs.hpp"
#include "simdcc/parser.hpp"
#include "simdcc/semantics.hpp"

using namespace simdcc;

namespace {

TypedProgram check(const std::string& src) { return typecheck_program(parse_source(src)); }

std::string type_error(const std::string& src) {
  try {
    check(src);
  } catch (const TypeError& e) {
    return e.message();
  }
  return "<accepted>";
}

// Visits every expression node of every function body.
void each_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args) each_expr(*a, fn);
}

void each_expr(const Stmt& s, const std::function<void(const Expr&)>& fn) {
  if (s.expr) each_expr(*s.expr, fn);
  if (s.step) each_expr(*s.step, fn);
  for (const auto& b : s.body) each_expr(*b, fn);
  for (const Stmt* sub : {s.then_branch.get(), s.else_branch.get(), s.init.get()})
    if (sub) each_expr(*sub, fn);
  if (s.decl)
    for (const auto& d : s.decl->declarators)
      if (d.init) each_expr(*d.init, fn);
}

void each_expr(const TypedProgram& p, const std::function<void(const Expr&)>& fn) {
  for (const FunctionInfo* f : p.function_order)
    if (f->body) each_expr(*f->body, fn);
}

const TypeDesc* scalar(TypeTable& t, TableKind k) { return t.scalar(k); }

}  // namespace

TEST(Tables, ExhaustiveConformance) {
  for (int i = 0; i < kTableKinds; ++i)
    for (int j = 0; j < kTableKinds; ++j) {
      EXPECT_EQ(promotion_allowed(kAllTableKinds[i], kAllTableKinds[j]), oracle::table_promotion(i, j)) << i << j;
      EXPECT_EQ(cast_allowed(kAllTableKinds[i], kAllTableKinds[j]), oracle::table_cast(i, j)) << i << j;
    }
}

TEST(Tables, SpotChecks) {
  EXPECT_TRUE(promotion_allowed(TableKind::Int, TableKind::Complex));
  EXPECT_FALSE(promotion_allowed(TableKind::Float, TableKind::Int));
  EXPECT_TRUE(promotion_allowed(TableKind::Vector, TableKind::Vector));
  EXPECT_TRUE(cast_allowed(TableKind::Int, TableKind::Float));
  EXPECT_FALSE(cast_allowed(TableKind::Double, TableKind::Float));
  EXPECT_FALSE(cast_allowed(TableKind::LocalInt, TableKind::Float));
  for (TableKind k : kAllTableKinds) EXPECT_TRUE(promotion_allowed(k, k));
}

TEST(Groups, OfTypes) {
  TypeTable t;
  EXPECT_EQ(group_of(*t.scalar(TypeKind::Double)), Group::NP);
  EXPECT_EQ(group_of(*t.pointer_to(t.scalar(TypeKind::Float))), Group::CP);
  EXPECT_EQ(group_of(*t.array_of(t.scalar(TypeKind::Int), 10)), Group::CP);
  EXPECT_EQ(group_of(*t.array_of(t.scalar(TypeKind::LocalInt), 3)), Group::NP);
  EXPECT_THROW(group_of(*t.void_type()), InternalError);
}

TEST(BinaryResult, Lattice) {
  TypeTable t;
  auto r = [&](const char* op, TableKind a, TableKind b) {
    return binary_result_type(t, op, scalar(t, a), scalar(t, b));
  };
  EXPECT_EQ(r("+", TableKind::Int, TableKind::Double), t.scalar(TypeKind::Double));
  EXPECT_EQ(r("+", TableKind::LocalInt, TableKind::Float), t.scalar(TypeKind::Float));
  EXPECT_EQ(r("!=", TableKind::Double, TableKind::Double), t.scalar(TypeKind::LocalInt));
  EXPECT_EQ(r("<", TableKind::Int, TableKind::Int), t.scalar(TypeKind::Int));
  EXPECT_THROW(r("*", TableKind::Vector, TableKind::Complex), TypeError);
  EXPECT_THROW(r("%", TableKind::Float, TableKind::Float), TypeError);
  EXPECT_THROW(r("<", TableKind::Vector, TableKind::Vector), TypeError);
}

TEST(BinaryResult, SymmetricForCommutativeOps) {
  TypeTable t;
  const TableKind arith[] = {TableKind::Int, TableKind::Float, TableKind::Double,
                             TableKind::Vector, TableKind::Complex, TableKind::LocalInt};
  for (const char* op : {"+", "*", "==", "!="})
    for (TableKind a : arith)
      for (TableKind b : arith) {
        const TypeDesc* ab = nullptr;
        const TypeDesc* ba = nullptr;
        bool ab_err = false, ba_err = false;
        try { ab = binary_result_type(t, op, scalar(t, a), scalar(t, b)); } catch (const TypeError&) { ab_err = true; }
        try { ba = binary_result_type(t, op, scalar(t, b), scalar(t, a)); } catch (const TypeError&) { ba_err = true; }
        EXPECT_EQ(ab_err, ba_err);
        EXPECT_EQ(ab, ba);
      }
}

TEST(BinaryResult, ResultIsLeastCommonPromotion) {
  // Among the scalar kinds the result is the higher operand, and both
  // operands promote to it.
  TypeTable t;
  const TableKind order[] = {TableKind::Int, TableKind::LocalInt, TableKind::Float, TableKind::Double};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const TypeDesc* r = binary_result_type(t, "+", scalar(t, order[a]), scalar(t, order[b]));
      int rank = 0;
      while (order[rank] != *r->table_kind()) ++rank;
      EXPECT_EQ(rank, std::max(a, b));
      EXPECT_TRUE(promotion_allowed(order[a], order[rank]) && promotion_allowed(order[b], order[rank]));
    }
}

TEST(Typecheck, CpToNpIsBroadcastConversion) {
  TypedProgram p = check("int i; double a; int main() { a = i; return 0; }");
  int broadcasts = 0;
  each_expr(p, [&](const Expr& e) {
    if (e.kind == ExprKind::Convert && e.broadcast) {
      ++broadcasts;
      EXPECT_EQ(e.type->kind, TypeKind::Double);
      EXPECT_EQ(e.args[0]->type->kind, TypeKind::Int);
    }
  });
  EXPECT_GE(broadcasts, 1);
  EXPECT_TRUE(typed_invariant_violations(p).empty());
}

TEST(Typecheck, NpToCpNeverAllowed) {
  EXPECT_NE(type_error("int i; double a; int main() { i = a; return 0; }").find("never allowed"), std::string::npos);
  EXPECT_NE(type_error("int i; float a; int main() { i = (int)a; return 0; }"), "<accepted>");
}

TEST(Typecheck, UnionMustBeSingleGroup) {
  EXPECT_NE(type_error("union U { int a; float b; };").find("union"), std::string::npos);
  EXPECT_EQ(type_error("union U { float a; double b; localint c; }; U u; int main() { return 0; }"), "<accepted>");
}

TEST(Typecheck, ConditionsPerGroup) {
  EXPECT_NE(type_error("double x; int main() { if (x != 0.0) x = 1.0; return 0; }"), "<accepted>");
  EXPECT_NE(type_error("double x; int main() { while (x < 1.0) x = 1.0; return 0; }"), "<accepted>");
  EXPECT_NE(type_error("int i; int main() { where (i) i = 1; return 0; }"), "<accepted>");
  EXPECT_EQ(type_error("double x; int main() { if (any(x != 0.0)) x = 1.0; return 0; }"), "<accepted>");
}

TEST(Typecheck, SubscriptAndLocalOffset) {
  std::string msg = type_error("float a[10]; localint li; int main() { a[li] = 1.0f; return 0; }");
  EXPECT_NE(msg.find("localoffset"), std::string::npos) << msg;
  EXPECT_EQ(type_error("float a[10]; localint li; int main() { localoffset(li); a[2] = 1.0f; return 0; }"),
            "<accepted>");
  EXPECT_NE(type_error("float a[10]; vector v; int main() { localoffset(v); return 0; }"), "<accepted>");
}

TEST(Typecheck, LocalIntIsNotAPointer) {
  std::string msg = type_error("float* p; localint li; int main() { p = li; return 0; }");
  EXPECT_NE(msg.find("localoffset"), std::string::npos) << msg;
}

TEST(Typecheck, CastsFollowCastTable) {
  EXPECT_EQ(type_error("double d; float f; int main() { d = (double)f; return 0; }"), "<accepted>");
  EXPECT_NE(type_error("double d; float f; int main() { f = (float)d; return 0; }"), "<accepted>");
  EXPECT_NE(type_error("localint l; float f; int main() { f = (float)l; return 0; }"), "<accepted>");
  EXPECT_EQ(type_error("int i; vector v; int main() { v = (vector)i; return 0; }"), "<accepted>");
}

TEST(Typecheck, VectorComplexMixIsError) {
  EXPECT_NE(type_error("vector v; complex c; int main() { v = v * c; return 0; }").find("cast"), std::string::npos);
}

TEST(Typecheck, ReductionsYieldInt) {
  TypedProgram p = check("double x; int n; int main() { n = all(x > 0.0) + none(x < 0.0); return 0; }");
  each_expr(p, [](const Expr& e) {
    if (e.kind == ExprKind::Call && e.intrinsic != Intrinsic::None) {
      EXPECT_EQ(e.type->kind, TypeKind::Int);
    }
  });
}

TEST(Typecheck, ExampleProgramsAccepted) {
  for (const char* src : {programs::kWhere, programs::kNeighborRead, programs::kRemoteMethod, programs::kLocalOffset,
                          programs::kMatrixSum}) {
    TypedProgram p = check(src);
    EXPECT_TRUE(typed_invariant_violations(p).empty()) << src;
  }
}

TEST(Typecheck, UnknownAndUnsupported) {
  EXPECT_NE(type_error("int main() { return y; }"), "<accepted>");
  EXPECT_NE(type_error("char c;"), "<accepted>");
  EXPECT_NE(type_error("struct S { int a; }; struct S { int b; };"), "<accepted>");
  EXPECT_NE(type_error("class C { int hidden; }; C c; int main() { return c.hidden; }"), "<accepted>");
}

// Random small expressions over every arithmetic type: whatever the checker
// accepts must only contain table-approved conversions.
TEST(Typecheck, AcceptedConversionsArePromotions) {
  std::mt19937 rng(77);
  const char* names[] = {"i", "f", "d", "v", "c", "l", "1", "2.5", "0.5f"};
  const char* ops[] = {"+", "-", "*", "/", "==", "<", "%"};
  const char* targets[] = {"i", "f", "d", "v", "c", "l"};
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  int accepted = 0, rejected = 0;
  for (int n = 0; n < 400; ++n) {
    std::string e = names[pick(9)];
    for (int k = pick(3); k >= 0; --k) e = "(" + e + " " + ops[pick(7)] + " " + names[pick(9)] + ")";
    std::string src = "int i; float f; double d; vector v; complex c; localint l;\nint main() { " +
                      std::string(targets[pick(6)]) + " = " + e + "; return 0; }";
    try {
      TypedProgram p = check(src);
      ++accepted;
      EXPECT_TRUE(typed_invariant_violations(p).empty()) << src;
      each_expr(p, [&](const Expr& x) {
        if (x.kind != ExprKind::Convert) return;
        auto from = x.args[0]->type->table_kind(), to = x.type->table_kind();
        ASSERT_TRUE(from && to) << src;
        EXPECT_TRUE(promotion_allowed(*from, *to)) << src;
        EXPECT_EQ(x.broadcast, group_of(*from) == Group::CP && group_of(*to) == Group::NP) << src;
      });
    } catch (const TypeError&) {
      ++rejected;
    }
  }
  EXPECT_GT(accepted, 100);
  EXPECT_GT(rejected, 10);
}
