#include <cstdio>
#include <sstream>

#include "simdcc/ast.hpp"

namespace simdcc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string float_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string type_text(const TypeSpec& t) {
  std::string s = t.is_const ? "const " : "";
  s += t.base;
  if (t.pointer_depth) s += ' ';
  s.append(static_cast<size_t>(t.pointer_depth), '*');
  return s;
}

// ---- source printer --------------------------------------------------------

class SourcePrinter {
 public:
  std::string run(const SyntaxTree& tree) {
    for (const auto& item : tree.items) {
      std::visit(Overloaded{
                     [&](const VarDecl& v) { var_decl(v, 0); },
                     [&](const TypedefDecl& t) { typedef_decl(t); },
                     [&](const RecordDef& r) { record(r); },
                     [&](const FuncDef& f) { function(f, 0); },
                 },
                 item);
    }
    return out_.str();
  }

 private:
  void indent(int depth) { out_ << std::string(static_cast<size_t>(depth) * 2, ' '); }

  void var_decl(const VarDecl& v, int depth, bool newline = true) {
    if (newline) indent(depth);
    out_ << type_text(v.type) << ' ';
    for (size_t i = 0; i < v.declarators.size(); ++i) {
      if (i) out_ << ", ";
      const Declarator& d = v.declarators[i];
      out_ << std::string(static_cast<size_t>(d.pointer_depth), '*') << d.name;
      for (const auto& dim : d.dims) out_ << '[' << expr(*dim) << ']';
      if (d.init) out_ << " = " << expr(*d.init);
      if (d.has_ctor_args) out_ << '(' << args(d.ctor_args, 0) << ')';
    }
    out_ << ';';
    if (newline) out_ << '\n';
  }

  void typedef_decl(const TypedefDecl& t) {
    out_ << "typedef " << type_text(t.type) << ' ' << t.name;
    for (const auto& dim : t.dims) out_ << '[' << expr(*dim) << ']';
    out_ << ";\n";
  }

  void record(const RecordDef& r) {
    static const char* kinds[] = {"struct", "class", "union"};
    out_ << kinds[static_cast<int>(r.kind)] << ' ' << r.name;
    if (r.base) out_ << " : " << (r.base_public ? "public " : "") << *r.base;
    out_ << " {\n";
    for (const auto& m : r.members) {
      std::visit(Overloaded{
                     [&](const AccessSpec& a) {
                       out_ << (a.access == Access::Public ? "public:\n" : "private:\n");
                     },
                     [&](const VarDecl& v) { var_decl(v, 1); },
                     [&](const FuncDef& f) { function(f, 1); },
                     [&](const CtorDef& c) { ctor(c); },
                 },
                 m);
    }
    out_ << "};\n";
  }

  void params(const std::vector<Param>& ps) {
    out_ << '(';
    for (size_t i = 0; i < ps.size(); ++i) {
      if (i) out_ << ", ";
      out_ << type_text(ps[i].type) << ' ' << ps[i].name;
    }
    out_ << ')';
  }

  void function(const FuncDef& f, int depth) {
    indent(depth);
    out_ << type_text(f.result) << ' ' << f.name;
    params(f.params);
    if (!f.body) {
      out_ << ";\n";
      return;
    }
    out_ << ' ';
    stmt(*f.body, depth, false);
  }

  void ctor(const CtorDef& c) {
    indent(1);
    out_ << c.name;
    params(c.params);
    for (size_t i = 0; i < c.inits.size(); ++i) {
      out_ << (i ? ", " : " : ") << c.inits[i].name << '(' << args(c.inits[i].args, 0) << ')';
    }
    out_ << ' ';
    stmt(*c.body, 1, false);
  }

  void stmt(const Stmt& s, int depth, bool lead = true) {
    if (lead) indent(depth);
    switch (s.kind) {
      case StmtKind::Empty: out_ << ";\n"; break;
      case StmtKind::Expr: out_ << expr(*s.expr) << ";\n"; break;
      case StmtKind::Decl: var_decl(*s.decl, depth, false); out_ << '\n'; break;
      case StmtKind::Return:
        out_ << "return";
        if (s.expr) out_ << ' ' << expr(*s.expr);
        out_ << ";\n";
        break;
      case StmtKind::Block:
        out_ << "{\n";
        for (const auto& b : s.body) stmt(*b, depth + 1);
        indent(depth);
        out_ << "}\n";
        break;
      case StmtKind::If:
      case StmtKind::Where: {
        bool where = s.kind == StmtKind::Where;
        out_ << (where ? "where (" : "if (") << expr(*s.expr) << ") ";
        nested(*s.then_branch, depth);
        if (s.else_branch) {
          indent(depth);
          out_ << (where ? "elsewhere " : "else ");
          nested(*s.else_branch, depth);
        }
        break;
      }
      case StmtKind::While:
        out_ << "while (" << expr(*s.expr) << ") ";
        nested(*s.then_branch, depth);
        break;
      case StmtKind::For:
        out_ << "for (";
        if (!s.init) {
          out_ << ';';
        } else if (s.init->kind == StmtKind::Decl) {
          var_decl(*s.init->decl, depth, false);
        } else {
          out_ << expr(*s.init->expr) << ';';
        }
        out_ << ' ';
        if (s.expr) out_ << expr(*s.expr);
        out_ << "; ";
        if (s.step) out_ << expr(*s.step);
        out_ << ") ";
        nested(*s.then_branch, depth);
        break;
    }
  }

  // Bodies print exactly as written. An unbraced body cannot pick up a
  // foreign else: the parser always binds else/elsewhere to the nearest
  // open if/where, so any tree it produced prints back unambiguously.
  void nested(const Stmt& s, int depth) {
    if (s.kind == StmtKind::Block) {
      stmt(s, depth, false);
      return;
    }
    out_ << '\n';
    stmt(s, depth + 1);
  }

  std::string args(const std::vector<ExprPtr>& as, size_t from) {
    std::string s;
    for (size_t i = from; i < as.size(); ++i) {
      if (i > from) s += ", ";
      s += expr(*as[i]);
    }
    return s;
  }

  std::string expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return std::to_string(e.int_value);
      case ExprKind::FloatLit: return float_text(e.float_value) + (e.float_suffix ? "f" : "");
      case ExprKind::StringLit: return quote(e.name);
      case ExprKind::Name: return e.name;
      case ExprKind::This: return "this";
      case ExprKind::Unary: return "(" + e.op + expr(*e.args[0]) + ")";
      case ExprKind::AddrOf: return "(&" + expr(*e.args[0]) + ")";
      case ExprKind::Deref: return "(*" + expr(*e.args[0]) + ")";
      case ExprKind::Binary:
        return "(" + expr(*e.args[0]) + " " + e.op + " " + expr(*e.args[1]) + ")";
      case ExprKind::Assign: return "(" + expr(*e.args[0]) + " = " + expr(*e.args[1]) + ")";
      case ExprKind::CompoundAssign:
        return "(" + expr(*e.args[0]) + " " + e.op + "= " + expr(*e.args[1]) + ")";
      case ExprKind::IncDec:
        return e.prefix ? "(" + e.op + expr(*e.args[0]) + ")" : "(" + expr(*e.args[0]) + e.op + ")";
      case ExprKind::Conditional:
        return "(" + expr(*e.args[0]) + " ? " + expr(*e.args[1]) + " : " + expr(*e.args[2]) + ")";
      case ExprKind::Call: return expr(*e.args[0]) + "(" + args(e.args, 1) + ")";
      case ExprKind::Index: return expr(*e.args[0]) + "[" + expr(*e.args[1]) + "]";
      case ExprKind::Member: return expr(*e.args[0]) + (e.arrow ? "->" : ".") + e.name;
      case ExprKind::Cast: return "((" + type_text(*e.cast_type) + ")" + expr(*e.args[0]) + ")";
      case ExprKind::Convert:
      case ExprKind::Decay: return expr(*e.args[0]);
    }
    return "?";
  }

  std::ostringstream out_;
};

// ---- structural dump -------------------------------------------------------

class TreeDumper {
 public:
  std::string run(const SyntaxTree& tree) {
    for (const auto& item : tree.items) {
      std::visit(Overloaded{
                     [&](const VarDecl& v) { var_decl(v); },
                     [&](const TypedefDecl& t) {
                       out_ << "(typedef " << type(t.type) << ' ' << t.name;
                       for (const auto& d : t.dims) out_ << ' ' << expr(*d);
                       out_ << ')';
                     },
                     [&](const RecordDef& r) { record(r); },
                     [&](const FuncDef& f) { function(f); },
                 },
                 item);
      out_ << '\n';
    }
    return out_.str();
  }

 private:
  static std::string type(const TypeSpec& t) {
    return std::string("[") + (t.is_const ? "const " : "") + t.base + std::string(size_t(t.pointer_depth), '*') + "]";
  }

  void var_decl(const VarDecl& v) {
    out_ << "(var " << type(v.type);
    for (const auto& d : v.declarators) {
      out_ << " (" << std::string(size_t(d.pointer_depth), '*') << d.name;
      for (const auto& dim : d.dims) out_ << " [" << expr(*dim) << ']';
      if (d.init) out_ << " = " << expr(*d.init);
      if (d.has_ctor_args) {
        out_ << " (ctor";
        for (const auto& a : d.ctor_args) out_ << ' ' << expr(*a);
        out_ << ')';
      }
      out_ << ')';
    }
    out_ << ')';
  }

  void params(const std::vector<Param>& ps) {
    out_ << " (params";
    for (const auto& p : ps) out_ << ' ' << type(p.type) << ' ' << p.name;
    out_ << ')';
  }

  void function(const FuncDef& f) {
    out_ << "(func " << type(f.result) << ' ' << f.name;
    params(f.params);
    if (f.body) {
      out_ << ' ';
      stmt(*f.body);
    }
    out_ << ')';
  }

  void record(const RecordDef& r) {
    static const char* kinds[] = {"struct", "class", "union"};
    out_ << '(' << kinds[static_cast<int>(r.kind)] << ' ' << r.name;
    if (r.base) out_ << " (base " << (r.base_public ? "public " : "") << *r.base << ')';
    for (const auto& m : r.members) {
      out_ << ' ';
      std::visit(Overloaded{
                     [&](const AccessSpec& a) {
                       out_ << (a.access == Access::Public ? "(public)" : "(private)");
                     },
                     [&](const VarDecl& v) { var_decl(v); },
                     [&](const FuncDef& f) { function(f); },
                     [&](const CtorDef& c) {
                       out_ << "(ctor " << c.name;
                       params(c.params);
                       for (const auto& init : c.inits) {
                         out_ << " (init " << init.name;
                         for (const auto& a : init.args) out_ << ' ' << expr(*a);
                         out_ << ')';
                       }
                       out_ << ' ';
                       stmt(*c.body);
                       out_ << ')';
                     },
                 },
                 m);
    }
    out_ << ')';
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Empty: out_ << "(empty)"; break;
      case StmtKind::Expr: out_ << "(expr " << expr(*s.expr) << ')'; break;
      case StmtKind::Decl: var_decl(*s.decl); break;
      case StmtKind::Return:
        out_ << "(return";
        if (s.expr) out_ << ' ' << expr(*s.expr);
        out_ << ')';
        break;
      case StmtKind::Block:
        out_ << "(block";
        for (const auto& b : s.body) {
          out_ << ' ';
          stmt(*b);
        }
        out_ << ')';
        break;
      case StmtKind::If:
      case StmtKind::Where:
        out_ << (s.kind == StmtKind::If ? "(if " : "(where ") << expr(*s.expr) << ' ';
        stmt(*s.then_branch);
        if (s.else_branch) {
          out_ << (s.kind == StmtKind::If ? " (else " : " (elsewhere ");
          stmt(*s.else_branch);
          out_ << ')';
        }
        out_ << ')';
        break;
      case StmtKind::While:
        out_ << "(while " << expr(*s.expr) << ' ';
        stmt(*s.then_branch);
        out_ << ')';
        break;
      case StmtKind::For:
        out_ << "(for ";
        if (s.init) stmt(*s.init); else out_ << "()";
        out_ << ' ' << (s.expr ? expr(*s.expr) : "()") << ' ' << (s.step ? expr(*s.step) : "()") << ' ';
        stmt(*s.then_branch);
        out_ << ')';
        break;
    }
  }

  std::string expr(const Expr& e) {
    auto kids = [&](size_t from = 0) {
      std::string s;
      for (size_t i = from; i < e.args.size(); ++i) s += " " + expr(*e.args[i]);
      return s;
    };
    switch (e.kind) {
      case ExprKind::IntLit: return "(int " + std::to_string(e.int_value) + ")";
      case ExprKind::FloatLit: return "(float " + float_text(e.float_value) + (e.float_suffix ? " f)" : ")");
      case ExprKind::StringLit: return "(str " + quote(e.name) + ")";
      case ExprKind::Name: return "(name " + e.name + ")";
      case ExprKind::This: return "(this)";
      case ExprKind::Unary: return "(unary " + e.op + kids() + ")";
      case ExprKind::AddrOf: return "(addr" + kids() + ")";
      case ExprKind::Deref: return "(deref" + kids() + ")";
      case ExprKind::Binary: return "(bin " + e.op + kids() + ")";
      case ExprKind::Assign: return "(assign" + kids() + ")";
      case ExprKind::CompoundAssign: return "(assign " + e.op + kids() + ")";
      case ExprKind::IncDec: return std::string(e.prefix ? "(pre " : "(post ") + e.op + kids() + ")";
      case ExprKind::Conditional: return "(cond" + kids() + ")";
      case ExprKind::Call: return "(call" + kids() + ")";
      case ExprKind::Index: return "(index" + kids() + ")";
      case ExprKind::Member: return std::string(e.arrow ? "(arrow " : "(dot ") + e.name + kids() + ")";
      case ExprKind::Cast: return "(cast " + type(*e.cast_type) + kids() + ")";
      case ExprKind::Convert: return "(convert" + kids() + ")";
      case ExprKind::Decay: return "(decay" + kids() + ")";
    }
    return "?";
  }

  std::ostringstream out_;
};

}  // namespace

std::string print_source(const SyntaxTree& tree) { return SourcePrinter().run(tree); }

std::string dump_tree(const SyntaxTree& tree) { return TreeDumper().run(tree); }

}  // namespace simdcc
