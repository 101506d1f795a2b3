#include "simdcc/parser.hpp"

#include <cstdlib>
#include <set>
#include <string>

namespace simdcc {

namespace {

const std::set<std::string, std::less<>> kBuiltinTypes = {
    "int", "float", "double", "vector", "complex", "localint", "void",
};

int binary_precedence(const Token& t) {
  if (!t.is(TokenKind::Punctuator)) return -1;
  const std::string& s = t.text;
  if (s == "||") return 1;
  if (s == "&&") return 2;
  if (s == "|") return 3;
  if (s == "^") return 4;
  if (s == "&") return 5;
  if (s == "==" || s == "!=") return 6;
  if (s == "<" || s == "<=" || s == ">" || s == ">=") return 7;
  if (s == "<<" || s == ">>") return 8;
  if (s == "+" || s == "-") return 9;
  if (s == "*" || s == "/" || s == "%") return 10;
  return -1;
}

bool is_assign_op(const Token& t) {
  static const std::set<std::string, std::less<>> ops = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
  };
  return t.is(TokenKind::Punctuator) && ops.count(t.text);
}

std::string unescape(const std::string& quoted) {
  std::string out;
  for (size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c == '\\' && i + 2 < quoted.size()) {
      char n = quoted[++i];
      switch (n) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '0': out += '\0'; break;
        default: out += n; break;
      }
    } else {
      out += c;
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || !toks_.back().is(TokenKind::End))
      throw ParseError({}, {"end-of-input marker"}, "unterminated token stream");
  }

  SyntaxTree program() {
    SyntaxTree tree;
    while (!cur().is(TokenKind::End)) tree.items.push_back(top_level());
    return tree;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(size_t n) const {
    size_t i = pos_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  const Token& consume() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = cur();
    std::string found = t.is(TokenKind::End) ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.loc, std::move(expected), found);
  }

  bool accept(std::string_view punct) {
    if (cur().is_punct(punct)) {
      consume();
      return true;
    }
    return false;
  }

  const Token& expect(std::string_view punct) {
    if (!cur().is_punct(punct)) fail({"'" + std::string(punct) + "'"});
    return consume();
  }

  const Token& expect_keyword(std::string_view kw) {
    if (!cur().is_keyword(kw)) fail({"'" + std::string(kw) + "'"});
    return consume();
  }

  std::string expect_identifier() {
    if (!cur().is(TokenKind::Identifier)) fail({"identifier"});
    return consume().text;
  }

  // ---- type recognition ----------------------------------------------------

  bool is_type_name(const Token& t) const {
    if (t.is(TokenKind::Keyword)) return kBuiltinTypes.count(t.text) > 0;
    return t.is(TokenKind::Identifier) && type_names_.count(t.text) > 0;
  }

  bool is_record_keyword(const Token& t) const {
    return t.is_keyword("struct") || t.is_keyword("class") || t.is_keyword("union");
  }

  // True when the tokens at the cursor begin a declaration. Unknown type
  // names are recognised by shape (`T x`, `T *x =`) so that unsupported
  // types reach semantic analysis with a proper diagnostic.
  bool starts_declaration() const {
    const Token& t = cur();
    if (t.is_keyword("const") || is_record_keyword(t) || is_type_name(t)) return true;
    if (!t.is(TokenKind::Identifier)) return false;
    if (ahead(1).is(TokenKind::Identifier)) return true;
    size_t n = 1;
    while (ahead(n).is_punct("*")) ++n;
    if (n == 1 || !ahead(n).is(TokenKind::Identifier)) return false;
    const Token& after = ahead(n + 1);
    return after.is_punct("=") || after.is_punct(";") || after.is_punct(",") ||
           after.is_punct("[");
  }

  TypeSpec type_spec(bool allow_stars = true) {
    TypeSpec spec;
    spec.loc = cur().loc;
    if (cur().is_keyword("const")) {
      consume();
      spec.is_const = true;
    }
    if (is_record_keyword(cur())) consume();  // elaborated `struct S`
    const Token& t = cur();
    if (t.is(TokenKind::Keyword) && kBuiltinTypes.count(t.text)) {
      spec.base = consume().text;
    } else if (t.is(TokenKind::Identifier)) {
      spec.base = consume().text;
    } else {
      fail({"type name"});
    }
    if (cur().is_keyword("const")) {
      consume();
      spec.is_const = true;
    }
    if (allow_stars)
      while (accept("*")) ++spec.pointer_depth;
    return spec;
  }

  // ---- top level -----------------------------------------------------------

  TopLevel top_level() {
    if (cur().is_keyword("typedef")) return typedef_decl();
    if (is_record_keyword(cur()) && ahead(1).is(TokenKind::Identifier) &&
        (ahead(2).is_punct("{") || ahead(2).is_punct(":")))
      return record_def();
    SourceLoc loc = cur().loc;
    if (!starts_declaration()) fail({"declaration"});
    TypeSpec spec = type_spec(false);
    size_t stars = 0;
    while (ahead(stars).is_punct("*")) ++stars;
    if (ahead(stars).is(TokenKind::Identifier) && ahead(stars + 1).is_punct("(") &&
        looks_like_function(stars + 2)) {
      spec.pointer_depth = static_cast<int>(stars);
      for (size_t i = 0; i < stars; ++i) consume();
      return function_def(std::move(spec));
    }
    return var_decl_rest(std::move(spec), loc);
  }

  // Distinguishes `T f(params)` from `T x(ctor args)` by peeking at the
  // first token inside the parentheses.
  bool looks_like_function(size_t n) const {
    const Token& t = ahead(n);
    if (t.is_punct(")")) return true;
    if (t.is_keyword("void") && ahead(n + 1).is_punct(")")) return true;
    if (t.is_keyword("const") || is_record_keyword(t)) return true;
    if (is_type_name(t)) return true;
    return t.is(TokenKind::Identifier) && ahead(n + 1).is(TokenKind::Identifier);
  }

  TopLevel typedef_decl() {
    TypedefDecl td;
    td.loc = expect_keyword("typedef").loc;
    td.type = type_spec();
    td.name = expect_identifier();
    while (accept("[")) {
      td.dims.push_back(expression());
      expect("]");
    }
    expect(";");
    type_names_.insert(td.name);
    return td;
  }

  RecordDef record_def() {
    RecordDef rec;
    rec.loc = cur().loc;
    const std::string kw = consume().text;
    rec.kind = kw == "struct" ? RecordKind::Struct
             : kw == "class"  ? RecordKind::Class
                              : RecordKind::Union;
    rec.name = expect_identifier();
    type_names_.insert(rec.name);
    if (accept(":")) {
      if (cur().is_keyword("public")) {
        consume();
        rec.base_public = true;
      } else if (cur().is_keyword("private")) {
        consume();
      }
      rec.base = expect_identifier();
    }
    expect("{");
    while (!cur().is_punct("}")) {
      if (cur().is(TokenKind::End)) fail({"'}'"});
      rec.members.push_back(member(rec.name));
    }
    expect("}");
    expect(";");
    return rec;
  }

  Member member(const std::string& record_name) {
    SourceLoc loc = cur().loc;
    if (cur().is_keyword("public") || cur().is_keyword("private")) {
      Access a = consume().text == "public" ? Access::Public : Access::Private;
      expect(":");
      return AccessSpec{a, loc};
    }
    if (cur().is(TokenKind::Identifier) && cur().text == record_name && ahead(1).is_punct("(")) {
      return ctor_def();
    }
    TypeSpec spec = type_spec(false);
    size_t stars = 0;
    while (ahead(stars).is_punct("*")) ++stars;
    if (ahead(stars).is(TokenKind::Identifier) && ahead(stars + 1).is_punct("(")) {
      spec.pointer_depth = static_cast<int>(stars);
      for (size_t i = 0; i < stars; ++i) consume();
      FuncDef fn = function_def(std::move(spec));
      if (!fn.body) throw ParseError(fn.loc, {"method body"}, "';'");
      accept(";");
      return fn;
    }
    VarDecl vd = std::get<VarDecl>(var_decl_rest(std::move(spec), loc));
    return vd;
  }

  CtorDef ctor_def() {
    CtorDef ctor;
    ctor.loc = cur().loc;
    ctor.name = consume().text;
    ctor.params = param_list();
    if (accept(":")) {
      do {
        MemberInit init;
        init.loc = cur().loc;
        init.name = expect_identifier();
        expect("(");
        init.args = call_args();
        ctor.inits.push_back(std::move(init));
      } while (accept(","));
    }
    if (!cur().is_punct("{")) fail({"'{'"});
    ctor.body = block();
    accept(";");
    return ctor;
  }

  std::vector<Param> param_list() {
    expect("(");
    std::vector<Param> params;
    if (cur().is_keyword("void") && ahead(1).is_punct(")")) consume();
    if (!cur().is_punct(")")) {
      do {
        Param p;
        p.type = type_spec();
        p.loc = cur().loc;
        p.name = expect_identifier();
        params.push_back(std::move(p));
      } while (accept(","));
    }
    expect(")");
    return params;
  }

  FuncDef function_def(TypeSpec result) {
    FuncDef fn;
    fn.result = std::move(result);
    fn.loc = cur().loc;
    fn.name = expect_identifier();
    fn.params = param_list();
    if (accept(";")) return fn;
    if (!cur().is_punct("{")) fail({"'{'", "';'"});
    fn.body = block();
    return fn;
  }

  TopLevel var_decl_rest(TypeSpec spec, SourceLoc loc) {
    VarDecl vd;
    vd.type = std::move(spec);
    vd.loc = loc;
    do {
      vd.declarators.push_back(declarator());
    } while (accept(","));
    expect(";");
    return vd;
  }

  Declarator declarator() {
    Declarator d;
    while (accept("*")) ++d.pointer_depth;
    d.loc = cur().loc;
    d.name = expect_identifier();
    while (accept("[")) {
      d.dims.push_back(expression());
      expect("]");
    }
    if (accept("=")) {
      d.init = assignment();
    } else if (accept("(")) {
      d.has_ctor_args = true;
      d.ctor_args = call_args();
    }
    return d;
  }

  // ---- statements ----------------------------------------------------------

  StmtPtr block() {
    auto s = Stmt::make(StmtKind::Block, cur().loc);
    expect("{");
    while (!cur().is_punct("}")) {
      if (cur().is(TokenKind::End)) fail({"'}'"});
      s->body.push_back(statement());
    }
    expect("}");
    return s;
  }

  StmtPtr statement() {
    const Token& t = cur();
    SourceLoc loc = t.loc;
    if (t.is_punct("{")) return block();
    if (t.is_punct(";")) {
      consume();
      return Stmt::make(StmtKind::Empty, loc);
    }
    if (t.is_keyword("if") || t.is_keyword("where")) {
      bool is_where = t.text == "where";
      consume();
      auto s = Stmt::make(is_where ? StmtKind::Where : StmtKind::If, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      s->then_branch = statement();
      if (cur().is_keyword(is_where ? "elsewhere" : "else")) {
        consume();
        s->else_branch = statement();
      }
      return s;
    }
    if (t.is_keyword("while")) {
      consume();
      auto s = Stmt::make(StmtKind::While, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      s->then_branch = statement();
      return s;
    }
    if (t.is_keyword("for")) {
      consume();
      auto s = Stmt::make(StmtKind::For, loc);
      expect("(");
      if (!cur().is_punct(";")) {
        if (starts_declaration()) {
          s->init = declaration_statement();  // consumes ';'
        } else {
          auto init = Stmt::make(StmtKind::Expr, cur().loc);
          init->expr = expression();
          s->init = std::move(init);
          expect(";");
        }
      } else {
        consume();
      }
      if (!cur().is_punct(";")) s->expr = expression();
      expect(";");
      if (!cur().is_punct(")")) s->step = expression();
      expect(")");
      s->then_branch = statement();
      return s;
    }
    if (t.is_keyword("return")) {
      consume();
      auto s = Stmt::make(StmtKind::Return, loc);
      if (!cur().is_punct(";")) s->expr = expression();
      expect(";");
      return s;
    }
    if (t.is_keyword("else") || t.is_keyword("elsewhere")) fail({"statement"});
    if (starts_declaration()) return declaration_statement();
    auto s = Stmt::make(StmtKind::Expr, loc);
    s->expr = expression();
    expect(";");
    return s;
  }

  StmtPtr declaration_statement() {
    SourceLoc loc = cur().loc;
    auto s = Stmt::make(StmtKind::Decl, loc);
    TypeSpec spec = type_spec(false);
    s->decl = std::make_unique<VarDecl>(std::get<VarDecl>(var_decl_rest(std::move(spec), loc)));
    return s;
  }

  // ---- expressions ---------------------------------------------------------

  ExprPtr expression() { return assignment(); }

  ExprPtr assignment() {
    ExprPtr lhs = conditional();
    if (is_assign_op(cur())) {
      const Token& op = consume();
      ExprPtr rhs = assignment();
      ExprPtr e;
      if (op.text == "=") {
        e = Expr::make(ExprKind::Assign, op.loc);
      } else {
        e = Expr::make(ExprKind::CompoundAssign, op.loc);
        e->op = op.text.substr(0, op.text.size() - 1);
      }
      e->args.push_back(std::move(lhs));
      e->args.push_back(std::move(rhs));
      return e;
    }
    return lhs;
  }

  ExprPtr conditional() {
    ExprPtr cond = binary(1);
    if (cur().is_punct("?")) {
      SourceLoc loc = consume().loc;
      auto e = Expr::make(ExprKind::Conditional, loc);
      e->args.push_back(std::move(cond));
      e->args.push_back(expression());
      expect(":");
      e->args.push_back(conditional());
      return e;
    }
    return cond;
  }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = unary();
    for (;;) {
      int prec = binary_precedence(cur());
      if (prec < min_prec) return lhs;
      const Token& op = consume();
      ExprPtr rhs = binary(prec + 1);
      auto e = Expr::make(ExprKind::Binary, op.loc);
      e->op = op.text;
      e->args.push_back(std::move(lhs));
      e->args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  bool at_cast() const {
    if (!cur().is_punct("(")) return false;
    size_t n = 1;
    if (ahead(n).is_keyword("const")) ++n;
    if (!is_type_name(ahead(n))) return false;
    ++n;
    while (ahead(n).is_punct("*")) ++n;
    return ahead(n).is_punct(")");
  }

  ExprPtr unary() {
    const Token& t = cur();
    SourceLoc loc = t.loc;
    if (t.is_punct("-") || t.is_punct("+") || t.is_punct("!") || t.is_punct("~")) {
      auto e = Expr::make(ExprKind::Unary, loc);
      e->op = consume().text;
      e->args.push_back(unary());
      return e;
    }
    if (t.is_punct("*") || t.is_punct("&")) {
      auto e = Expr::make(t.text == "*" ? ExprKind::Deref : ExprKind::AddrOf, loc);
      consume();
      e->args.push_back(unary());
      return e;
    }
    if (t.is_punct("++") || t.is_punct("--")) {
      auto e = Expr::make(ExprKind::IncDec, loc);
      e->op = consume().text;
      e->prefix = true;
      e->args.push_back(unary());
      return e;
    }
    if (at_cast()) {
      consume();
      auto e = Expr::make(ExprKind::Cast, loc);
      e->cast_type = type_spec();
      expect(")");
      e->args.push_back(unary());
      return e;
    }
    return postfix(primary());
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    if (!cur().is_punct(")")) {
      do {
        args.push_back(assignment());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      const Token& t = cur();
      SourceLoc loc = t.loc;
      if (t.is_punct("[")) {
        consume();
        auto idx = Expr::make(ExprKind::Index, loc);
        idx->args.push_back(std::move(e));
        idx->args.push_back(expression());
        expect("]");
        e = std::move(idx);
      } else if (t.is_punct("(")) {
        consume();
        auto call = Expr::make(ExprKind::Call, loc);
        call->args.push_back(std::move(e));
        for (auto& a : call_args()) call->args.push_back(std::move(a));
        e = std::move(call);
      } else if (t.is_punct(".") || t.is_punct("->")) {
        bool arrow = consume().text == "->";
        auto m = Expr::make(ExprKind::Member, loc);
        m->arrow = arrow;
        m->name = expect_identifier();
        m->args.push_back(std::move(e));
        e = std::move(m);
      } else if (t.is_punct("++") || t.is_punct("--")) {
        auto inc = Expr::make(ExprKind::IncDec, loc);
        inc->op = consume().text;
        inc->args.push_back(std::move(e));
        e = std::move(inc);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token& t = cur();
    SourceLoc loc = t.loc;
    switch (t.kind) {
      case TokenKind::IntLiteral: {
        auto e = Expr::make(ExprKind::IntLit, loc);
        e->int_value = std::strtoll(consume().text.c_str(), nullptr, 0);
        return e;
      }
      case TokenKind::FloatLiteral: {
        auto e = Expr::make(ExprKind::FloatLit, loc);
        std::string text = consume().text;
        if (text.back() == 'f' || text.back() == 'F') {
          e->float_suffix = true;
          text.pop_back();
        }
        e->float_value = std::strtod(text.c_str(), nullptr);
        return e;
      }
      case TokenKind::StringLiteral: {
        auto e = Expr::make(ExprKind::StringLit, loc);
        e->name = unescape(consume().text);
        return e;
      }
      case TokenKind::Identifier: {
        if (t.text == "this") {
          consume();
          return Expr::make(ExprKind::This, loc);
        }
        auto e = Expr::make(ExprKind::Name, loc);
        e->name = consume().text;
        return e;
      }
      default:
        break;
    }
    if (t.is_punct("(")) {
      consume();
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    fail({"expression"});
  }

  const std::vector<Token>& toks_;
  size_t pos_ = 0;
  std::set<std::string, std::less<>> type_names_;
};

}  // namespace

SyntaxTree parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

}  // namespace simdcc
