#include "aptly/parser.hpp"

#include <set>

#include "aptly/lexer.hpp"

namespace aptly {

namespace {

constexpr int kMaxNesting = 200;

struct SyntaxError {
  Diagnostic diag;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Identifier: return "identifier '" + t.text + "'";
    case TokenKind::Keyword: return "keyword '" + t.text + "'";
    case TokenKind::Number: return "number " + t.text;
    case TokenKind::String: return "string literal";
    case TokenKind::Punct: return "'" + t.text + "'";
    default: return std::string(token_kind_name(t.kind));
  }
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program parse_program() {
    Program program;
    while (!at(TokenKind::Eof)) {
      if (at(TokenKind::Newline)) {
        ++pos_;
        continue;
      }
      const Token& t = cur();
      if (t.is_keyword("initialize")) {
        program.globals.push_back(parse_global());
      } else if (t.is_keyword("to")) {
        program.procedures.push_back(parse_procedure());
      } else if (t.is_keyword("when")) {
        program.handlers.push_back(parse_handler());
      } else if (t.kind == TokenKind::Identifier && peek(1).is_punct("=")) {
        program.components.push_back(parse_component());
      } else if (t.kind == TokenKind::Indent) {
        error("unexpected indentation at top level", t.span);
      } else {
        error("expected a component declaration, 'initialize', 'to' or 'when', found " + describe(t), t.span);
      }
    }
    return program;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t ahead) const {
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : toks_.back();
  }
  bool at(TokenKind k) const { return cur().kind == k; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = &t;
    return t;
  }

  [[noreturn]] void error(std::string message, SourceSpan span) {
    throw SyntaxError{make_diag(DiagCode::Syntax, std::move(message), span)};
  }

  [[noreturn]] void expected(std::string_view what) {
    error("expected " + std::string(what) + ", found " + describe(cur()), cur().span);
  }

  const Token& expect_punct(std::string_view p) {
    if (!cur().is_punct(p)) expected("'" + std::string(p) + "'");
    return take();
  }
  const Token& expect_keyword(std::string_view k) {
    if (!cur().is_keyword(k)) expected("'" + std::string(k) + "'");
    return take();
  }
  const Token& expect_ident(std::string_view what) {
    if (!at(TokenKind::Identifier)) expected(what);
    return take();
  }
  void expect_newline() {
    if (!at(TokenKind::Newline)) expected("end of line");
    take();
  }

  SourceSpan span_from(SourceSpan start) const {
    if (last_ && last_->span.line == start.line && last_->span.column >= start.column) {
      return SourceSpan{start.line, start.column, last_->span.column + last_->span.length - start.column};
    }
    return start;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser, SourceSpan span) : p(parser) {
      if (++p.depth_ > kMaxNesting) p.error("nesting too deep", span);
    }
    ~DepthGuard() { --p.depth_; }
  };

  // ---- top level -----------------------------------------------------------

  ComponentDecl parse_component() {
    ComponentDecl decl;
    const Token& name = take();
    decl.name = name.text;
    decl.span = name.span;
    expect_punct("=");
    const Token& type = expect_ident("component type");
    decl.type_name = type.text;
    decl.type_span = type.span;
    expect_punct("(");
    bool first = true;
    while (!cur().is_punct(")")) {
      if (!first) expect_punct(",");
      if (first && at(TokenKind::Identifier) && !peek(1).is_punct("=")) {
        decl.parent = take().text;
      } else {
        const Token& prop = expect_ident("property name");
        PropertyAssign assign{prop.text, {}, prop.span};
        for (const auto& existing : decl.properties) {
          if (existing.name == prop.text) {
            throw SyntaxError{make_diag(DiagCode::DupName, "property '" + prop.text + "' set twice", prop.span)};
          }
        }
        expect_punct("=");
        assign.value = parse_literal();
        decl.properties.push_back(std::move(assign));
      }
      first = false;
    }
    expect_punct(")");
    expect_newline();
    return decl;
  }

  GlobalDecl parse_global() {
    take();  // initialize
    const Token& name = expect_ident("global name");
    GlobalDecl decl{name.text, {}, name.span};
    expect_punct("=");
    decl.init = parse_expr();
    expect_newline();
    return decl;
  }

  std::vector<std::string> parse_params() {
    std::vector<std::string> params;
    expect_punct("(");
    while (!cur().is_punct(")")) {
      if (!params.empty()) expect_punct(",");
      params.push_back(expect_ident("parameter name").text);
    }
    expect_punct(")");
    return params;
  }

  ProcedureDecl parse_procedure() {
    take();  // to
    const Token& name = expect_ident("procedure name");
    ProcedureDecl decl;
    decl.name = name.text;
    decl.span = name.span;
    decl.params = parse_params();
    expect_punct(":");
    decl.body = parse_block();
    return decl;
  }

  EventHandler parse_handler() {
    take();  // when
    const Token& comp = expect_ident("component name");
    EventHandler handler;
    handler.component = comp.text;
    handler.span = comp.span;
    expect_punct(".");
    handler.event = expect_ident("event name").text;
    handler.params = parse_params();
    expect_punct(":");
    handler.body = parse_block();
    return handler;
  }

  Body parse_block() {
    expect_newline();
    if (!at(TokenKind::Indent)) expected("an indented block");
    DepthGuard guard(*this, cur().span);
    take();
    Body body;
    while (!at(TokenKind::Dedent) && !at(TokenKind::Eof)) {
      body.push_back(parse_stmt());
    }
    if (at(TokenKind::Dedent)) take();
    return body;
  }

  // ---- statements ----------------------------------------------------------

  Stmt parse_stmt() {
    const Token& t = cur();
    const SourceSpan span = t.span;
    if (t.is_keyword("set")) {
      take();
      if (cur().is_keyword("global")) {
        take();
        std::string name = expect_ident("global name").text;
        expect_punct("=");
        Expr value = parse_expr();
        expect_newline();
        return Stmt{SetGlobal{std::move(name), std::move(value)}, span};
      }
      std::string first = expect_ident("component or variable name").text;
      if (cur().is_punct(".")) {
        take();
        std::string prop = expect_ident("property name").text;
        expect_punct("=");
        Expr value = parse_expr();
        expect_newline();
        return Stmt{SetProperty{std::move(first), std::move(prop), std::move(value)}, span};
      }
      expect_punct("=");
      Expr value = parse_expr();
      expect_newline();
      return Stmt{SetLocal{std::move(first), std::move(value)}, span};
    }
    if (t.is_keyword("call")) {
      take();
      std::string name = expect_ident("procedure name").text;
      auto args = parse_args();
      expect_newline();
      return Stmt{CallProcedure{std::move(name), std::move(args)}, span};
    }
    if (t.is_keyword("return")) {
      take();
      Expr value = parse_expr();
      expect_newline();
      return Stmt{Return{std::move(value)}, span};
    }
    if (t.is_keyword("if")) return parse_if();
    if (t.is_keyword("for")) {
      take();
      expect_keyword("each");
      std::string var = expect_ident("loop variable").text;
      expect_keyword("in");
      Expr list = parse_expr();
      expect_punct(":");
      Body body = parse_block();
      return Stmt{ForEach{std::move(var), std::move(list), std::move(body)}, span};
    }
    if (t.is_keyword("while")) {
      take();
      Expr cond = parse_expr();
      expect_punct(":");
      Body body = parse_block();
      return Stmt{While{std::move(cond), std::move(body)}, span};
    }
    if (t.kind == TokenKind::Identifier && peek(1).is_punct(".")) {
      std::string comp = take().text;
      take();
      std::string method = expect_ident("method name").text;
      if (!cur().is_punct("(")) expected("'(' (only method calls may stand alone as statements)");
      auto args = parse_args();
      expect_newline();
      return Stmt{CallMethod{std::move(comp), std::move(method), std::move(args)}, span};
    }
    expected("a statement");
  }

  Stmt parse_if() {
    const SourceSpan span = take().span;  // if
    If node{parse_expr(), {}, {}, std::nullopt};
    expect_punct(":");
    node.then_body = parse_block();
    while (cur().is_keyword("elif")) {
      take();
      Expr cond = parse_expr();
      expect_punct(":");
      node.elifs.push_back(ElseIf{std::move(cond), parse_block()});
    }
    if (cur().is_keyword("else")) {
      take();
      expect_punct(":");
      node.else_body = parse_block();
    }
    return Stmt{std::move(node), span};
  }

  std::vector<Expr> parse_args() {
    std::vector<Expr> args;
    expect_punct("(");
    while (!cur().is_punct(")")) {
      if (!args.empty()) expect_punct(",");
      args.push_back(parse_expr());
    }
    expect_punct(")");
    return args;
  }

  // ---- expressions ---------------------------------------------------------

  Expr make_binary(BinaryOp op, Expr lhs, Expr rhs, SourceSpan start) {
    return Expr{Binary{op, std::move(lhs), std::move(rhs)}, span_from(start)};
  }

  Expr parse_expr() {
    DepthGuard guard(*this, cur().span);
    return parse_or();
  }

  Expr parse_or() {
    const SourceSpan start = cur().span;
    Expr lhs = parse_and();
    while (cur().is_keyword("or")) {
      take();
      Expr rhs = parse_and();
      lhs = make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs), start);
    }
    return lhs;
  }

  Expr parse_and() {
    const SourceSpan start = cur().span;
    Expr lhs = parse_not();
    while (cur().is_keyword("and")) {
      take();
      Expr rhs = parse_not();
      lhs = make_binary(BinaryOp::And, std::move(lhs), std::move(rhs), start);
    }
    return lhs;
  }

  Expr parse_not() {
    if (cur().is_keyword("not")) {
      const SourceSpan start = take().span;
      DepthGuard guard(*this, start);
      Expr operand = parse_not();
      return Expr{Unary{UnaryOp::Not, std::move(operand)}, span_from(start)};
    }
    return parse_compare();
  }

  std::optional<BinaryOp> compare_op() const {
    const Token& t = cur();
    if (t.kind != TokenKind::Punct) return std::nullopt;
    if (t.text == "==") return BinaryOp::Eq;
    if (t.text == "!=") return BinaryOp::Ne;
    if (t.text == "<") return BinaryOp::Lt;
    if (t.text == "<=") return BinaryOp::Le;
    if (t.text == ">") return BinaryOp::Gt;
    if (t.text == ">=") return BinaryOp::Ge;
    return std::nullopt;
  }

  Expr parse_compare() {
    const SourceSpan start = cur().span;
    Expr lhs = parse_additive();
    if (auto op = compare_op()) {
      take();
      Expr rhs = parse_additive();
      lhs = make_binary(*op, std::move(lhs), std::move(rhs), start);
      if (compare_op()) error("comparisons cannot be chained; add parentheses", cur().span);
    }
    return lhs;
  }

  Expr parse_additive() {
    const SourceSpan start = cur().span;
    Expr lhs = parse_multiplicative();
    while (cur().is_punct("+") || cur().is_punct("-")) {
      const BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      Expr rhs = parse_multiplicative();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), start);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    const SourceSpan start = cur().span;
    Expr lhs = parse_unary();
    while (cur().is_punct("*") || cur().is_punct("/")) {
      const BinaryOp op = take().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
      Expr rhs = parse_unary();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), start);
    }
    return lhs;
  }

  bool negative_number_ahead() const {
    const Token& minus = cur();
    const Token& next = peek(1);
    return minus.is_punct("-") && next.kind == TokenKind::Number && next.span.line == minus.span.line &&
           next.span.column == minus.span.column + 1;
  }

  Expr parse_unary() {
    if (negative_number_ahead()) {
      const SourceSpan start = take().span;
      std::string text = "-" + take().text;
      return Expr{Literal{NumberLit{std::move(text)}}, span_from(start)};
    }
    if (cur().is_punct("-")) {
      const SourceSpan start = take().span;
      DepthGuard guard(*this, start);
      Expr operand = parse_unary();
      return Expr{Unary{UnaryOp::Negate, std::move(operand)}, span_from(start)};
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = cur();
    const SourceSpan start = t.span;
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::String: {
        Literal lit = parse_literal();
        return Expr{std::move(lit), span_from(start)};
      }
      case TokenKind::Keyword:
        if (t.text == "True" || t.text == "False") {
          Literal lit = parse_literal();
          return Expr{std::move(lit), span_from(start)};
        }
        if (t.text == "global") {
          take();
          std::string name = expect_ident("global name").text;
          return Expr{GlobalRef{std::move(name)}, span_from(start)};
        }
        if (t.text == "call") {
          take();
          std::string name = expect_ident("procedure name").text;
          auto args = parse_args();
          return Expr{ProcCall{std::move(name), std::move(args)}, span_from(start)};
        }
        break;
      case TokenKind::Identifier: {
        std::string name = take().text;
        if (cur().is_punct(".")) {
          take();
          std::string member = expect_ident("property or method name").text;
          if (cur().is_punct("(")) {
            auto args = parse_args();
            return Expr{MethodCall{std::move(name), std::move(member), std::move(args)}, span_from(start)};
          }
          return Expr{PropertyRead{std::move(name), std::move(member)}, span_from(start)};
        }
        if (cur().is_punct("(")) {
          auto args = parse_args();
          return Expr{BuiltinCall{std::move(name), std::move(args)}, span_from(start)};
        }
        return Expr{LocalRef{std::move(name)}, span_from(start)};
      }
      case TokenKind::Punct:
        if (t.text == "(") {
          take();
          Expr inner = parse_expr();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[" || t.text == "{") {
          Literal lit = parse_literal();
          return Expr{std::move(lit), span_from(start)};
        }
        break;
      default: break;
    }
    expected("an expression");
  }

  // ---- literals ------------------------------------------------------------

  Literal parse_literal() {
    DepthGuard guard(*this, cur().span);
    const Token& t = cur();
    if (t.is_punct("-") && peek(1).kind == TokenKind::Number) {
      take();
      return Literal{NumberLit{"-" + take().text}};
    }
    switch (t.kind) {
      case TokenKind::Number: return Literal{NumberLit{take().text}};
      case TokenKind::String: return Literal{TextLit{take().text}};
      case TokenKind::Keyword:
        if (t.text == "True" || t.text == "False") return Literal{BoolLit{take().text == "True"}};
        break;
      case TokenKind::Punct:
        if (t.text == "[") {
          take();
          ListLit list;
          while (!cur().is_punct("]")) {
            if (!list.items.empty()) {
              expect_punct(",");
              if (cur().is_punct("]")) break;
            }
            list.items.push_back(parse_literal());
          }
          take();
          return Literal{std::move(list)};
        }
        if (t.text == "{") {
          take();
          DictLit dict;
          std::set<std::string> keys;
          while (!cur().is_punct("}")) {
            if (!dict.entries.empty()) {
              expect_punct(",");
              if (cur().is_punct("}")) break;
            }
            if (!at(TokenKind::String)) expected("a string dictionary key");
            const Token& key = take();
            if (!keys.insert(key.text).second) {
              throw SyntaxError{make_diag(DiagCode::DupName, "duplicate dictionary key " + key.text, key.span)};
            }
            expect_punct(":");
            dict.entries.emplace_back(key.text, parse_literal());
          }
          take();
          return Literal{std::move(dict)};
        }
        break;
      default: break;
    }
    expected("a literal value");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Token* last_ = nullptr;
  int depth_ = 0;
};

}  // namespace

Outcome<Program> parse(std::string_view source) {
  auto tokens = tokenize(source);
  if (!tokens) return fail(std::move(tokens).error());
  Program program;
  try {
    program = Parser(std::move(tokens).value()).parse_program();
  } catch (const SyntaxError& e) {
    return fail(Diagnostics{e.diag});
  }
  Diagnostics diags = check_program_invariants(program);
  if (!diags.empty()) return fail(std::move(diags));
  normalize_component_order(program);
  return program;
}

}  // namespace aptly
