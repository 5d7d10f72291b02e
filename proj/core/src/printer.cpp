#include "aptly/printer.hpp"

namespace aptly {

namespace {

// Binding strength, loosest first.
enum Prec : int {
  kOr = 1,
  kAnd = 2,
  kNot = 3,
  kCompare = 4,
  kAdditive = 5,
  kMultiplicative = 6,
  kNegate = 7,
  kPrimary = 8,
};

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return kCompare;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdditive;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kMultiplicative;
  }
  return kPrimary;
}

int expr_prec(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return binary_prec(b->op);
  if (const auto* u = std::get_if<Unary>(&e.node)) return u->op == UnaryOp::Not ? kNot : kNegate;
  return kPrimary;
}

void print_args(std::string& out, const std::vector<Expr>& args) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += print_expr(args[i]);
  }
  out += ')';
}

std::string wrap(const Expr& e, bool parens) {
  std::string inner = print_expr(e);
  return parens ? "(" + inner + ")" : inner;
}

struct ExprPrinter {
  std::string& out;

  void operator()(const Literal& l) { out += print_literal(l); }
  void operator()(const GlobalRef& g) { out += "global " + g.name; }
  void operator()(const LocalRef& l) { out += l.name; }
  void operator()(const PropertyRead& p) { out += p.component + "." + p.property; }
  void operator()(const ProcCall& c) {
    out += "call " + c.name;
    print_args(out, c.args);
  }
  void operator()(const BuiltinCall& c) {
    out += c.name;
    print_args(out, c.args);
  }
  void operator()(const MethodCall& c) {
    out += c.component + "." + c.method;
    print_args(out, c.args);
  }
  void operator()(const Binary& b) {
    const int prec = binary_prec(b.op);
    const bool non_assoc = prec == kCompare;
    const int lp = expr_prec(*b.lhs);
    const int rp = expr_prec(*b.rhs);
    out += wrap(*b.lhs, lp < prec || (non_assoc && lp == prec));
    out += ' ';
    out += binary_op_text(b.op);
    out += ' ';
    out += wrap(*b.rhs, rp <= prec);
  }
  void operator()(const Unary& u) {
    if (u.op == UnaryOp::Not) {
      out += "not ";
      out += wrap(*u.operand, expr_prec(*u.operand) < kNot);
      return;
    }
    // A minus glued to a number literal lexes as a negative literal, so
    // negating a number always needs parentheses.
    const bool number = std::holds_alternative<Literal>(u.operand->node) &&
                        std::holds_alternative<NumberLit>(std::get<Literal>(u.operand->node).value);
    out += '-';
    out += wrap(*u.operand, number || expr_prec(*u.operand) < kNegate);
  }
};

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void print_body(std::string& out, const Body& body, int depth);

void print_args_stmt(std::string& out, const std::vector<Expr>& args) { print_args(out, args); }

struct StmtPrinter {
  std::string& out;
  int depth;

  void operator()(const SetProperty& s) {
    out += "set " + s.component + "." + s.property + " = " + print_expr(s.value) + "\n";
  }
  void operator()(const SetGlobal& s) { out += "set global " + s.name + " = " + print_expr(s.value) + "\n"; }
  void operator()(const SetLocal& s) { out += "set " + s.name + " = " + print_expr(s.value) + "\n"; }
  void operator()(const CallProcedure& s) {
    out += "call " + s.name;
    print_args_stmt(out, s.args);
    out += "\n";
  }
  void operator()(const CallMethod& s) {
    out += s.component + "." + s.method;
    print_args_stmt(out, s.args);
    out += "\n";
  }
  void operator()(const If& s) {
    out += "if " + print_expr(s.cond) + ":\n";
    print_body(out, s.then_body, depth + 1);
    for (const auto& e : s.elifs) {
      indent(out, depth);
      out += "elif " + print_expr(e.cond) + ":\n";
      print_body(out, e.body, depth + 1);
    }
    if (s.else_body) {
      indent(out, depth);
      out += "else:\n";
      print_body(out, *s.else_body, depth + 1);
    }
  }
  void operator()(const ForEach& s) {
    out += "for each " + s.var + " in " + print_expr(s.list) + ":\n";
    print_body(out, s.body, depth + 1);
  }
  void operator()(const While& s) {
    out += "while " + print_expr(s.cond) + ":\n";
    print_body(out, s.body, depth + 1);
  }
  void operator()(const Return& s) { out += "return " + print_expr(s.value) + "\n"; }
};

void print_body(std::string& out, const Body& body, int depth) {
  for (const auto& stmt : body) {
    indent(out, depth);
    std::visit(StmtPrinter{out, depth}, stmt.node);
  }
}

void print_params(std::string& out, const std::vector<std::string>& params) {
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i];
  }
  out += ')';
}

}  // namespace

std::string quote_string(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string print_literal(const Literal& literal) {
  struct Visitor {
    std::string operator()(const NumberLit& n) const { return n.text; }
    std::string operator()(const TextLit& t) const { return quote_string(t.value); }
    std::string operator()(const BoolLit& b) const { return b.value ? "True" : "False"; }
    std::string operator()(const ListLit& l) const {
      std::string out = "[";
      for (std::size_t i = 0; i < l.items.size(); ++i) {
        if (i) out += ", ";
        out += print_literal(l.items[i]);
      }
      return out + "]";
    }
    std::string operator()(const DictLit& d) const {
      std::string out = "{";
      for (std::size_t i = 0; i < d.entries.size(); ++i) {
        if (i) out += ", ";
        out += quote_string(d.entries[i].first) + ": " + print_literal(d.entries[i].second);
      }
      return out + "}";
    }
  };
  return std::visit(Visitor{}, literal.value);
}

std::string print_expr(const Expr& expr) {
  std::string out;
  std::visit(ExprPrinter{out}, expr.node);
  return out;
}

std::string canonical_print(const Program& program) {
  std::string out;
  for (const auto& c : program.components) {
    out += c.name + " = " + c.type_name + "(";
    bool first = true;
    if (c.parent) {
      out += *c.parent;
      first = false;
    }
    for (const auto& p : c.properties) {
      if (!first) out += ", ";
      first = false;
      out += p.name + " = " + print_literal(p.value);
    }
    out += ")\n";
  }
  for (const auto& g : program.globals) {
    out += "\ninitialize " + g.name + " = " + print_expr(g.init) + "\n";
  }
  for (const auto& p : program.procedures) {
    out += "\nto " + p.name;
    print_params(out, p.params);
    out += ":\n";
    print_body(out, p.body, 1);
  }
  for (const auto& h : program.handlers) {
    out += "\nwhen " + h.component + "." + h.event;
    print_params(out, h.params);
    out += ":\n";
    print_body(out, h.body, 1);
  }
  return out;
}

}  // namespace aptly
