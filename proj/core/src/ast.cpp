#include "aptly/ast.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aptly {

bool ProcedureDecl::has_result() const {
  return !body.empty() && std::holds_alternative<Return>(body.back().node);
}

std::string_view binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// structural equality
// ---------------------------------------------------------------------------

namespace {

template <typename T, typename Eq>
bool list_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!eq(a[i], b[i])) return false;
  }
  return true;
}

bool exprs_equal(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  return list_equal(a, b, [](const Expr& x, const Expr& y) { return structural_equal(x, y); });
}

bool body_equal(const Body& a, const Body& b) {
  return list_equal(a, b, [](const Stmt& x, const Stmt& y) { return structural_equal(x, y); });
}

struct LiteralEq {
  const Literal& other;
  bool operator()(const NumberLit& a) const { return a.text == std::get<NumberLit>(other.value).text; }
  bool operator()(const TextLit& a) const { return a.value == std::get<TextLit>(other.value).value; }
  bool operator()(const BoolLit& a) const { return a.value == std::get<BoolLit>(other.value).value; }
  bool operator()(const ListLit& a) const {
    return list_equal(a.items, std::get<ListLit>(other.value).items,
                      [](const Literal& x, const Literal& y) { return structural_equal(x, y); });
  }
  bool operator()(const DictLit& a) const {
    return list_equal(a.entries, std::get<DictLit>(other.value).entries, [](const auto& x, const auto& y) {
      return x.first == y.first && structural_equal(x.second, y.second);
    });
  }
};

struct ExprEq {
  const Expr& other;
  bool operator()(const Literal& a) const { return structural_equal(a, std::get<Literal>(other.node)); }
  bool operator()(const GlobalRef& a) const { return a.name == std::get<GlobalRef>(other.node).name; }
  bool operator()(const LocalRef& a) const { return a.name == std::get<LocalRef>(other.node).name; }
  bool operator()(const PropertyRead& a) const {
    const auto& b = std::get<PropertyRead>(other.node);
    return a.component == b.component && a.property == b.property;
  }
  bool operator()(const ProcCall& a) const {
    const auto& b = std::get<ProcCall>(other.node);
    return a.name == b.name && exprs_equal(a.args, b.args);
  }
  bool operator()(const BuiltinCall& a) const {
    const auto& b = std::get<BuiltinCall>(other.node);
    return a.name == b.name && exprs_equal(a.args, b.args);
  }
  bool operator()(const MethodCall& a) const {
    const auto& b = std::get<MethodCall>(other.node);
    return a.component == b.component && a.method == b.method && exprs_equal(a.args, b.args);
  }
  bool operator()(const Binary& a) const {
    const auto& b = std::get<Binary>(other.node);
    return a.op == b.op && structural_equal(*a.lhs, *b.lhs) && structural_equal(*a.rhs, *b.rhs);
  }
  bool operator()(const Unary& a) const {
    const auto& b = std::get<Unary>(other.node);
    return a.op == b.op && structural_equal(*a.operand, *b.operand);
  }
};

struct StmtEq {
  const Stmt& other;
  bool operator()(const SetProperty& a) const {
    const auto& b = std::get<SetProperty>(other.node);
    return a.component == b.component && a.property == b.property && structural_equal(a.value, b.value);
  }
  bool operator()(const SetGlobal& a) const {
    const auto& b = std::get<SetGlobal>(other.node);
    return a.name == b.name && structural_equal(a.value, b.value);
  }
  bool operator()(const SetLocal& a) const {
    const auto& b = std::get<SetLocal>(other.node);
    return a.name == b.name && structural_equal(a.value, b.value);
  }
  bool operator()(const CallProcedure& a) const {
    const auto& b = std::get<CallProcedure>(other.node);
    return a.name == b.name && exprs_equal(a.args, b.args);
  }
  bool operator()(const CallMethod& a) const {
    const auto& b = std::get<CallMethod>(other.node);
    return a.component == b.component && a.method == b.method && exprs_equal(a.args, b.args);
  }
  bool operator()(const If& a) const {
    const auto& b = std::get<If>(other.node);
    if (!structural_equal(a.cond, b.cond) || !body_equal(a.then_body, b.then_body)) return false;
    if (!list_equal(a.elifs, b.elifs, [](const ElseIf& x, const ElseIf& y) {
          return structural_equal(x.cond, y.cond) && body_equal(x.body, y.body);
        })) {
      return false;
    }
    if (a.else_body.has_value() != b.else_body.has_value()) return false;
    return !a.else_body || body_equal(*a.else_body, *b.else_body);
  }
  bool operator()(const ForEach& a) const {
    const auto& b = std::get<ForEach>(other.node);
    return a.var == b.var && structural_equal(a.list, b.list) && body_equal(a.body, b.body);
  }
  bool operator()(const While& a) const {
    const auto& b = std::get<While>(other.node);
    return structural_equal(a.cond, b.cond) && body_equal(a.body, b.body);
  }
  bool operator()(const Return& a) const { return structural_equal(a.value, std::get<Return>(other.node).value); }
};

}  // namespace

bool structural_equal(const Literal& a, const Literal& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(LiteralEq{b}, a.value);
}

bool structural_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(ExprEq{b}, a.node);
}

bool structural_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(StmtEq{b}, a.node);
}

bool structural_equal(const Program& a, const Program& b) {
  const bool components = list_equal(a.components, b.components, [](const ComponentDecl& x, const ComponentDecl& y) {
    return x.name == y.name && x.type_name == y.type_name && x.parent == y.parent &&
           list_equal(x.properties, y.properties, [](const PropertyAssign& p, const PropertyAssign& q) {
             return p.name == q.name && structural_equal(p.value, q.value);
           });
  });
  if (!components) return false;
  const bool globals = list_equal(a.globals, b.globals, [](const GlobalDecl& x, const GlobalDecl& y) {
    return x.name == y.name && structural_equal(x.init, y.init);
  });
  if (!globals) return false;
  const bool procs = list_equal(a.procedures, b.procedures, [](const ProcedureDecl& x, const ProcedureDecl& y) {
    return x.name == y.name && x.params == y.params && body_equal(x.body, y.body);
  });
  if (!procs) return false;
  return list_equal(a.handlers, b.handlers, [](const EventHandler& x, const EventHandler& y) {
    return x.component == y.component && x.event == y.event && x.params == y.params && body_equal(x.body, y.body);
  });
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

namespace {

class InvariantChecker {
 public:
  explicit InvariantChecker(const Program& program) : program_(program) {
    for (const auto& g : program.globals) global_names_.insert(g.name);
  }

  Diagnostics run() {
    check_components();
    check_unique_names();
    for (const auto& proc : program_.procedures) {
      check_params(proc.params, proc.span);
      check_body(proc.body, /*allow_return=*/true, /*top=*/true);
    }
    for (const auto& handler : program_.handlers) {
      check_params(handler.params, handler.span);
      check_body(handler.body, /*allow_return=*/false, /*top=*/true);
    }
    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
    return std::move(diags_);
  }

 private:
  void emit(DiagCode code, std::string message, SourceSpan span) {
    diags_.push_back(make_diag(code, std::move(message), span));
  }

  void check_components() {
    const auto& comps = program_.components;
    if (comps.empty()) {
      emit(DiagCode::EmptyProgram, "program declares no Screen component", {});
      return;
    }
    std::set<std::string> seen;
    int screens = 0;
    for (const auto& c : comps) {
      if (c.type_name == kScreenType) {
        ++screens;
        if (screens > 1) emit(DiagCode::Syntax, "only one Screen per program is supported", c.type_span);
        if (c.parent) emit(DiagCode::Syntax, "a Screen cannot have a parent", c.span);
      } else if (!c.parent) {
        emit(DiagCode::Syntax, "component '" + c.name + "' needs a parent", c.span);
      } else if (!seen.count(*c.parent)) {
        emit(DiagCode::UndeclaredParent, "parent '" + *c.parent + "' is not declared before '" + c.name + "'",
             c.span);
      }
      if (!seen.insert(c.name).second) emit(DiagCode::DupName, "duplicate component name '" + c.name + "'", c.span);
    }
    if (screens == 0) emit(DiagCode::EmptyProgram, "program declares no Screen component", comps.front().span);
  }

  void check_unique_names() {
    std::set<std::string> names;
    for (const auto& g : program_.globals) {
      if (!names.insert(g.name).second) emit(DiagCode::DupName, "duplicate global '" + g.name + "'", g.span);
    }
    names.clear();
    for (const auto& p : program_.procedures) {
      if (!names.insert(p.name).second) emit(DiagCode::DupName, "duplicate procedure '" + p.name + "'", p.span);
    }
    std::set<std::pair<std::string, std::string>> events;
    for (const auto& h : program_.handlers) {
      if (!events.insert({h.component, h.event}).second) {
        emit(DiagCode::DupName, "duplicate handler for " + h.component + "." + h.event, h.span);
      }
    }
  }

  void check_local_name(const std::string& name, SourceSpan span) {
    if (global_names_.count(name)) {
      emit(DiagCode::DupName, "local name '" + name + "' shadows global '" + name + "'", span);
    }
  }

  void check_params(const std::vector<std::string>& params, SourceSpan span) {
    std::set<std::string> seen;
    for (const auto& p : params) {
      if (!seen.insert(p).second) emit(DiagCode::DupName, "duplicate parameter '" + p + "'", span);
      check_local_name(p, span);
    }
  }

  void check_body(const Body& body, bool allow_return, bool top) {
    if (body.empty()) emit(DiagCode::Syntax, "empty statement body", {});
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = body[i];
      if (std::holds_alternative<Return>(s.node)) {
        const bool last = i + 1 == body.size();
        if (!allow_return || !top || !last) {
          emit(DiagCode::ReturnPosition, "return is only allowed as the last statement of a procedure", s.span);
        }
      } else if (const auto* node = std::get_if<If>(&s.node)) {
        check_body(node->then_body, allow_return, false);
        for (const auto& e : node->elifs) check_body(e.body, allow_return, false);
        if (node->else_body) check_body(*node->else_body, allow_return, false);
      } else if (const auto* loop = std::get_if<ForEach>(&s.node)) {
        check_local_name(loop->var, s.span);
        check_body(loop->body, allow_return, false);
      } else if (const auto* w = std::get_if<While>(&s.node)) {
        check_body(w->body, allow_return, false);
      }
    }
  }

  const Program& program_;
  std::set<std::string> global_names_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics check_program_invariants(const Program& program) { return InvariantChecker(program).run(); }

void normalize_component_order(Program& program) {
  auto& comps = program.components;
  if (comps.empty()) return;
  std::map<std::string, std::vector<std::size_t>> children;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (comps[i].parent) {
      children[*comps[i].parent].push_back(i);
    } else {
      roots.push_back(i);
    }
  }
  std::vector<ComponentDecl> ordered;
  ordered.reserve(comps.size());
  std::vector<bool> placed(comps.size(), false);
  std::vector<std::size_t> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (placed[i]) continue;
    placed[i] = true;
    ordered.push_back(comps[i]);
    auto it = children.find(comps[i].name);
    if (it == children.end()) continue;
    for (auto c = it->second.rbegin(); c != it->second.rend(); ++c) stack.push_back(*c);
  }
  // Anything unreachable (only possible on invalid input) keeps its place at the end.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (!placed[i]) ordered.push_back(comps[i]);
  }
  comps = std::move(ordered);
}

}  // namespace aptly
