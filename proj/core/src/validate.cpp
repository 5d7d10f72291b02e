#include <algorithm>
#include <map>
#include <set>

#include "aptly/registry.hpp"

namespace aptly {

namespace {

bool literal_matches(const Literal& lit, PropType type) {
  switch (type) {
    case PropType::Number: return std::holds_alternative<NumberLit>(lit.value);
    case PropType::Boolean: return std::holds_alternative<BoolLit>(lit.value);
    case PropType::Text:
    case PropType::AssetPath:
    case PropType::TextList: return std::holds_alternative<TextLit>(lit.value);
    case PropType::Color: {
      const auto* text = std::get_if<TextLit>(&lit.value);
      return text && is_valid_color(text->value);
    }
  }
  return false;
}

struct ProcInfo {
  std::size_t arity;
  bool has_result;
};

class Validator {
 public:
  Validator(const Program& program, const Registry& registry) : program_(program), registry_(registry) {}

  Diagnostics run() {
    for (const auto& c : program_.components) components_.emplace(c.name, registry_.find(c.type_name));
    for (const auto& g : program_.globals) globals_.insert(g.name);
    for (const auto& p : program_.procedures) procs_.emplace(p.name, ProcInfo{p.params.size(), p.has_result()});

    check_components();
    for (const auto& g : program_.globals) {
      Scope empty;
      check_expr(g.init, empty);
    }
    for (const auto& p : program_.procedures) {
      Scope scope(p.params.begin(), p.params.end());
      check_body(p.body, scope);
    }
    for (const auto& h : program_.handlers) check_handler(h);

    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span < b.span; });
    return std::move(diags_);
  }

 private:
  using Scope = std::set<std::string>;

  void emit(DiagCode code, std::string message, SourceSpan span) {
    diags_.push_back(make_diag(code, std::move(message), span));
  }

  void check_components() {
    std::map<std::string, const ComponentSchema*> declared;
    for (const auto& c : program_.components) {
      const ComponentSchema* schema = registry_.find(c.type_name);
      if (!schema) {
        emit(DiagCode::UnknownComponentType, "unknown component type '" + c.type_name + "'", c.type_span);
      } else {
        for (const auto& p : c.properties) {
          auto it = schema->properties.find(p.name);
          if (it == schema->properties.end()) {
            emit(DiagCode::UnknownProperty, c.type_name + " has no property '" + p.name + "'", p.span);
          } else if (!literal_matches(p.value, it->second)) {
            emit(DiagCode::PropertyType,
                 c.type_name + "." + p.name + " expects a " + std::string(prop_type_name(it->second)) + " value",
                 p.span);
          }
        }
      }
      if (c.parent) {
        auto parent = declared.find(*c.parent);
        if (parent != declared.end() && parent->second && !parent->second->container) {
          emit(DiagCode::NotContainer, "'" + *c.parent + "' cannot contain other components", c.span);
        }
      }
      declared.emplace(c.name, schema);
    }
  }

  // Returns the component's schema, or null after reporting why not.
  const ComponentSchema* component(const std::string& name, SourceSpan span) {
    auto it = components_.find(name);
    if (it == components_.end()) {
      emit(DiagCode::UnresolvedName, "no component named '" + name + "'", span);
      return nullptr;
    }
    return it->second;  // unknown types were already reported
  }

  void check_args(const std::vector<Expr>& args, const Scope& scope) {
    for (const auto& a : args) check_expr(a, scope);
  }

  void check_arity(std::size_t expected, std::size_t got, const std::string& what, SourceSpan span) {
    if (expected != got) {
      emit(DiagCode::Arity,
           what + " takes " + std::to_string(expected) + " argument(s), " + std::to_string(got) + " given", span);
    }
  }

  void check_proc_call(const std::string& name, std::size_t argc, bool needs_result, SourceSpan span) {
    auto it = procs_.find(name);
    if (it == procs_.end()) {
      emit(DiagCode::UnresolvedName, "no procedure named '" + name + "'", span);
      return;
    }
    check_arity(it->second.arity, argc, "procedure '" + name + "'", span);
    if (needs_result && !it->second.has_result) {
      emit(DiagCode::NoResult, "procedure '" + name + "' does not return a value", span);
    }
  }

  void check_method_call(const std::string& comp, const std::string& method, std::size_t argc, bool needs_result,
                         SourceSpan span) {
    const ComponentSchema* schema = component(comp, span);
    if (!schema) return;
    auto it = schema->methods.find(method);
    if (it == schema->methods.end()) {
      emit(DiagCode::UnknownMethod, schema->type_name + " has no method '" + method + "'", span);
      return;
    }
    check_arity(it->second.params.size(), argc, comp + "." + method, span);
    if (needs_result && !it->second.has_result) {
      emit(DiagCode::NoResult, comp + "." + method + " does not return a value", span);
    }
  }

  void check_property(const std::string& comp, const std::string& prop, SourceSpan span) {
    const ComponentSchema* schema = component(comp, span);
    if (schema && !schema->properties.count(prop)) {
      emit(DiagCode::UnknownProperty, schema->type_name + " has no property '" + prop + "'", span);
    }
  }

  void check_expr(const Expr& e, const Scope& scope) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, GlobalRef>) {
            if (!globals_.count(node.name)) emit(DiagCode::UnresolvedName, "no global named '" + node.name + "'", e.span);
          } else if constexpr (std::is_same_v<T, LocalRef>) {
            if (!scope.count(node.name)) {
              std::string hint = globals_.count(node.name) ? " (did you mean 'global " + node.name + "'?)" : "";
              emit(DiagCode::UnresolvedName, "no local variable named '" + node.name + "'" + hint, e.span);
            }
          } else if constexpr (std::is_same_v<T, PropertyRead>) {
            check_property(node.component, node.property, e.span);
          } else if constexpr (std::is_same_v<T, ProcCall>) {
            check_proc_call(node.name, node.args.size(), true, e.span);
            check_args(node.args, scope);
          } else if constexpr (std::is_same_v<T, BuiltinCall>) {
            const BuiltinSchema* b = registry_.find_builtin(node.name);
            if (!b) {
              emit(DiagCode::UnknownBuiltin, "unknown builtin '" + node.name + "'", e.span);
            } else {
              check_arity(b->arity, node.args.size(), "builtin '" + node.name + "'", e.span);
              if (!b->has_result) emit(DiagCode::NoResult, "builtin '" + node.name + "' does not return a value", e.span);
            }
            check_args(node.args, scope);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            check_method_call(node.component, node.method, node.args.size(), true, e.span);
            check_args(node.args, scope);
          } else if constexpr (std::is_same_v<T, Binary>) {
            check_expr(*node.lhs, scope);
            check_expr(*node.rhs, scope);
          } else if constexpr (std::is_same_v<T, Unary>) {
            check_expr(*node.operand, scope);
          }
        },
        e.node);
  }

  void check_body(const Body& body, const Scope& scope) {
    for (const auto& s : body) check_stmt(s, scope);
  }

  void check_stmt(const Stmt& s, const Scope& scope) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SetProperty>) {
            check_property(node.component, node.property, s.span);
            check_expr(node.value, scope);
          } else if constexpr (std::is_same_v<T, SetGlobal>) {
            if (!globals_.count(node.name)) emit(DiagCode::UnresolvedName, "no global named '" + node.name + "'", s.span);
            check_expr(node.value, scope);
          } else if constexpr (std::is_same_v<T, SetLocal>) {
            if (!scope.count(node.name)) {
              emit(DiagCode::UnresolvedName, "no local variable named '" + node.name + "'", s.span);
            }
            check_expr(node.value, scope);
          } else if constexpr (std::is_same_v<T, CallProcedure>) {
            check_proc_call(node.name, node.args.size(), false, s.span);
            check_args(node.args, scope);
          } else if constexpr (std::is_same_v<T, CallMethod>) {
            check_method_call(node.component, node.method, node.args.size(), false, s.span);
            check_args(node.args, scope);
          } else if constexpr (std::is_same_v<T, If>) {
            check_expr(node.cond, scope);
            check_body(node.then_body, scope);
            for (const auto& e : node.elifs) {
              check_expr(e.cond, scope);
              check_body(e.body, scope);
            }
            if (node.else_body) check_body(*node.else_body, scope);
          } else if constexpr (std::is_same_v<T, ForEach>) {
            check_expr(node.list, scope);
            Scope inner = scope;
            inner.insert(node.var);
            check_body(node.body, inner);
          } else if constexpr (std::is_same_v<T, While>) {
            check_expr(node.cond, scope);
            check_body(node.body, scope);
          } else if constexpr (std::is_same_v<T, Return>) {
            check_expr(node.value, scope);
          }
        },
        s.node);
  }

  void check_handler(const EventHandler& h) {
    Scope scope(h.params.begin(), h.params.end());
    const ComponentSchema* schema = component(h.component, h.span);
    if (schema) {
      auto it = schema->events.find(h.event);
      if (it == schema->events.end()) {
        emit(DiagCode::UnknownEvent, schema->type_name + " has no event '" + h.event + "'", h.span);
      } else if (it->second.size() != h.params.size()) {
        emit(DiagCode::EventArity,
             h.component + "." + h.event + " has " + std::to_string(it->second.size()) + " parameter(s), " +
                 std::to_string(h.params.size()) + " declared",
             h.span);
      }
    }
    check_body(h.body, scope);
  }

  const Program& program_;
  const Registry& registry_;
  std::map<std::string, const ComponentSchema*> components_;
  std::set<std::string> globals_;
  std::map<std::string, ProcInfo> procs_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics validate(const Program& program, const Registry& registry) {
  return Validator(program, registry).run();
}

}  // namespace aptly
