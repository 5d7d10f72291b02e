#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aptly/diagnostic.hpp"

namespace aptly {

/// Owning pointer with value semantics, used for recursive AST nodes.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T& operator*() { return *ptr_; }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

struct Literal;

/// Number kept as its source text so round trips never reformat it.
struct NumberLit {
  std::string text;
};
struct TextLit {
  std::string value;
};
struct BoolLit {
  bool value = false;
};
struct ListLit {
  std::vector<Literal> items;
};
struct DictLit {
  std::vector<std::pair<std::string, Literal>> entries;
};

struct Literal {
  std::variant<NumberLit, TextLit, BoolLit, ListLit, DictLit> value;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Not, Negate };

struct Expr;

struct GlobalRef {
  std::string name;
};
struct LocalRef {
  std::string name;
};
struct PropertyRead {
  std::string component;
  std::string property;
};
struct ProcCall {
  std::string name;
  std::vector<Expr> args;
};
struct BuiltinCall {
  std::string name;
  std::vector<Expr> args;
};
struct MethodCall {
  std::string component;
  std::string method;
  std::vector<Expr> args;
};
struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};
struct Unary {
  UnaryOp op;
  Box<Expr> operand;
};

struct Expr {
  std::variant<Literal, GlobalRef, LocalRef, PropertyRead, ProcCall, BuiltinCall, MethodCall, Binary, Unary> node;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using Body = std::vector<Stmt>;

struct SetProperty {
  std::string component;
  std::string property;
  Expr value;
};
struct SetGlobal {
  std::string name;
  Expr value;
};
struct SetLocal {
  std::string name;
  Expr value;
};
struct CallProcedure {
  std::string name;
  std::vector<Expr> args;
};
struct CallMethod {
  std::string component;
  std::string method;
  std::vector<Expr> args;
};
struct ElseIf {
  Expr cond;
  Body body;
};
struct If {
  Expr cond;
  Body then_body;
  std::vector<ElseIf> elifs;
  std::optional<Body> else_body;
};
struct ForEach {
  std::string var;
  Expr list;
  Body body;
};
struct While {
  Expr cond;
  Body body;
};
struct Return {
  Expr value;
};

struct Stmt {
  std::variant<SetProperty, SetGlobal, SetLocal, CallProcedure, CallMethod, If, ForEach, While, Return> node;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Top-level forms
// ---------------------------------------------------------------------------

struct PropertyAssign {
  std::string name;
  Literal value;
  SourceSpan span;
};

struct ComponentDecl {
  std::string name;
  std::string type_name;
  std::optional<std::string> parent;  // absent only for the Screen
  std::vector<PropertyAssign> properties;
  SourceSpan span;       // the instance name
  SourceSpan type_span;  // the type name
};

struct GlobalDecl {
  std::string name;
  Expr init;
  SourceSpan span;
};

struct ProcedureDecl {
  std::string name;
  std::vector<std::string> params;
  Body body;
  SourceSpan span;

  /// True iff the body ends in `return`.
  bool has_result() const;
};

struct EventHandler {
  std::string component;
  std::string event;
  std::vector<std::string> params;
  Body body;
  SourceSpan span;
};

struct Program {
  std::vector<ComponentDecl> components;
  std::vector<GlobalDecl> globals;
  std::vector<ProcedureDecl> procedures;
  std::vector<EventHandler> handlers;
};

inline constexpr std::string_view kScreenType = "Screen";

/// Structural equality: ignores spans and string quoting style.
bool structural_equal(const Literal& a, const Literal& b);
bool structural_equal(const Expr& a, const Expr& b);
bool structural_equal(const Stmt& a, const Stmt& b);
bool structural_equal(const Program& a, const Program& b);

/// Registry-free invariants: single leading Screen, unique names,
/// parent-before-child, return placement, no local shadowing a global.
Diagnostics check_program_invariants(const Program& program);

/// Reorders component declarations into designer pre-order (children keep
/// their relative declaration order). Requires parent-before-child.
void normalize_component_order(Program& program);

std::string_view binary_op_text(BinaryOp op);

}  // namespace aptly
