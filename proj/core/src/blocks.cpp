#include "aptly/blocks.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "aptly/lexer.hpp"

namespace aptly {

// ---------------------------------------------------------------------------
// Opcode table
// ---------------------------------------------------------------------------

namespace {

using K = NodeKind;
using C = BlockContext;

// The one place the block format is defined. Entries are matched in order,
// so GlobalRef/SetGlobal (VAR starts with "global ") precede their locals.
constexpr std::array<OpcodeEntry, 38> kTable{{
    {K::GlobalDecl, "global_declaration", C::TopLevel, "", "", "field NAME; input VALUE"},
    {K::ProcedureNoReturn, "procedures_defnoreturn", C::TopLevel, "", "", "fields NAME, VAR0..; input STACK"},
    {K::ProcedureReturn, "procedures_defreturn", C::TopLevel, "", "",
     "fields NAME, VAR0..; inputs STACK (statements before return, optional), RETURN"},
    {K::EventHandler, "component_event", C::TopLevel, "", "",
     "mutation component_type, event_name, instance_name; fields VAR0..; input STACK"},
    {K::SetProperty, "component_set_get", C::Statement, "mutation.set_or_get", "set",
     "mutation set_or_get, component_type, instance_name, property_name; input VALUE"},
    {K::PropertyRead, "component_set_get", C::Value, "mutation.set_or_get", "get",
     "mutation set_or_get, component_type, instance_name, property_name"},
    {K::SetGlobal, "lexical_variable_set", C::Statement, "field.VAR", "global *", "field VAR; input VALUE"},
    {K::SetLocal, "lexical_variable_set", C::Statement, "field.VAR", "*", "field VAR; input VALUE"},
    {K::GlobalRef, "lexical_variable_get", C::Value, "field.VAR", "global *", "field VAR"},
    {K::LocalRef, "lexical_variable_get", C::Value, "field.VAR", "*", "field VAR"},
    {K::CallProcedure, "procedures_callnoreturn", C::Statement, "", "", "field PROCNAME; inputs ARG0.."},
    {K::ProcCall, "procedures_callreturn", C::Value, "", "", "field PROCNAME; inputs ARG0.."},
    {K::CallMethod, "component_method", C::Statement, "", "",
     "mutation component_type, instance_name, method_name; inputs ARG0.."},
    {K::MethodCall, "component_method", C::Value, "", "",
     "mutation component_type, instance_name, method_name; inputs ARG0.."},
    {K::BuiltinCall, "*", C::Value, "", "", "opcode is the builtin name; inputs ARG0.."},
    {K::If, "controls_if", C::Statement, "", "", "mutation elseif, else; inputs IF0, DO0, IF1, DO1.., ELSE"},
    {K::ForEach, "controls_forEach", C::Statement, "", "", "field VAR; inputs LIST, DO"},
    {K::While, "controls_while", C::Statement, "", "", "inputs TEST, DO"},
    {K::Number, "math_number", C::Value, "", "", "field NUM"},
    {K::Text, "text", C::Value, "", "", "field TEXT"},
    {K::Boolean, "logic_boolean", C::Value, "", "", "field BOOL (TRUE or FALSE)"},
    {K::List, "lists_create_with", C::Value, "", "", "mutation items; inputs ADD0.."},
    {K::Dict, "dictionaries_create_with", C::Value, "", "", "mutation items; inputs ADD0.. (pair blocks)"},
    {K::DictEntry, "pair", C::DictEntry, "", "", "inputs KEY (text block), VALUE"},
    {K::Add, "math_add", C::Value, "", "", "inputs A, B"},
    {K::Sub, "math_subtract", C::Value, "", "", "inputs A, B"},
    {K::Mul, "math_multiply", C::Value, "", "", "inputs A, B"},
    {K::Div, "math_division", C::Value, "", "", "inputs A, B"},
    {K::Eq, "logic_compare", C::Value, "field.OP", "EQ", "field OP; inputs A, B"},
    {K::Ne, "logic_compare", C::Value, "field.OP", "NEQ", "field OP; inputs A, B"},
    {K::Lt, "math_compare", C::Value, "field.OP", "LT", "field OP; inputs A, B"},
    {K::Le, "math_compare", C::Value, "field.OP", "LTE", "field OP; inputs A, B"},
    {K::Gt, "math_compare", C::Value, "field.OP", "GT", "field OP; inputs A, B"},
    {K::Ge, "math_compare", C::Value, "field.OP", "GTE", "field OP; inputs A, B"},
    {K::And, "logic_operation", C::Value, "field.OP", "AND", "field OP; inputs A, B"},
    {K::Or, "logic_operation", C::Value, "field.OP", "OR", "field OP; inputs A, B"},
    {K::Not, "logic_negate", C::Value, "", "", "input BOOL"},
    {K::Negate, "math_neg", C::Value, "", "", "input NUM"},
}};

constexpr std::string_view kGlobalPrefix = "global ";

const std::string* lookup(const std::map<std::string, std::string>& m, std::string_view key) {
  auto it = m.find(std::string(key));
  return it == m.end() ? nullptr : &it->second;
}

bool discriminator_matches(const OpcodeEntry& e, const Block& b) {
  if (e.discriminator_key.empty()) return true;
  const std::string* value = nullptr;
  if (e.discriminator_key.starts_with("mutation.")) {
    value = lookup(b.mutation, e.discriminator_key.substr(9));
  } else {
    value = lookup(b.fields, e.discriminator_key.substr(6));
  }
  if (!value) return false;
  if (e.discriminator_value == "global *") return value->starts_with(kGlobalPrefix);
  if (e.discriminator_value == "*") return true;
  return *value == e.discriminator_value;
}

}  // namespace

std::span<const OpcodeEntry> opcode_table() { return kTable; }

const OpcodeEntry& opcode_entry(NodeKind kind) {
  for (const auto& e : kTable) {
    if (e.kind == kind) return e;
  }
  return kTable.front();  // unreachable: the table covers every kind
}

std::string_view node_kind_name(NodeKind kind) {
  static constexpr std::array<std::string_view, 38> names{
      "GlobalDecl", "ProcedureNoReturn", "ProcedureReturn", "EventHandler", "SetProperty", "PropertyRead",
      "SetGlobal",  "SetLocal",          "GlobalRef",       "LocalRef",     "CallProcedure", "ProcCall",
      "CallMethod", "MethodCall",        "BuiltinCall",     "If",           "ForEach",     "While",
      "Number",     "Text",              "Boolean",         "List",         "Dict",        "DictEntry",
      "Add",        "Sub",               "Mul",             "Div",          "Eq",          "Ne",
      "Lt",         "Le",                "Gt",              "Ge",           "And",         "Or",
      "Not",        "Negate",
  };
  const auto i = static_cast<std::size_t>(kind);
  return i < names.size() ? names[i] : "?";
}

bool is_structural_opcode(std::string_view opcode) {
  if (opcode == "*") return false;
  return std::any_of(kTable.begin(), kTable.end(), [&](const OpcodeEntry& e) { return e.opcode == opcode; });
}

std::optional<NodeKind> classify_block(const Block& block, BlockContext context, const Registry& registry) {
  for (const auto& e : kTable) {
    if (e.context != context) continue;
    if (e.opcode == "*") {
      if (!is_structural_opcode(block.opcode) && registry.find_builtin(block.opcode)) return e.kind;
      continue;
    }
    if (e.opcode == block.opcode && discriminator_matches(e, block)) return e.kind;
  }
  return std::nullopt;
}

std::size_t count_blocks(const Block& block) {
  std::size_t n = 0;
  const Block* cur = &block;
  while (cur) {
    ++n;
    for (const auto& [_, child] : cur->inputs) n += count_blocks(*child);
    cur = cur->next ? &**cur->next : nullptr;
  }
  return n;
}

std::size_t count_blocks(const BlockProgram& program) {
  std::size_t n = 0;
  for (const auto& b : program.workspace) n += count_blocks(b);
  return n;
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

namespace {

std::string numbered(std::string_view prefix, std::size_t i) { return std::string(prefix) + std::to_string(i); }

class Compiler {
 public:
  explicit Compiler(const Program& program) : program_(program) {
    for (const auto& c : program.components) types_.emplace(c.name, c.type_name);
  }

  BlockProgram run() {
    BlockProgram out;
    out.designer = designer();
    for (const auto& g : program_.globals) {
      Block b = make("global_declaration");
      b.fields["NAME"] = g.name;
      b.inputs.emplace("VALUE", expr(g.init));
      out.workspace.push_back(std::move(b));
    }
    for (const auto& p : program_.procedures) out.workspace.push_back(procedure(p));
    for (const auto& h : program_.handlers) out.workspace.push_back(handler(h));
    return out;
  }

 private:
  Block make(std::string_view opcode) {
    Block b;
    b.id = "b" + std::to_string(next_id_++);
    b.opcode = std::string(opcode);
    return b;
  }

  ComponentNode designer() const {
    std::map<std::string, std::vector<const ComponentDecl*>> children;
    const ComponentDecl* root = nullptr;
    for (const auto& c : program_.components) {
      if (c.parent) {
        children[*c.parent].push_back(&c);
      } else if (!root) {
        root = &c;
      }
    }
    return node(*root, children);
  }

  static ComponentNode node(const ComponentDecl& decl,
                            const std::map<std::string, std::vector<const ComponentDecl*>>& children) {
    ComponentNode n{decl.name, decl.type_name, {}, {}};
    for (const auto& p : decl.properties) n.properties.push_back(DesignerProperty{p.name, p.value});
    if (auto it = children.find(decl.name); it != children.end()) {
      for (const auto* child : it->second) n.children.push_back(node(*child, children));
    }
    return n;
  }

  void params(Block& b, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) b.fields[numbered("VAR", i)] = names[i];
  }

  void args(Block& b, const std::vector<Expr>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) b.inputs.emplace(numbered("ARG", i), expr(list[i]));
  }

  void component_mutation(Block& b, const std::string& instance) {
    b.mutation["component_type"] = types_.at(instance);
    b.mutation["instance_name"] = instance;
  }

  Block procedure(const ProcedureDecl& p) {
    const bool result = p.has_result();
    Block b = make(result ? "procedures_defreturn" : "procedures_defnoreturn");
    b.fields["NAME"] = p.name;
    params(b, p.params);
    const std::size_t stmts = result ? p.body.size() - 1 : p.body.size();
    if (auto chain = body(p.body, stmts)) b.inputs.emplace("STACK", std::move(*chain));
    if (result) b.inputs.emplace("RETURN", expr(std::get<Return>(p.body.back().node).value));
    return b;
  }

  Block handler(const EventHandler& h) {
    Block b = make("component_event");
    component_mutation(b, h.component);
    b.mutation["event_name"] = h.event;
    params(b, h.params);
    if (auto chain = body(h.body, h.body.size())) b.inputs.emplace("STACK", std::move(*chain));
    return b;
  }

  // Chains the first `count` statements through `next`.
  std::optional<Block> body(const Body& stmts, std::size_t count) {
    if (count == 0) return std::nullopt;
    std::vector<Block> blocks;
    blocks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) blocks.push_back(stmt(stmts[i]));
    for (std::size_t i = blocks.size() - 1; i > 0; --i) blocks[i - 1].next.emplace(std::move(blocks[i]));
    return std::move(blocks.front());
  }

  void add_body(Block& b, const std::string& input, const Body& stmts) {
    if (auto chain = body(stmts, stmts.size())) b.inputs.emplace(input, std::move(*chain));
  }

  Block stmt(const Stmt& s) {
    return std::visit(
        [&](const auto& node) -> Block {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SetProperty>) {
            Block b = make("component_set_get");
            b.mutation["set_or_get"] = "set";
            component_mutation(b, node.component);
            b.mutation["property_name"] = node.property;
            b.inputs.emplace("VALUE", expr(node.value));
            return b;
          } else if constexpr (std::is_same_v<T, SetGlobal>) {
            Block b = make("lexical_variable_set");
            b.fields["VAR"] = std::string(kGlobalPrefix) + node.name;
            b.inputs.emplace("VALUE", expr(node.value));
            return b;
          } else if constexpr (std::is_same_v<T, SetLocal>) {
            Block b = make("lexical_variable_set");
            b.fields["VAR"] = node.name;
            b.inputs.emplace("VALUE", expr(node.value));
            return b;
          } else if constexpr (std::is_same_v<T, CallProcedure>) {
            Block b = make("procedures_callnoreturn");
            b.fields["PROCNAME"] = node.name;
            args(b, node.args);
            return b;
          } else if constexpr (std::is_same_v<T, CallMethod>) {
            Block b = make("component_method");
            component_mutation(b, node.component);
            b.mutation["method_name"] = node.method;
            args(b, node.args);
            return b;
          } else if constexpr (std::is_same_v<T, If>) {
            Block b = make("controls_if");
            b.mutation["elseif"] = std::to_string(node.elifs.size());
            b.mutation["else"] = node.else_body ? "1" : "0";
            b.inputs.emplace("IF0", expr(node.cond));
            add_body(b, "DO0", node.then_body);
            for (std::size_t i = 0; i < node.elifs.size(); ++i) {
              b.inputs.emplace(numbered("IF", i + 1), expr(node.elifs[i].cond));
              add_body(b, numbered("DO", i + 1), node.elifs[i].body);
            }
            if (node.else_body) add_body(b, "ELSE", *node.else_body);
            return b;
          } else if constexpr (std::is_same_v<T, ForEach>) {
            Block b = make("controls_forEach");
            b.fields["VAR"] = node.var;
            b.inputs.emplace("LIST", expr(node.list));
            add_body(b, "DO", node.body);
            return b;
          } else if constexpr (std::is_same_v<T, While>) {
            Block b = make("controls_while");
            b.inputs.emplace("TEST", expr(node.cond));
            add_body(b, "DO", node.body);
            return b;
          } else {
            // Return never reaches here: procedure() lifts it into RETURN.
            static_assert(std::is_same_v<T, Return>);
            return expr(node.value);
          }
        },
        s.node);
  }

  Block literal(const Literal& lit) {
    return std::visit(
        [&](const auto& node) -> Block {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, NumberLit>) {
            Block b = make("math_number");
            b.fields["NUM"] = node.text;
            return b;
          } else if constexpr (std::is_same_v<T, TextLit>) {
            Block b = make("text");
            b.fields["TEXT"] = node.value;
            return b;
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            Block b = make("logic_boolean");
            b.fields["BOOL"] = node.value ? "TRUE" : "FALSE";
            return b;
          } else if constexpr (std::is_same_v<T, ListLit>) {
            Block b = make("lists_create_with");
            b.mutation["items"] = std::to_string(node.items.size());
            for (std::size_t i = 0; i < node.items.size(); ++i) {
              b.inputs.emplace(numbered("ADD", i), literal(node.items[i]));
            }
            return b;
          } else {
            Block b = make("dictionaries_create_with");
            b.mutation["items"] = std::to_string(node.entries.size());
            for (std::size_t i = 0; i < node.entries.size(); ++i) {
              Block pair = make("pair");
              Block key = make("text");
              key.fields["TEXT"] = node.entries[i].first;
              pair.inputs.emplace("KEY", std::move(key));
              pair.inputs.emplace("VALUE", literal(node.entries[i].second));
              b.inputs.emplace(numbered("ADD", i), std::move(pair));
            }
            return b;
          }
        },
        lit.value);
  }

  Block binary(const Binary& node) {
    static const std::map<BinaryOp, std::pair<std::string_view, std::string_view>> ops{
        {BinaryOp::Add, {"math_add", ""}},         {BinaryOp::Sub, {"math_subtract", ""}},
        {BinaryOp::Mul, {"math_multiply", ""}},    {BinaryOp::Div, {"math_division", ""}},
        {BinaryOp::Eq, {"logic_compare", "EQ"}},   {BinaryOp::Ne, {"logic_compare", "NEQ"}},
        {BinaryOp::Lt, {"math_compare", "LT"}},    {BinaryOp::Le, {"math_compare", "LTE"}},
        {BinaryOp::Gt, {"math_compare", "GT"}},    {BinaryOp::Ge, {"math_compare", "GTE"}},
        {BinaryOp::And, {"logic_operation", "AND"}}, {BinaryOp::Or, {"logic_operation", "OR"}},
    };
    const auto& [opcode, op] = ops.at(node.op);
    Block b = make(opcode);
    if (!op.empty()) b.fields["OP"] = std::string(op);
    b.inputs.emplace("A", expr(*node.lhs));
    b.inputs.emplace("B", expr(*node.rhs));
    return b;
  }

  Block expr(const Expr& e) {
    return std::visit(
        [&](const auto& node) -> Block {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Literal>) {
            return literal(node);
          } else if constexpr (std::is_same_v<T, GlobalRef>) {
            Block b = make("lexical_variable_get");
            b.fields["VAR"] = std::string(kGlobalPrefix) + node.name;
            return b;
          } else if constexpr (std::is_same_v<T, LocalRef>) {
            Block b = make("lexical_variable_get");
            b.fields["VAR"] = node.name;
            return b;
          } else if constexpr (std::is_same_v<T, PropertyRead>) {
            Block b = make("component_set_get");
            b.mutation["set_or_get"] = "get";
            component_mutation(b, node.component);
            b.mutation["property_name"] = node.property;
            return b;
          } else if constexpr (std::is_same_v<T, ProcCall>) {
            Block b = make("procedures_callreturn");
            b.fields["PROCNAME"] = node.name;
            args(b, node.args);
            return b;
          } else if constexpr (std::is_same_v<T, BuiltinCall>) {
            Block b = make(node.name);
            args(b, node.args);
            return b;
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            Block b = make("component_method");
            component_mutation(b, node.component);
            b.mutation["method_name"] = node.method;
            args(b, node.args);
            return b;
          } else if constexpr (std::is_same_v<T, Binary>) {
            return binary(node);
          } else {
            const bool negate = node.op == UnaryOp::Negate;
            Block b = make(negate ? "math_neg" : "logic_negate");
            b.inputs.emplace(negate ? "NUM" : "BOOL", expr(*node.operand));
            return b;
          }
        },
        e.node);
  }

  const Program& program_;
  std::map<std::string, std::string> types_;
  int next_id_ = 1;
};

}  // namespace

Outcome<BlockProgram> compile(const Program& program, const Registry& registry) {
  Diagnostics diags = check_program_invariants(program);
  if (diags.empty()) diags = validate(program, registry);
  if (!diags.empty()) {
    diags.insert(diags.begin(), make_diag(DiagCode::NotValidated, "program does not validate; nothing compiled"));
    return fail(std::move(diags));
  }
  return Compiler(program).run();
}

// ---------------------------------------------------------------------------
// decompile
// ---------------------------------------------------------------------------

namespace {

struct DecompileError {
  Diagnostic diag;
};

std::set<std::string> key_set(const std::map<std::string, std::string>& m) {
  std::set<std::string> out;
  for (const auto& [k, _] : m) out.insert(k);
  return out;
}

std::set<std::string> key_set(const std::map<std::string, Box<Block>>& m) {
  std::set<std::string> out;
  for (const auto& [k, _] : m) out.insert(k);
  return out;
}

std::string join(const std::set<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out.empty() ? "none" : out;
}

// Counts the keys `prefix0`, `prefix1`, ... present contiguously.
std::size_t count_numbered(const std::set<std::string>& keys, std::string_view prefix) {
  std::size_t n = 0;
  while (keys.count(numbered(prefix, n))) ++n;
  return n;
}

class Decompiler {
 public:
  Decompiler(const BlockProgram& blocks, const Registry& registry) : blocks_(blocks), registry_(registry) {}

  Program run() {
    Program program;
    designer(blocks_.designer, std::nullopt, program, true);
    for (const auto& top : blocks_.workspace) {
      claim_id(top);
      if (top.next) malformed(top, "top-level blocks cannot have a next block");
      const auto kind = classify(top, BlockContext::TopLevel);
      switch (kind) {
        case NodeKind::GlobalDecl: {
          expect_shape(top, {"NAME"}, {"VALUE"}, {});
          program.globals.push_back(GlobalDecl{name_field(top, "NAME"), expr(input(top, "VALUE")), {}});
          break;
        }
        case NodeKind::ProcedureNoReturn:
        case NodeKind::ProcedureReturn: program.procedures.push_back(procedure(top, kind)); break;
        default: program.handlers.push_back(handler(top)); break;
      }
    }
    return program;
  }

 private:
  [[noreturn]] void malformed(const Block& b, const std::string& message) const {
    throw DecompileError{
        make_diag(DiagCode::MalformedBlock, "block " + b.id + " (" + b.opcode + "): " + message)};
  }

  void claim_id(const Block& b) {
    if (b.id.empty()) malformed(b, "missing id");
    if (!ids_.insert(b.id).second) malformed(b, "duplicate block id");
  }

  NodeKind classify(const Block& b, BlockContext context) const {
    if (auto kind = classify_block(b, context, registry_)) return *kind;
    if (is_structural_opcode(b.opcode) || registry_.find_builtin(b.opcode)) {
      malformed(b, "opcode is not allowed in this position");
    }
    throw DecompileError{make_diag(DiagCode::UnknownOpcode, "block " + b.id + ": unknown opcode '" + b.opcode + "'")};
  }

  void expect_shape(const Block& b, const std::set<std::string>& fields, const std::set<std::string>& inputs,
                    const std::set<std::string>& mutation) const {
    if (key_set(b.fields) != fields) malformed(b, "expected fields {" + join(fields) + "}, got {" + join(key_set(b.fields)) + "}");
    if (key_set(b.inputs) != inputs) malformed(b, "expected inputs {" + join(inputs) + "}, got {" + join(key_set(b.inputs)) + "}");
    if (key_set(b.mutation) != mutation) {
      malformed(b, "expected mutation {" + join(mutation) + "}, got {" + join(key_set(b.mutation)) + "}");
    }
  }

  const Block& input(const Block& b, const std::string& name) const {
    auto it = b.inputs.find(name);
    if (it == b.inputs.end()) malformed(b, "missing input " + name);
    return *it->second;
  }

  std::string checked_name(const Block& b, const std::string& value, std::string_view what) const {
    if (!is_identifier(value)) malformed(b, std::string(what) + " '" + value + "' is not a valid identifier");
    return value;
  }

  std::string name_field(const Block& b, const std::string& key) const {
    auto it = b.fields.find(key);
    if (it == b.fields.end()) malformed(b, "missing field " + key);
    return checked_name(b, it->second, key);
  }

  std::string mutation_value(const Block& b, const std::string& key) const {
    auto it = b.mutation.find(key);
    if (it == b.mutation.end()) malformed(b, "missing mutation." + key);
    return it->second;
  }

  std::size_t count_value(const Block& b, const std::string& key) const {
    const std::string v = mutation_value(b, key);
    if (v.empty() || v.size() > 6 || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      malformed(b, "mutation." + key + " must be a small non-negative integer");
    }
    return static_cast<std::size_t>(std::stoul(v));
  }

  // Checks instance_name/component_type against the designer and returns
  // the instance name.
  std::string instance(const Block& b) const {
    const std::string name = mutation_value(b, "instance_name");
    auto it = designer_types_.find(name);
    if (it == designer_types_.end()) {
      throw DecompileError{make_diag(DiagCode::OrphanInstance,
                                     "block " + b.id + " refers to component '" + name + "' missing from the designer")};
    }
    if (mutation_value(b, "component_type") != it->second) {
      malformed(b, "component_type does not match designer type " + it->second);
    }
    return name;
  }

  std::set<std::string> numbered_keys(std::string_view prefix, std::size_t n) const {
    std::set<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.insert(numbered(prefix, i));
    return out;
  }

  std::vector<std::string> var_fields(const Block& b) const {
    const std::size_t n = count_numbered(key_set(b.fields), "VAR");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(name_field(b, numbered("VAR", i)));
    return out;
  }

  // ---- designer ------------------------------------------------------------

  void designer(const ComponentNode& node, const std::optional<std::string>& parent, Program& program, bool root) {
    if (root && node.type_name != kScreenType) {
      throw DecompileError{make_diag(DiagCode::MalformedBlock, "designer root must be a Screen, got " + node.type_name)};
    }
    if (!is_identifier(node.name) || !is_identifier(node.type_name)) {
      throw DecompileError{
          make_diag(DiagCode::MalformedBlock, "designer component '" + node.name + "' has an invalid name or type")};
    }
    ComponentDecl decl{node.name, node.type_name, parent, {}, {}, {}};
    for (const auto& p : node.properties) {
      if (!is_identifier(p.name)) {
        throw DecompileError{make_diag(DiagCode::MalformedBlock, "designer property '" + p.name + "' is not a valid name")};
      }
      decl.properties.push_back(PropertyAssign{p.name, p.value, {}});
    }
    designer_types_.emplace(node.name, node.type_name);
    program.components.push_back(std::move(decl));
    for (const auto& child : node.children) designer(child, node.name, program, false);
  }

  // ---- top level -----------------------------------------------------------

  ProcedureDecl procedure(const Block& b, NodeKind kind) {
    ProcedureDecl p;
    p.name = name_field(b, "NAME");
    p.params = var_fields(b);
    std::set<std::string> fields = numbered_keys("VAR", p.params.size());
    fields.insert("NAME");
    std::set<std::string> inputs;
    if (b.inputs.count("STACK")) inputs.insert("STACK");
    if (kind == NodeKind::ProcedureReturn) inputs.insert("RETURN");
    expect_shape(b, fields, inputs, {});
    if (kind == NodeKind::ProcedureNoReturn && !b.inputs.count("STACK")) malformed(b, "procedure body is empty");
    if (b.inputs.count("STACK")) p.body = chain(input(b, "STACK"));
    if (kind == NodeKind::ProcedureReturn) p.body.push_back(Stmt{Return{expr(input(b, "RETURN"))}, {}});
    return p;
  }

  EventHandler handler(const Block& b) {
    EventHandler h;
    h.component = instance(b);
    h.event = checked_name(b, mutation_value(b, "event_name"), "event_name");
    h.params = var_fields(b);
    expect_shape(b, numbered_keys("VAR", h.params.size()), {"STACK"}, {"component_type", "event_name", "instance_name"});
    h.body = chain(input(b, "STACK"));
    return h;
  }

  // ---- statements ----------------------------------------------------------

  Body chain(const Block& first) {
    Body body;
    const Block* cur = &first;
    while (cur) {
      body.push_back(stmt(*cur));
      cur = cur->next ? &**cur->next : nullptr;
    }
    return body;
  }

  Body optional_chain(const Block& b, const std::string& name) {
    auto it = b.inputs.find(name);
    if (it == b.inputs.end()) malformed(b, "empty statement body in " + name);
    return chain(*it->second);
  }

  std::vector<Expr> call_args(const Block& b) {
    const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
    std::vector<Expr> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(expr(input(b, numbered("ARG", i))));
    return out;
  }

  Stmt stmt(const Block& b) {
    claim_id(b);
    const NodeKind kind = classify(b, BlockContext::Statement);
    switch (kind) {
      case NodeKind::SetProperty: {
        expect_shape(b, {}, {"VALUE"}, {"set_or_get", "component_type", "instance_name", "property_name"});
        std::string comp = instance(b);
        std::string prop = checked_name(b, mutation_value(b, "property_name"), "property_name");
        return Stmt{SetProperty{std::move(comp), std::move(prop), expr(input(b, "VALUE"))}, {}};
      }
      case NodeKind::SetGlobal:
      case NodeKind::SetLocal: {
        expect_shape(b, {"VAR"}, {"VALUE"}, {});
        std::string var = b.fields.at("VAR");
        if (kind == NodeKind::SetGlobal) {
          std::string name = checked_name(b, var.substr(kGlobalPrefix.size()), "VAR");
          return Stmt{SetGlobal{std::move(name), expr(input(b, "VALUE"))}, {}};
        }
        std::string name = checked_name(b, var, "VAR");
        return Stmt{SetLocal{std::move(name), expr(input(b, "VALUE"))}, {}};
      }
      case NodeKind::CallProcedure: {
        const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
        expect_shape(b, {"PROCNAME"}, numbered_keys("ARG", n), {});
        std::string name = name_field(b, "PROCNAME");
        return Stmt{CallProcedure{std::move(name), call_args(b)}, {}};
      }
      case NodeKind::CallMethod: {
        const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
        expect_shape(b, {}, numbered_keys("ARG", n), {"component_type", "instance_name", "method_name"});
        std::string comp = instance(b);
        std::string method = checked_name(b, mutation_value(b, "method_name"), "method_name");
        return Stmt{CallMethod{std::move(comp), std::move(method), call_args(b)}, {}};
      }
      case NodeKind::If: {
        const std::size_t elifs = count_value(b, "elseif");
        const std::string has_else = mutation_value(b, "else");
        if (has_else != "0" && has_else != "1") malformed(b, "mutation.else must be 0 or 1");
        std::set<std::string> inputs;
        for (std::size_t i = 0; i <= elifs; ++i) {
          inputs.insert(numbered("IF", i));
          inputs.insert(numbered("DO", i));
        }
        if (has_else == "1") inputs.insert("ELSE");
        expect_shape(b, {}, inputs, {"elseif", "else"});
        If node{expr(input(b, "IF0")), optional_chain(b, "DO0"), {}, std::nullopt};
        for (std::size_t i = 1; i <= elifs; ++i) {
          Expr cond = expr(input(b, numbered("IF", i)));
          node.elifs.push_back(ElseIf{std::move(cond), optional_chain(b, numbered("DO", i))});
        }
        if (has_else == "1") node.else_body = optional_chain(b, "ELSE");
        return Stmt{std::move(node), {}};
      }
      case NodeKind::ForEach: {
        expect_shape(b, {"VAR"}, {"LIST", "DO"}, {});
        std::string var = name_field(b, "VAR");
        Expr list = expr(input(b, "LIST"));
        return Stmt{ForEach{std::move(var), std::move(list), optional_chain(b, "DO")}, {}};
      }
      case NodeKind::While: {
        expect_shape(b, {}, {"TEST", "DO"}, {});
        Expr cond = expr(input(b, "TEST"));
        return Stmt{While{std::move(cond), optional_chain(b, "DO")}, {}};
      }
      default: malformed(b, "not a statement block");
    }
  }

  // ---- expressions ---------------------------------------------------------

  Literal literal(const Block& b) {
    claim_id(b);
    if (b.next) malformed(b, "value blocks cannot have a next block");
    const NodeKind kind = classify(b, BlockContext::Value);
    return literal_of_kind(b, kind);
  }

  Literal literal_of_kind(const Block& b, NodeKind kind) {
    switch (kind) {
      case NodeKind::Number: {
        expect_shape(b, {"NUM"}, {}, {});
        const std::string& num = b.fields.at("NUM");
        if (!is_number_text(num)) malformed(b, "'" + num + "' is not a number");
        return Literal{NumberLit{num}};
      }
      case NodeKind::Text: expect_shape(b, {"TEXT"}, {}, {}); return Literal{TextLit{b.fields.at("TEXT")}};
      case NodeKind::Boolean: {
        expect_shape(b, {"BOOL"}, {}, {});
        const std::string& v = b.fields.at("BOOL");
        if (v != "TRUE" && v != "FALSE") malformed(b, "BOOL must be TRUE or FALSE");
        return Literal{BoolLit{v == "TRUE"}};
      }
      case NodeKind::List: {
        const std::size_t n = count_value(b, "items");
        expect_shape(b, {}, numbered_keys("ADD", n), {"items"});
        ListLit list;
        for (std::size_t i = 0; i < n; ++i) list.items.push_back(literal(input(b, numbered("ADD", i))));
        return Literal{std::move(list)};
      }
      case NodeKind::Dict: {
        const std::size_t n = count_value(b, "items");
        expect_shape(b, {}, numbered_keys("ADD", n), {"items"});
        DictLit dict;
        std::set<std::string> keys;
        for (std::size_t i = 0; i < n; ++i) {
          const Block& pair = input(b, numbered("ADD", i));
          claim_id(pair);
          if (pair.next) malformed(pair, "value blocks cannot have a next block");
          classify(pair, BlockContext::DictEntry);
          expect_shape(pair, {}, {"KEY", "VALUE"}, {});
          const Block& key_block = input(pair, "KEY");
          Literal key = literal(key_block);
          const auto* text = std::get_if<TextLit>(&key.value);
          if (!text) malformed(key_block, "dictionary keys must be text blocks");
          if (!keys.insert(text->value).second) malformed(pair, "duplicate dictionary key");
          dict.entries.emplace_back(text->value, literal(input(pair, "VALUE")));
        }
        return Literal{std::move(dict)};
      }
      default: malformed(b, "expected a literal block (number, text, boolean, list or dictionary)");
    }
  }

  Expr binary(const Block& b, NodeKind kind) {
    static const std::map<NodeKind, BinaryOp> ops{
        {NodeKind::Add, BinaryOp::Add}, {NodeKind::Sub, BinaryOp::Sub}, {NodeKind::Mul, BinaryOp::Mul},
        {NodeKind::Div, BinaryOp::Div}, {NodeKind::Eq, BinaryOp::Eq},   {NodeKind::Ne, BinaryOp::Ne},
        {NodeKind::Lt, BinaryOp::Lt},   {NodeKind::Le, BinaryOp::Le},   {NodeKind::Gt, BinaryOp::Gt},
        {NodeKind::Ge, BinaryOp::Ge},   {NodeKind::And, BinaryOp::And}, {NodeKind::Or, BinaryOp::Or},
    };
    const bool has_op = !opcode_entry(kind).discriminator_key.empty();
    expect_shape(b, has_op ? std::set<std::string>{"OP"} : std::set<std::string>{}, {"A", "B"}, {});
    Expr lhs = expr(input(b, "A"));
    Expr rhs = expr(input(b, "B"));
    return Expr{Binary{ops.at(kind), std::move(lhs), std::move(rhs)}, {}};
  }

  Expr expr(const Block& b) {
    claim_id(b);
    if (b.next) malformed(b, "value blocks cannot have a next block");
    const NodeKind kind = classify(b, BlockContext::Value);
    switch (kind) {
      case NodeKind::Number:
      case NodeKind::Text:
      case NodeKind::Boolean:
      case NodeKind::List:
      case NodeKind::Dict: return Expr{literal_of_kind(b, kind), {}};
      case NodeKind::GlobalRef: {
        expect_shape(b, {"VAR"}, {}, {});
        return Expr{GlobalRef{checked_name(b, b.fields.at("VAR").substr(kGlobalPrefix.size()), "VAR")}, {}};
      }
      case NodeKind::LocalRef: {
        expect_shape(b, {"VAR"}, {}, {});
        return Expr{LocalRef{checked_name(b, b.fields.at("VAR"), "VAR")}, {}};
      }
      case NodeKind::PropertyRead: {
        expect_shape(b, {}, {}, {"set_or_get", "component_type", "instance_name", "property_name"});
        std::string comp = instance(b);
        return Expr{PropertyRead{std::move(comp), checked_name(b, mutation_value(b, "property_name"), "property_name")},
                    {}};
      }
      case NodeKind::ProcCall: {
        const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
        expect_shape(b, {"PROCNAME"}, numbered_keys("ARG", n), {});
        std::string name = name_field(b, "PROCNAME");
        return Expr{ProcCall{std::move(name), call_args(b)}, {}};
      }
      case NodeKind::BuiltinCall: {
        const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
        expect_shape(b, {}, numbered_keys("ARG", n), {});
        return Expr{BuiltinCall{b.opcode, call_args(b)}, {}};
      }
      case NodeKind::MethodCall: {
        const std::size_t n = count_numbered(key_set(b.inputs), "ARG");
        expect_shape(b, {}, numbered_keys("ARG", n), {"component_type", "instance_name", "method_name"});
        std::string comp = instance(b);
        std::string method = checked_name(b, mutation_value(b, "method_name"), "method_name");
        return Expr{MethodCall{std::move(comp), std::move(method), call_args(b)}, {}};
      }
      case NodeKind::Not: {
        expect_shape(b, {}, {"BOOL"}, {});
        return Expr{Unary{UnaryOp::Not, expr(input(b, "BOOL"))}, {}};
      }
      case NodeKind::Negate: {
        expect_shape(b, {}, {"NUM"}, {});
        return Expr{Unary{UnaryOp::Negate, expr(input(b, "NUM"))}, {}};
      }
      default: return binary(b, kind);
    }
  }

  const BlockProgram& blocks_;
  const Registry& registry_;
  std::set<std::string> ids_;
  std::map<std::string, std::string> designer_types_;
};

}  // namespace

Outcome<Program> decompile(const BlockProgram& blocks, const Registry& registry) {
  Program program;
  try {
    program = Decompiler(blocks, registry).run();
  } catch (const DecompileError& e) {
    return fail(Diagnostics{e.diag});
  }
  Diagnostics diags = check_program_invariants(program);
  if (diags.empty()) diags = validate(program, registry);
  if (!diags.empty()) return fail(std::move(diags));
  return program;
}

}  // namespace aptly
