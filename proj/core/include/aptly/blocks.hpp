#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/ast.hpp"
#include "aptly/diagnostic.hpp"
#include "aptly/registry.hpp"

namespace aptly {

/// Designer side: the component tree rooted at the Screen.
struct DesignerProperty {
  std::string name;
  Literal value;

  friend bool operator==(const DesignerProperty& a, const DesignerProperty& b) {
    return a.name == b.name && structural_equal(a.value, b.value);
  }
};

struct ComponentNode {
  std::string name;
  std::string type_name;
  std::vector<DesignerProperty> properties;
  std::vector<ComponentNode> children;

  friend bool operator==(const ComponentNode&, const ComponentNode&) = default;
};

/// Workspace side: one block. Statement blocks chain through `next`;
/// value blocks plug into named `inputs`.
struct Block {
  std::string id;
  std::string opcode;
  std::map<std::string, std::string> fields;
  std::map<std::string, Box<Block>> inputs;
  std::optional<Box<Block>> next;
  std::map<std::string, std::string> mutation;

  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockProgram {
  ComponentNode designer;
  std::vector<Block> workspace;

  friend bool operator==(const BlockProgram&, const BlockProgram&) = default;
};

// ---------------------------------------------------------------------------
// Opcode table
// ---------------------------------------------------------------------------

/// Every AST node kind that becomes a block. `return` is not a block: it is
/// the RETURN socket of procedures_defreturn.
enum class NodeKind {
  GlobalDecl,
  ProcedureNoReturn,
  ProcedureReturn,
  EventHandler,
  SetProperty,
  PropertyRead,
  SetGlobal,
  SetLocal,
  GlobalRef,
  LocalRef,
  CallProcedure,
  ProcCall,
  CallMethod,
  MethodCall,
  BuiltinCall,
  If,
  ForEach,
  While,
  Number,
  Text,
  Boolean,
  List,
  Dict,
  DictEntry,
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Not,
  Negate,
};

/// Where a block may appear.
enum class BlockContext { TopLevel, Statement, Value, DictEntry };

struct OpcodeEntry {
  NodeKind kind;
  std::string_view opcode;  // "*" for builtins: the opcode is the builtin's name
  BlockContext context;
  std::string_view discriminator_key;    // field or mutation key, empty if none
  std::string_view discriminator_value;  // "global *" means a `global ` prefix
  std::string_view shape;                // human-readable socket layout
};

std::span<const OpcodeEntry> opcode_table();
const OpcodeEntry& opcode_entry(NodeKind kind);
std::string_view node_kind_name(NodeKind kind);

/// Opcodes owned by the table; registry builtins may not reuse them.
bool is_structural_opcode(std::string_view opcode);

/// Identifies which AST kind a block encodes in the given context, or
/// nullopt when the opcode/discriminator combination is not in the table.
std::optional<NodeKind> classify_block(const Block& block, BlockContext context, const Registry& registry);

// ---------------------------------------------------------------------------
// Transpiler
// ---------------------------------------------------------------------------

/// Program -> BlockProgram. Fails with E_NOT_VALIDATED (followed by the
/// underlying diagnostics) when the program does not validate.
Outcome<BlockProgram> compile(const Program& program, const Registry& registry);

/// BlockProgram -> Program; the result is re-validated against the registry.
Outcome<Program> decompile(const BlockProgram& blocks, const Registry& registry);

/// Canonical, byte-stable JSON document (`"schema_version": 1`, sorted keys).
std::string blocks_to_json(const BlockProgram& blocks);
Outcome<BlockProgram> blocks_from_json(std::string_view text);

/// Number of blocks in a tree (the block, its inputs and its `next` chain).
std::size_t count_blocks(const Block& block);
std::size_t count_blocks(const BlockProgram& program);

inline constexpr int kBlocksSchemaVersion = 1;

}  // namespace aptly
