#include <set>

#include "aptly/blocks.hpp"
#include "aptly/parser.hpp"
#include "aptly/printer.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace aptly;
using namespace aptly::testing;
using nlohmann::json;

namespace {

Program parsed(std::string_view src) {
  auto p = parse(src);
  REQUIRE_MESSAGE(p, src);
  return std::move(*p);
}

BlockProgram compiled(std::string_view src) {
  auto b = compile(parsed(src), seed_registry());
  REQUIRE_MESSAGE(b, src);
  return std::move(*b);
}

std::vector<std::string> child_names(const ComponentNode& n) {
  std::vector<std::string> out;
  for (const auto& c : n.children) out.push_back(c.name);
  return out;
}

DiagCode decompile_error(const BlockProgram& b) {
  auto p = decompile(b, seed_registry());
  REQUIRE(!p);
  return p.error().front().code;
}

DiagCode json_error(const std::string& text) {
  auto b = blocks_from_json(text);
  REQUIRE_MESSAGE(!b, text);
  return b.error().front().code;
}

}  // namespace

TEST_CASE("Listing 1 designer tree and workspace") {
  const auto b = compiled(listing1_source());
  CHECK(b.designer.name == "Screen1");
  CHECK(b.designer.type_name == "Screen");
  CHECK(child_names(b.designer) ==
        std::vector<std::string>{"HA1", "Label2", "PlanetList", "Calculate", "PlanetaryWeight"});
  CHECK(child_names(b.designer.children[0]) == std::vector<std::string>{"Label1", "EarthWeight"});
  REQUIRE(b.workspace.size() == 3);
  CHECK(b.workspace[0].opcode == "global_declaration");
  CHECK(b.workspace[1].opcode == "procedures_defreturn");
  CHECK(b.workspace[2].opcode == "component_event");
  CHECK(b.workspace[2].mutation.at("event_name") == "Click");
  CHECK(b.workspace[2].mutation.at("instance_name") == "Calculate");
}

TEST_CASE("block count matches the AST census") {
  const auto p = parsed(listing1_source());
  const auto b = compile(p, seed_registry());
  REQUIRE(b);
  CHECK(census_blocks(p) == 35);
  CHECK(count_blocks(*b) == census_blocks(p));
}

TEST_CASE("ids are b1.. in pre-order") {
  const auto b = compiled(listing1_source());
  CHECK(b.workspace[0].id == "b1");
  std::set<std::string> ids;
  std::function<void(const Block&)> walk = [&](const Block& blk) {
    CHECK(ids.insert(blk.id).second);
    for (const auto& [_, in] : blk.inputs) walk(*in);
    if (blk.next) walk(**blk.next);
  };
  for (const auto& top : b.workspace) walk(top);
  CHECK(ids.size() == 35);
  for (std::size_t i = 1; i <= 35; ++i) CHECK(ids.count("b" + std::to_string(i)) == 1);
}

TEST_CASE("GlobalRef carries the global prefix") {
  const auto b = compiled(listing1_source());
  const Block& ret = *b.workspace[1].inputs.at("RETURN");
  CHECK(ret.opcode == "math_multiply");
  CHECK(ret.inputs.at("A")->fields.at("VAR") == "earth_lbs");
  const Block& lookup = *ret.inputs.at("B");
  CHECK(lookup.opcode == "dictionaries_lookup");
  CHECK(lookup.inputs.at("ARG1")->fields.at("VAR") == "global gravities");
}

TEST_CASE("Screen-only program") {
  const auto b = compiled("Screen1 = Screen()\n");
  CHECK(b.designer.children.empty());
  CHECK(b.workspace.empty());
  CHECK(blocks_to_json(b).find("\"workspace\": []") != std::string::npos);
}

TEST_CASE("compile refuses invalid programs") {
  auto b = compile(parsed("Screen1 = Screen()\nW = Widget(Screen1)\n"), seed_registry());
  REQUIRE(!b);
  CHECK(b.error()[0].code == DiagCode::NotValidated);
  CHECK(has_code(b.error(), DiagCode::UnknownComponentType));
}

TEST_CASE("Listing 1 round trip") {
  const auto p = parsed(listing1_source());
  auto b = compile(p, seed_registry());
  REQUIRE(b);
  auto back = decompile(*b, seed_registry());
  REQUIRE(back);
  CHECK(structural_equal(*back, p));
  CHECK(canonical_print(*back) == canonical_print(p));
}

TEST_CASE("bodies chain through next") {
  const auto b = compiled(
      "Screen1 = Screen()\nB = Button(Screen1)\nwhen B.Click():\n  set B.Text = \"a\"\n  set B.Width = 1\n"
      "  set B.Height = 2\n");
  const Block& first = *b.workspace[0].inputs.at("STACK");
  REQUIRE(first.next);
  REQUIRE((*first.next)->next);
  CHECK((*(*first.next)->next)->fields.empty());
  CHECK((*(*first.next)->next)->mutation.at("property_name") == "Height");
  CHECK_FALSE((*(*first.next)->next)->next);
}

TEST_CASE("decompile errors") {
  const auto base = compiled(listing1_source());

  auto no_event = base;
  no_event.workspace[2].mutation.erase("event_name");
  CHECK(decompile_error(no_event) == DiagCode::MalformedBlock);

  auto unknown = base;
  unknown.workspace[0].opcode = "teleport";
  CHECK(decompile_error(unknown) == DiagCode::UnknownOpcode);

  auto misplaced = base;
  misplaced.workspace[0].opcode = "math_add";
  CHECK(decompile_error(misplaced) == DiagCode::MalformedBlock);

  auto orphan = base;
  orphan.workspace[2].mutation["instance_name"] = "Gone";
  CHECK(decompile_error(orphan) == DiagCode::OrphanInstance);

  auto extra_field = base;
  extra_field.workspace[0].fields["COLOR"] = "red";
  CHECK(decompile_error(extra_field) == DiagCode::MalformedBlock);

  auto dup_id = base;
  dup_id.workspace[1].id = "b1";
  CHECK(decompile_error(dup_id) == DiagCode::MalformedBlock);

  auto bad_root = base;
  bad_root.designer.type_name = "Button";
  CHECK(decompile_error(bad_root) == DiagCode::MalformedBlock);

  auto bad_compare = base;
  auto& ret = *bad_compare.workspace[1].inputs.at("RETURN");
  ret = Block{"b99", "logic_compare", {{"OP", "SPACESHIP"}}, {}, std::nullopt, {}};
  CHECK(decompile_error(bad_compare) == DiagCode::MalformedBlock);
}

TEST_CASE("json document") {
  const auto b = compiled(listing1_source());
  const std::string text = blocks_to_json(b);
  CHECK(text == blocks_to_json(b));
  CHECK(text.back() == '\n');

  const auto doc = json::parse(text);
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("designer").at("name") == "Screen1");
  CHECK(doc.at("workspace").size() == 3);

  auto back = blocks_from_json(text);
  REQUIRE(back);
  CHECK(*back == b);
  CHECK(blocks_to_json(*back) == text);
}

TEST_CASE("json errors") {
  CHECK(json_error("{}") == DiagCode::BlocksJsonVersion);
  CHECK(json_error(R"j({"schema_version": 2, "designer": {}, "workspace": []})j") == DiagCode::BlocksJsonVersion);
  CHECK(json_error("not json") == DiagCode::BlocksJsonParse);
  CHECK(json_error("[]") == DiagCode::BlocksJsonParse);

  auto doc = json::parse(blocks_to_json(compiled(listing1_source())));
  doc["extra"] = 1;
  CHECK(json_error(doc.dump()) == DiagCode::BlocksJsonParse);

  doc.erase("extra");
  doc["workspace"][0]["colour"] = "red";
  CHECK(json_error(doc.dump()) == DiagCode::BlocksJsonParse);

  std::string deep = R"({"schema_version": 1, "designer": {"name": "S", "type": "Screen", "properties": [], "children": []},)"
                     R"( "workspace": [)";
  for (int i = 0; i < 5000; ++i) deep += R"({"id": "x", "opcode": "logic_negate", "inputs": {"BOOL": )";
  deep += R"j({"id": "y", "opcode": "logic_boolean", "fields": {"BOOL": "TRUE"}})j";
  for (int i = 0; i < 5000; ++i) deep += "}}";
  deep += "]}";
  CHECK(json_error(deep) == DiagCode::BlocksJsonParse);
}

TEST_CASE("opcode table covers every node kind exactly once") {
  std::set<NodeKind> seen;
  for (const auto& e : opcode_table()) {
    CHECK(seen.insert(e.kind).second);
    CHECK(&opcode_entry(e.kind) == &e);
    CHECK_FALSE(node_kind_name(e.kind).empty());
  }
  CHECK(seen.size() == static_cast<std::size_t>(NodeKind::Negate) + 1);

  // (opcode, context, discriminator) must identify a kind without ambiguity
  std::set<std::tuple<std::string_view, BlockContext, std::string_view>> keys;
  for (const auto& e : opcode_table()) CHECK(keys.insert({e.opcode, e.context, e.discriminator_value}).second);
}

TEST_CASE("classification agrees with the table") {
  const auto& reg = seed_registry();
  for (const auto& e : opcode_table()) {
    Block b;
    b.opcode = e.opcode == "*" ? "math_abs" : std::string(e.opcode);
    if (!e.discriminator_key.empty()) {
      std::string value(e.discriminator_value);
      if (value == "global *") value = "global g";
      if (value == "*") value = "local";
      const auto key = e.discriminator_key.substr(e.discriminator_key.find('.') + 1);
      if (e.discriminator_key.starts_with("field.")) b.fields[std::string(key)] = value;
      else b.mutation[std::string(key)] = value;
    }
    auto k = classify_block(b, e.context, reg);
    REQUIRE_MESSAGE(k, node_kind_name(e.kind));
    CHECK(*k == e.kind);
  }
  Block unknown;
  unknown.opcode = "teleport";
  CHECK_FALSE(classify_block(unknown, BlockContext::Value, reg));
  Block builtin_as_stmt;
  builtin_as_stmt.opcode = "math_abs";
  CHECK_FALSE(classify_block(builtin_as_stmt, BlockContext::Statement, reg));
}

TEST_CASE("structural opcodes") {
  CHECK(is_structural_opcode("controls_if"));
  CHECK(is_structural_opcode("pair"));
  CHECK_FALSE(is_structural_opcode("math_abs"));
  CHECK_FALSE(is_structural_opcode("*"));
}
