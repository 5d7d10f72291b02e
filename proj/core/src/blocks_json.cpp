#include "aptly/blocks.hpp"

#include "aptly/lexer.hpp"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

namespace {

struct JsonError {
  std::string message;
};

[[noreturn]] void bad(std::string message) { throw JsonError{std::move(message)}; }

void require_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> required) {
  if (!obj.is_object()) bad(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad(where + ": unknown key '" + key + "'");
  }
  for (auto key : required) {
    if (!obj.contains(std::string(key))) bad(where + ": missing key '" + std::string(key) + "'");
  }
}

const std::string& as_string(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where + ": expected a string");
  return v.get_ref<const std::string&>();
}

// ---- literals --------------------------------------------------------------

json literal_to_json(const Literal& lit) {
  return std::visit(
      [](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NumberLit>) {
          return {{"number", node.text}};
        } else if constexpr (std::is_same_v<T, TextLit>) {
          return {{"text", node.value}};
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return {{"boolean", node.value}};
        } else if constexpr (std::is_same_v<T, ListLit>) {
          json items = json::array();
          for (const auto& item : node.items) items.push_back(literal_to_json(item));
          return {{"list", items}};
        } else {
          json entries = json::array();
          for (const auto& [k, v] : node.entries) entries.push_back({{"key", k}, {"value", literal_to_json(v)}});
          return {{"dict", entries}};
        }
      },
      lit.value);
}

Literal literal_from_json(const json& v, const std::string& where) {
  if (!v.is_object() || v.size() != 1) bad(where + ": a literal is an object with exactly one key");
  const auto& [key, value] = *v.items().begin();
  if (key == "number") {
    const auto& text = as_string(value, where + ".number");
    if (!is_number_text(text)) bad(where + ".number: '" + text + "' is not a number");
    return Literal{NumberLit{text}};
  }
  if (key == "text") return Literal{TextLit{as_string(value, where + ".text")}};
  if (key == "boolean") {
    if (!value.is_boolean()) bad(where + ".boolean: expected true or false");
    return Literal{BoolLit{value.get<bool>()}};
  }
  if (key == "list") {
    if (!value.is_array()) bad(where + ".list: expected an array");
    ListLit list;
    for (std::size_t i = 0; i < value.size(); ++i) {
      list.items.push_back(literal_from_json(value[i], where + ".list[" + std::to_string(i) + "]"));
    }
    return Literal{std::move(list)};
  }
  if (key == "dict") {
    if (!value.is_array()) bad(where + ".dict: expected an array");
    DictLit dict;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string w = where + ".dict[" + std::to_string(i) + "]";
      require_keys(value[i], w, {"key", "value"}, {"key", "value"});
      std::string k = as_string(value[i].at("key"), w + ".key");
      for (const auto& [existing, _] : dict.entries) {
        if (existing == k) bad(w + ": duplicate key '" + k + "'");
      }
      dict.entries.emplace_back(std::move(k), literal_from_json(value[i].at("value"), w + ".value"));
    }
    return Literal{std::move(dict)};
  }
  bad(where + ": unknown literal kind '" + key + "'");
}

// ---- designer --------------------------------------------------------------

json node_to_json(const ComponentNode& node) {
  json props = json::array();
  for (const auto& p : node.properties) props.push_back({{"name", p.name}, {"value", literal_to_json(p.value)}});
  json children = json::array();
  for (const auto& c : node.children) children.push_back(node_to_json(c));
  return {{"name", node.name}, {"type", node.type_name}, {"properties", props}, {"children", children}};
}

ComponentNode node_from_json(const json& v, const std::string& where, int depth) {
  if (depth > 200) bad(where + ": designer tree is nested too deeply");
  require_keys(v, where, {"name", "type", "properties", "children"}, {"name", "type"});
  ComponentNode node;
  node.name = as_string(v.at("name"), where + ".name");
  node.type_name = as_string(v.at("type"), where + ".type");
  if (auto it = v.find("properties"); it != v.end()) {
    if (!it->is_array()) bad(where + ".properties: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string w = where + ".properties[" + std::to_string(i) + "]";
      require_keys((*it)[i], w, {"name", "value"}, {"name", "value"});
      node.properties.push_back(DesignerProperty{as_string((*it)[i].at("name"), w + ".name"),
                                                 literal_from_json((*it)[i].at("value"), w + ".value")});
    }
  }
  if (auto it = v.find("children"); it != v.end()) {
    if (!it->is_array()) bad(where + ".children: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      node.children.push_back(node_from_json((*it)[i], where + ".children[" + std::to_string(i) + "]", depth + 1));
    }
  }
  return node;
}

// ---- blocks ----------------------------------------------------------------

json block_to_json(const Block& b) {
  json out = {{"id", b.id}, {"opcode", b.opcode}};
  if (!b.fields.empty()) out["fields"] = b.fields;
  if (!b.mutation.empty()) out["mutation"] = b.mutation;
  if (!b.inputs.empty()) {
    json inputs = json::object();
    for (const auto& [name, child] : b.inputs) inputs[name] = block_to_json(*child);
    out["inputs"] = std::move(inputs);
  }
  if (b.next) out["next"] = block_to_json(**b.next);
  return out;
}

std::map<std::string, std::string> string_map(const json& v, const std::string& where) {
  if (!v.is_object()) bad(where + ": expected an object");
  std::map<std::string, std::string> out;
  for (const auto& [k, val] : v.items()) out.emplace(k, as_string(val, where + "." + k));
  return out;
}

Block block_from_json(const json& v, const std::string& where, int depth) {
  if (depth > 2000) bad(where + ": blocks are nested too deeply");
  require_keys(v, where, {"id", "opcode", "fields", "inputs", "next", "mutation"}, {"id", "opcode"});
  Block b;
  b.id = as_string(v.at("id"), where + ".id");
  b.opcode = as_string(v.at("opcode"), where + ".opcode");
  if (auto it = v.find("fields"); it != v.end()) b.fields = string_map(*it, where + ".fields");
  if (auto it = v.find("mutation"); it != v.end()) b.mutation = string_map(*it, where + ".mutation");
  if (auto it = v.find("inputs"); it != v.end()) {
    if (!it->is_object()) bad(where + ".inputs: expected an object");
    for (const auto& [name, child] : it->items()) {
      b.inputs.emplace(name, block_from_json(child, where + ".inputs." + name, depth + 1));
    }
  }
  if (auto it = v.find("next"); it != v.end()) b.next.emplace(block_from_json(*it, where + ".next", depth + 1));
  return b;
}

}  // namespace

std::string blocks_to_json(const BlockProgram& blocks) {
  json workspace = json::array();
  for (const auto& b : blocks.workspace) workspace.push_back(block_to_json(b));
  json doc = {{"schema_version", kBlocksSchemaVersion},
              {"designer", node_to_json(blocks.designer)},
              {"workspace", std::move(workspace)}};
  return doc.dump(2) + "\n";
}

Outcome<BlockProgram> blocks_from_json(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) return fail(DiagCode::BlocksJsonParse, "block document is not valid JSON");
  if (!doc.is_object()) return fail(DiagCode::BlocksJsonParse, "block document must be a JSON object");
  auto version = doc.find("schema_version");
  if (version == doc.end()) return fail(DiagCode::BlocksJsonVersion, "block document has no schema_version");
  if (!version->is_number_integer() || version->get<long long>() != kBlocksSchemaVersion) {
    return fail(DiagCode::BlocksJsonVersion, "unsupported schema_version (expected 1)");
  }
  try {
    require_keys(doc, "document", {"schema_version", "designer", "workspace"}, {"designer", "workspace"});
    BlockProgram out;
    out.designer = node_from_json(doc.at("designer"), "designer", 0);
    const auto& ws = doc.at("workspace");
    if (!ws.is_array()) bad("workspace: expected an array");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      out.workspace.push_back(block_from_json(ws[i], "workspace[" + std::to_string(i) + "]", 0));
    }
    return out;
  } catch (const JsonError& e) {
    return fail(DiagCode::BlocksJsonParse, e.message);
  } catch (const json::exception& e) {
    return fail(DiagCode::BlocksJsonParse, e.what());
  }
}

}  // namespace aptly
