#include "aptly/registry.hpp"

#include <algorithm>
#include <set>

#include "aptly/blocks.hpp"
#include "aptly/io.hpp"
#include "aptly/lexer.hpp"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

namespace {

constexpr std::pair<PropType, std::string_view> kPropTypeNames[] = {
    {PropType::Text, "text"},         {PropType::Number, "number"},          {PropType::Boolean, "boolean"},
    {PropType::Color, "color"},       {PropType::AssetPath, "asset-path"},   {PropType::TextList, "text-list"},
};

struct RegistryError {
  DiagCode code;
  std::string message;
};

[[noreturn]] void bad(std::string message) { throw RegistryError{DiagCode::RegistryParse, std::move(message)}; }

void require_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> required) {
  if (!obj.is_object()) bad(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      bad(std::string(where) + ": unknown key '" + key + "'");
    }
  }
  for (auto key : required) {
    if (!obj.contains(std::string(key))) bad(std::string(where) + ": missing key '" + std::string(key) + "'");
  }
}

void check_name(std::string_view where, const std::string& name) {
  if (!is_identifier(name)) bad(std::string(where) + ": '" + name + "' is not a valid identifier");
}

bool get_bool(const json& obj, const char* key, std::string_view where) {
  const auto& v = obj.at(key);
  if (!v.is_boolean()) bad(std::string(where) + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::vector<std::string> get_names(const json& arr, std::string_view where) {
  if (!arr.is_array()) bad(std::string(where) + ": expected an array of names");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : arr) {
    if (!item.is_string()) bad(std::string(where) + ": expected an array of names");
    auto name = item.get<std::string>();
    check_name(where, name);
    if (!seen.insert(name).second) bad(std::string(where) + ": duplicate name '" + name + "'");
    out.push_back(std::move(name));
  }
  return out;
}

ComponentSchema parse_schema(const std::string& type_name, const json& obj) {
  const std::string where = "components." + type_name;
  check_name("components", type_name);
  require_keys(obj, where, {"visible", "container", "properties", "events", "methods"}, {"visible", "container"});
  ComponentSchema schema;
  schema.type_name = type_name;
  schema.visible = get_bool(obj, "visible", where);
  schema.container = get_bool(obj, "container", where);
  if (auto it = obj.find("properties"); it != obj.end()) {
    if (!it->is_object()) bad(where + ".properties: expected an object");
    for (const auto& [name, type] : it->items()) {
      check_name(where + ".properties", name);
      auto parsed = type.is_string() ? prop_type_from_name(type.get<std::string>()) : std::nullopt;
      if (!parsed) bad(where + ".properties." + name + ": unknown property type");
      schema.properties.emplace(name, *parsed);
    }
  }
  if (auto it = obj.find("events"); it != obj.end()) {
    if (!it->is_object()) bad(where + ".events: expected an object");
    for (const auto& [name, params] : it->items()) {
      check_name(where + ".events", name);
      schema.events.emplace(name, get_names(params, where + ".events." + name));
    }
  }
  if (auto it = obj.find("methods"); it != obj.end()) {
    if (!it->is_object()) bad(where + ".methods: expected an object");
    for (const auto& [name, method] : it->items()) {
      const std::string mwhere = where + ".methods." + name;
      check_name(where + ".methods", name);
      require_keys(method, mwhere, {"params", "has_result"}, {"params", "has_result"});
      schema.methods.emplace(name, MethodSchema{get_names(method.at("params"), mwhere + ".params"),
                                                get_bool(method, "has_result", mwhere)});
    }
  }
  return schema;
}

Registry parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  require_keys(doc, "registry", {"version", "components", "builtins"}, {"version", "components"});
  if (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != 1) {
    bad("registry: unsupported version (expected 1)");
  }
  const auto& comps = doc.at("components");
  if (!comps.is_object()) bad("components: expected an object");
  std::map<std::string, ComponentSchema> schemas;
  for (const auto& [name, obj] : comps.items()) schemas.emplace(name, parse_schema(name, obj));

  std::map<std::string, BuiltinSchema> builtins;
  if (auto it = doc.find("builtins"); it != doc.end()) {
    if (!it->is_object()) bad("builtins: expected an object");
    for (const auto& [name, obj] : it->items()) {
      const std::string where = "builtins." + name;
      check_name("builtins", name);
      if (is_structural_opcode(name)) bad(where + ": name collides with a block opcode");
      require_keys(obj, where, {"arity", "has_result"}, {"arity", "has_result"});
      if (!obj.at("arity").is_number_unsigned()) bad(where + ".arity: expected a non-negative integer");
      builtins.emplace(name, BuiltinSchema{obj.at("arity").get<std::size_t>(), get_bool(obj, "has_result", where)});
    }
  }

  auto screen = schemas.find(std::string(kScreenType));
  if (screen == schemas.end()) {
    throw RegistryError{DiagCode::RegistryMissingScreen, "registry has no Screen component"};
  }
  if (!screen->second.container) bad("components.Screen: Screen must be a container");
  return Registry(std::move(schemas), std::move(builtins));
}

}  // namespace

std::string_view prop_type_name(PropType type) {
  for (const auto& [t, name] : kPropTypeNames) {
    if (t == type) return name;
  }
  return "?";
}

std::optional<PropType> prop_type_from_name(std::string_view name) {
  for (const auto& [t, n] : kPropTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

Registry::Registry(std::map<std::string, ComponentSchema> schemas, std::map<std::string, BuiltinSchema> builtins)
    : schemas_(schemas.begin(), schemas.end()), builtins_(builtins.begin(), builtins.end()) {}

const ComponentSchema* Registry::find(std::string_view type_name) const {
  auto it = schemas_.find(type_name);
  return it == schemas_.end() ? nullptr : &it->second;
}

const BuiltinSchema* Registry::find_builtin(std::string_view name) const {
  auto it = builtins_.find(name);
  return it == builtins_.end() ? nullptr : &it->second;
}

Outcome<Registry> parse_registry(std::string_view text) {
  try {
    return parse_document(text);
  } catch (const RegistryError& e) {
    return fail(e.code, e.message);
  } catch (const json::exception& e) {
    return fail(DiagCode::RegistryParse, e.what());
  }
}

Outcome<Registry> load_registry(const std::filesystem::path& file) {
  auto text = read_text_file(file);
  if (!text) return fail(std::move(text).error());
  return parse_registry(*text);
}

std::string registry_to_json(const Registry& registry) {
  json comps = json::object();
  for (const auto& [name, schema] : registry.schemas()) {
    json props = json::object();
    for (const auto& [p, t] : schema.properties) props[p] = prop_type_name(t);
    json events = json::object();
    for (const auto& [e, params] : schema.events) events[e] = params;
    json methods = json::object();
    for (const auto& [m, ms] : schema.methods) methods[m] = {{"params", ms.params}, {"has_result", ms.has_result}};
    comps[name] = {{"visible", schema.visible},
                   {"container", schema.container},
                   {"properties", props},
                   {"events", events},
                   {"methods", methods}};
  }
  json builtins = json::object();
  for (const auto& [name, b] : registry.builtins()) builtins[name] = {{"arity", b.arity}, {"has_result", b.has_result}};
  json doc = {{"version", 1}, {"components", comps}, {"builtins", builtins}};
  return doc.dump(2) + "\n";
}

const std::vector<std::string_view>& named_colors() {
  static const std::vector<std::string_view> colors{
      "None", "Black", "Blue",  "Cyan",  "Default", "DarkGray", "Gray",   "Green",
      "LightGray", "Magenta", "Orange", "Pink", "Red", "White", "Yellow",
  };
  return colors;
}

bool is_valid_color(std::string_view text) {
  const auto& names = named_colors();
  if (std::find(names.begin(), names.end(), text) != names.end()) return true;
  if (text.size() != 7 || text[0] != '#') return false;
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  });
}

}  // namespace aptly
