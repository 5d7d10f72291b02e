#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/ast.hpp"
#include "aptly/diagnostic.hpp"

namespace aptly {

enum class PropType { Text, Number, Boolean, Color, AssetPath, TextList };

std::string_view prop_type_name(PropType type);
std::optional<PropType> prop_type_from_name(std::string_view name);

struct MethodSchema {
  std::vector<std::string> params;
  bool has_result = false;
};

struct ComponentSchema {
  std::string type_name;
  bool visible = true;
  bool container = false;
  std::map<std::string, PropType> properties;
  std::map<std::string, std::vector<std::string>> events;
  std::map<std::string, MethodSchema> methods;
};

struct BuiltinSchema {
  std::size_t arity = 0;
  bool has_result = true;
};

/// Component and builtin schemas. Immutable once loaded.
class Registry {
 public:
  Registry() = default;
  Registry(std::map<std::string, ComponentSchema> schemas, std::map<std::string, BuiltinSchema> builtins);

  const ComponentSchema* find(std::string_view type_name) const;
  const BuiltinSchema* find_builtin(std::string_view name) const;

  const std::map<std::string, ComponentSchema, std::less<>>& schemas() const { return schemas_; }
  const std::map<std::string, BuiltinSchema, std::less<>>& builtins() const { return builtins_; }

 private:
  std::map<std::string, ComponentSchema, std::less<>> schemas_;
  std::map<std::string, BuiltinSchema, std::less<>> builtins_;
};

/// Strict parse of a registry document (`"version": 1`). Unknown keys fail.
Outcome<Registry> parse_registry(std::string_view text);
Outcome<Registry> load_registry(const std::filesystem::path& file);

/// Canonical JSON text for a registry (sorted keys, 2-space indent).
std::string registry_to_json(const Registry& registry);

/// Named colors accepted for color-typed properties, besides `#RRGGBB`.
const std::vector<std::string_view>& named_colors();
bool is_valid_color(std::string_view text);

/// Schema-relative checks; returns diagnostics sorted by span. Assumes the
/// program already satisfies the registry-free invariants.
Diagnostics validate(const Program& program, const Registry& registry);

}  // namespace aptly
