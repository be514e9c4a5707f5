#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intentlang/ids.hpp"

namespace intentlang {

/// Resource/entity type: constructor with an optional parameter, e.g.
/// `rock`, `seeds(parsnip)`, `door(shop)`.
struct EntityType {
  std::string ctor;
  std::string param;

  bool parameterized() const noexcept { return !param.empty(); }
  std::string str() const { return param.empty() ? ctor : ctor + "(" + param + ")"; }

  friend auto operator<=>(const EntityType&, const EntityType&) = default;
};

/// Constructor subtyping: reflexive, plus growing <: planted (a growing crop
/// is still a planted one).
bool ctor_subtype(std::string_view sub, std::string_view super) noexcept;

/// Parses `ctor` or `ctor(param)`; nullopt on anything else.
std::optional<EntityType> parse_entity_type(std::string_view text);

/// What applying a tool to a target does to the world.
enum class ToolEffect {
  replace, // target retyped to `produces`
  extract, // target consumed, a `produces` drop lands in the inventory
  plant,   // tool consumed, target becomes planted(<tool param>)
  water,   // target's crop marked watered today
  fish,    // one RNG draw: fish or trash lands in the inventory
};

std::string_view to_string(ToolEffect e) noexcept;
std::optional<ToolEffect> parse_tool_effect(std::string_view text) noexcept;

struct ToolRule {
  std::string tool;   // tool type constructor
  std::string target; // target type constructor
  ToolEffect effect = ToolEffect::replace;
  std::string produces; // constructor of the produced resource

  friend bool operator==(const ToolRule&, const ToolRule&) = default;
};

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// "p/q" with q > 0 and p <= q.
std::optional<Rational> parse_rational(std::string_view text);

struct FarmRules {
  std::vector<ToolRule> tools;
  std::map<std::string, std::uint32_t> growth_days;
  Rational fish_probability{1, 2};
  std::map<std::string, std::uint64_t> shop; // declared, not traded

  /// First rule for (tool, target) constructors, honouring growing <: planted.
  const ToolRule* find_rule(std::string_view tool, std::string_view target) const noexcept;
};

enum class GrowthStage { planted, growing, harvestable };

struct GrowthState {
  std::string crop;
  GrowthStage stage = GrowthStage::planted;
  std::uint32_t days_watered = 0;
  bool watered_today = false;
  EntityType ground{"tilled_soil", {}}; // what the plot reverts to on harvest

  friend auto operator<=>(const GrowthState&, const GrowthState&) = default;
};

} // namespace intentlang
