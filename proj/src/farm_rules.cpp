#include "intentlang/farm_rules.hpp"

#include <charconv>

namespace intentlang {

bool ctor_subtype(std::string_view sub, std::string_view super) noexcept {
  return sub == super || (sub == "growing" && super == "planted");
}

std::optional<EntityType> parse_entity_type(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos) {
    if (!is_identifier(text)) return std::nullopt;
    return EntityType{std::string(text), {}};
  }
  if (text.back() != ')') return std::nullopt;
  auto ctor = text.substr(0, open);
  auto param = text.substr(open + 1, text.size() - open - 2);
  if (!is_identifier(ctor) || !is_identifier(param)) return std::nullopt;
  return EntityType{std::string(ctor), std::string(param)};
}

std::string_view to_string(ToolEffect e) noexcept {
  switch (e) {
  case ToolEffect::replace: return "replace";
  case ToolEffect::extract: return "extract";
  case ToolEffect::plant: return "plant";
  case ToolEffect::water: return "water";
  case ToolEffect::fish: return "fish";
  }
  return "?";
}

std::optional<ToolEffect> parse_tool_effect(std::string_view text) noexcept {
  for (auto e : {ToolEffect::replace, ToolEffect::extract, ToolEffect::plant, ToolEffect::water, ToolEffect::fish}) {
    if (to_string(e) == text) return e;
  }
  return std::nullopt;
}

std::optional<Rational> parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  Rational r;
  auto num = text.substr(0, slash);
  auto den = text.substr(slash + 1);
  auto [p1, e1] = std::from_chars(num.data(), num.data() + num.size(), r.num);
  auto [p2, e2] = std::from_chars(den.data(), den.data() + den.size(), r.den);
  if (e1 != std::errc{} || p1 != num.data() + num.size()) return std::nullopt;
  if (e2 != std::errc{} || p2 != den.data() + den.size()) return std::nullopt;
  if (r.den == 0 || r.num > r.den) return std::nullopt;
  return r;
}

const ToolRule* FarmRules::find_rule(std::string_view tool, std::string_view target) const noexcept {
  for (const auto& rule : tools) {
    if (rule.tool == tool && rule.target == target) return &rule;
  }
  for (const auto& rule : tools) {
    if (rule.tool == tool && ctor_subtype(target, rule.target)) return &rule;
  }
  return nullptr;
}

} // namespace intentlang
