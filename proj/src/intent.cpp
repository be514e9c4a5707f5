#include "intentlang/intent.hpp"

#include <algorithm>
#include <cctype>

#include "intentlang/error.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Token {
  std::string text; // lowercased
  std::size_t offset;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    auto start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({lower(text.substr(start, i - start)), start});
  }
  return tokens;
}

enum class ArgKind { none, direction, entity };

struct VerbInfo {
  std::string_view name;
  ArgKind arg;
};

constexpr VerbInfo verbs[] = {
    {"move", ArgKind::direction},   {"go", ArgKind::direction},      {"take", ArgKind::entity},
    {"collect", ArgKind::none},     {"select", ArgKind::entity},     {"apply", ArgKind::entity},
    {"inquire", ArgKind::entity},   {"move_near", ArgKind::entity},  {"move_offscreen", ArgKind::direction},
    {"wait", ArgKind::none},
};

CoreIntent build(std::string_view verb, Direction d) {
  if (verb == "move_offscreen") return MoveOffscreen{d};
  return Move{d};
}

CoreIntent build(std::string_view verb, const EntityId& e) {
  if (verb == "take") return Take{e};
  if (verb == "select") return Select{e};
  if (verb == "apply") return Apply{e};
  if (verb == "inquire") return Inquire{e};
  return MoveNear{e};
}

} // namespace

std::string_view verb_of(const CoreIntent& i) noexcept {
  return std::visit(overloaded{
                        [](const Move&) { return std::string_view("move"); },
                        [](const Take&) { return std::string_view("take"); },
                        [](const Collect&) { return std::string_view("collect"); },
                        [](const Select&) { return std::string_view("select"); },
                        [](const Apply&) { return std::string_view("apply"); },
                        [](const Inquire&) { return std::string_view("inquire"); },
                        [](const MoveNear&) { return std::string_view("move_near"); },
                        [](const MoveOffscreen&) { return std::string_view("move_offscreen"); },
                        [](const Wait&) { return std::string_view("wait"); },
                    },
                    i);
}

std::optional<std::string> argument_of(const CoreIntent& i) {
  return std::visit(overloaded{
                        [](const Move& m) -> std::optional<std::string> { return std::string(to_string(m.dir)); },
                        [](const MoveOffscreen& m) -> std::optional<std::string> {
                          return std::string(to_string(m.dir));
                        },
                        [](const Collect&) -> std::optional<std::string> { return std::nullopt; },
                        [](const Wait&) -> std::optional<std::string> { return std::nullopt; },
                        [](const auto& e) -> std::optional<std::string> {
                          if constexpr (requires { e.item; }) return e.item.str();
                          else return e.target.str();
                        },
                    },
                    i);
}

std::optional<EntityId> entity_of(const CoreIntent& i) {
  return std::visit(overloaded{
                        [](const Take& t) -> std::optional<EntityId> { return t.item; },
                        [](const Select& t) -> std::optional<EntityId> { return t.item; },
                        [](const Apply& t) -> std::optional<EntityId> { return t.target; },
                        [](const Inquire& t) -> std::optional<EntityId> { return t.target; },
                        [](const MoveNear& t) -> std::optional<EntityId> { return t.target; },
                        [](const auto&) -> std::optional<EntityId> { return std::nullopt; },
                    },
                    i);
}

std::string to_string(const CoreIntent& i) {
  std::string out(verb_of(i));
  if (auto arg = argument_of(i)) out += " " + *arg;
  return out;
}

std::string_view to_string(ParseError::Kind k) noexcept {
  switch (k) {
  case ParseError::Kind::empty_input: return "EmptyInput";
  case ParseError::Kind::unknown_verb: return "UnknownVerb";
  case ParseError::Kind::missing_argument: return "MissingArgument";
  case ParseError::Kind::invalid_argument: return "InvalidArgument";
  case ParseError::Kind::extra_tokens: return "ExtraTokens";
  }
  return "?";
}

std::variant<CoreIntent, ParseError> parse_command_line(std::string_view text) {
  auto tokens = tokenize(text);
  if (tokens.empty()) return ParseError{ParseError::Kind::empty_input, {}, text.size(), "nothing to parse"};

  const auto& verb = tokens[0];
  const auto* info = std::find_if(std::begin(verbs), std::end(verbs),
                                  [&](const VerbInfo& v) { return v.name == verb.text; });
  if (info == std::end(verbs)) {
    return ParseError{ParseError::Kind::unknown_verb, verb.text, verb.offset,
                      "unknown verb '" + verb.text + "'"};
  }

  std::size_t expected = info->arg == ArgKind::none ? 1 : 2;
  if (tokens.size() < expected) {
    return ParseError{ParseError::Kind::missing_argument, verb.text, verb.offset + verb.text.size(),
                      "'" + verb.text + "' needs an argument"};
  }
  if (tokens.size() > expected) {
    const auto& extra = tokens[expected];
    return ParseError{ParseError::Kind::extra_tokens, verb.text, extra.offset,
                      "unexpected '" + extra.text + "'"};
  }

  switch (info->arg) {
  case ArgKind::none:
    if (verb.text == "collect") return Collect{};
    return Wait{};
  case ArgKind::direction: {
    const auto& arg = tokens[1];
    auto d = parse_direction(arg.text);
    if (!d) {
      return ParseError{ParseError::Kind::invalid_argument, verb.text, arg.offset,
                        "'" + arg.text + "' is not a direction"};
    }
    return build(info->name, *d);
  }
  case ArgKind::entity: {
    const auto& arg = tokens[1];
    if (!is_identifier(arg.text)) {
      return ParseError{ParseError::Kind::invalid_argument, verb.text, arg.offset,
                        "'" + arg.text + "' is not a name"};
    }
    return build(info->name, EntityId{arg.text});
  }
  }
  return ParseError{ParseError::Kind::unknown_verb, verb.text, verb.offset, "unreachable"};
}

std::variant<CoreIntent, Unbound> map_key(std::string_view key) {
  auto k = lower(key);
  if (k == "w" || k == "up" || k == "arrowup" || k == "\xe2\x86\x91") return Move{Direction::north};
  if (k == "s" || k == "down" || k == "arrowdown" || k == "\xe2\x86\x93") return Move{Direction::south};
  if (k == "d" || k == "right" || k == "arrowright" || k == "\xe2\x86\x92") return Move{Direction::east};
  if (k == "a" || k == "left" || k == "arrowleft" || k == "\xe2\x86\x90") return Move{Direction::west};
  if (k == "e") return Collect{};
  return Unbound{std::string(key)};
}

std::variant<CoreIntent, ClickRejected> elaborate_click(const GameState& g, std::string_view target) {
  std::string name(target);
  RoomId room{name};
  EntityId entity{name};
  if (g.declared(entity)) {
    auto where = g.room_of(entity);
    if (g.entity(entity).portable() && where == g.player_room) return Take{entity};
    return ClickRejected{ClickRejected::Reason::out_of_range, name};
  }
  if (g.declared(room)) {
    if (room == g.player_room) return ClickRejected{ClickRejected::Reason::no_op, name};
    for (auto d : all_directions) {
      if (g.exit(g.player_room, d) == room) return Move{d};
    }
    return ClickRejected{ClickRejected::Reason::out_of_range, name};
  }
  throw UndeclaredIdentifier(name);
}

std::string_view to_string(Profile p) noexcept {
  switch (p) {
  case Profile::cli: return "cli";
  case Profile::wasd: return "wasd";
  case Profile::birdseye: return "birdseye";
  case Profile::hypertext: return "hypertext";
  case Profile::farm: return "farm";
  }
  return "?";
}

std::optional<Profile> parse_profile(std::string_view text) noexcept {
  for (auto p : {Profile::cli, Profile::wasd, Profile::birdseye, Profile::hypertext, Profile::farm}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::vector<CoreIntent> all_intents(const GameState& g) {
  std::vector<CoreIntent> out;
  for (auto d : all_directions) out.push_back(Move{d});
  for (auto d : all_directions) out.push_back(MoveOffscreen{d});
  out.push_back(Collect{});
  out.push_back(Wait{});
  for (const auto& [id, _] : g.entities) {
    out.push_back(Take{id});
    out.push_back(Select{id});
    out.push_back(Apply{id});
    out.push_back(Inquire{id});
    out.push_back(MoveNear{id});
  }
  return out;
}

std::vector<CoreIntent> profile_intents(const GameState& g) {
  std::vector<CoreIntent> out;
  if (!g.is_farm()) {
    for (auto d : all_directions) out.push_back(Move{d});
    for (const auto& [id, _] : g.entities) out.push_back(Take{id});
    return out;
  }
  for (auto d : all_directions) out.push_back(MoveOffscreen{d});
  out.push_back(Wait{});
  for (const auto& [id, _] : g.entities) {
    out.push_back(Select{id});
    out.push_back(Apply{id});
    out.push_back(Inquire{id});
    out.push_back(MoveNear{id});
  }
  return out;
}

} // namespace intentlang
