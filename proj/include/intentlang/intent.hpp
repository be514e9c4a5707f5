#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "intentlang/ids.hpp"

namespace intentlang {

struct GameState;

// -- core intent language ----------------------------------------------------

struct Move {
  Direction dir;
  friend auto operator<=>(const Move&, const Move&) = default;
};
struct Take {
  EntityId item;
  friend auto operator<=>(const Take&, const Take&) = default;
};
/// Take everything portable in the room (WASD "collect" key).
struct Collect {
  friend auto operator<=>(const Collect&, const Collect&) = default;
};
struct Select {
  EntityId item;
  friend auto operator<=>(const Select&, const Select&) = default;
};
struct Apply {
  EntityId target;
  friend auto operator<=>(const Apply&, const Apply&) = default;
};
struct Inquire {
  EntityId target;
  friend auto operator<=>(const Inquire&, const Inquire&) = default;
};
struct MoveNear {
  EntityId target;
  friend auto operator<=>(const MoveNear&, const MoveNear&) = default;
};
struct MoveOffscreen {
  Direction dir;
  friend auto operator<=>(const MoveOffscreen&, const MoveOffscreen&) = default;
};
/// Let the day end.
struct Wait {
  friend auto operator<=>(const Wait&, const Wait&) = default;
};

using CoreIntent = std::variant<Move, Take, Collect, Select, Apply, Inquire, MoveNear, MoveOffscreen, Wait>;

/// "move", "take", "collect", "select", "apply", "inquire", "move_near",
/// "move_offscreen" or "wait".
std::string_view verb_of(const CoreIntent& i) noexcept;

/// The single argument, if the verb takes one (entity name or direction).
std::optional<std::string> argument_of(const CoreIntent& i);

/// Entity argument, if any.
std::optional<EntityId> entity_of(const CoreIntent& i);

/// Canonical lowercase command-line form, e.g. "take flask", "move north".
std::string to_string(const CoreIntent& i);

// -- command-line interface --------------------------------------------------

struct ParseError {
  enum class Kind { empty_input, unknown_verb, missing_argument, invalid_argument, extra_tokens };
  Kind kind;
  std::string verb;   // offending verb, when known
  std::size_t offset; // byte offset into the input
  std::string message;

  friend bool operator==(const ParseError&, const ParseError&) = default;
};

std::string_view to_string(ParseError::Kind k) noexcept;

/// Total: every string yields an intent or a located error. Verbs and
/// arguments are case-insensitive; nouns are not checked against any world.
std::variant<CoreIntent, ParseError> parse_command_line(std::string_view text);

// -- WASD+ interface ---------------------------------------------------------

struct Unbound {
  std::string key;
  friend bool operator==(const Unbound&, const Unbound&) = default;
};

/// W/up, S/down, D/right, A/left move; E collects. Key names are
/// case-insensitive ("w", "W", "up", "arrowup", ...).
std::variant<CoreIntent, Unbound> map_key(std::string_view key);

// -- bird's-eye interface ----------------------------------------------------

struct ClickRejected {
  enum class Reason { no_op, out_of_range };
  Reason reason;
  std::string target;
  friend bool operator==(const ClickRejected&, const ClickRejected&) = default;
};

/// Clicks resolve to Take (item in the player's room) or Move (adjacent
/// room). Throws UndeclaredIdentifier if `target` names nothing in the world.
std::variant<CoreIntent, ClickRejected> elaborate_click(const GameState& g, std::string_view target);

// -- interface profiles ------------------------------------------------------

enum class Profile { cli, wasd, birdseye, hypertext, farm };

std::string_view to_string(Profile p) noexcept;
std::optional<Profile> parse_profile(std::string_view text) noexcept;

/// Every well-formed intent over the state's declared names, all verbs.
std::vector<CoreIntent> all_intents(const GameState& g);

/// The intents a world's choice interface offers before typing: Move/Take on
/// plain worlds, the farm verbs on farm worlds.
std::vector<CoreIntent> profile_intents(const GameState& g);

} // namespace intentlang
