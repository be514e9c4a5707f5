#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentlang/error.hpp"
#include "intentlang/farm_rules.hpp"
#include "intentlang/ids.hpp"
#include "intentlang/rng.hpp"

namespace intentlang {

enum class EntityKind { item, fixture, npc, opening };

std::string_view to_string(EntityKind k) noexcept;
std::optional<EntityKind> parse_entity_kind(std::string_view text) noexcept;

struct Entity {
  EntityKind kind = EntityKind::item;
  EntityType type;
  std::string dialogue;          // npcs
  std::optional<RoomId> leads_to; // openings

  bool portable() const noexcept { return kind == EntityKind::item; }
  friend auto operator<=>(const Entity&, const Entity&) = default;
};

struct InInventory {
  friend auto operator<=>(const InInventory&, const InInventory&) = default;
};

using Location = std::variant<RoomId, InInventory>;

/// Concrete game state. A plain value: every operation returns a new one.
struct GameState {
  std::set<RoomId> rooms;
  std::map<std::pair<RoomId, Direction>, RoomId> adjacency;
  std::map<EntityId, Entity> entities;
  std::map<EntityId, Location> locations;
  RoomId player_room;
  std::uint64_t day = 0;
  RngState rng;
  std::map<EntityId, GrowthState> growth;
  std::optional<EntityId> selected;
  std::uint64_t spawn_counter = 1;
  std::shared_ptr<const FarmRules> farm; // null for plain move/take worlds

  bool is_farm() const noexcept { return farm != nullptr; }

  const Entity& entity(const EntityId& id) const; // throws UndeclaredIdentifier
  bool declared(const EntityId& id) const noexcept { return entities.contains(id); }
  bool declared(const RoomId& id) const noexcept { return rooms.contains(id); }
  std::optional<RoomId> room_of(const EntityId& id) const;
  bool in_inventory(const EntityId& id) const;
  std::optional<RoomId> exit(const RoomId& from, Direction d) const;

  /// Entities located in `room`, sorted by name.
  std::vector<EntityId> entities_in(const RoomId& room) const;
  std::vector<EntityId> inventory() const;

  /// Field-by-field equality; the farm rules compare by content.
  friend bool operator==(const GameState& a, const GameState& b);
};

/// Returns a description of the first violated GameState invariant, if any.
std::optional<std::string> find_invariant_violation(const GameState& g);

struct AdjacencyDecl {
  RoomId from;
  Direction dir;
  RoomId to;
};

struct EntityDecl {
  EntityId name;
  Entity entity;
  Location location;
};

/// Parsed world-definition document.
struct WorldDef {
  std::vector<RoomId> rooms;
  std::vector<AdjacencyDecl> adjacency;
  std::vector<EntityDecl> entities;
  RoomId start;
  std::uint64_t seed = 0;
  std::shared_ptr<const FarmRules> farm;
  nlohmann::json document; // as loaded
  std::string digest;      // SHA-256 of the canonical document

  bool is_farm() const noexcept { return farm != nullptr; }
};

/// Parses and validates a world document. Throws WorldLoadError.
WorldDef parse_world(const nlohmann::json& doc);
WorldDef parse_world_text(std::string_view text);
WorldDef read_world_file(const std::string& path);

/// Initial state; `seed` overrides the document's seed when given.
GameState initial_state(const WorldDef& world, std::optional<std::uint64_t> seed = std::nullopt);

/// parse_world_text + initial_state.
GameState load_world(std::string_view text);

// -- propositions ------------------------------------------------------------

struct PlayerIn {
  RoomId room;
  friend auto operator<=>(const PlayerIn&, const PlayerIn&) = default;
};
struct At {
  EntityId entity;
  RoomId room;
  friend auto operator<=>(const At&, const At&) = default;
};
struct PlayerNear {
  EntityId entity;
  friend auto operator<=>(const PlayerNear&, const PlayerNear&) = default;
};
struct HoldsItem {
  EntityId entity;
  friend auto operator<=>(const HoldsItem&, const HoldsItem&) = default;
};
struct Adjacent {
  RoomId from;
  Direction dir;
  RoomId to;
  friend auto operator<=>(const Adjacent&, const Adjacent&) = default;
};

using AtomicProposition = std::variant<PlayerIn, At, PlayerNear, HoldsItem, Adjacent>;

/// An atomic proposition, optionally negated once.
struct Proposition {
  AtomicProposition atom;
  bool negated = false;

  Proposition(AtomicProposition a, bool neg = false) : atom(std::move(a)), negated(neg) {}
  template <typename A>
    requires std::is_constructible_v<AtomicProposition, A> && (!std::is_same_v<std::decay_t<A>, AtomicProposition>)
  Proposition(A a, bool neg = false) : atom(AtomicProposition(std::move(a))), negated(neg) {}
  friend auto operator<=>(const Proposition&, const Proposition&) = default;
};

inline Proposition not_(AtomicProposition a) { return Proposition{std::move(a), true}; }

std::string to_string(const AtomicProposition& p);
std::string to_string(const Proposition& p);

/// G |- P. Throws UndeclaredIdentifier for names outside the world.
bool holds(const GameState& g, const Proposition& p);

// -- semantic functions (partial) --------------------------------------------

/// Moves `item` from the player's room into the inventory. Throws
/// UndefinedApplication unless the item is portable, near and not yet held.
GameState player_take(const GameState& g, const EntityId& item);

/// Follows the exit in direction `d`. Throws UndefinedApplication if none.
GameState player_move(const GameState& g, Direction d);

/// Canonical serialization of the state (sorted keys).
nlohmann::json state_to_json(const GameState& g);

/// 64 lowercase hex chars: SHA-256 of state_to_json(g).dump().
std::string state_digest(const GameState& g);

std::string sha256_hex(std::string_view data);

} // namespace intentlang
