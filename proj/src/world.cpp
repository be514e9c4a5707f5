#include "intentlang/world.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "intentlang/error.hpp"

namespace intentlang {

namespace {

constexpr std::string_view inventory_marker = "@inventory";

using json = nlohmann::json;

void require(bool cond, const std::string& where, const std::string& what) {
  if (!cond) throw WorldLoadError(where, what);
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = std::find(allowed.begin(), allowed.end(), key) != allowed.end();
    require(known, where + "/" + key, "unknown key '" + key + "'");
  }
}

std::string get_identifier(const json& v, const std::string& where) {
  require(v.is_string(), where, "expected a string");
  auto s = v.get<std::string>();
  require(is_identifier(s), where, "'" + s + "' is not an identifier");
  return s;
}

std::shared_ptr<const FarmRules> parse_farm_rules(const json& doc, const std::string& where) {
  require(doc.is_object(), where, "farm_rules must be an object");
  reject_unknown_keys(doc, {"tools", "growth_days", "fish_probability", "shop"}, where);
  auto rules = std::make_shared<FarmRules>();

  if (doc.contains("tools")) {
    const auto& tools = doc.at("tools");
    require(tools.is_array(), where + "/tools", "expected an array");
    for (std::size_t i = 0; i < tools.size(); ++i) {
      auto at = where + "/tools/" + std::to_string(i);
      const auto& row = tools[i];
      require(row.is_object(), at, "expected an object");
      reject_unknown_keys(row, {"tool", "target", "effect", "produces"}, at);
      ToolRule rule;
      require(row.contains("tool"), at, "missing 'tool'");
      require(row.contains("target"), at, "missing 'target'");
      require(row.contains("effect"), at, "missing 'effect'");
      rule.tool = get_identifier(row.at("tool"), at + "/tool");
      rule.target = get_identifier(row.at("target"), at + "/target");
      require(row.at("effect").is_string(), at + "/effect", "expected a string");
      auto effect = parse_tool_effect(row.at("effect").get<std::string>());
      require(effect.has_value(), at + "/effect", "unknown effect");
      rule.effect = *effect;
      if (row.contains("produces")) rule.produces = get_identifier(row.at("produces"), at + "/produces");
      bool needs_product = rule.effect == ToolEffect::replace || rule.effect == ToolEffect::extract;
      require(!needs_product || !rule.produces.empty(), at, "effect requires 'produces'");
      for (const auto& prev : rules->tools) {
        require(prev.tool != rule.tool || prev.target != rule.target, at, "duplicate tool rule");
      }
      rules->tools.push_back(std::move(rule));
    }
  }

  if (doc.contains("growth_days")) {
    const auto& g = doc.at("growth_days");
    require(g.is_object(), where + "/growth_days", "expected an object");
    for (const auto& [crop, days] : g.items()) {
      auto at = where + "/growth_days/" + crop;
      require(is_identifier(crop), at, "crop type is not an identifier");
      require(days.is_number_integer() && days.get<std::int64_t>() >= 1, at, "growth days must be >= 1");
      rules->growth_days[crop] = days.get<std::uint32_t>();
    }
  }

  if (doc.contains("fish_probability")) {
    const auto& p = doc.at("fish_probability");
    require(p.is_string(), where + "/fish_probability", "expected a \"p/q\" string");
    auto r = parse_rational(p.get<std::string>());
    require(r.has_value(), where + "/fish_probability", "expected a rational in [0,1] as \"p/q\"");
    rules->fish_probability = *r;
  }

  if (doc.contains("shop")) {
    const auto& shop = doc.at("shop");
    require(shop.is_object(), where + "/shop", "expected an object");
    for (const auto& [item, price] : shop.items()) {
      require(price.is_number_unsigned() || (price.is_number_integer() && price.get<std::int64_t>() >= 0),
              where + "/shop/" + item, "price must be a nonnegative integer");
      rules->shop[item] = price.get<std::uint64_t>();
    }
  }
  return rules;
}

std::string location_string(const Location& loc) {
  if (const auto* room = std::get_if<RoomId>(&loc)) return room->str();
  return std::string(inventory_marker);
}

std::string stage_string(GrowthStage s) {
  switch (s) {
  case GrowthStage::planted: return "planted";
  case GrowthStage::growing: return "growing";
  case GrowthStage::harvestable: return "harvestable";
  }
  return "?";
}

} // namespace

std::string_view to_string(Direction d) noexcept {
  switch (d) {
  case Direction::north: return "north";
  case Direction::south: return "south";
  case Direction::east: return "east";
  case Direction::west: return "west";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view text) noexcept {
  for (auto d : all_directions) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty()) return false;
  auto head = text.front();
  if (!(head == '_' || (head >= 'a' && head <= 'z'))) return false;
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return c == '_' || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

std::string_view to_string(EntityKind k) noexcept {
  switch (k) {
  case EntityKind::item: return "item";
  case EntityKind::fixture: return "fixture";
  case EntityKind::npc: return "npc";
  case EntityKind::opening: return "opening";
  }
  return "?";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) noexcept {
  for (auto k : {EntityKind::item, EntityKind::fixture, EntityKind::npc, EntityKind::opening}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

// -- GameState ---------------------------------------------------------------

const Entity& GameState::entity(const EntityId& id) const {
  auto it = entities.find(id);
  if (it == entities.end()) throw UndeclaredIdentifier(id.str());
  return it->second;
}

std::optional<RoomId> GameState::room_of(const EntityId& id) const {
  auto it = locations.find(id);
  if (it == locations.end()) throw UndeclaredIdentifier(id.str());
  if (const auto* room = std::get_if<RoomId>(&it->second)) return *room;
  return std::nullopt;
}

bool GameState::in_inventory(const EntityId& id) const {
  auto it = locations.find(id);
  if (it == locations.end()) throw UndeclaredIdentifier(id.str());
  return std::holds_alternative<InInventory>(it->second);
}

std::optional<RoomId> GameState::exit(const RoomId& from, Direction d) const {
  auto it = adjacency.find({from, d});
  if (it == adjacency.end()) return std::nullopt;
  return it->second;
}

std::vector<EntityId> GameState::entities_in(const RoomId& room) const {
  std::vector<EntityId> out;
  for (const auto& [id, loc] : locations) {
    if (const auto* r = std::get_if<RoomId>(&loc); r && *r == room) out.push_back(id);
  }
  return out;
}

std::vector<EntityId> GameState::inventory() const {
  std::vector<EntityId> out;
  for (const auto& [id, loc] : locations) {
    if (std::holds_alternative<InInventory>(loc)) out.push_back(id);
  }
  return out;
}

bool operator==(const GameState& a, const GameState& b) {
  bool same_rules = a.farm == b.farm ||
                    (a.farm && b.farm && a.farm->tools == b.farm->tools &&
                     a.farm->growth_days == b.farm->growth_days &&
                     a.farm->fish_probability == b.farm->fish_probability && a.farm->shop == b.farm->shop);
  return same_rules && a.rooms == b.rooms && a.adjacency == b.adjacency && a.entities == b.entities &&
         a.locations == b.locations && a.player_room == b.player_room && a.day == b.day && a.rng == b.rng &&
         a.growth == b.growth && a.selected == b.selected && a.spawn_counter == b.spawn_counter;
}

std::optional<std::string> find_invariant_violation(const GameState& g) {
  if (!g.rooms.contains(g.player_room)) return "player room '" + g.player_room.str() + "' is not a room";
  for (const auto& [key, to] : g.adjacency) {
    if (!g.rooms.contains(key.first) || !g.rooms.contains(to)) {
      return "adjacency " + key.first.str() + " -> " + to.str() + " leaves the room set";
    }
  }
  if (g.locations.size() != g.entities.size()) return "locations and entities disagree";
  for (const auto& [id, loc] : g.locations) {
    if (!g.entities.contains(id)) return "location for undeclared entity '" + id.str() + "'";
    if (const auto* r = std::get_if<RoomId>(&loc); r && !g.rooms.contains(*r)) {
      return "entity '" + id.str() + "' is in unknown room '" + r->str() + "'";
    }
    if (std::holds_alternative<InInventory>(loc) && !g.entities.at(id).portable()) {
      return "non-portable entity '" + id.str() + "' is held";
    }
  }
  if (g.selected) {
    auto it = g.locations.find(*g.selected);
    if (it == g.locations.end() || !std::holds_alternative<InInventory>(it->second)) {
      return "selected entity '" + g.selected->str() + "' is not in the inventory";
    }
  }
  for (const auto& [id, gs] : g.growth) {
    if (!g.entities.contains(id)) return "growth record for undeclared entity '" + id.str() + "'";
    if (!g.farm) return "growth record in a world without farm rules";
    auto days = g.farm->growth_days.find(gs.crop);
    if (days == g.farm->growth_days.end()) return "unknown crop '" + gs.crop + "'";
    if (gs.days_watered > g.day) return "crop '" + id.str() + "' watered on more days than have passed";
    bool ripe = gs.days_watered >= days->second;
    if (ripe != (gs.stage == GrowthStage::harvestable)) return "crop '" + id.str() + "' ripeness mismatch";
  }
  return std::nullopt;
}

// -- loading -----------------------------------------------------------------

WorldDef parse_world(const json& doc) {
  require(doc.is_object(), "", "world document must be a JSON object");
  reject_unknown_keys(doc, {"rooms", "adjacency", "entities", "start", "seed", "farm_rules"}, "");

  WorldDef world;
  world.document = doc;

  require(doc.contains("rooms"), "/rooms", "missing 'rooms'");
  const auto& rooms = doc.at("rooms");
  require(rooms.is_array(), "/rooms", "expected an array");
  require(!rooms.empty(), "/rooms", "a world needs at least one room");
  std::set<RoomId> room_set;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    auto at = "/rooms/" + std::to_string(i);
    RoomId r{get_identifier(rooms[i], at)};
    require(room_set.insert(r).second, at, "duplicate room '" + r.str() + "'");
    world.rooms.push_back(r);
  }

  if (doc.contains("adjacency")) {
    const auto& adj = doc.at("adjacency");
    require(adj.is_array(), "/adjacency", "expected an array");
    std::set<std::pair<RoomId, Direction>> seen;
    for (std::size_t i = 0; i < adj.size(); ++i) {
      auto at = "/adjacency/" + std::to_string(i);
      const auto& t = adj[i];
      require(t.is_array() && t.size() == 3, at, "expected a [from, direction, to] triple");
      RoomId from{get_identifier(t[0], at + "/0")};
      require(t[1].is_string(), at + "/1", "expected a direction");
      auto dir = parse_direction(t[1].get<std::string>());
      require(dir.has_value(), at + "/1", "unknown direction '" + t[1].get<std::string>() + "'");
      RoomId to{get_identifier(t[2], at + "/2")};
      require(room_set.contains(from), at + "/0", "dangling room reference '" + from.str() + "'");
      require(room_set.contains(to), at + "/2", "dangling room reference '" + to.str() + "'");
      require(seen.insert({from, *dir}).second, at, "two exits " + std::string(to_string(*dir)) + " from '" +
                                                       from.str() + "'");
      world.adjacency.push_back({from, *dir, to});
    }
  }

  if (doc.contains("farm_rules")) world.farm = parse_farm_rules(doc.at("farm_rules"), "/farm_rules");

  if (doc.contains("entities")) {
    const auto& ents = doc.at("entities");
    require(ents.is_array(), "/entities", "expected an array");
    std::set<EntityId> names;
    for (std::size_t i = 0; i < ents.size(); ++i) {
      auto at = "/entities/" + std::to_string(i);
      const auto& e = ents[i];
      require(e.is_object(), at, "expected an object");
      reject_unknown_keys(e, {"name", "kind", "room", "type", "dialogue", "leads_to"}, at);
      require(e.contains("name"), at, "missing 'name'");
      require(e.contains("kind"), at, "missing 'kind'");
      require(e.contains("room"), at, "missing 'room'");
      EntityDecl decl;
      decl.name = EntityId{get_identifier(e.at("name"), at + "/name")};
      require(names.insert(decl.name).second, at + "/name", "duplicate entity name '" + decl.name.str() + "'");
      require(e.at("kind").is_string(), at + "/kind", "expected a string");
      auto kind = parse_entity_kind(e.at("kind").get<std::string>());
      require(kind.has_value(), at + "/kind", "unknown entity kind");
      decl.entity.kind = *kind;

      if (e.contains("type")) {
        require(e.at("type").is_string(), at + "/type", "expected a string");
        auto type = parse_entity_type(e.at("type").get<std::string>());
        require(type.has_value(), at + "/type", "malformed type");
        decl.entity.type = *type;
      } else {
        decl.entity.type = EntityType{decl.name.str(), {}};
      }

      require(e.at("room").is_string(), at + "/room", "expected a room name or \"@inventory\"");
      auto room = e.at("room").get<std::string>();
      if (room == inventory_marker) {
        require(decl.entity.portable(), at + "/room", "only items can start in the inventory");
        decl.location = InInventory{};
      } else {
        require(room_set.contains(RoomId{room}), at + "/room", "dangling room reference '" + room + "'");
        decl.location = RoomId{room};
      }

      if (e.contains("dialogue")) {
        require(e.at("dialogue").is_string(), at + "/dialogue", "expected a string");
        decl.entity.dialogue = e.at("dialogue").get<std::string>();
      } else if (decl.entity.kind == EntityKind::npc) {
        decl.entity.dialogue = "Hello.";
      }
      if (e.contains("leads_to")) {
        RoomId target{get_identifier(e.at("leads_to"), at + "/leads_to")};
        require(room_set.contains(target), at + "/leads_to", "dangling room reference '" + target.str() + "'");
        decl.entity.leads_to = target;
      }
      require(decl.entity.kind != EntityKind::opening || decl.entity.leads_to.has_value(), at,
              "openings need 'leads_to'");

      const auto& ctor = decl.entity.type.ctor;
      if (ctor == "planted" || ctor == "growing") {
        require(world.farm != nullptr, at + "/type", "crops need farm_rules");
        require(world.farm->growth_days.contains(decl.entity.type.param), at + "/type",
                "unknown crop type '" + decl.entity.type.param + "'");
      }
      world.entities.push_back(std::move(decl));
    }
  }

  require(doc.contains("start"), "/start", "missing 'start'");
  world.start = RoomId{get_identifier(doc.at("start"), "/start")};
  require(room_set.contains(world.start), "/start", "start room '" + world.start.str() + "' is not declared");

  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0), "/seed",
            "seed must be a nonnegative integer");
    world.seed = s.get<std::uint64_t>();
  }

  world.digest = sha256_hex(doc.dump());
  return world;
}

WorldDef parse_world_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw WorldLoadError("byte " + std::to_string(e.byte), "malformed JSON");
  }
  return parse_world(doc);
}

WorldDef read_world_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open world file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_world_text(buf.str());
}

GameState initial_state(const WorldDef& world, std::optional<std::uint64_t> seed) {
  GameState g;
  g.rooms.insert(world.rooms.begin(), world.rooms.end());
  for (const auto& a : world.adjacency) g.adjacency[{a.from, a.dir}] = a.to;
  for (const auto& e : world.entities) {
    g.entities[e.name] = e.entity;
    g.locations[e.name] = e.location;
    const auto& type = e.entity.type;
    if (type.ctor == "planted" || type.ctor == "growing") {
      GrowthState gs;
      gs.crop = type.param;
      gs.stage = type.ctor == "planted" ? GrowthStage::planted : GrowthStage::growing;
      g.growth[e.name] = gs;
    }
  }
  g.player_room = world.start;
  g.rng = RngState{seed.value_or(world.seed), 0};
  g.farm = world.farm;
  return g;
}

GameState load_world(std::string_view text) { return initial_state(parse_world_text(text)); }

// -- propositions ------------------------------------------------------------

std::string to_string(const AtomicProposition& p) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PlayerIn>) return "playerIn(" + a.room.str() + ")";
        else if constexpr (std::is_same_v<T, At>) return "at(" + a.entity.str() + "," + a.room.str() + ")";
        else if constexpr (std::is_same_v<T, PlayerNear>) return "playerNear(" + a.entity.str() + ")";
        else if constexpr (std::is_same_v<T, HoldsItem>) return "holds_item(" + a.entity.str() + ")";
        else
          return "adjacent(" + a.from.str() + "," + std::string(to_string(a.dir)) + "," + a.to.str() + ")";
      },
      p);
}

std::string to_string(const Proposition& p) {
  return p.negated ? "not(" + to_string(p.atom) + ")" : to_string(p.atom);
}

namespace {

void check_room(const GameState& g, const RoomId& r) {
  if (!g.declared(r)) throw UndeclaredIdentifier(r.str());
}

bool holds_atom(const GameState& g, const AtomicProposition& p) {
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PlayerIn>) {
          check_room(g, a.room);
          return g.player_room == a.room;
        } else if constexpr (std::is_same_v<T, At>) {
          check_room(g, a.room);
          return g.room_of(a.entity) == a.room;
        } else if constexpr (std::is_same_v<T, PlayerNear>) {
          return g.room_of(a.entity) == g.player_room;
        } else if constexpr (std::is_same_v<T, HoldsItem>) {
          return g.in_inventory(a.entity);
        } else {
          check_room(g, a.from);
          check_room(g, a.to);
          return g.exit(a.from, a.dir) == a.to;
        }
      },
      p);
}

} // namespace

bool holds(const GameState& g, const Proposition& p) {
  bool v = holds_atom(g, p.atom);
  return p.negated ? !v : v;
}

GameState player_take(const GameState& g, const EntityId& item) {
  const auto& e = g.entity(item);
  if (!e.portable()) throw UndefinedApplication("playerTake: '" + item.str() + "' is not an item");
  if (!holds(g, PlayerNear{item})) throw UndefinedApplication("playerTake: '" + item.str() + "' is not near");
  if (holds(g, HoldsItem{item})) throw UndefinedApplication("playerTake: '" + item.str() + "' is already held");
  GameState next = g;
  next.locations[item] = InInventory{};
  return next;
}

GameState player_move(const GameState& g, Direction d) {
  auto to = g.exit(g.player_room, d);
  if (!to) {
    throw UndefinedApplication("playerMove: no exit " + std::string(to_string(d)) + " from '" +
                               g.player_room.str() + "'");
  }
  GameState next = g;
  next.player_room = *to;
  return next;
}

json state_to_json(const GameState& g) {
  json j;
  j["rooms"] = json::array();
  for (const auto& r : g.rooms) j["rooms"].push_back(r.str());
  j["adjacency"] = json::array();
  for (const auto& [key, to] : g.adjacency) {
    j["adjacency"].push_back({key.first.str(), std::string(to_string(key.second)), to.str()});
  }
  j["entities"] = json::object();
  for (const auto& [id, e] : g.entities) {
    json ej{{"kind", std::string(to_string(e.kind))}, {"type", e.type.str()}};
    if (!e.dialogue.empty()) ej["dialogue"] = e.dialogue;
    if (e.leads_to) ej["leads_to"] = e.leads_to->str();
    ej["location"] = location_string(g.locations.at(id));
    j["entities"][id.str()] = ej;
  }
  j["player_room"] = g.player_room.str();
  j["day"] = g.day;
  j["rng"] = {{"seed", g.rng.seed}, {"counter", g.rng.counter}};
  j["growth"] = json::object();
  for (const auto& [id, gs] : g.growth) {
    j["growth"][id.str()] = {{"crop", gs.crop},
                             {"stage", stage_string(gs.stage)},
                             {"days_watered", gs.days_watered},
                             {"watered_today", gs.watered_today},
                             {"ground", gs.ground.str()}};
  }
  j["selected"] = g.selected ? json(g.selected->str()) : json(nullptr);
  j["spawn_counter"] = g.spawn_counter;
  return j;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string state_digest(const GameState& g) { return sha256_hex(state_to_json(g).dump()); }

} // namespace intentlang
