#include "intentlang/farm.hpp"

#include "intentlang/error.hpp"

namespace intentlang {

namespace {

StepResult fail(const GameState& g, std::string message) { return {g, Response::failure(std::move(message))}; }

/// Fresh entity name `<base>_<n>` using the state's spawn counter.
EntityId spawn_name(GameState& g, const std::string& base) {
  for (;;) {
    EntityId id{base + "_" + std::to_string(g.spawn_counter++)};
    if (!g.declared(id)) return id;
  }
}

EntityId spawn_item(GameState& g, const std::string& base, EntityType type) {
  auto id = spawn_name(g, base);
  g.entities[id] = Entity{EntityKind::item, std::move(type), {}, std::nullopt};
  g.locations[id] = InInventory{};
  return id;
}

void remove_entity(GameState& g, const EntityId& id) {
  g.entities.erase(id);
  g.locations.erase(id);
  g.growth.erase(id);
  if (g.selected == id) g.selected.reset();
}

bool reachable(const GameState& g, const EntityId& id) { return g.room_of(id) == g.player_room; }

StepResult fish(const GameState& g) {
  GameState next = g;
  auto draw = rng_draw(next.rng.seed, next.rng.counter);
  ++next.rng.counter;
  const auto& p = g.farm->fish_probability;
  bool caught = bernoulli(draw, p.num, p.den);
  EntityType type{caught ? "fish" : "trash", {}};
  auto id = spawn_item(next, type.ctor, type);
  auto message = caught ? "Something tugs at the line... a fish!" : "Something tugs at the line... just trash.";
  return {std::move(next), Response::success(message, {{type, id}})};
}

StepResult apply(const GameState& g, const EntityId& target) {
  if (!g.selected) return fail(g, "You have nothing selected.");
  if (!reachable(g, target)) return fail(g, "The " + target.str() + " is out of reach.");
  const auto& tool_id = *g.selected;
  const auto& tool = g.entity(tool_id);
  const auto& subject = g.entity(target);
  const auto* rule = g.farm->find_rule(tool.type.ctor, subject.type.ctor);
  if (!rule) return fail(g, "Using the " + tool_id.str() + " on the " + target.str() + " does nothing.");

  GameState next = g;
  switch (rule->effect) {
  case ToolEffect::replace: {
    EntityType type{rule->produces, {}};
    next.entities[target].type = type;
    return {std::move(next), Response::success("The " + target.str() + " is now " + type.str() + ".",
                                               {{type, target}})};
  }
  case ToolEffect::extract: {
    EntityType type{rule->produces, {}};
    auto base = subject.type.ctor + "_drop";
    remove_entity(next, target);
    auto drop = spawn_item(next, base, type);
    return {std::move(next), Response::success("You get " + type.str() + ".", {{type, drop}})};
  }
  case ToolEffect::plant: {
    const auto& crop = tool.type.param;
    if (crop.empty() || !g.farm->growth_days.contains(crop)) return fail(g, "Nothing grows from that.");
    if (g.growth.contains(target)) return fail(g, "Something is already growing here.");
    EntityType planted{"planted", crop};
    GrowthState gs;
    gs.crop = crop;
    gs.ground = subject.type;
    remove_entity(next, tool_id);
    next.entities[target].type = planted;
    next.growth[target] = gs;
    return {std::move(next), Response::success("You plant " + crop + ".", {{planted, target}})};
  }
  case ToolEffect::water: {
    auto it = next.growth.find(target);
    if (it == next.growth.end()) return fail(g, "There is nothing to water.");
    auto& gs = it->second;
    if (gs.stage == GrowthStage::planted) gs.stage = GrowthStage::growing;
    gs.watered_today = true;
    EntityType growing{"growing", gs.crop};
    next.entities[target].type = growing;
    return {std::move(next), Response::success("You water the " + target.str() + ".", {{growing, target}})};
  }
  case ToolEffect::fish:
    return fish(g);
  }
  return fail(g, "Nothing happens.");
}

StepResult inquire(const GameState& g, const EntityId& target) {
  if (!reachable(g, target)) return fail(g, "The " + target.str() + " is out of reach.");
  const auto& subject = g.entity(target);
  GameState next = g;

  if (auto it = g.growth.find(target); it != g.growth.end()) {
    const auto& gs = it->second;
    if (gs.stage != GrowthStage::harvestable) {
      EntityType growing{"growing", gs.crop};
      return {std::move(next), Response::success("The " + gs.crop + " is still growing.", {{growing, target}})};
    }
    EntityType crop{"crop", gs.crop};
    auto ground = gs.ground;
    auto harvested = spawn_item(next, gs.crop, crop);
    next.growth.erase(target);
    next.entities[target].type = ground;
    return {std::move(next), Response::success("You harvest a " + gs.crop + ".", {{crop, harvested}})};
  }

  switch (subject.kind) {
  case EntityKind::npc:
    return {std::move(next), Response::success(target.str() + " says: \"" + subject.dialogue + "\"")};
  case EntityKind::opening:
    next.player_room = *subject.leads_to;
    return {std::move(next), Response::success("You step through the " + target.str() + ".")};
  case EntityKind::item:
    next.locations[target] = InInventory{};
    return {std::move(next), Response::success("You pick up the " + target.str() + ".", {{subject.type, target}})};
  case EntityKind::fixture:
    break;
  }
  return fail(g, "Nothing happens.");
}

StepResult move_near(const GameState& g, const EntityId& target) {
  auto where = g.room_of(target);
  if (!where) return fail(g, "You are carrying the " + target.str() + ".");
  if (*where == g.player_room) return {g, Response::success("You walk up to the " + target.str() + ".")};
  for (auto d : all_directions) {
    if (g.exit(g.player_room, d) == *where) {
      GameState next = g;
      next.player_room = *where;
      return {std::move(next), Response::success("You walk over to the " + target.str() + ".")};
    }
  }
  return fail(g, "The " + target.str() + " is too far away.");
}

} // namespace

GameState advance_day(const GameState& g) {
  GameState next = g;
  ++next.day;
  for (auto& [id, gs] : next.growth) {
    if (gs.watered_today && gs.stage != GrowthStage::harvestable) {
      ++gs.days_watered;
      if (gs.days_watered >= next.farm->growth_days.at(gs.crop)) gs.stage = GrowthStage::harvestable;
    }
    gs.watered_today = false;
  }
  return next;
}

StepResult try_fish(const GameState& g) {
  if (!g.is_farm()) return fail(g, "You can't fish here.");
  if (!g.selected) return fail(g, "You have nothing selected.");
  const auto& tool = g.entity(*g.selected);
  for (const auto& id : g.entities_in(g.player_room)) {
    const auto* rule = g.farm->find_rule(tool.type.ctor, g.entity(id).type.ctor);
    if (rule && rule->effect == ToolEffect::fish) return fish(g);
  }
  return fail(g, "You can't fish here.");
}

StepResult step_farm(const GameState& g, const CoreIntent& i) {
  if (!g.is_farm()) return fail(g, "That doesn't do anything here.");
  if (auto e = entity_of(i); e && !g.declared(*e)) throw UndeclaredIdentifier(e->str());

  if (const auto* s = std::get_if<Select>(&i)) {
    if (!g.in_inventory(s->item)) return fail(g, "You aren't carrying the " + s->item.str() + ".");
    GameState next = g;
    next.selected = s->item;
    return {std::move(next), Response::success("You select the " + s->item.str() + ".")};
  }
  if (const auto* a = std::get_if<Apply>(&i)) return apply(g, a->target);
  if (const auto* q = std::get_if<Inquire>(&i)) return inquire(g, q->target);
  if (const auto* m = std::get_if<MoveNear>(&i)) return move_near(g, m->target);
  if (const auto* m = std::get_if<MoveOffscreen>(&i)) {
    if (!g.exit(g.player_room, m->dir)) return fail(g, "You can't go that way.");
    return {player_move(g, m->dir), Response::success("You head " + std::string(to_string(m->dir)) + ".")};
  }
  if (std::holds_alternative<Wait>(i)) {
    auto next = advance_day(g);
    auto message = "Day " + std::to_string(next.day) + " begins.";
    return {std::move(next), Response::success(std::move(message))};
  }
  return fail(g, "That doesn't do anything here.");
}

} // namespace intentlang
