#include "intentlang/typing.hpp"

#include <algorithm>
#include <map>

namespace intentlang {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string show(const std::string& s) { return s.empty() ? "_" : s; }

std::optional<RoomId> player_room(const Context& ctx) {
  for (const auto& f : ctx.fluents) {
    if (const auto* p = std::get_if<PlayerIn>(&f)) return p->room;
  }
  return std::nullopt;
}

std::optional<EntityType> type_of(const Context& ctx, const EntityId& e) {
  auto it = ctx.fluents.lower_bound(Typed{e, {}});
  if (it != ctx.fluents.end()) {
    if (const auto* t = std::get_if<Typed>(&*it); t && t->entity == e) return t->type;
  }
  return std::nullopt;
}

std::optional<EntityKind> kind_of(const Context& ctx, const EntityId& e) {
  for (auto k : {EntityKind::item, EntityKind::fixture, EntityKind::npc, EntityKind::opening}) {
    if (ctx.fluents.contains(KindOf{e, k})) return k;
  }
  return std::nullopt;
}

std::optional<EntityId> selected(const Context& ctx) {
  auto it = ctx.fluents.lower_bound(Selected{});
  if (it != ctx.fluents.end()) {
    if (const auto* s = std::get_if<Selected>(&*it)) return s->entity;
  }
  return std::nullopt;
}

std::optional<RoomId> exit_of(const Context& ctx, const RoomId& from, Direction d) {
  for (const auto& f : ctx.statics) {
    if (const auto* a = std::get_if<Adjacent>(&f); a && a->from == from && a->dir == d) return a->to;
  }
  return std::nullopt;
}

bool rule_exists(const Context& ctx, const std::string& tool, const std::string& target) {
  for (const auto& f : ctx.statics) {
    if (const auto* r = std::get_if<ToolRuleFact>(&f); r && r->tool == tool && ctor_subtype(target, r->target)) {
      return true;
    }
  }
  return false;
}

TypingVerdict check_move(const Context& ctx, const std::string& rule, Direction d, std::vector<Fact> used,
                         const RoomId& here) {
  auto to = exit_of(ctx, here, d);
  if (!to) return TypingVerdict::reject(rule, Adjacent{here, d, RoomId{}});
  used.push_back(Adjacent{here, d, *to});
  return TypingVerdict::accept(rule, std::move(used));
}

} // namespace

std::string to_string(const Fact& f) {
  return std::visit(
      overloaded{
          [](const PlayerIn& p) { return "playerIn(" + show(p.room.str()) + ")"; },
          [](const At& a) { return "at(" + show(a.entity.str()) + "," + show(a.room.str()) + ")"; },
          [](const HoldsItem& h) { return "holds_item(" + show(h.entity.str()) + ")"; },
          [](const Adjacent& a) {
            return "adjacent(" + show(a.from.str()) + "," + std::string(to_string(a.dir)) + "," + show(a.to.str()) +
                   ")";
          },
          [](const FarmWorld&) { return std::string("farm_world"); },
          [](const ToolRuleFact& r) { return "tool_rule(" + show(r.tool) + "," + show(r.target) + ")"; },
          [](const Selected& s) { return "selected(" + show(s.entity.str()) + ")"; },
          [](const Typed& t) { return "typed(" + show(t.entity.str()) + "," + show(t.type.str()) + ")"; },
          [](const KindOf& k) { return "kind(" + show(k.entity.str()) + "," + std::string(to_string(k.kind)) + ")"; },
          [](const Inquirable& q) { return "inquirable(" + show(q.entity.str()) + ")"; },
          [](const Reachable& r) { return "reachable(" + show(r.entity.str()) + ")"; },
      },
      f);
}

Context abstract(const GameState& g) {
  Context ctx;
  for (const auto& [key, to] : g.adjacency) ctx.statics.insert(Adjacent{key.first, key.second, to});
  ctx.fluents.insert(PlayerIn{g.player_room});
  for (const auto& [id, loc] : g.locations) {
    if (const auto* r = std::get_if<RoomId>(&loc)) ctx.fluents.insert(At{id, *r});
    else ctx.fluents.insert(HoldsItem{id});
  }
  for (const auto& [id, e] : g.entities) ctx.fluents.insert(KindOf{id, e.kind});
  if (g.is_farm()) {
    ctx.statics.insert(FarmWorld{});
    for (const auto& rule : g.farm->tools) ctx.statics.insert(ToolRuleFact{rule.tool, rule.target});
    for (const auto& [id, e] : g.entities) ctx.fluents.insert(Typed{id, e.type});
    if (g.selected) ctx.fluents.insert(Selected{*g.selected});
  }
  return ctx;
}

std::optional<std::string> find_context_violation(const Context& ctx) {
  int player_facts = 0;
  std::map<EntityId, int> placements;
  for (const auto& f : ctx.fluents) {
    if (std::holds_alternative<PlayerIn>(f)) ++player_facts;
    if (const auto* a = std::get_if<At>(&f)) ++placements[a->entity];
    if (const auto* h = std::get_if<HoldsItem>(&f)) ++placements[h->entity];
  }
  if (player_facts != 1) return "expected exactly one playerIn fact, found " + std::to_string(player_facts);
  for (const auto& [e, n] : placements) {
    if (n > 1) return "entity '" + e.str() + "' is in " + std::to_string(n) + " places";
  }
  std::set<std::pair<RoomId, Direction>> exits;
  for (const auto& f : ctx.statics) {
    if (const auto* a = std::get_if<Adjacent>(&f); a && !exits.insert({a->from, a->dir}).second) {
      return "two exits " + std::string(to_string(a->dir)) + " from '" + a->from.str() + "'";
    }
  }
  return std::nullopt;
}

TypingVerdict typecheck(const Context& ctx, const CoreIntent& i) {
  auto here_opt = player_room(ctx);
  auto verb = std::string(verb_of(i));
  if (!here_opt) return TypingVerdict::reject(verb, PlayerIn{RoomId{}});
  const RoomId here = *here_opt;
  std::vector<Fact> used{PlayerIn{here}};

  const bool farm = ctx.statics.contains(FarmWorld{});
  auto needs_farm = [&]() -> std::optional<TypingVerdict> {
    if (!farm) return TypingVerdict::reject(verb, FarmWorld{});
    used.push_back(FarmWorld{});
    return std::nullopt;
  };

  if (const auto* m = std::get_if<Move>(&i)) return check_move(ctx, verb, m->dir, used, here);

  if (const auto* t = std::get_if<Take>(&i)) {
    if (!ctx.fluents.contains(At{t->item, here})) return TypingVerdict::reject(verb, At{t->item, here});
    used.push_back(At{t->item, here});
    if (!ctx.fluents.contains(KindOf{t->item, EntityKind::item})) {
      return TypingVerdict::reject(verb, KindOf{t->item, EntityKind::item});
    }
    used.push_back(KindOf{t->item, EntityKind::item});
    return TypingVerdict::accept(verb, std::move(used));
  }

  if (std::holds_alternative<Collect>(i)) {
    for (const auto& f : ctx.fluents) {
      const auto* a = std::get_if<At>(&f);
      if (a && a->room == here && ctx.fluents.contains(KindOf{a->entity, EntityKind::item})) {
        used.push_back(*a);
        used.push_back(KindOf{a->entity, EntityKind::item});
        return TypingVerdict::accept(verb, std::move(used));
      }
    }
    return TypingVerdict::reject(verb, At{EntityId{}, here});
  }

  if (auto r = needs_farm()) return *r;

  if (const auto* m = std::get_if<MoveOffscreen>(&i)) return check_move(ctx, verb, m->dir, used, here);

  if (std::holds_alternative<Wait>(i)) return TypingVerdict::accept(verb, std::move(used));

  if (const auto* s = std::get_if<Select>(&i)) {
    if (!ctx.fluents.contains(HoldsItem{s->item})) return TypingVerdict::reject(verb, HoldsItem{s->item});
    used.push_back(HoldsItem{s->item});
    return TypingVerdict::accept(verb, std::move(used));
  }

  if (const auto* a = std::get_if<Apply>(&i)) {
    auto tool = selected(ctx);
    if (!tool) return TypingVerdict::reject(verb, Selected{EntityId{}});
    used.push_back(Selected{*tool});
    if (!ctx.fluents.contains(At{a->target, here})) return TypingVerdict::reject(verb, At{a->target, here});
    used.push_back(At{a->target, here});
    auto tool_type = type_of(ctx, *tool);
    auto target_type = type_of(ctx, a->target);
    if (!tool_type) return TypingVerdict::reject(verb, Typed{*tool, {}});
    if (!target_type) return TypingVerdict::reject(verb, Typed{a->target, {}});
    used.push_back(Typed{*tool, *tool_type});
    used.push_back(Typed{a->target, *target_type});
    if (!rule_exists(ctx, tool_type->ctor, target_type->ctor)) {
      return TypingVerdict::reject(verb, ToolRuleFact{tool_type->ctor, target_type->ctor});
    }
    used.push_back(ToolRuleFact{tool_type->ctor, target_type->ctor});
    return TypingVerdict::accept(verb, std::move(used));
  }

  if (const auto* q = std::get_if<Inquire>(&i)) {
    if (!ctx.fluents.contains(At{q->target, here})) return TypingVerdict::reject(verb, At{q->target, here});
    used.push_back(At{q->target, here});
    auto kind = kind_of(ctx, q->target);
    if (kind && *kind != EntityKind::fixture) {
      used.push_back(KindOf{q->target, *kind});
      return TypingVerdict::accept(verb, std::move(used));
    }
    auto type = type_of(ctx, q->target);
    if (type && (type->ctor == "planted" || type->ctor == "growing")) {
      used.push_back(Typed{q->target, *type});
      return TypingVerdict::accept(verb, std::move(used));
    }
    return TypingVerdict::reject(verb, Inquirable{q->target});
  }

  if (const auto* m = std::get_if<MoveNear>(&i)) {
    if (ctx.fluents.contains(At{m->target, here})) {
      used.push_back(At{m->target, here});
      return TypingVerdict::accept(verb, std::move(used));
    }
    for (auto d : all_directions) {
      auto to = exit_of(ctx, here, d);
      if (to && ctx.fluents.contains(At{m->target, *to})) {
        used.push_back(Adjacent{here, d, *to});
        used.push_back(At{m->target, *to});
        return TypingVerdict::accept(verb, std::move(used));
      }
    }
    return TypingVerdict::reject(verb, Reachable{m->target});
  }

  return TypingVerdict::reject(verb, FarmWorld{});
}

bool context_succeeds(const Context& before, const Context& after) {
  return before.statics == after.statics && !find_context_violation(after);
}

ProgressReport check_progress(const WorldDef& world, const ExploreBounds& bounds, const Typechecker& checker) {
  ProgressReport report;
  auto visit = [&](const GameState& g, const CoreIntent& i, const StepResult* r, const std::string& error) {
    auto gamma = abstract(g);
    if (!checker(gamma, i).ok) return;
    ++report.checked;
    if (!r) {
      report.violations.push_back({state_digest(g), to_string(i), "engine_error", error});
      return;
    }
    if (!context_succeeds(gamma, abstract(r->next))) {
      report.violations.push_back({state_digest(g), to_string(i), "context", "successor context does not succeed"});
    } else if (!r->resp.ok()) {
      report.violations.push_back({state_digest(g), to_string(i), "failure", r->resp.message});
    }
  };
  auto ex = explore(initial_state(world), bounds, visit);
  report.states = ex.states;
  report.pairs = ex.pairs;
  report.truncated = ex.truncated;
  return report;
}

nlohmann::json ProgressReport::to_json() const {
  nlohmann::json j;
  j["states"] = states;
  j["pairs"] = pairs;
  j["checked"] = checked;
  j["truncated"] = truncated;
  j["undefined"] = nlohmann::json::array();
  j["violations"] = nlohmann::json::array();
  for (const auto& v : violations) {
    nlohmann::json vj{{"state", v.state}, {"intent", v.intent}, {"kind", v.kind}, {"detail", v.detail}};
    j["violations"].push_back(vj);
    if (v.kind == "engine_error") j["undefined"].push_back({{"state", v.state}, {"intent", v.intent}, {"error", v.detail}});
  }
  return j;
}

std::string choice_id(const CoreIntent& i, const RoomId& room) {
  std::string verb = std::holds_alternative<Move>(i) ? "go" : std::string(verb_of(i));
  std::string id = verb;
  if (auto arg = argument_of(i)) id += "_" + *arg;
  return id + "_from_" + room.str();
}

std::vector<Choice> enumerate_choices(const GameState& g) {
  auto gamma = abstract(g);
  std::vector<Choice> out;
  for (const auto& intent : profile_intents(g)) {
    if (!typecheck(gamma, intent).ok) continue;
    std::string label = std::holds_alternative<Move>(intent)
                            ? "go " + std::string(to_string(std::get<Move>(intent).dir))
                            : to_string(intent);
    out.push_back({choice_id(intent, g.player_room), std::move(label), intent});
  }
  std::sort(out.begin(), out.end(), [](const Choice& a, const Choice& b) { return a.id < b.id; });
  return out;
}

} // namespace intentlang
