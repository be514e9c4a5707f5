#include "intentlang/step.hpp"

#include <deque>
#include <set>
#include <tuple>

#include "intentlang/error.hpp"
#include "intentlang/farm.hpp"

namespace intentlang {

std::string_view to_string(Verdict v) noexcept { return v == Verdict::success ? "success" : "failure"; }

std::string format_response(const Response& r) {
  std::string out = r.ok() ? "ok: " : "fail: ";
  out += r.message;
  if (!r.payload.empty()) {
    out += " [";
    for (std::size_t i = 0; i < r.payload.size(); ++i) {
      if (i) out += ", ";
      out += r.payload[i].type.str();
    }
    out += "]";
  }
  return out;
}

namespace {

StepResult fail(const GameState& g, std::string message) { return {g, Response::failure(std::move(message))}; }

StepResult take(const GameState& g, const EntityId& item) {
  const auto& e = g.entity(item);
  if (holds(g, HoldsItem{item})) return fail(g, "You already have the " + item.str() + ".");
  if (!holds(g, PlayerNear{item})) return fail(g, "There is no " + item.str() + " here.");
  if (!e.portable()) return fail(g, "The " + item.str() + " can't be taken.");
  return {player_take(g, item), Response::success("Taken.")};
}

StepResult move(const GameState& g, Direction d) {
  if (!g.exit(g.player_room, d)) return fail(g, "You can't go that way.");
  return {player_move(g, d), Response::success("You go " + std::string(to_string(d)) + ".")};
}

StepResult collect(const GameState& g) {
  GameState next = g;
  std::string taken;
  for (const auto& id : g.entities_in(g.player_room)) {
    if (!g.entity(id).portable()) continue;
    next = player_take(next, id);
    taken += taken.empty() ? id.str() : ", " + id.str();
  }
  if (taken.empty()) return fail(g, "There is nothing here to take.");
  return {std::move(next), Response::success("Taken: " + taken + ".")};
}

} // namespace

StepResult step(const GameState& g, const CoreIntent& i) {
  if (auto e = entity_of(i); e && !g.declared(*e)) throw UndeclaredIdentifier(e->str());

  if (const auto* m = std::get_if<Move>(&i)) return move(g, m->dir);
  if (const auto* t = std::get_if<Take>(&i)) return take(g, t->item);
  if (std::holds_alternative<Collect>(i)) return collect(g);
  if (std::holds_alternative<Wait>(i) && !g.is_farm()) return fail(g, "Time doesn't pass here.");
  return step_farm(g, i);
}

StepResult respond(const GameState& g, const CoreIntent& i) {
  if (auto e = entity_of(i); e && !g.declared(*e)) {
    return fail(g, "You don't know what \"" + e->str() + "\" is.");
  }
  return step(g, i);
}

bool StateOrder::operator()(const GameState& a, const GameState& b) const {
  return std::tie(a.player_room, a.locations, a.entities, a.selected, a.day, a.growth, a.rng.counter,
                  a.rng.seed, a.spawn_counter) < std::tie(b.player_room, b.locations, b.entities, b.selected,
                                                           b.day, b.growth, b.rng.counter, b.rng.seed,
                                                           b.spawn_counter);
}

Exploration explore(const GameState& initial, const ExploreBounds& bounds, const PairVisitor& visit) {
  Exploration out;
  std::set<GameState, StateOrder> seen{initial};
  std::deque<GameState> queue{initial};
  while (!queue.empty()) {
    GameState g = std::move(queue.front());
    queue.pop_front();
    ++out.states;
    for (const auto& intent : all_intents(g)) {
      ++out.pairs;
      StepResult result;
      try {
        result = step(g, intent);
      } catch (const std::exception& e) {
        visit(g, intent, nullptr, e.what());
        continue;
      }
      visit(g, intent, &result, {});
      if (seen.contains(result.next)) continue;
      if (bounds.max_day && result.next.day > *bounds.max_day) {
        out.truncated = true;
        continue;
      }
      if (seen.size() >= bounds.max_states) {
        out.truncated = true;
        continue;
      }
      seen.insert(result.next);
      queue.push_back(std::move(result.next));
    }
  }
  return out;
}

TotalityReport check_totality(const WorldDef& world, const ExploreBounds& bounds) {
  TotalityReport report;
  auto visit = [&](const GameState& g, const CoreIntent& i, const StepResult* r, const std::string& error) {
    std::string problem = error;
    if (r) {
      if (auto v = find_invariant_violation(r->next)) problem = "invariant broken: " + *v;
      else if (!r->resp.ok() && !(r->next == g)) problem = "failure changed the state";
      else if (!r->resp.ok() && !r->resp.payload.empty()) problem = "failure carried a payload";
      else if (r->resp.message.empty()) problem = "empty response message";
    }
    if (!problem.empty()) report.undefined.push_back({state_digest(g), to_string(i), problem});
  };
  auto ex = explore(initial_state(world), bounds, visit);
  report.states = ex.states;
  report.pairs = ex.pairs;
  report.truncated = ex.truncated;
  return report;
}

nlohmann::json TotalityReport::to_json() const {
  nlohmann::json j;
  j["states"] = states;
  j["pairs"] = pairs;
  j["truncated"] = truncated;
  j["undefined"] = nlohmann::json::array();
  for (const auto& u : undefined) j["undefined"].push_back({{"state", u.state}, {"intent", u.intent}, {"error", u.error}});
  return j;
}

} // namespace intentlang
