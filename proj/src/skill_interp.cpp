#include <pthread.h>

#include <algorithm>
#include <exception>

#include "intentlang/skill.hpp"
#include "intentlang/step.hpp"

namespace intentlang::skill {

std::size_t SkillRun::steps_of(std::string_view verb) const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(),
                                                [&](const TraceEntry& e) { return verb_of(e.intent) == verb; }));
}

namespace {

struct Flow {
  bool ok = true;
  std::vector<Value> values;
  std::string at;
  std::string reason;

  static Flow failed(std::string at, std::string reason) { return {false, {}, std::move(at), std::move(reason)}; }
};

struct Env {
  std::map<std::string, Value> vars;
  std::map<std::string, std::string> tvars;

  EntityType subst(EntityType t) const {
    if (auto it = tvars.find(t.param); it != tvars.end()) t.param = it->second;
    return t;
  }
  ResourceType subst(const ResourceType& t) const {
    ResourceType out;
    for (const auto& m : t.members) out.members.push_back(subst(m));
    return out;
  }
};

bool value_matches(const EntityType& actual, const ResourceType& want) {
  return std::any_of(want.members.begin(), want.members.end(), [&](const EntityType& m) {
    return ctor_subtype(actual.ctor, m.ctor) && actual.param == m.param;
  });
}

/// Binds the callee's type variables from runtime argument types.
bool infer(const EntityType& actual, const ResourceType& formal, const std::set<std::string>& tvars,
           std::map<std::string, std::string>& inst) {
  for (const auto& f : formal.members) {
    if (!ctor_subtype(actual.ctor, f.ctor)) continue;
    if (tvars.contains(f.param)) {
      auto [it, fresh] = inst.emplace(f.param, actual.param);
      if (fresh || it->second == actual.param) return true;
    } else if (f.param == actual.param) {
      return true;
    }
  }
  return false;
}

class Interp {
public:
  Interp(GameState g, const SkillSet& defs, const RunOptions& opts) : g_(std::move(g)), defs_(defs), opts_(opts) {}

  Flow call(const SkillDef& def, Env env) {
    if (++depth_ > opts_.depth_limit) {
      throw SkillRuntimeError("skill call depth exceeded " + std::to_string(opts_.depth_limit) + " in " + def.name);
    }
    auto out = eval(*def.body, env);
    --depth_;
    return out;
  }

  GameState& state() { return g_; }
  std::vector<TraceEntry>& entries() { return entries_; }

private:
  Flow eval(const Expr& e, const Env& env) {
    return std::visit([&](const auto& n) { return eval_node(n, e, env); }, e.node);
  }

  /// Rank for reference resolution: player's room, neighbouring rooms,
  /// anywhere else, inventory.
  int rank(const EntityId& id) const {
    auto room = g_.room_of(id);
    if (!room) return 3;
    if (*room == g_.player_room) return 0;
    for (auto d : all_directions) {
      if (g_.exit(g_.player_room, d) == *room) return 1;
    }
    return 2;
  }

  std::optional<Value> lookup(const Arg& a, const Env& env, bool inventory_only) const {
    if (a.param.empty()) {
      if (auto it = env.vars.find(a.name); it != env.vars.end()) return it->second;
      EntityId exact{a.name};
      if (g_.declared(exact) && (!inventory_only || g_.in_inventory(exact))) return Value{g_.entity(exact).type, exact};
    }
    auto want = env.subst(EntityType{a.name, a.param});
    std::optional<std::pair<int, EntityId>> best;
    for (const auto& [id, ent] : g_.entities) {
      bool by_kind = want.param.empty() && to_string(ent.kind) == want.ctor;
      if (!by_kind && !ctor_subtype(ent.type.ctor, want.ctor)) continue;
      if (!by_kind && !want.param.empty() && ent.type.param != want.param) continue;
      if (inventory_only && !g_.in_inventory(id)) continue;
      std::pair<int, EntityId> key{rank(id), id};
      if (!best || key < *best) best = key;
    }
    if (!best) return std::nullopt;
    return Value{g_.entity(best->second).type, best->second};
  }

  Flow run_intent(const CoreIntent& intent) {
    auto result = respond(g_, intent);
    g_ = std::move(result.next);
    entries_.push_back({entries_.size(), intent, result.resp, state_digest(g_)});
    if (!result.resp.ok()) return Flow::failed(to_string(intent), result.resp.message);
    Flow f;
    for (const auto& r : result.resp.payload) f.values.push_back({r.type, r.entity});
    return f;
  }

  Flow eval_node(const Prim& p, const Expr&, const Env& env) {
    if (p.verb == "collect") return run_intent(Collect{});
    if (p.verb == "wait") return run_intent(Wait{});
    if (p.verb == "move" || p.verb == "move_offscreen") {
      auto dir = parse_direction(p.arg->name);
      if (!dir) return Flow::failed(p.verb + " " + p.arg->str(), "no such direction");
      if (p.verb == "move") return run_intent(Move{*dir});
      return run_intent(MoveOffscreen{*dir});
    }
    auto v = lookup(*p.arg, env, p.verb == "select");
    if (!v) return Flow::failed(p.verb + " " + env.subst(EntityType{p.arg->name, p.arg->param}).str(), "no such entity");
    const auto& id = v->entity;
    if (p.verb == "select") return run_intent(Select{id});
    if (p.verb == "apply") return run_intent(Apply{id});
    if (p.verb == "inquire") return run_intent(Inquire{id});
    if (p.verb == "move_near") return run_intent(MoveNear{id});
    return run_intent(Take{id});
  }

  Flow eval_node(const Seq& s, const Expr&, const Env& env) {
    auto first = eval(*s.first, env);
    if (!first.ok) return first;
    return eval(*s.second, env);
  }

  Flow eval_node(const Par& p, const Expr&, const Env& env) {
    const auto& a = opts_.par_right_first ? *p.right : *p.left;
    const auto& b = opts_.par_right_first ? *p.left : *p.right;
    auto first = eval(a, env);
    if (!first.ok) return first;
    auto second = eval(b, env);
    if (!second.ok) return second;
    auto& left = opts_.par_right_first ? second : first;
    auto& right = opts_.par_right_first ? first : second;
    left.values.insert(left.values.end(), right.values.begin(), right.values.end());
    return left;
  }

  Flow eval_node(const Call& c, const Expr& e, const Env& env) {
    const auto* def = find_skill(defs_, c.name);
    if (!def) throw SkillRuntimeError("unknown skill '" + c.name + "'");
    Env inner;
    std::size_t first = 0;
    auto ntype = def->type_params.size();
    if (ntype > 0 && c.args.size() == ntype + def->params.size()) {
      for (std::size_t k = 0; k < ntype; ++k) {
        auto it = env.tvars.find(c.args[k].name);
        inner.tvars[def->type_params[k].name] = it != env.tvars.end() ? it->second : c.args[k].name;
      }
      first = ntype;
    }
    if (c.args.size() - first != def->params.size()) throw SkillRuntimeError("wrong arity calling " + c.name);
    std::set<std::string> tvars;
    for (const auto& b : def->type_params) tvars.insert(b.name);
    for (std::size_t k = 0; k < def->params.size(); ++k) {
      auto v = lookup(c.args[first + k], env, false);
      if (!v) return Flow::failed(to_string(e), "no such entity: " + env.subst(EntityType{c.args[first + k].name, c.args[first + k].param}).str());
      if (!infer(v->type, def->params[k].type, tvars, inner.tvars)) {
        return Flow::failed(to_string(e), v->entity.str() + " is " + v->type.str() + ", not " +
                                              inner.subst(def->params[k].type).str());
      }
      inner.vars[def->params[k].var] = *v;
    }
    return call(*def, std::move(inner));
  }

  Flow eval_node(const Name& n, const Expr& e, const Env& env) {
    if (auto it = env.vars.find(n.name); it != env.vars.end()) return Flow{true, {it->second}, {}, {}};
    return eval_node(Call{n.name, {}}, e, env);
  }

  Flow eval_node(const Case& c, const Expr&, const Env& env) {
    auto it = env.vars.find(c.scrutinee);
    if (it == env.vars.end()) throw SkillRuntimeError("unbound variable '" + c.scrutinee + "'");
    const auto& v = it->second;
    for (const auto& b : c.branches) {
      if (b.kind != CaseBranch::Kind::typed || !value_matches(v.type, env.subst(b.binding->type))) continue;
      Env inner = env;
      inner.vars[b.binding->var] = v;
      return eval(*b.body, inner);
    }
    for (const auto& b : c.branches) {
      if (b.kind == CaseBranch::Kind::success) return eval(*b.body, env);
    }
    throw SkillRuntimeError("no case branch for " + v.entity.str() + " : " + v.type.str());
  }

  Flow eval_node(const DoRecv& d, const Expr&, const Env& env) {
    auto got = eval(*d.action, env);
    if (!got.ok) {
      // `case _ of failure => ...` directly under `recv` handles the failure.
      if (const auto* c = std::get_if<Case>(&d.body->node)) {
        for (const auto& b : c->branches) {
          if (b.kind == CaseBranch::Kind::failure) return eval(*b.body, env);
        }
      }
      return got;
    }
    if (got.values.size() != d.pattern.size()) {
      throw SkillRuntimeError("expected " + std::to_string(d.pattern.size()) + " values, received " +
                              std::to_string(got.values.size()));
    }
    Env inner = env;
    for (std::size_t k = 0; k < got.values.size(); ++k) {
      const auto& v = got.values[k];
      auto want = env.subst(d.pattern[k].type);
      if (!value_matches(v.type, want)) {
        throw SkillRuntimeError("received " + v.type.str() + " where " + want.str() + " was expected");
      }
      inner.vars[d.pattern[k].var] = v;
    }
    return eval(*d.body, inner);
  }

  Flow eval_node(const Fail&, const Expr&, const Env&) { return Flow::failed("fail", "the skill gave up"); }

  GameState g_;
  const SkillSet& defs_;
  const RunOptions& opts_;
  std::vector<TraceEntry> entries_;
  std::size_t depth_ = 0;
};

/// Splits "name[a,b]" into the name and its type arguments.
std::pair<std::string, std::vector<std::string>> split_entry(std::string_view entry) {
  auto open = entry.find('[');
  if (open == std::string_view::npos) return {std::string(entry), {}};
  if (entry.back() != ']') throw SkillRuntimeError("bad skill reference '" + std::string(entry) + "'");
  std::vector<std::string> args;
  std::string cur;
  for (char c : entry.substr(open + 1, entry.size() - open - 2)) {
    if (c == ',') {
      args.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  args.push_back(cur);
  return {std::string(entry.substr(0, open)), args};
}

SkillRun run_here(const GameState& g, const SkillSet& defs, std::string_view entry,
                  const std::map<std::string, EntityId>& args, const RunOptions& opts) {
  auto [name, targs] = split_entry(entry);
  const auto* def = find_skill(defs, name);
  if (!def) throw SkillRuntimeError("unknown skill '" + name + "'");
  if (!targs.empty() && targs.size() != def->type_params.size()) {
    throw SkillRuntimeError(name + " takes " + std::to_string(def->type_params.size()) + " type arguments");
  }
  Env env;
  for (std::size_t k = 0; k < targs.size(); ++k) env.tvars[def->type_params[k].name] = targs[k];
  std::set<std::string> tvars;
  for (const auto& b : def->type_params) tvars.insert(b.name);
  for (const auto& p : def->params) {
    auto it = args.find(p.var);
    if (it == args.end()) throw SkillRuntimeError("missing argument '" + p.var + "' for " + name);
    if (!g.declared(it->second)) throw SkillRuntimeError("argument '" + p.var + "': no entity " + it->second.str());
    const auto& type = g.entity(it->second).type;
    if (!infer(type, p.type, tvars, env.tvars)) {
      throw SkillRuntimeError("argument '" + p.var + "': " + it->second.str() + " is " + type.str() + ", not " +
                              env.subst(p.type).str());
    }
    env.vars[p.var] = Value{type, it->second};
  }
  for (const auto& [var, id] : args) {
    if (!env.vars.contains(var)) throw SkillRuntimeError(name + " has no parameter '" + var + "'");
  }

  Interp interp(g, defs, opts);
  auto flow = interp.call(*def, env);
  SkillRun out{std::move(interp.state()), {}, std::move(interp.entries())};
  out.outcome.produced = flow.ok;
  if (flow.ok) {
    if (flow.values.size() == 1) {
      out.outcome.bindings["result"] = flow.values.front();
    } else {
      for (std::size_t k = 0; k < flow.values.size(); ++k) out.outcome.bindings["result_" + std::to_string(k)] = flow.values[k];
    }
  } else {
    out.outcome.failed_at = flow.at;
    out.outcome.reason = flow.reason;
  }
  return out;
}

// Deep recursion up to the depth limit needs more than the default stack.
constexpr std::size_t interp_stack_bytes = std::size_t{1} << 30;

struct ThreadJob {
  const GameState& g;
  const SkillSet& defs;
  std::string_view entry;
  const std::map<std::string, EntityId>& args;
  const RunOptions& opts;
  std::optional<SkillRun> result;
  std::exception_ptr error;
};

void* thread_main(void* p) {
  auto* job = static_cast<ThreadJob*>(p);
  try {
    job->result = run_here(job->g, job->defs, job->entry, job->args, job->opts);
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

} // namespace

SkillRun run_skill(const GameState& g, const SkillSet& defs, std::string_view entry,
                   const std::map<std::string, EntityId>& args, const RunOptions& opts) {
  ThreadJob job{g, defs, entry, args, opts, std::nullopt, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, interp_stack_bytes);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, thread_main, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) return run_here(g, defs, entry, args, opts);
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
  return std::move(*job.result);
}

TracedRun run_skill_traced(const WorldDef& world, std::uint64_t seed, const SkillSet& defs, std::string_view entry,
                           const std::map<std::string, EntityId>& args, const RunOptions& opts) {
  auto run = run_skill(initial_state(world, seed), defs, entry, args, opts);
  auto trace = open_trace(world, seed);
  trace.entries = run.entries;
  return {std::move(run), std::move(trace)};
}

} // namespace intentlang::skill
