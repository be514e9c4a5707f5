#include <algorithm>

#include "intentlang/skill.hpp"

namespace intentlang::skill {

std::string_view to_string(SkillTypeError::Kind k) noexcept {
  switch (k) {
  case SkillTypeError::Kind::unbound_resource: return "UnboundResource";
  case SkillTypeError::Kind::non_exhaustive_case: return "NonExhaustiveCase";
  case SkillTypeError::Kind::overlapping_par: return "OverlappingPar";
  case SkillTypeError::Kind::type_mismatch: return "TypeMismatch";
  case SkillTypeError::Kind::unknown_skill: return "UnknownSkill";
  }
  return "?";
}

std::string SkillTypeError::str() const {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + std::string(to_string(kind)) + " in " +
         skill + ": " + detail;
}

WorldSignature signature_of(const WorldDef& world) {
  WorldSignature sig;
  if (world.farm) {
    sig.rules = *world.farm;
    for (const auto& [crop, days] : world.farm->growth_days) sig.crops.insert(crop);
    for (const auto& r : world.farm->tools) {
      sig.constructors.insert(r.tool);
      sig.constructors.insert(r.target);
      sig.constructors.insert(r.produces);
      if (r.effect == ToolEffect::extract || r.effect == ToolEffect::fish) sig.kinds.emplace(r.produces, EntityKind::item);
    }
    for (const char* c : {"planted", "growing", "crop", "fish", "trash"}) sig.constructors.insert(c);
    for (const char* c : {"crop", "fish", "trash"}) sig.kinds.emplace(c, EntityKind::item);
  }
  // Entity kinds double as references: `inquire npc` means the nearest npc.
  for (auto k : {EntityKind::item, EntityKind::fixture, EntityKind::npc, EntityKind::opening}) {
    sig.constructors.insert(std::string(to_string(k)));
    sig.kinds.emplace(std::string(to_string(k)), k);
  }
  for (const auto& e : world.entities) {
    sig.constructors.insert(e.entity.type.ctor);
    sig.kinds.emplace(e.entity.type.ctor, e.entity.kind);
  }
  return sig;
}

namespace {

bool atom_sub(const EntityType& a, const EntityType& b) { return ctor_subtype(a.ctor, b.ctor) && a.param == b.param; }

} // namespace

bool subtype(const ResourceType& a, const ResourceType& b) {
  return std::all_of(a.members.begin(), a.members.end(), [&](const EntityType& m) {
    return std::any_of(b.members.begin(), b.members.end(), [&](const EntityType& n) { return atom_sub(m, n); });
  });
}

namespace {

using Kind = SkillTypeError::Kind;

/// Productions of an expression; nullopt means it never returns (`fail`).
using Production = std::optional<std::vector<ResourceType>>;

std::string show(const std::vector<ResourceType>& p) {
  if (p.empty()) return "nothing";
  std::string out = "<";
  for (std::size_t k = 0; k < p.size(); ++k) out += (k ? ", " : "") + p[k].str();
  return out + ">";
}

/// Statically known selection: `known` false after calls and merges that
/// disagree.
struct Selection {
  bool known = true;
  std::optional<EntityType> tool;
  friend bool operator==(const Selection&, const Selection&) = default;
};

struct Scope {
  std::map<std::string, ResourceType> vars;
  std::set<std::string> tvars;
};

class Checker {
public:
  Checker(const SkillSet& defs, const WorldSignature& sig) : defs_(defs), sig_(sig) {}

  std::vector<SkillTypeError> run() {
    for (const auto& def : defs_) check_def(def);
    return std::move(errors_);
  }

private:
  void error(Kind k, std::string detail, SourcePos pos) { errors_.push_back({k, current_, std::move(detail), pos}); }

  void check_def(const SkillDef& def) {
    current_ = def.name;
    Scope scope;
    for (const auto& b : def.type_params) scope.tvars.insert(b.name);
    for (const auto& p : def.params) {
      check_type(p.type, scope, p.pos);
      scope.vars[p.var] = p.type;
    }
    if (def.returns) check_type(*def.returns, scope, def.pos);
    Selection sel;
    auto prod = check(*def.body, scope, sel);
    if (!def.returns || !prod) return;
    if (prod->size() != 1 || !subtype(prod->front(), *def.returns)) {
      error(Kind::type_mismatch, "expected " + def.returns->str() + ", got " + show(*prod), def.body->pos);
    }
  }

  void check_type(const ResourceType& t, const Scope& scope, SourcePos pos) {
    for (const auto& m : t.members) {
      if (!sig_.constructors.contains(m.ctor)) error(Kind::unbound_resource, "unknown type '" + m.ctor + "'", pos);
      if (!m.param.empty() && !scope.tvars.contains(m.param) && !sig_.crops.contains(m.param) &&
          !sig_.constructors.contains(m.param)) {
        error(Kind::unbound_resource, "unknown type parameter '" + m.param + "'", pos);
      }
    }
  }

  /// Type of an argument used as an entity: a variable's type or a reference.
  std::optional<EntityType> resolve(const Arg& a, const Scope& scope) {
    if (a.param.empty()) {
      if (auto it = scope.vars.find(a.name); it != scope.vars.end()) {
        if (it->second.is_sum()) {
          error(Kind::type_mismatch, "expected a single resource, got " + it->second.str() + " for '" + a.name + "'",
                a.pos);
          return std::nullopt;
        }
        return it->second.members.front();
      }
    }
    if (!sig_.constructors.contains(a.name)) {
      error(Kind::unbound_resource, a.name, a.pos);
      return std::nullopt;
    }
    return EntityType{a.name, a.param};
  }

  Production check(const Expr& e, const Scope& scope, Selection& sel) {
    return std::visit([&](const auto& n) { return check_node(n, e.pos, scope, sel); }, e.node);
  }

  Production check_node(const Prim& p, SourcePos pos, const Scope& scope, Selection& sel) {
    if (p.verb == "collect" || p.verb == "wait") return std::vector<ResourceType>{};
    if (p.verb == "move" || p.verb == "move_offscreen") {
      if (!parse_direction(p.arg->name) || !p.arg->param.empty()) {
        error(Kind::type_mismatch, "expected a direction, got " + p.arg->str(), p.arg->pos);
      }
      return std::vector<ResourceType>{};
    }
    auto target = resolve(*p.arg, scope);
    if (!target) return std::vector<ResourceType>{};

    if (p.verb == "select") {
      sel = Selection{true, *target};
      return std::vector<ResourceType>{};
    }
    if (p.verb == "apply") return check_apply(*target, pos, sel);
    if (p.verb == "inquire") {
      if (target->ctor == "planted" || target->ctor == "growing") {
        return std::vector<ResourceType>{ResourceType(std::vector<EntityType>{{"crop", target->param}, {"growing", target->param}})};
      }
      auto kind = sig_.kinds.find(target->ctor);
      if (kind != sig_.kinds.end() && kind->second == EntityKind::item) return std::vector<ResourceType>{*target};
      return std::vector<ResourceType>{};
    }
    return std::vector<ResourceType>{}; // take, move_near
  }

  Production check_apply(const EntityType& target, SourcePos pos, Selection& sel) {
    if (!sel.known) {
      error(Kind::type_mismatch, "expected a selected tool, got an unknown selection", pos);
      return std::vector<ResourceType>{};
    }
    if (!sel.tool) {
      error(Kind::type_mismatch, "expected a selected tool, got nothing selected", pos);
      return std::vector<ResourceType>{};
    }
    const auto tool = *sel.tool;
    const auto* rule = sig_.rules.find_rule(tool.ctor, target.ctor);
    if (!rule) {
      error(Kind::type_mismatch, "expected a target for " + tool.str() + ", got " + target.str(), pos);
      return std::vector<ResourceType>{};
    }
    switch (rule->effect) {
    case ToolEffect::replace:
    case ToolEffect::extract:
      return std::vector<ResourceType>{EntityType{rule->produces, {}}};
    case ToolEffect::plant:
      // Unparameterized seeds plant some crop the checker cannot name.
      sel = Selection{true, std::nullopt};
      return std::vector<ResourceType>{EntityType{"planted", tool.param}};
    case ToolEffect::water:
      return std::vector<ResourceType>{EntityType{"growing", target.param}};
    case ToolEffect::fish:
      return std::vector<ResourceType>{ResourceType(std::vector<EntityType>{{"fish", ""}, {"trash", ""}})};
    }
    return std::vector<ResourceType>{};
  }

  Production check_node(const Seq& s, SourcePos, const Scope& scope, Selection& sel) {
    auto first = check(*s.first, scope, sel);
    auto second = check(*s.second, scope, sel);
    if (!first) return std::nullopt;
    return second;
  }

  /// Variables of the enclosing scope that an expression touches.
  void footprint(const Expr& e, const Scope& scope, std::set<std::string>& out) {
    auto arg = [&](const Arg& a) {
      if (a.param.empty() && scope.vars.contains(a.name)) out.insert(a.name);
    };
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Prim>) {
            if (n.arg) arg(*n.arg);
          } else if constexpr (std::is_same_v<T, Seq>) {
            footprint(*n.first, scope, out);
            footprint(*n.second, scope, out);
          } else if constexpr (std::is_same_v<T, Par>) {
            footprint(*n.left, scope, out);
            footprint(*n.right, scope, out);
          } else if constexpr (std::is_same_v<T, Call>) {
            for (const auto& a : n.args) arg(a);
          } else if constexpr (std::is_same_v<T, Name>) {
            if (scope.vars.contains(n.name)) out.insert(n.name);
          } else if constexpr (std::is_same_v<T, Case>) {
            if (scope.vars.contains(n.scrutinee)) out.insert(n.scrutinee);
            for (const auto& b : n.branches) footprint(*b.body, shadowed(scope, b.binding ? b.binding->var : ""), out);
          } else if constexpr (std::is_same_v<T, DoRecv>) {
            footprint(*n.action, scope, out);
            Scope inner = scope;
            for (const auto& b : n.pattern) inner.vars.erase(b.var);
            footprint(*n.body, inner, out);
          }
        },
        e.node);
  }

  static Scope shadowed(const Scope& scope, const std::string& var) {
    Scope inner = scope;
    if (!var.empty()) inner.vars.erase(var);
    return inner;
  }

  Production check_node(const Par& p, SourcePos pos, const Scope& scope, Selection& sel) {
    std::set<std::string> left, right, shared;
    footprint(*p.left, scope, left);
    footprint(*p.right, scope, right);
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::inserter(shared, shared.end()));
    if (!shared.empty()) error(Kind::overlapping_par, *shared.begin(), pos);
    auto a = check(*p.left, scope, sel);
    auto b = check(*p.right, scope, sel);
    if (!a || !b) return std::nullopt;
    a->insert(a->end(), b->begin(), b->end());
    return a;
  }

  Production check_node(const Call& c, SourcePos pos, const Scope& scope, Selection& sel) {
    const auto* callee = find_skill(defs_, c.name);
    if (!callee) {
      error(Kind::unknown_skill, c.name, pos);
      return std::vector<ResourceType>{};
    }
    sel = Selection{false, std::nullopt};
    auto ntype = callee->type_params.size(), nparam = callee->params.size();
    std::map<std::string, std::string> inst;
    std::size_t first = 0;
    if (c.args.size() == ntype + nparam && ntype > 0) {
      for (std::size_t k = 0; k < ntype; ++k) {
        const auto& a = c.args[k];
        if (!a.param.empty() || (!scope.tvars.contains(a.name) && !sig_.crops.contains(a.name))) {
          error(Kind::type_mismatch, "expected a crop type, got " + a.str(), a.pos);
        }
        inst[callee->type_params[k].name] = a.name;
      }
      first = ntype;
    } else if (c.args.size() != nparam) {
      error(Kind::type_mismatch,
            "expected " + std::to_string(nparam) + " arguments to " + c.name + ", got " + std::to_string(c.args.size()),
            pos);
      return std::vector<ResourceType>{};
    }
    std::set<std::string> callee_tvars;
    for (const auto& b : callee->type_params) callee_tvars.insert(b.name);

    for (std::size_t k = 0; k < nparam; ++k) {
      const auto& a = c.args[first + k];
      const auto& formal = callee->params[k].type;
      ResourceType actual;
      if (a.param.empty() && scope.vars.contains(a.name)) {
        actual = scope.vars.at(a.name);
      } else if (auto t = resolve(a, scope)) {
        actual = *t;
      } else {
        continue;
      }
      if (!unify(actual, formal, callee_tvars, inst)) {
        error(Kind::type_mismatch, "expected " + instantiate(formal, inst).str() + ", got " + actual.str(), a.pos);
      }
    }
    if (!callee->returns) return std::vector<ResourceType>{};
    return std::vector<ResourceType>{instantiate(*callee->returns, inst)};
  }

  /// actual <: formal, binding the callee's type variables on the way.
  static bool unify(const ResourceType& actual, const ResourceType& formal, const std::set<std::string>& tvars,
                    std::map<std::string, std::string>& inst) {
    for (const auto& m : actual.members) {
      bool matched = false;
      for (const auto& f : formal.members) {
        if (!ctor_subtype(m.ctor, f.ctor)) continue;
        if (tvars.contains(f.param)) {
          auto [it, fresh] = inst.emplace(f.param, m.param);
          if (!fresh && it->second != m.param) continue;
          if (m.param.empty()) continue;
        } else if (f.param != m.param) {
          continue;
        }
        matched = true;
        break;
      }
      if (!matched) return false;
    }
    return true;
  }

  static ResourceType instantiate(const ResourceType& t, const std::map<std::string, std::string>& inst) {
    ResourceType out = t;
    for (auto& m : out.members) {
      if (auto it = inst.find(m.param); it != inst.end()) m.param = it->second;
    }
    return out;
  }

  Production check_node(const Name& n, SourcePos pos, const Scope& scope, Selection& sel) {
    if (auto it = scope.vars.find(n.name); it != scope.vars.end()) return std::vector<ResourceType>{it->second};
    const auto* callee = find_skill(defs_, n.name);
    if (callee && callee->params.empty() && callee->type_params.empty()) return check_node(Call{n.name, {}}, pos, scope, sel);
    error(Kind::unbound_resource, n.name, pos);
    return std::vector<ResourceType>{};
  }

  Production check_node(const Case& c, SourcePos pos, const Scope& scope, Selection& sel) {
    auto it = scope.vars.find(c.scrutinee);
    if (it == scope.vars.end()) {
      error(Kind::unbound_resource, c.scrutinee, pos);
      return std::vector<ResourceType>{};
    }
    const auto& scrutinee = it->second;
    bool has_success = false;
    for (const auto& b : c.branches) {
      if (b.kind == CaseBranch::Kind::success) has_success = true;
      if (b.kind != CaseBranch::Kind::typed) continue;
      const auto& bt = b.binding->type;
      bool relevant = std::any_of(bt.members.begin(), bt.members.end(), [&](const EntityType& m) {
        return std::any_of(scrutinee.members.begin(), scrutinee.members.end(),
                           [&](const EntityType& s) { return atom_sub(s, m) || atom_sub(m, s); });
      });
      if (!relevant) error(Kind::type_mismatch, "expected a case of " + scrutinee.str() + ", got " + bt.str(), b.pos);
    }
    if (!has_success) {
      for (const auto& m : scrutinee.members) {
        bool covered = std::any_of(c.branches.begin(), c.branches.end(), [&](const CaseBranch& b) {
          return b.kind == CaseBranch::Kind::typed && subtype(ResourceType(m), b.binding->type);
        });
        if (!covered) error(Kind::non_exhaustive_case, m.str(), pos);
      }
    }

    Production joined = std::nullopt;
    std::optional<Selection> after;
    for (const auto& b : c.branches) {
      Scope inner = scope;
      if (b.binding) inner.vars[b.binding->var] = b.binding->type;
      Selection branch_sel = sel;
      auto prod = check(*b.body, inner, branch_sel);
      after = !after || *after == branch_sel ? branch_sel : Selection{false, std::nullopt};
      if (!prod) continue;
      if (!joined) {
        joined = prod;
        continue;
      }
      joined = join(*joined, *prod, b.body->pos);
    }
    if (after) sel = *after;
    return joined;
  }

  std::vector<ResourceType> join(const std::vector<ResourceType>& a, const std::vector<ResourceType>& b, SourcePos pos) {
    auto le = [](const std::vector<ResourceType>& x, const std::vector<ResourceType>& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (!subtype(x[k], y[k])) return false;
      }
      return true;
    };
    if (le(b, a)) return a;
    if (le(a, b)) return b;
    error(Kind::type_mismatch, "expected " + show(a) + ", got " + show(b), pos);
    return a;
  }

  Production check_node(const DoRecv& d, SourcePos pos, const Scope& scope, Selection& sel) {
    auto prod = check(*d.action, scope, sel);
    if (prod) {
      if (prod->size() != d.pattern.size()) {
        std::vector<ResourceType> want;
        for (const auto& b : d.pattern) want.push_back(b.type);
        error(Kind::type_mismatch, "expected " + show(want) + ", got " + show(*prod), pos);
      } else {
        for (std::size_t k = 0; k < prod->size(); ++k) {
          if (!subtype((*prod)[k], d.pattern[k].type)) {
            error(Kind::type_mismatch, "expected " + d.pattern[k].type.str() + ", got " + (*prod)[k].str(),
                  d.pattern[k].pos);
          }
        }
      }
    }
    Scope inner = scope;
    for (const auto& b : d.pattern) {
      check_type(b.type, scope, b.pos);
      inner.vars[b.var] = b.type;
    }
    auto body = check(*d.body, inner, sel);
    if (!prod) return std::nullopt;
    return body;
  }

  Production check_node(const Fail&, SourcePos, const Scope&, Selection&) { return std::nullopt; }

  const SkillSet& defs_;
  const WorldSignature& sig_;
  std::string current_;
  std::vector<SkillTypeError> errors_;
};

} // namespace

std::vector<SkillTypeError> typecheck_skills(const SkillSet& defs, const WorldSignature& sig) {
  return Checker(defs, sig).run();
}

} // namespace intentlang::skill
