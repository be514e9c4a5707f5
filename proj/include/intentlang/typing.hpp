#pragma once

#include <functional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentlang/intent.hpp"
#include "intentlang/step.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

// Farm-world facts. An empty id in a fact reported as a missing premise
// stands for "some value" and prints as `_`.
struct FarmWorld {
  friend auto operator<=>(const FarmWorld&, const FarmWorld&) = default;
};
struct ToolRuleFact {
  std::string tool;
  std::string target;
  friend auto operator<=>(const ToolRuleFact&, const ToolRuleFact&) = default;
};
struct Selected {
  EntityId entity;
  friend auto operator<=>(const Selected&, const Selected&) = default;
};
struct Typed {
  EntityId entity;
  EntityType type;
  friend auto operator<=>(const Typed&, const Typed&) = default;
};
struct KindOf {
  EntityId entity;
  EntityKind kind;
  friend auto operator<=>(const KindOf&, const KindOf&) = default;
};
/// Only ever reported as missing: the entity answers `inquire`.
struct Inquirable {
  EntityId entity;
  friend auto operator<=>(const Inquirable&, const Inquirable&) = default;
};
/// Only ever reported as missing: the entity is in reach of `move_near`.
struct Reachable {
  EntityId entity;
  friend auto operator<=>(const Reachable&, const Reachable&) = default;
};

using Fact = std::variant<PlayerIn, At, HoldsItem, Adjacent, FarmWorld, ToolRuleFact, Selected, Typed, KindOf,
                          Inquirable, Reachable>;

std::string to_string(const Fact& f);

/// Gamma: static facts (exits, tool rules) never change during play;
/// fluents describe where things are.
struct Context {
  std::set<Fact> statics;
  std::set<Fact> fluents;

  bool contains(const Fact& f) const { return statics.contains(f) || fluents.contains(f); }
  friend bool operator==(const Context&, const Context&) = default;
};

/// Description of the first violated Context invariant, if any.
std::optional<std::string> find_context_violation(const Context& ctx);

/// Canonical, full-precision abstraction of a state: G : abstract(G).
Context abstract(const GameState& g);

/// Gamma |- intent ok. `premises` lists the facts the rule used when ok,
/// or the first unsatisfied premise when not.
struct TypingVerdict {
  bool ok = false;
  std::string rule;
  std::vector<Fact> premises;

  static TypingVerdict accept(std::string rule, std::vector<Fact> used) { return {true, std::move(rule), std::move(used)}; }
  static TypingVerdict reject(std::string rule, Fact missing) { return {false, std::move(rule), {std::move(missing)}}; }
};

TypingVerdict typecheck(const Context& ctx, const CoreIntent& i);

/// Gamma ⊆ Gamma': static facts preserved exactly and Gamma' well formed.
bool context_succeeds(const Context& before, const Context& after);

using Typechecker = std::function<TypingVerdict(const Context&, const CoreIntent&)>;

struct ProgressViolation {
  std::string state; // digest
  std::string intent;
  std::string kind; // engine_error | context | failure
  std::string detail;
};

struct ProgressReport {
  std::size_t states = 0;
  std::size_t pairs = 0;   // all (state, intent) pairs visited
  std::size_t checked = 0; // well-typed pairs
  std::vector<ProgressViolation> violations;
  bool truncated = false;

  nlohmann::json to_json() const;
};

/// Every well-typed intent in every reachable state must step without an
/// engine error, to a succeeding context, with a success verdict.
ProgressReport check_progress(const WorldDef& world, const ExploreBounds& bounds = {},
                              const Typechecker& checker = typecheck);

// -- hypertext choices -------------------------------------------------------

struct Choice {
  std::string id;    // <verb>_<args>_from_<room>
  std::string label; // command-line form
  CoreIntent intent;
  friend bool operator==(const Choice&, const Choice&) = default;
};

std::string choice_id(const CoreIntent& i, const RoomId& room);

/// Well-typed intents of the world's profile, ordered by id.
std::vector<Choice> enumerate_choices(const GameState& g);

} // namespace intentlang
