#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "intentlang/error.hpp"
#include "intentlang/farm_rules.hpp"
#include "intentlang/trace.hpp"
#include "intentlang/world.hpp"

namespace intentlang::skill {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Resource type: one atom, or a sum `crop(t) + growing(t)`. Atom parameters
/// name either a type variable bound by the enclosing skill or a concrete
/// crop type.
struct ResourceType {
  std::vector<EntityType> members;

  ResourceType() = default;
  ResourceType(EntityType atom) : members{std::move(atom)} {}
  explicit ResourceType(std::vector<EntityType> m) : members(std::move(m)) {}

  bool is_sum() const noexcept { return members.size() > 1; }
  std::string str() const;
  friend bool operator==(const ResourceType&, const ResourceType&) = default;
};

struct Binding {
  std::string var;
  ResourceType type;
  SourcePos pos;
};

using Pattern = std::vector<Binding>;

struct TypeBinder {
  std::string name;
  std::string kind = "croptype";
};

/// An argument as written: a variable, an entity reference such as `hoe`
/// or `door(shop)`, or a direction.
struct Arg {
  std::string name;
  std::string param;
  SourcePos pos;

  std::string str() const { return param.empty() ? name : name + "(" + param + ")"; }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// One core intent; `verb` is its canonical verb.
struct Prim {
  std::string verb;
  std::optional<Arg> arg;
};
struct Seq {
  ExprPtr first, second;
};
struct Par {
  ExprPtr left, right;
};
struct Call {
  std::string name;
  std::vector<Arg> args;
};
/// A bare identifier: a bound variable or a call of a nullary skill.
struct Name {
  std::string name;
};
struct CaseBranch {
  enum class Kind { typed, success, failure };
  Kind kind = Kind::typed;
  std::optional<Binding> binding;
  ExprPtr body;
  SourcePos pos;
};
struct Case {
  std::string scrutinee;
  std::vector<CaseBranch> branches;
};
struct DoRecv {
  ExprPtr action;
  Pattern pattern;
  ExprPtr body;
};
struct Fail {};

struct Expr {
  std::variant<Prim, Seq, Par, Call, Name, Case, DoRecv, Fail> node;
  SourcePos pos;
};

struct SkillDef {
  std::string name;
  std::vector<TypeBinder> type_params;
  std::vector<Binding> params;
  ExprPtr body;
  std::optional<ResourceType> returns;
  SourcePos pos;
};

using SkillSet = std::vector<SkillDef>;

const SkillDef* find_skill(const SkillSet& defs, std::string_view name);

/// Pretty-prints an expression on one line (used in diagnostics and tests).
std::string to_string(const Expr& e);

// -- parsing -----------------------------------------------------------------

class SkillSyntaxError : public Error {
public:
  SkillSyntaxError(SourcePos pos, const std::string& what)
      : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what), pos_(pos) {}
  SourcePos pos() const noexcept { return pos_; }

private:
  SourcePos pos_;
};

/// Parses `action`/`fun` definitions. Throws SkillSyntaxError on the first
/// syntax error or duplicate name.
SkillSet parse_skills(std::string_view source);

/// Parses a standalone resource type such as "crop(t) + growing(t)".
ResourceType parse_resource_type(std::string_view text);

// -- resource typing ---------------------------------------------------------

/// What the world offers the resource checker: tool rules, crop types and
/// the kind of entity behind each type constructor.
struct WorldSignature {
  FarmRules rules;
  std::set<std::string> crops;
  std::map<std::string, EntityKind> kinds;
  std::set<std::string> constructors;
};

WorldSignature signature_of(const WorldDef& world);

struct SkillTypeError {
  enum class Kind { unbound_resource, non_exhaustive_case, overlapping_par, type_mismatch, unknown_skill };
  Kind kind;
  std::string skill;
  std::string detail; // the variable, missing member, or "expected X, got Y"
  SourcePos pos;

  std::string str() const;
};

std::string_view to_string(SkillTypeError::Kind k) noexcept;

/// Checks every definition; empty result means well-typed.
std::vector<SkillTypeError> typecheck_skills(const SkillSet& defs, const WorldSignature& sig);

/// a <: b, member-wise, with growing <: planted.
bool subtype(const ResourceType& a, const ResourceType& b);

// -- interpretation ----------------------------------------------------------

struct Value {
  EntityType type;
  EntityId entity;
  friend bool operator==(const Value&, const Value&) = default;
};

struct Outcome {
  bool produced = false;
  std::map<std::string, Value> bindings; // "result", or "result_0", "result_1", ...
  std::string failed_at;                 // intent (or construct) that failed
  std::string reason;
};

/// Engine invariant violations inside the interpreter: depth limit, payload
/// not matching a pattern, bad entry arguments.
class SkillRuntimeError : public Error {
public:
  using Error::Error;
};

struct RunOptions {
  std::size_t depth_limit = 10000;
  bool par_right_first = false; // for commutativity checks
};

struct SkillRun {
  GameState state;
  Outcome outcome;
  std::vector<TraceEntry> entries; // one per primitive stepped
  std::size_t steps_of(std::string_view verb) const;
};

/// Runs `entry` (optionally `name[croptype,...]`) from state `g` with
/// resource arguments bound by variable name.
SkillRun run_skill(const GameState& g, const SkillSet& defs, std::string_view entry,
                   const std::map<std::string, EntityId>& args, const RunOptions& opts = {});

/// Same, from the world's initial state, returning a replayable trace.
struct TracedRun {
  SkillRun run;
  Trace trace;
};
TracedRun run_skill_traced(const WorldDef& world, std::uint64_t seed, const SkillSet& defs, std::string_view entry,
                           const std::map<std::string, EntityId>& args, const RunOptions& opts = {});

} // namespace intentlang::skill
