#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intentlang/intent.hpp"
#include "intentlang/response.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

/// The game-step relation <G; intent> -> <G'; resp> as a total function.
/// Exactly one rule fires per (state, intent). Throws UndeclaredIdentifier if
/// the intent names something the world never declared.
StepResult step(const GameState& g, const CoreIntent& i);

/// step() for untrusted input: undeclared names become a failure response
/// ("take fnord") instead of an engine error.
StepResult respond(const GameState& g, const CoreIntent& i);

/// Limits for state-space exploration.
struct ExploreBounds {
  std::optional<std::uint64_t> max_day; // states past this day are not expanded
  std::size_t max_states = 200000;
};

struct UndefinedPair {
  std::string state; // digest
  std::string intent;
  std::string error;
};

struct TotalityReport {
  std::size_t states = 0;
  std::size_t pairs = 0;
  std::vector<UndefinedPair> undefined;
  bool truncated = false;

  nlohmann::json to_json() const;
};

/// Breadth-first search over the states reachable from the world's initial
/// state, stepping every well-formed intent in every state. A pair is
/// undefined when step throws, breaks a state invariant, or changes the state
/// while reporting failure.
TotalityReport check_totality(const WorldDef& world, const ExploreBounds& bounds = {});

/// Breadth-first walk of the reachable states. `visit` sees every
/// (state, intent) pair with its result, or the engine error it raised.
/// Successors are the states reached by stepping every intent in
/// all_intents().
using PairVisitor =
    std::function<void(const GameState&, const CoreIntent&, const StepResult*, const std::string& error)>;

struct Exploration {
  std::size_t states = 0;
  std::size_t pairs = 0;
  bool truncated = false;
};

Exploration explore(const GameState& initial, const ExploreBounds& bounds, const PairVisitor& visit);

/// Digest-free ordering over the dynamic fields of two states of one world.
struct StateOrder {
  bool operator()(const GameState& a, const GameState& b) const;
};

} // namespace intentlang
