#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "intentlang/intent.hpp"
#include "intentlang/step.hpp"
#include "intentlang/world.hpp"

#ifndef INTENTLANG_SOURCE_DIR
#error "INTENTLANG_SOURCE_DIR must point at the repository root"
#endif

namespace testing_support {

inline std::string source_path(const std::string& rel) { return std::string(INTENTLANG_SOURCE_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline const intentlang::WorldDef& move_take() {
  static const auto w = intentlang::read_world_file(source_path("worlds/move-take.world"));
  return w;
}

inline const intentlang::WorldDef& farm() {
  static const auto w = intentlang::read_world_file(source_path("worlds/farm.world"));
  return w;
}

inline intentlang::EntityId E(const char* s) { return intentlang::EntityId{s}; }
inline intentlang::RoomId R(const char* s) { return intentlang::RoomId{s}; }

/// Every state reachable from the world's initial state (bounded).
inline std::vector<intentlang::GameState> reachable(const intentlang::WorldDef& w,
                                                     const intentlang::ExploreBounds& b = {}) {
  std::vector<intentlang::GameState> out;
  intentlang::explore(intentlang::initial_state(w), b,
                      [&](const intentlang::GameState& g, const intentlang::CoreIntent&, const intentlang::StepResult*,
                          const std::string&) {
                        if (out.empty() || !(out.back() == g)) out.push_back(g);
                      });
  return out;
}

/// A random well-formed intent over the state's declared names; sometimes
/// an undeclared noun.
inline intentlang::CoreIntent random_intent(const intentlang::GameState& g, std::mt19937_64& rng) {
  auto intents = intentlang::all_intents(g);
  if (rng() % 16 == 0) return intentlang::Take{intentlang::EntityId{"fnord"}};
  return intents[rng() % intents.size()];
}

} // namespace testing_support
