#pragma once

#include "intentlang/intent.hpp"
#include "intentlang/response.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

/// Rule table for the farm verbs (select, apply, inquire, move_near,
/// move_offscreen, wait). Requires g.is_farm(); otherwise every verb fails.
StepResult step_farm(const GameState& g, const CoreIntent& i);

/// Ends the day: crops watered today grow by one day, watering resets.
GameState advance_day(const GameState& g);

/// Casts the selected rod into water in the player's room. Consumes exactly
/// one RNG draw when it succeeds.
StepResult try_fish(const GameState& g);

} // namespace intentlang
