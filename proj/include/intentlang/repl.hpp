#pragma once

#include <cstdint>
#include <iosfwd>

#include "intentlang/intent.hpp"
#include "intentlang/trace.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

/// Interactive loop in one interface mode. Input is line-based in every mode:
/// cli/farm read commands, hypertext reads a choice number, wasd reads key
/// names, birdseye reads click targets. Meta-commands: `:quit`, `:trace`,
/// `:save <file>`. Returns the session's trace.
Trace repl(const WorldDef& world, Profile profile, std::uint64_t seed, std::istream& in, std::ostream& out);

} // namespace intentlang
