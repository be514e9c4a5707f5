#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "intentlang/error.hpp"
#include "intentlang/intent.hpp"
#include "intentlang/response.hpp"
#include "intentlang/typing.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

struct TraceEntry {
  std::size_t index = 0;
  CoreIntent intent;
  Response resp;
  std::string digest; // state after the step

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// A play trace: a straight-line program in the intent language together
/// with everything needed to re-run it.
struct Trace {
  std::string world_ref; // digest of the world document
  std::uint64_t seed = 0;
  std::vector<TraceEntry> entries;

  friend bool operator==(const Trace&, const Trace&) = default;
};

Trace open_trace(const WorldDef& world, std::uint64_t seed);

/// Appends the next entry for `intent` and its result.
void record(Trace& trace, const StepResult& result, const CoreIntent& intent);

// -- serialization (JSON Lines) ----------------------------------------------

class TraceFormatError : public Error {
public:
  TraceFormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

std::string print_trace(const Trace& t);
Trace parse_trace(std::string_view text);
Trace read_trace_file(const std::string& path);
void write_trace_file(const Trace& t, const std::string& path);

// -- replay ------------------------------------------------------------------

class WorldMismatch : public Error {
public:
  using Error::Error;
};

struct ReplayVerdict {
  bool exact = true;
  std::size_t at = 0; // first diverging entry
  std::string expected;
  std::string got;
};

enum class WorldCheck { require_match, ignore };

/// Re-steps every intent from the world's initial state with the trace's
/// seed. Exact iff every verdict and post-state digest matches. Throws
/// WorldMismatch when the world document differs from `t.world_ref`, unless
/// `check` is WorldCheck::ignore; then only verdicts are compared.
ReplayVerdict replay(const WorldDef& world, const Trace& t, WorldCheck check = WorldCheck::require_match);

// -- queries -----------------------------------------------------------------

class PatternError : public Error {
public:
  PatternError(std::size_t offset, const std::string& what) : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

struct PatternStep {
  bool gap = false;                   // `...`
  std::optional<std::string> verb;    // nullopt: `_`
  std::optional<std::string> arg;     // nullopt: `_` or omitted
  std::optional<Verdict> verdict;     // `=> ok` / `=> fail`

  bool matches(const TraceEntry& e) const;
};

struct TracePattern {
  std::vector<PatternStep> steps;
};

/// Steps separated by `;` (or by a `...` gap), e.g.
/// "move _ => fail ; ... ; take flask => ok". Throws PatternError.
TracePattern parse_pattern(std::string_view text);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0; // inclusive
  friend bool operator==(const Span&, const Span&) = default;
};

/// Leftmost, non-overlapping matches; gaps are lazy.
std::vector<Span> query(const Trace& t, const TracePattern& p);

// -- premise provenance ("why" queries) --------------------------------------

struct PremiseSource {
  Fact premise;
  std::optional<std::size_t> established_by; // nullopt: held initially
};

/// For a well-typed entry, the typing premises it relied on and the latest
/// earlier step that made each of them true.
std::vector<PremiseSource> explain(const WorldDef& world, const Trace& t, std::size_t index);

} // namespace intentlang
