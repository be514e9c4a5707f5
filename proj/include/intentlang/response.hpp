#pragma once

#include <string>
#include <vector>

#include "intentlang/farm_rules.hpp"
#include "intentlang/ids.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

enum class Verdict { success, failure };

std::string_view to_string(Verdict v) noexcept;

/// A typed resource guaranteed by a response.
struct Resource {
  EntityType type;
  EntityId entity;
  friend auto operator<=>(const Resource&, const Resource&) = default;
};

/// The game's formal reply. Failures carry no payload.
struct Response {
  Verdict verdict = Verdict::failure;
  std::vector<Resource> payload;
  std::string message;

  bool ok() const noexcept { return verdict == Verdict::success; }
  friend bool operator==(const Response&, const Response&) = default;

  static Response success(std::string message, std::vector<Resource> payload = {}) {
    return Response{Verdict::success, std::move(payload), std::move(message)};
  }
  static Response failure(std::string message) { return Response{Verdict::failure, {}, std::move(message)}; }
};

/// One application of the game-step relation. On failure `next` equals the
/// input state.
struct StepResult {
  GameState next;
  Response resp;
};

/// "ok: <message>" or "fail: <message>", payload types appended in brackets.
std::string format_response(const Response& r);

} // namespace intentlang
