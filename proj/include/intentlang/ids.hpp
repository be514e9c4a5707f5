#pragma once

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace intentlang {

/// Tagged string identifier. Rooms and entities share the representation but
/// not the type.
template <typename Tag>
class StrongId {
public:
  StrongId() = default;
  explicit StrongId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const StrongId&, const StrongId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const StrongId& id) { return os << id.value_; }

private:
  std::string value_;
};

struct RoomTag {};
struct EntityTag {};
using RoomId = StrongId<RoomTag>;
using EntityId = StrongId<EntityTag>;

enum class Direction { north, south, east, west };

inline constexpr Direction all_directions[] = {Direction::north, Direction::south, Direction::east,
                                               Direction::west};

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> parse_direction(std::string_view text) noexcept;

/// `[a-z_][a-z0-9_]*`
bool is_identifier(std::string_view text) noexcept;

} // namespace intentlang

template <typename Tag>
struct std::hash<intentlang::StrongId<Tag>> {
  size_t operator()(const intentlang::StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
