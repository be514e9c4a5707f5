#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "intentlang/intent.hpp"
#include "intentlang/trace.hpp"
#include "intentlang/world.hpp"

namespace intentlang {

struct ServiceConfig {
  std::string world_dir = "worlds"; // bare world names resolve to <dir>/<name>.world
};

struct Session {
  std::string id;
  WorldDef world;
  GameState state;
  Trace trace;
  Profile profile = Profile::cli;
  std::mutex lock; // requests within a session run in arrival order
};

/// The wire protocol: one JSON request {session?, op, args} in, one
/// {ok, data | error} out. Thread-safe; sessions share nothing.
class Service {
public:
  explicit Service(ServiceConfig config = {});

  /// Never throws; every failure becomes an error response.
  nlohmann::json handle(const nlohmann::json& request);

  /// One newline-free protocol line in, one out. Malformed JSON gets a
  /// parse-error response.
  std::string handle_line(std::string_view line);

  std::size_t session_count() const;

private:
  nlohmann::json dispatch(const std::string& op, const nlohmann::json& req);
  std::shared_ptr<Session> find(const nlohmann::json& req) const;
  WorldDef resolve_world(const std::string& name) const;

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Reads protocol lines until EOF, answering each on `out`.
void serve_stream(Service& svc, std::istream& in, std::ostream& out);

/// Newline-delimited JSON over TCP, one thread per connection. Blocks.
void serve_tcp(Service& svc, const std::string& host, std::uint16_t port);

/// POST /rpc with a protocol request as the body; same JSON schema. Blocks.
void serve_http(Service& svc, const std::string& host, std::uint16_t port);

/// Splits "host:port" (host optional, default 127.0.0.1).
std::pair<std::string, std::uint16_t> parse_listen_address(std::string_view text);

} // namespace intentlang
