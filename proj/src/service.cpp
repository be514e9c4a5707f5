#include "intentlang/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <istream>
#include <ostream>
#include <thread>

#include <httplib.h>

#include "intentlang/skill.hpp"
#include "intentlang/step.hpp"
#include "intentlang/typing.hpp"

namespace intentlang {

using json = nlohmann::json;

namespace {

/// Request-level failure: becomes {ok: false, error}.
struct RequestError {
  std::string message;
};

json error_response(const std::string& message) { return json{{"ok", false}, {"error", message}}; }

template <typename T>
T arg_or(const json& args, const char* key, T fallback) {
  if (!args.is_object() || !args.contains(key)) return fallback;
  try {
    return args.at(key).get<T>();
  } catch (const json::exception&) {
    throw RequestError{std::string("argument '") + key + "' has the wrong type"};
  }
}

std::string required_string(const json& args, const char* key) {
  if (!args.is_object() || !args.contains(key) || !args.at(key).is_string()) {
    throw RequestError{std::string("missing string argument '") + key + "'"};
  }
  return args.at(key).get<std::string>();
}

json payload_json(const Response& r) {
  json out = json::array();
  for (const auto& res : r.payload) out.push_back({res.type.str(), res.entity.str()});
  return out;
}

json state_summary(const Session& s) {
  return json{{"session", s.id},
              {"profile", std::string(to_string(s.profile))},
              {"digest", state_digest(s.state)},
              {"state", state_to_json(s.state)},
              {"steps", s.trace.entries.size()}};
}

json rejected(const std::string& message) {
  return json{{"verdict", "failure"}, {"message", message}, {"recorded", false}};
}

bool restricted(Profile p) { return p == Profile::hypertext || p == Profile::birdseye; }

json do_step(Session& s, const CoreIntent& intent) {
  if (restricted(s.profile) && !typecheck(abstract(s.state), intent).ok) {
    return rejected("That isn't available right now.");
  }
  auto result = respond(s.state, intent);
  record(s.trace, result, intent);
  s.state = std::move(result.next);
  const auto& e = s.trace.entries.back();
  return json{{"index", e.index},
              {"intent", to_string(intent)},
              {"verdict", std::string(to_string(e.resp.verdict))},
              {"message", e.resp.message},
              {"payload", payload_json(e.resp)},
              {"response", format_response(e.resp)},
              {"digest", e.digest},
              {"recorded", true}};
}

json step_op(Session& s, const json& args) {
  if (args.contains("intent")) {
    auto parsed = parse_command_line(required_string(args, "intent"));
    if (const auto* err = std::get_if<ParseError>(&parsed)) {
      return json{{"verdict", "failure"},
                  {"message", err->message},
                  {"parse_error", {{"kind", std::string(to_string(err->kind))}, {"offset", err->offset}}},
                  {"recorded", false}};
    }
    return do_step(s, std::get<CoreIntent>(parsed));
  }
  if (args.contains("choice")) {
    auto id = required_string(args, "choice");
    for (const auto& c : enumerate_choices(s.state)) {
      if (c.id == id) return do_step(s, c.intent);
    }
    return rejected("No choice '" + id + "' here.");
  }
  if (args.contains("click")) {
    auto target = required_string(args, "click");
    std::variant<CoreIntent, ClickRejected> r;
    try {
      r = elaborate_click(s.state, target);
    } catch (const UndeclaredIdentifier&) {
      throw RequestError{"unknown click target '" + target + "'"};
    }
    if (const auto* rej = std::get_if<ClickRejected>(&r)) {
      bool no_op = rej->reason == ClickRejected::Reason::no_op;
      auto out = rejected(no_op ? "You are already there." : "That is out of range.");
      out["rejected"] = no_op ? "no_op" : "out_of_range";
      return out;
    }
    return do_step(s, std::get<CoreIntent>(r));
  }
  if (args.contains("key")) {
    auto key = required_string(args, "key");
    auto r = map_key(key);
    if (std::holds_alternative<Unbound>(r)) return rejected("Key '" + key + "' does nothing.");
    return do_step(s, std::get<CoreIntent>(r));
  }
  throw RequestError{"step needs one of 'intent', 'choice', 'click' or 'key'"};
}

json run_skill_op(Session& s, const json& args) {
  auto source = required_string(args, "source");
  auto entry = required_string(args, "entry");
  skill::SkillSet defs;
  try {
    defs = skill::parse_skills(source);
  } catch (const skill::SkillSyntaxError& e) {
    throw RequestError{std::string("syntax error: ") + e.what()};
  }
  auto errors = skill::typecheck_skills(defs, skill::signature_of(s.world));
  if (!errors.empty()) {
    json list = json::array();
    for (const auto& e : errors) list.push_back(e.str());
    throw RequestError{"skills do not typecheck: " + list.dump()};
  }
  std::map<std::string, EntityId> bound;
  if (args.contains("args")) {
    if (!args.at("args").is_object()) throw RequestError{"'args' must be an object"};
    for (const auto& [var, ent] : args.at("args").items()) {
      if (!ent.is_string()) throw RequestError{"argument '" + var + "' must name an entity"};
      bound[var] = EntityId{ent.get<std::string>()};
    }
  }
  skill::SkillRun run;
  try {
    run = skill::run_skill(s.state, defs, entry, bound);
  } catch (const skill::SkillRuntimeError& e) {
    throw RequestError{std::string("skill error: ") + e.what()};
  }
  auto first = s.trace.entries.size();
  for (auto e : run.entries) {
    e.index = s.trace.entries.size();
    s.trace.entries.push_back(std::move(e));
  }
  s.state = std::move(run.state);
  json bindings = json::object();
  for (const auto& [k, v] : run.outcome.bindings) bindings[k] = {v.type.str(), v.entity.str()};
  json out{{"produced", run.outcome.produced},
           {"bindings", bindings},
           {"steps", run.entries.size()},
           {"first_index", first},
           {"digest", state_digest(s.state)}};
  if (!run.outcome.produced) {
    out["failed_at"] = run.outcome.failed_at;
    out["reason"] = run.outcome.reason;
  }
  return out;
}

} // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

std::size_t Service::session_count() const {
  std::lock_guard guard(mu_);
  return sessions_.size();
}

WorldDef Service::resolve_world(const std::string& name) const {
  std::filesystem::path p(name);
  if (!p.has_parent_path() && p.extension() != ".world") p = std::filesystem::path(config_.world_dir) / (name + ".world");
  if (!std::filesystem::exists(p)) throw RequestError{"no world '" + name + "'"};
  try {
    return read_world_file(p.string());
  } catch (const Error& e) {
    throw RequestError{std::string("cannot load world '") + name + "': " + e.what()};
  }
}

std::shared_ptr<Session> Service::find(const json& req) const {
  if (!req.contains("session") || !req.at("session").is_string()) throw RequestError{"missing 'session'"};
  auto id = req.at("session").get<std::string>();
  std::lock_guard guard(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw RequestError{"no session '" + id + "'"};
  return it->second;
}

json Service::dispatch(const std::string& op, const json& req) {
  const json args = req.contains("args") && !req.at("args").is_null() ? req.at("args") : json::object();
  if (!args.is_object()) throw RequestError{"'args' must be an object"};

  if (op == "new_session") {
    auto world = resolve_world(required_string(args, "world"));
    auto profile_name = arg_or<std::string>(args, "profile", world.is_farm() ? "farm" : "cli");
    auto profile = parse_profile(profile_name);
    if (!profile) throw RequestError{"unknown profile '" + profile_name + "'"};
    auto seed = arg_or<std::uint64_t>(args, "seed", world.seed);
    auto s = std::make_shared<Session>();
    s->profile = *profile;
    s->state = initial_state(world, seed);
    s->trace = open_trace(world, seed);
    s->world = std::move(world);
    {
      std::lock_guard guard(mu_);
      s->id = "s" + std::to_string(next_id_++);
      sessions_[s->id] = s;
    }
    std::lock_guard guard(s->lock);
    return state_summary(*s);
  }

  if (op == "close_session") {
    auto s = find(req);
    std::lock_guard guard(mu_);
    sessions_.erase(s->id);
    return json{{"closed", s->id}};
  }

  static const std::set<std::string> session_ops = {"get_state", "list_intents", "step", "run_skill", "get_trace"};
  if (!session_ops.contains(op)) throw RequestError{"unknown op '" + op + "'"};

  auto s = find(req);
  std::lock_guard guard(s->lock);
  if (op == "get_state") return state_summary(*s);
  if (op == "list_intents") {
    json choices = json::array();
    for (const auto& c : enumerate_choices(s->state)) choices.push_back({{"id", c.id}, {"label", c.label}});
    return json{{"choices", choices}};
  }
  if (op == "step") return step_op(*s, args);
  if (op == "run_skill") return run_skill_op(*s, args);
  return json{{"jsonl", print_trace(s->trace)}, {"steps", s->trace.entries.size()}};
}

json Service::handle(const json& request) {
  json response;
  try {
    if (!request.is_object()) throw RequestError{"request must be a JSON object"};
    if (!request.contains("op") || !request.at("op").is_string()) throw RequestError{"missing 'op'"};
    response = json{{"ok", true}, {"data", dispatch(request.at("op").get<std::string>(), request)}};
  } catch (const RequestError& e) {
    response = error_response(e.message);
  } catch (const std::exception& e) {
    response = error_response(std::string("internal error: ") + e.what());
  }
  if (request.is_object() && request.contains("id")) response["id"] = request.at("id");
  return response;
}

std::string Service::handle_line(std::string_view line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    return error_response(std::string("parse error: ") + e.what()).dump();
  }
  return handle(request).dump();
}

void serve_stream(Service& svc, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << svc.handle_line(line) << '\n' << std::flush;
  }
}

std::pair<std::string, std::uint16_t> parse_listen_address(std::string_view text) {
  std::string host = "127.0.0.1";
  auto colon = text.rfind(':');
  std::string_view port_text = text;
  if (colon != std::string_view::npos) {
    if (colon > 0) host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  if (port_text.empty() || port_text.size() > 5 ||
      port_text.find_first_not_of("0123456789") != std::string_view::npos) {
    throw Error("bad listen address '" + std::string(text) + "'");
  }
  auto port = std::stoul(std::string(port_text));
  if (port > 65535) throw Error("bad port in '" + std::string(text) + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

namespace {

void serve_connection(Service& svc, int fd) {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    auto n = ::read(fd, chunk, sizeof chunk);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      auto line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto reply = svc.handle_line(line) + "\n";
      std::size_t sent = 0;
      while (sent < reply.size()) {
        auto w = ::write(fd, reply.data() + sent, reply.size() - sent);
        if (w <= 0) {
          ::close(fd);
          return;
        }
        sent += static_cast<std::size_t>(w);
      }
    }
  }
  ::close(fd);
}

} // namespace

void serve_tcp(Service& svc, const std::string& host, std::uint16_t port) {
  int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) throw Error("cannot create socket");
  int yes = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw Error("bad IPv4 address '" + host + "'");
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(server, 16) != 0) {
    ::close(server);
    throw Error("cannot listen on " + host + ":" + std::to_string(port));
  }
  for (;;) {
    int fd = ::accept(server, nullptr, nullptr);
    if (fd < 0) continue;
    std::thread([&svc, fd] { serve_connection(svc, fd); }).detach();
  }
}

void serve_http(Service& svc, const std::string& host, std::uint16_t port) {
  httplib::Server server;
  auto cors = [](httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  };
  server.Options("/rpc", [&](const httplib::Request&, httplib::Response& res) { cors(res); });
  server.Post("/rpc", [&](const httplib::Request& req, httplib::Response& res) {
    cors(res);
    res.set_content(svc.handle_line(req.body), "application/json");
  });
  if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

} // namespace intentlang
