// intentlang: play, serve, check, run-skill and trace subcommands.
// Exit codes: 0 ok, 1 check violations or failed run, 2 usage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "intentlang/repl.hpp"
#include "intentlang/service.hpp"
#include "intentlang/skill.hpp"
#include "intentlang/step.hpp"
#include "intentlang/trace.hpp"
#include "intentlang/typing.hpp"

#ifndef INTENTLANG_WORLD_DIR
#define INTENTLANG_WORLD_DIR "worlds"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace intentlang;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violations = 1;
constexpr int exit_usage = 2;
constexpr std::uint64_t default_farm_days = 3;

struct Usage {
  std::string message;
};

/// A world argument may be a path, or a name found in the shipped worlds/.
std::string find_world(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const fs::path dir : {fs::path("worlds"), fs::path(INTENTLANG_WORLD_DIR)}) {
    for (const auto& candidate : {dir / arg, dir / (arg + ".world")}) {
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  throw Usage{"no world file '" + arg + "'"};
}

WorldDef load(const std::string& arg) {
  auto path = find_world(arg);
  try {
    return read_world_file(path);
  } catch (const WorldLoadError& e) {
    throw Usage{path + ": " + e.what()};
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage{"cannot read '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Trace load_trace(const std::string& path) {
  try {
    return parse_trace(slurp(path));
  } catch (const TraceFormatError& e) {
    throw Usage{path + ": " + e.what()};
  }
}

int cmd_check(const std::string& world_arg, bool totality, bool progress, const std::string& skills,
              std::size_t max_states, std::optional<std::uint64_t> max_day) {
  auto world = load(world_arg);
  if (int(totality) + int(progress) + int(!skills.empty()) != 1) {
    throw Usage{"check needs exactly one of --totality, --progress, --skills"};
  }
  // Farm days never stop counting; bound them unless told otherwise.
  if (!max_day && world.is_farm()) max_day = default_farm_days;
  ExploreBounds bounds{max_day, max_states};
  json report;
  bool clean = true;
  if (totality) {
    auto r = check_totality(world, bounds);
    report = r.to_json();
    clean = r.undefined.empty();
  } else if (progress) {
    auto r = check_progress(world, bounds);
    report = r.to_json();
    clean = r.violations.empty();
  } else {
    skill::SkillSet defs;
    try {
      defs = skill::parse_skills(slurp(skills));
    } catch (const skill::SkillSyntaxError& e) {
      std::cerr << skills << ":" << e.what() << "\n";
      return exit_violations;
    }
    auto errors = skill::typecheck_skills(defs, skill::signature_of(world));
    json list = json::array();
    for (const auto& e : errors) {
      list.push_back({{"kind", std::string(to_string(e.kind))},
                      {"skill", e.skill},
                      {"detail", e.detail},
                      {"line", e.pos.line},
                      {"column", e.pos.column}});
    }
    json names = json::array();
    for (const auto& d : defs) names.push_back(d.name);
    report = json{{"skills", names}, {"errors", list}};
    clean = errors.empty();
  }
  std::cout << report.dump(2) << "\n";
  return clean ? exit_ok : exit_violations;
}

int cmd_run_skill(const std::string& world_arg, const std::string& skills, const std::string& entry,
                  const std::vector<std::string>& arg_list, std::optional<std::uint64_t> seed,
                  const std::string& trace_out) {
  auto world = load(world_arg);
  skill::SkillSet defs;
  try {
    defs = skill::parse_skills(slurp(skills));
  } catch (const skill::SkillSyntaxError& e) {
    std::cerr << skills << ":" << e.what() << "\n";
    return exit_violations;
  }
  auto errors = skill::typecheck_skills(defs, skill::signature_of(world));
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << skills << ":" << e.str() << "\n";
    return exit_violations;
  }
  std::map<std::string, EntityId> args;
  for (const auto& a : arg_list) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) throw Usage{"--arg expects var=entity, got '" + a + "'"};
    args[a.substr(0, eq)] = EntityId{a.substr(eq + 1)};
  }
  auto s = seed.value_or(world.seed);
  skill::TracedRun traced;
  try {
    traced = skill::run_skill_traced(world, s, defs, entry, args);
  } catch (const skill::SkillRuntimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_violations;
  }
  const auto& outcome = traced.run.outcome;
  json out{{"produced", outcome.produced}, {"steps", traced.run.entries.size()}, {"digest", state_digest(traced.run.state)}};
  json bindings = json::object();
  for (const auto& [k, v] : outcome.bindings) bindings[k] = {v.type.str(), v.entity.str()};
  out["bindings"] = bindings;
  if (!outcome.produced) {
    out["failed_at"] = outcome.failed_at;
    out["reason"] = outcome.reason;
  }
  if (!trace_out.empty()) write_trace_file(traced.trace, trace_out);
  std::cout << out.dump(2) << "\n";
  return outcome.produced ? exit_ok : exit_violations;
}

int cmd_query(const std::string& trace_path, const std::string& pattern_text) {
  auto trace = load_trace(trace_path);
  TracePattern pattern;
  try {
    pattern = parse_pattern(pattern_text);
  } catch (const PatternError& e) {
    std::cerr << "  " << pattern_text << "\n  " << std::string(e.offset(), ' ') << "^\n"
              << "error: " << e.what() << "\n";
    return exit_usage;
  }
  for (const auto& span : query(trace, pattern)) std::cout << span.start << ".." << span.end << "\n";
  return exit_ok;
}

int cmd_replay(const std::string& trace_path, const std::string& world_arg, bool any_world) {
  auto world = load(world_arg);
  auto trace = load_trace(trace_path);
  ReplayVerdict v;
  try {
    v = replay(world, trace, any_world ? WorldCheck::ignore : WorldCheck::require_match);
  } catch (const WorldMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_violations;
  }
  if (v.exact) {
    std::cout << "exact (" << trace.entries.size() << " steps)\n";
    return exit_ok;
  }
  std::cout << "diverged at " << v.at << ": expected " << v.expected << ", got " << v.got << "\n";
  return exit_violations;
}

int cmd_why(const std::string& trace_path, const std::string& world_arg, std::size_t index) {
  auto world = load(world_arg);
  auto trace = load_trace(trace_path);
  std::vector<PremiseSource> sources;
  try {
    sources = explain(world, trace, index);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_violations;
  }
  for (const auto& s : sources) {
    std::cout << to_string(s.premise) << ": "
              << (s.established_by ? "step " + std::to_string(*s.established_by) : std::string("initially")) << "\n";
  }
  return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Player intents, traces and skills over text-adventure and farm worlds"};
  app.require_subcommand(1);

  std::string world, profile_name, skills, entry, trace_path, pattern, save, trace_out, listen, world_dir = "worlds";
  std::optional<std::uint64_t> seed, max_day;
  std::vector<std::string> arg_list;
  bool totality = false, progress = false, http = false, any_world = false;
  std::size_t max_states = 200000, index = 0;

  auto* play = app.add_subcommand("play", "Interactive session in one interface mode");
  play->add_option("--world", world, "World file or shipped world name")->required();
  play->add_option("--profile", profile_name, "cli | wasd | birdseye | hypertext | farm");
  play->add_option("--seed", seed, "RNG seed (default: the world's)");
  play->add_option("--save", save, "Write the trace here on exit");

  auto* serve = app.add_subcommand("serve", "Run the JSON protocol service");
  serve->add_option("--world-dir", world_dir, "Where bare world names are looked up");
  serve->add_option("--listen", listen, "host:port (default: stdin/stdout)");
  serve->add_flag("--http", http, "Serve POST /rpc over HTTP instead of raw TCP");

  auto* check = app.add_subcommand("check", "Exhaustive totality/progress check, or skill typecheck");
  check->add_option("--world", world, "World file or shipped world name")->required();
  check->add_flag("--totality", totality);
  check->add_flag("--progress", progress);
  check->add_option("--skills", skills, "Typecheck this skill file against the world");
  check->add_option("--max-states", max_states);
  check->add_option("--max-day", max_day, "Do not expand states past this day (farm default: 3)");

  auto* run = app.add_subcommand("run-skill", "Run a skill from the world's initial state");
  run->add_option("--world", world)->required();
  run->add_option("--skills", skills)->required();
  run->add_option("--entry", entry, "Skill name, optionally with type arguments: grow_crop[parsnip]")->required();
  run->add_option("--arg", arg_list, "var=entity (repeatable)");
  run->add_option("--seed", seed);
  run->add_option("--trace", trace_out, "Write the run's trace here");

  auto* trace = app.add_subcommand("trace", "Query, replay or explain a recorded trace");
  trace->require_subcommand(1);
  auto* tq = trace->add_subcommand("query", "Print matching spans, one per line");
  tq->add_option("file", trace_path)->required();
  tq->add_option("pattern", pattern)->required();
  auto* tr = trace->add_subcommand("replay", "Re-run a trace and compare");
  tr->add_option("file", trace_path)->required();
  tr->add_option("--world", world)->required();
  tr->add_flag("--any-world", any_world, "Skip the world digest check");
  auto* tw = trace->add_subcommand("why", "Which steps established an entry's typing premises");
  tw->add_option("file", trace_path)->required();
  tw->add_option("index", index)->required();
  tw->add_option("--world", world)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*play) {
      auto w = load(world);
      auto p = profile_name.empty() ? (w.is_farm() ? Profile::farm : Profile::cli) : parse_profile(profile_name).value_or(Profile::cli);
      if (!profile_name.empty() && !parse_profile(profile_name)) throw Usage{"unknown profile '" + profile_name + "'"};
      auto t = repl(w, p, seed.value_or(w.seed), std::cin, std::cout);
      if (!save.empty()) write_trace_file(t, save);
      return exit_ok;
    }
    if (*serve) {
      Service svc(ServiceConfig{world_dir});
      if (listen.empty()) {
        if (http) throw Usage{"--http needs --listen"};
        serve_stream(svc, std::cin, std::cout);
        return exit_ok;
      }
      auto [host, port] = parse_listen_address(listen);
      std::cerr << "listening on " << host << ":" << port << (http ? " (http)" : "") << "\n";
      if (http) serve_http(svc, host, port);
      else serve_tcp(svc, host, port);
      return exit_ok;
    }
    if (*check) return cmd_check(world, totality, progress, skills, max_states, max_day);
    if (*run) return cmd_run_skill(world, skills, entry, arg_list, seed, trace_out);
    if (*tq) return cmd_query(trace_path, pattern);
    if (*tr) return cmd_replay(trace_path, world, any_world);
    if (*tw) return cmd_why(trace_path, world, index);
  } catch (const Usage& u) {
    std::cerr << "error: " << u.message << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
