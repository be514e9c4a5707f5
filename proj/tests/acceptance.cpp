// Runs every headline criterion once and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "intentlang/skill.hpp"
#include "intentlang/step.hpp"
#include "intentlang/trace.hpp"
#include "intentlang/typing.hpp"
#include "support.hpp"

using namespace intentlang;
using testing_support::E;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

const skill::SkillSet& skills(const char* file) {
  static std::map<std::string, skill::SkillSet> cache;
  auto it = cache.find(file);
  if (it == cache.end()) {
    auto text = testing_support::slurp(testing_support::source_path(std::string("skills/") + file));
    it = cache.emplace(file, skill::parse_skills(text)).first;
  }
  return it->second;
}

const std::map<std::string, EntityId> grow_args{{"s", E("plot_1")}, {"w", E("can_1")}};

// -- criteria ----------------------------------------------------------------

void paper_trace(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  const auto& w = testing_support::move_take();
  auto g = initial_state(w);
  auto trace = open_trace(w, w.seed);
  for (const char* line : {"go north", "take flask", "go south"}) {
    auto i = std::get<CoreIntent>(parse_command_line(line));
    auto r = respond(g, i);
    record(trace, r, i);
    g = r.next;
  }
  auto elapsed = seconds_since(t0);
  std::vector<Verdict> verdicts;
  for (const auto& e : trace.entries) verdicts.push_back(e.resp.verdict);
  c.expect(verdicts == std::vector<Verdict>{Verdict::failure, Verdict::success, Verdict::success},
           "verdicts differ from failure, success, success");
  c.expect(elapsed < 0.1, "took " + fmt(elapsed));
  c.why << "verdicts failure/success/success in " << fmt(elapsed);
}

void totality(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto r = check_totality(testing_support::move_take());
  auto elapsed = seconds_since(t0);
  c.expect(r.states == 16, std::to_string(r.states) + " states; ");
  c.expect(r.pairs == 16 * all_intents(initial_state(testing_support::move_take())).size(), "pairs missed; ");
  c.expect(r.undefined.empty(), std::to_string(r.undefined.size()) + " undefined; ");
  c.expect(!r.truncated, "truncated; ");
  c.expect(elapsed < 1.0, "took " + fmt(elapsed) + "; ");
  c.why << r.states << " states, " << r.pairs << " pairs, " << r.undefined.size() << " undefined in " << fmt(elapsed);
}

void progress(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto r = check_progress(testing_support::move_take());
  auto elapsed = seconds_since(t0);
  c.expect(r.violations.empty(), std::to_string(r.violations.size()) + " violations; ");
  c.expect(!r.truncated && r.states == 16, "not exhaustive; ");
  c.expect(elapsed < 1.0, "took " + fmt(elapsed) + "; ");
  c.why << r.checked << " well-typed pairs, " << r.violations.size() << " violations in " << fmt(elapsed);
}

void enumeration(Check& c) {
  auto states = testing_support::reachable(testing_support::move_take());
  c.expect(states.size() == 16, std::to_string(states.size()) + " states; ");
  std::size_t mismatched = 0;
  for (const auto& g : states) {
    std::set<std::string> offered, typed;
    for (const auto& ch : enumerate_choices(g)) offered.insert(to_string(ch.intent));
    auto gamma = abstract(g);
    for (const auto& i : profile_intents(g)) {
      if (typecheck(gamma, i).ok) typed.insert(to_string(i));
    }
    if (offered != typed) ++mismatched;
  }
  c.expect(mismatched == 0, std::to_string(mismatched) + " states differ; ");
  c.why << states.size() << " states, " << mismatched << " mismatches";
}

void skill_execution(Check& c) {
  const auto& w = testing_support::farm();
  auto sig = skill::signature_of(w);
  for (const char* file : {"basic.skill", "farm.skill"}) {
    auto errs = skill::typecheck_skills(skills(file), sig);
    c.expect(errs.empty(), std::string(file) + ": " + (errs.empty() ? "" : errs.front().str()) + "; ");
  }
  auto g0 = initial_state(w, 42);
  for (const char* name : {"till", "plant", "mine", "talk"}) {
    auto r = skill::run_skill(g0, skills("basic.skill"), name, {});
    c.expect(r.outcome.produced, std::string(name) + " failed; ");
  }
  auto town = step(g0, MoveOffscreen{Direction::east}).next;
  c.expect(skill::run_skill(town, skills("basic.skill"), "enter_shop", {}).outcome.produced, "enter_shop failed; ");
  auto mine = skill::run_skill(g0, skills("farm.skill"), "mine", {{"p", E("pickaxe_1")}, {"r", E("rock_1")}});
  c.expect(mine.outcome.produced, "mine(p, r) failed; ");

  auto planted = g0;
  for (const CoreIntent& i : {CoreIntent(Select{E("hoe")}), CoreIntent(Apply{E("plot_2")}),
                              CoreIntent(Select{E("parsnip_seeds_2")}), CoreIntent(Apply{E("plot_2")})}) {
    planted = step(planted, i).next;
  }
  auto loop = skill::run_skill(planted, skills("farm.skill"), "water_until_harvestable[parsnip]", {{"p", E("plot_2")}});
  c.expect(loop.outcome.produced, "water_until_harvestable failed; ");

  auto grow = skill::run_skill(g0, skills("farm.skill"), "grow_crop[parsnip]", grow_args);
  auto again = skill::run_skill(g0, skills("farm.skill"), "grow_crop[parsnip]", grow_args);
  auto waits = grow.steps_of("wait");
  std::string produced = grow.outcome.produced ? grow.outcome.bindings.at("result").type.str() : "nothing";
  c.expect(produced == "crop(parsnip)", "grow_crop produced " + produced + "; ");
  c.expect(waits == 4, std::to_string(waits) + " waits; ");
  c.expect(state_digest(grow.state) == state_digest(again.state) && grow.entries == again.entries,
           "second run differs; ");
  c.why << "grow_crop[parsnip] -> " << produced << " after " << waits << " waits";
}

void failure_threading(Check& c) {
  auto doc = testing_support::farm().document;
  nlohmann::json kept = nlohmann::json::array();
  for (const auto& e : doc["entities"]) {
    if (e.value("type", "") != "rock") kept.push_back(e);
  }
  doc["entities"] = kept;
  auto g = initial_state(parse_world(doc), 42);
  auto r = skill::run_skill(g, skills("basic.skill"), "mine", {});
  auto pre_failure = step(g, Select{E("pickaxe_1")}).next;
  c.expect(!r.outcome.produced, "mine produced; ");
  c.expect(r.outcome.failed_at.rfind("move_near", 0) == 0, "failed at '" + r.outcome.failed_at + "'; ");
  c.expect(state_digest(r.state) == state_digest(pre_failure), "digest changed; ");
  c.why << "Failed(at " << r.outcome.failed_at << "), digest unchanged";
}

GameState configuration(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto g = initial_state(testing_support::farm(), seed);
  for (auto k = rng() % 4; k > 0; --k) g = step(g, Wait{}).next;
  static const Direction exits[] = {Direction::east, Direction::south, Direction::west};
  if (auto pick = rng() % 4; pick < 3) g = step(g, MoveOffscreen{exits[pick]}).next;
  if (rng() % 2) g = step(g, Select{E("rod_1")}).next;
  return g;
}

void par_commutativity(Check& c) {
  std::size_t same = 0, produced = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto g = configuration(seed);
    auto left = skill::run_skill(g, skills("farm.skill"), "grow_crop[parsnip]", grow_args);
    auto right = skill::run_skill(g, skills("farm.skill"), "grow_crop[parsnip]", grow_args, {10000, true});
    if (state_digest(left.state) == state_digest(right.state)) ++same;
    if (left.outcome.produced && right.outcome.produced) ++produced;
  }
  c.expect(same == 100, std::to_string(100 - same) + " configurations differ; ");
  c.expect(produced == 100, std::to_string(100 - produced) + " runs failed; ");
  c.why << same << "/100 identical digests";
}

Trace random_session(const WorldDef& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto g = initial_state(w, seed);
  auto trace = open_trace(w, seed);
  auto take = [&](const CoreIntent& i) {
    auto r = respond(g, i);
    record(trace, r, i);
    g = std::move(r.next);
  };
  if (w.is_farm()) {
    take(Select{E("rod_1")});
    take(MoveOffscreen{Direction::south});
  }
  for (int k = 0; k < 60; ++k) {
    if (w.is_farm() && rng() % 4 == 0) take(Apply{E("pond_1")});
    else take(testing_support::random_intent(g, rng));
  }
  return trace;
}

/// Re-steps a trace's intents and prints the re-recorded trace.
std::string rerecord(const WorldDef& w, const Trace& t) {
  auto g = initial_state(w, t.seed);
  auto out = open_trace(w, t.seed);
  for (const auto& e : t.entries) {
    auto r = respond(g, e.intent);
    record(out, r, e.intent);
    g = std::move(r.next);
  }
  return print_trace(out);
}

void replay_determinism(Check& c) {
  std::size_t exact = 0, identical = 0, sessions = 0, casts = 0;
  for (const auto* w : {&testing_support::move_take(), &testing_support::farm()}) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      ++sessions;
      auto t = random_session(*w, seed);
      if (replay(*w, t).exact) ++exact;
      if (rerecord(*w, t) == print_trace(t)) ++identical;
      for (const auto& e : t.entries) {
        if (!e.resp.payload.empty() && (e.resp.payload[0].type.ctor == "fish" || e.resp.payload[0].type.ctor == "trash")) {
          ++casts;
        }
      }
    }
  }
  c.expect(exact == sessions, std::to_string(sessions - exact) + " inexact replays; ");
  c.expect(identical == sessions, std::to_string(sessions - identical) + " re-recordings differ; ");
  c.expect(casts > 0, "no fishing happened; ");
  c.why << exact << "/" << sessions << " exact, " << casts << " casts byte-identical";
}

void fishing_statistics(Check& c) {
  auto g = initial_state(testing_support::farm(), 42);
  g = step(g, Select{E("rod_1")}).next;
  g = step(g, MoveOffscreen{Direction::south}).next;
  std::size_t fish = 0;
  for (int k = 0; k < 10000; ++k) {
    auto r = step(g, Apply{E("pond_1")});
    if (r.resp.payload.at(0).type.ctor == "fish") ++fish;
    g.rng = r.next.rng;
  }
  auto off = fish > 5000 ? fish - 5000 : 5000 - fish;
  c.expect(off <= 200, "off by " + std::to_string(off) + "; ");
  c.why << fish << " fish in 10000 casts";
}

} // namespace

int main() {
  const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
      {"paper trace reproduction", paper_trace},
      {"totality", totality},
      {"progress", progress},
      {"enumeration equals typing", enumeration},
      {"skill execution", skill_execution},
      {"failure threading", failure_threading},
      {"par commutativity", par_commutativity},
      {"replay determinism", replay_determinism},
      {"fishing statistics", fishing_statistics},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.why << " threw: " << e.what();
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << ": " << c.why.str() << std::endl;
    failed += c.ok ? 0 : 1;
  }
  return failed;
}
