#include <gtest/gtest.h>

#include <random>

#include "intentlang/skill.hpp"
#include "support.hpp"

using namespace intentlang;
using namespace intentlang::skill;
using testing_support::E;
using testing_support::R;

namespace {

std::string skill_source(const char* name) { return testing_support::slurp(testing_support::source_path(std::string("skills/") + name)); }

const SkillSet& farm_skills() {
  static const auto s = parse_skills(skill_source("farm.skill"));
  return s;
}

const SkillSet& basic_skills() {
  static const auto s = parse_skills(skill_source("basic.skill"));
  return s;
}

const WorldSignature& farm_sig() {
  static const auto s = signature_of(testing_support::farm());
  return s;
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

std::vector<SkillTypeError> errors_of(const std::string& source) {
  return typecheck_skills(parse_skills(source), farm_sig());
}

GameState step_all(GameState g, std::initializer_list<CoreIntent> intents) {
  for (const auto& i : intents) {
    auto r = step(g, i);
    EXPECT_TRUE(r.resp.ok()) << to_string(i) << ": " << r.resp.message;
    g = std::move(r.next);
  }
  return g;
}

WorldDef without_rocks() {
  auto doc = testing_support::farm().document;
  auto& es = doc["entities"];
  nlohmann::json kept = nlohmann::json::array();
  for (const auto& e : es) {
    if (e.value("type", "") != "rock") kept.push_back(e);
  }
  es = kept;
  return parse_world(doc);
}

const std::map<std::string, EntityId> grow_args{{"s", E("plot_1")}, {"w", E("can_1")}};

/// A farm state reached by a short, seeded, feasible preamble: some days
/// pass and the player may stand in any room next to the farm.
GameState configuration(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto g = initial_state(testing_support::farm(), seed);
  for (auto k = rng() % 4; k > 0; --k) g = step(g, Wait{}).next;
  static const Direction exits[] = {Direction::east, Direction::south, Direction::west};
  if (auto pick = rng() % 4; pick < 3) g = step(g, MoveOffscreen{exits[pick]}).next;
  if (rng() % 2) g = step(g, Select{E("rod_1")}).next;
  return g;
}

} // namespace

// -- parsing -----------------------------------------------------------------

TEST(SkillParse, OneLiners) {
  const auto& defs = basic_skills();
  ASSERT_EQ(defs.size(), 5u);
  std::vector<std::string> names;
  for (const auto& d : defs) names.push_back(d.name);
  EXPECT_EQ(names, (std::vector<std::string>{"till", "plant", "mine", "talk", "enter_shop"}));
  EXPECT_EQ(to_string(*find_skill(defs, "mine")->body), "select pickaxe; move_near rock; apply rock");
  EXPECT_EQ(to_string(*find_skill(defs, "enter_shop")->body), "move_near shop; inquire door(shop)");
}

TEST(SkillParse, GrowCrop) {
  const auto* g = find_skill(farm_skills(), "grow_crop");
  ASSERT_NE(g, nullptr);
  ASSERT_EQ(g->type_params.size(), 1u);
  EXPECT_EQ(g->type_params[0].name, "t");
  ASSERT_EQ(g->params.size(), 2u);
  EXPECT_EQ(g->params[0].var, "s");
  EXPECT_EQ(g->params[1].type.str(), "watering_can");
  EXPECT_EQ(g->returns->str(), "crop(t)");
  const auto& outer = std::get<DoRecv>(g->body->node);
  EXPECT_TRUE(std::holds_alternative<Par>(outer.action->node));
  EXPECT_EQ(outer.pattern.size(), 2u);
}

TEST(SkillParse, SumTypes) {
  auto t = parse_resource_type("crop(t) + growing(t)");
  EXPECT_TRUE(t.is_sum());
  EXPECT_EQ(t.str(), "crop(t) + growing(t)");
  EXPECT_FALSE(parse_resource_type("mineral").is_sum());
}

TEST(SkillParse, Errors) {
  try {
    parse_skills("action x = ;");
    FAIL();
  } catch (const SkillSyntaxError& e) {
    EXPECT_EQ(e.pos(), (SourcePos{1, 12}));
  }
  EXPECT_THROW(parse_skills("action a = wait\naction a = wait"), SkillSyntaxError);
  EXPECT_THROW(parse_skills("action a = case x of"), SkillSyntaxError);
  EXPECT_THROW(parse_skills("action a = do wait recv <r: fish. r"), SkillSyntaxError);
}

// -- resource typing ---------------------------------------------------------

TEST(SkillTypes, ShippedSkillsCheck) {
  auto errs = typecheck_skills(farm_skills(), farm_sig());
  EXPECT_TRUE(errs.empty()) << errs.front().str();
  errs = typecheck_skills(basic_skills(), farm_sig());
  EXPECT_TRUE(errs.empty()) << errs.front().str();
}

TEST(SkillTypes, MissingBranch) {
  auto src = replaced(skill_source("farm.skill"),
                      "      | g:growing(t) =>\n          water(g);\n          wait(day);\n"
                      "          water_until_harvestable(g)",
                      "");
  auto errs = errors_of(src);
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::non_exhaustive_case);
  EXPECT_EQ(errs[0].detail, "growing(t)");
  EXPECT_EQ(errs[0].skill, "water_until_harvestable");
}

TEST(SkillTypes, OverlappingPar) {
  auto src = replaced(skill_source("farm.skill"), "get_seeds(t) || till_soil(s)", "till_soil(s) || till_soil(s)");
  auto errs = errors_of(src);
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::overlapping_par);
  EXPECT_EQ(errs[0].detail, "s");
}

TEST(SkillTypes, VerbatimLoopBodyMismatch) {
  auto errs = errors_of(skill_source("verbatim.skill"));
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::type_mismatch);
  EXPECT_EQ(errs[0].detail, "expected crop(t), got <crop(t) + growing(t)>");
}

TEST(SkillTypes, UnboundAndUnknown) {
  auto errs = errors_of("action a(p: pickaxe) = select p; apply q");
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::unbound_resource);
  errs = errors_of("action a = frobnicate(x)");
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::unknown_skill);
  errs = errors_of("action a(p: pickaxe, r: rock) : wood = select p; move_near r; apply r");
  ASSERT_FALSE(errs.empty());
  EXPECT_EQ(errs[0].kind, SkillTypeError::Kind::type_mismatch);
}

TEST(SkillTypes, Subtyping) {
  EXPECT_TRUE(subtype(parse_resource_type("growing(t)"), parse_resource_type("planted(t)")));
  EXPECT_FALSE(subtype(parse_resource_type("planted(t)"), parse_resource_type("growing(t)")));
  EXPECT_TRUE(subtype(parse_resource_type("crop(t)"), parse_resource_type("crop(t) + growing(t)")));
  EXPECT_FALSE(subtype(parse_resource_type("crop(t) + growing(t)"), parse_resource_type("crop(t)")));
}

// -- execution ---------------------------------------------------------------

TEST(SkillRun, MineProducesMineral) {
  auto g0 = initial_state(testing_support::farm());
  auto r = run_skill(g0, farm_skills(), "mine", {{"p", E("pickaxe_1")}, {"r", E("rock_1")}});
  ASSERT_TRUE(r.outcome.produced) << r.outcome.reason;
  EXPECT_EQ(r.outcome.bindings.at("result").type.str(), "mineral");
  std::vector<std::string> verbs;
  for (const auto& e : r.entries) verbs.emplace_back(verb_of(e.intent));
  EXPECT_EQ(verbs, (std::vector<std::string>{"select", "move_near", "apply"}));
  EXPECT_FALSE(r.state.declared(E("rock_1")));
}

TEST(SkillRun, OneLinersRun) {
  auto g0 = initial_state(testing_support::farm());
  for (const char* name : {"till", "plant", "mine", "talk"}) {
    auto r = run_skill(g0, basic_skills(), name, {});
    EXPECT_TRUE(r.outcome.produced) << name << ": " << r.outcome.failed_at << " " << r.outcome.reason;
  }
  auto in_town = step(g0, MoveOffscreen{Direction::east}).next;
  auto r = run_skill(in_town, basic_skills(), "enter_shop", {});
  ASSERT_TRUE(r.outcome.produced) << r.outcome.reason;
  EXPECT_EQ(r.state.player_room, R("shop"));
}

TEST(SkillRun, FailureThreading) {
  auto g = initial_state(without_rocks());
  auto r = run_skill(g, basic_skills(), "mine", {});
  EXPECT_FALSE(r.outcome.produced);
  EXPECT_EQ(r.outcome.failed_at, "move_near rock");
  auto before = step(g, Select{E("pickaxe_1")}).next;
  EXPECT_EQ(state_digest(r.state), state_digest(before));
  EXPECT_EQ(r.steps_of("apply"), 0u);

  // Rocks that exist but are out of reach fail in the engine itself.
  auto far = step_all(initial_state(testing_support::farm()), {MoveOffscreen{Direction::east}});
  auto rf = run_skill(far, farm_skills(), "mine", {{"p", E("pickaxe_1")}, {"r", E("rock_1")}});
  EXPECT_FALSE(rf.outcome.produced);
  EXPECT_EQ(rf.outcome.failed_at, "move_near rock_1");
  ASSERT_FALSE(rf.entries.empty());
  EXPECT_EQ(rf.entries.back().resp.verdict, Verdict::failure);
  EXPECT_EQ(state_digest(rf.state), rf.entries[rf.entries.size() - 2].digest);
}

TEST(SkillRun, GrowCropWaitsFourDays) {
  auto g0 = initial_state(testing_support::farm(), 42);
  auto r = run_skill(g0, farm_skills(), "grow_crop[parsnip]", grow_args);
  ASSERT_TRUE(r.outcome.produced) << r.outcome.failed_at << ": " << r.outcome.reason;
  EXPECT_EQ(r.steps_of("wait"), 4u);
  EXPECT_EQ(r.state.day, 4u);
  const auto& result = r.outcome.bindings.at("result");
  EXPECT_EQ(result.type.str(), "crop(parsnip)");
  EXPECT_TRUE(r.state.in_inventory(result.entity));

  auto again = run_skill(g0, farm_skills(), "grow_crop[parsnip]", grow_args);
  EXPECT_EQ(state_digest(again.state), state_digest(r.state));
  EXPECT_EQ(again.entries, r.entries);
}

TEST(SkillRun, HarvestableCropNeedsNoWater) {
  auto g = step_all(initial_state(testing_support::farm()),
                    {Select{E("hoe")}, Apply{E("plot_1")}, Select{E("parsnip_seeds_2")}, Apply{E("plot_1")},
                     Select{E("can_1")}});
  for (int day = 0; day < 4; ++day) g = step_all(g, {Apply{E("plot_1")}, Wait{}});
  auto r = run_skill(g, farm_skills(), "water_until_harvestable[parsnip]", {{"p", E("plot_1")}});
  ASSERT_TRUE(r.outcome.produced) << r.outcome.reason;
  EXPECT_EQ(r.steps_of("apply"), 0u);
  EXPECT_EQ(r.steps_of("wait"), 0u);
  EXPECT_EQ(r.outcome.bindings.at("result").type.str(), "crop(parsnip)");
}

TEST(SkillRun, TypeArgumentsAreInferredFromResources) {
  auto g = step_all(initial_state(testing_support::farm()),
                    {Select{E("hoe")}, Apply{E("plot_1")}, Select{E("parsnip_seeds_2")}, Apply{E("plot_1")}});
  auto r = run_skill(g, farm_skills(), "water", {{"g", E("plot_1")}});
  ASSERT_TRUE(r.outcome.produced) << r.outcome.reason;
  EXPECT_EQ(r.outcome.bindings.at("result").type.str(), "growing(parsnip)");
}

TEST(SkillRun, ParCommutes) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto g = configuration(seed);
    auto left = run_skill(g, farm_skills(), "grow_crop[parsnip]", grow_args);
    auto right = run_skill(g, farm_skills(), "grow_crop[parsnip]", grow_args, RunOptions{10000, true});
    EXPECT_TRUE(left.outcome.produced) << seed << ": " << left.outcome.reason;
    EXPECT_EQ(state_digest(left.state), state_digest(right.state)) << seed;
  }
}

TEST(SkillRun, DepthLimit) {
  auto defs = parse_skills("action spin = wait(day); spin");
  auto g0 = initial_state(testing_support::farm());
  EXPECT_THROW(run_skill(g0, defs, "spin", {}, RunOptions{200, false}), SkillRuntimeError);
}

TEST(SkillRun, BadEntries) {
  auto g0 = initial_state(testing_support::farm());
  EXPECT_THROW(run_skill(g0, farm_skills(), "nope", {}), SkillRuntimeError);
  EXPECT_THROW(run_skill(g0, farm_skills(), "mine", {{"p", E("pickaxe_1")}}), SkillRuntimeError);
}

TEST(SkillRun, TraceReplays) {
  const auto& w = testing_support::farm();
  auto t = run_skill_traced(w, 42, farm_skills(), "grow_crop[parsnip]", grow_args);
  ASSERT_TRUE(t.run.outcome.produced);
  EXPECT_EQ(t.trace.entries.size(), t.run.entries.size());
  EXPECT_TRUE(replay(w, t.trace).exact);
  EXPECT_EQ(parse_trace(print_trace(t.trace)), t.trace);
}

TEST(SkillRun, ProducedResultsHaveTheirDeclaredType) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 150; ++k) {
    auto g = initial_state(testing_support::farm(), rng());
    for (auto n = rng() % 40; n > 0; --n) g = respond(g, testing_support::random_intent(g, rng)).next;
    auto before = state_digest(g);
    auto r = run_skill(g, farm_skills(), "grow_crop[parsnip]", grow_args);
    ASSERT_EQ(state_digest(g), before);
    if (r.outcome.produced) {
      const auto& v = r.outcome.bindings.at("result");
      EXPECT_EQ(v.type.str(), "crop(parsnip)");
      EXPECT_TRUE(r.state.in_inventory(v.entity));
    } else {
      EXPECT_FALSE(r.outcome.failed_at.empty());
    }
    auto replayed = g;
    for (const auto& e : r.entries) {
      auto s = respond(replayed, e.intent);
      ASSERT_EQ(s.resp, e.resp);
      replayed = std::move(s.next);
    }
    EXPECT_EQ(state_digest(replayed), state_digest(r.state));
  }
}
