#include <gtest/gtest.h>

#include <random>
#include <set>

#include "intentlang/typing.hpp"
#include "support.hpp"

using namespace intentlang;
using testing_support::E;
using testing_support::R;

namespace {

std::set<std::string> ids(const std::vector<Choice>& cs) {
  std::set<std::string> out;
  for (const auto& c : cs) out.insert(c.id);
  return out;
}

std::set<std::string> well_typed(const GameState& g) {
  std::set<std::string> out;
  auto gamma = abstract(g);
  for (const auto& i : profile_intents(g)) {
    if (typecheck(gamma, i).ok) out.insert(choice_id(i, g.player_room));
  }
  return out;
}

} // namespace

TEST(Abstract, InitialContext) {
  auto gamma = abstract(initial_state(testing_support::move_take()));
  EXPECT_TRUE(gamma.contains(PlayerIn{R("lab")}));
  EXPECT_TRUE(gamma.contains(At{E("flask"), R("lab")}));
  EXPECT_TRUE(gamma.contains(At{E("book"), R("library")}));
  EXPECT_TRUE(gamma.statics.contains(Adjacent{R("lab"), Direction::south, R("library")}));
  EXPECT_EQ(gamma.statics.size(), 6u);
  EXPECT_FALSE(gamma.contains(FarmWorld{}));
  EXPECT_FALSE(find_context_violation(gamma));

  auto farm = abstract(initial_state(testing_support::farm()));
  EXPECT_TRUE(farm.contains(FarmWorld{}));
  EXPECT_TRUE(farm.contains(ToolRuleFact{"pickaxe", "rock"}));
  EXPECT_TRUE(farm.contains(Typed{E("rock_1"), {"rock", ""}}));
  EXPECT_TRUE(farm.contains(HoldsItem{E("hoe")}));
}

TEST(Abstract, AgreesWithHolds) {
  for (const auto& g : testing_support::reachable(testing_support::move_take())) {
    auto gamma = abstract(g);
    EXPECT_FALSE(find_context_violation(gamma));
    for (const auto& r : g.rooms) {
      EXPECT_EQ(gamma.contains(PlayerIn{r}), holds(g, PlayerIn{r}));
      for (const auto& [id, e] : g.entities) EXPECT_EQ(gamma.contains(At{id, r}), holds(g, At{id, r}));
    }
    for (const auto& [id, e] : g.entities) EXPECT_EQ(gamma.contains(HoldsItem{id}), holds(g, HoldsItem{id}));
  }
}

TEST(Typecheck, Examples) {
  auto gamma = abstract(initial_state(testing_support::move_take()));
  auto take = typecheck(gamma, Take{E("flask")});
  EXPECT_TRUE(take.ok);
  EXPECT_EQ(take.rule, "take");

  auto north = typecheck(gamma, Move{Direction::north});
  EXPECT_FALSE(north.ok);
  ASSERT_EQ(north.premises.size(), 1u);
  EXPECT_EQ(to_string(north.premises[0]), "adjacent(lab,north,_)");

  auto fnord = typecheck(gamma, Take{E("fnord")});
  EXPECT_FALSE(fnord.ok);
  EXPECT_EQ(to_string(fnord.premises[0]), "at(fnord,lab)");

  auto south = typecheck(gamma, Move{Direction::south});
  EXPECT_TRUE(south.ok);
  EXPECT_EQ(south.premises.back(), Fact(Adjacent{R("lab"), Direction::south, R("library")}));

  EXPECT_FALSE(typecheck(gamma, Wait{}).ok);
  EXPECT_EQ(typecheck(gamma, Wait{}).premises[0], Fact(FarmWorld{}));
}

TEST(Typecheck, FarmRules) {
  auto g = initial_state(testing_support::farm());
  auto gamma = abstract(g);
  EXPECT_FALSE(typecheck(gamma, Apply{E("plot_1")}).ok);
  g = step(g, Select{E("hoe")}).next;
  gamma = abstract(g);
  EXPECT_TRUE(typecheck(gamma, Apply{E("plot_1")}).ok);
  auto rock = typecheck(gamma, Apply{E("rock_1")});
  EXPECT_FALSE(rock.ok);
  EXPECT_EQ(rock.premises[0], Fact(At{E("rock_1"), R("farm")}));
  EXPECT_TRUE(typecheck(gamma, MoveNear{E("rock_1")}).ok);
  EXPECT_FALSE(typecheck(gamma, MoveNear{E("pierre")}).ok);
  EXPECT_TRUE(typecheck(gamma, Inquire{E("parsnip_seeds_1")}).ok);
  EXPECT_FALSE(typecheck(gamma, Inquire{E("rock_1")}).ok);
  EXPECT_FALSE(typecheck(gamma, Inquire{E("plot_1")}).ok);
}

TEST(ContextSucceeds, StaticsMustBePreserved) {
  auto g0 = initial_state(testing_support::move_take());
  auto before = abstract(g0);
  EXPECT_TRUE(context_succeeds(before, abstract(player_move(g0, Direction::south))));
  auto changed = before;
  changed.statics.erase(changed.statics.begin());
  EXPECT_FALSE(context_succeeds(before, changed));
  auto two_places = before;
  two_places.fluents.insert(At{E("flask"), R("library")});
  EXPECT_FALSE(context_succeeds(before, two_places));
}

TEST(Progress, MoveTakeWorld) {
  auto r = check_progress(testing_support::move_take());
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.states, 16u);
  EXPECT_GT(r.checked, 0u);
  EXPECT_FALSE(r.truncated);
}

TEST(Progress, FarmWorldBounded) {
  auto r = check_progress(testing_support::farm(), ExploreBounds{3, 800});
  EXPECT_TRUE(r.violations.empty()) << r.to_json().dump(2);
  EXPECT_GT(r.checked, 0u);
}

TEST(Progress, NegativeControls) {
  // A typechecker that accepts everything must be caught out.
  auto lax = [](const Context&, const CoreIntent& i) { return TypingVerdict::accept(std::string(verb_of(i)), {}); };
  auto r = check_progress(testing_support::move_take(), {}, lax);
  EXPECT_FALSE(r.violations.empty());

  auto broken = read_world_file(testing_support::source_path("tests/data/broken.world"));
  auto b = check_progress(broken, ExploreBounds{3, 200000});
  ASSERT_FALSE(b.violations.empty());
  EXPECT_EQ(b.violations[0].intent, "apply rock_1");
  EXPECT_EQ(b.violations[0].kind, "failure");
}

TEST(Enumerate, InitialChoices) {
  auto g0 = initial_state(testing_support::move_take());
  auto cs = enumerate_choices(g0);
  std::vector<std::string> got;
  for (const auto& c : cs) got.push_back(c.id);
  EXPECT_EQ(got, (std::vector<std::string>{"go_east_from_lab", "go_south_from_lab", "go_west_from_lab",
                                           "take_flask_from_lab"}));
  EXPECT_EQ(cs[3].label, "take flask");
  EXPECT_EQ(cs[1].label, "go south");

  auto library = player_move(g0, Direction::south);
  EXPECT_EQ(ids(enumerate_choices(library)),
            (std::set<std::string>{"go_north_from_library", "take_book_from_library"}));
  EXPECT_EQ(ids(enumerate_choices(player_take(g0, E("flask")))).size(), 3u);
}

TEST(Enumerate, EqualsWellTypedSetInEveryState) {
  auto states = testing_support::reachable(testing_support::move_take());
  ASSERT_EQ(states.size(), 16u);
  for (const auto& g : states) EXPECT_EQ(ids(enumerate_choices(g)), well_typed(g)) << state_digest(g);
  auto farm = testing_support::reachable(testing_support::farm(), ExploreBounds{2, 300});
  for (const auto& g : farm) EXPECT_EQ(ids(enumerate_choices(g)), well_typed(g));
}

TEST(Enumerate, ChoicesAlwaysSucceed) {
  for (const auto& g : testing_support::reachable(testing_support::move_take())) {
    for (const auto& c : enumerate_choices(g)) {
      auto r = step(g, c.intent);
      EXPECT_TRUE(r.resp.ok()) << c.id;
      EXPECT_EQ(choice_id(c.intent, g.player_room), c.id);
    }
  }
}

TEST(Enumerate, ClicksThatElaborateAreWellTyped) {
  for (const auto& g : testing_support::reachable(testing_support::move_take())) {
    auto gamma = abstract(g);
    std::vector<std::string> targets;
    for (const auto& r : g.rooms) targets.push_back(r.str());
    for (const auto& [id, e] : g.entities) targets.push_back(id.str());
    for (const auto& t : targets) {
      auto c = elaborate_click(g, t);
      if (const auto* i = std::get_if<CoreIntent>(&c)) EXPECT_TRUE(typecheck(gamma, *i).ok) << t;
    }
  }
}

TEST(Typecheck, WellTypedImpliesSuccessOnRandomFarmPlay) {
  std::mt19937_64 rng(23);
  for (int session = 0; session < 40; ++session) {
    auto g = initial_state(testing_support::farm(), rng());
    for (int k = 0; k < 150; ++k) {
      auto i = testing_support::random_intent(g, rng);
      auto verdict = typecheck(abstract(g), i);
      auto r = respond(g, i);
      if (verdict.ok) {
        EXPECT_TRUE(r.resp.ok()) << to_string(i) << ": " << r.resp.message;
        EXPECT_TRUE(context_succeeds(abstract(g), abstract(r.next)));
      }
      g = std::move(r.next);
    }
  }
}
