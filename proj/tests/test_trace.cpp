#include <gtest/gtest.h>

#include <random>

#include "intentlang/trace.hpp"
#include "support.hpp"

using namespace intentlang;
using testing_support::E;
using testing_support::R;

namespace {

Trace play(const WorldDef& w, std::initializer_list<const char*> lines, std::uint64_t seed = 42) {
  auto g = initial_state(w, seed);
  auto t = open_trace(w, seed);
  for (const auto* line : lines) {
    auto i = std::get<CoreIntent>(parse_command_line(line));
    auto r = respond(g, i);
    record(t, r, i);
    g = std::move(r.next);
  }
  return t;
}

Trace random_session(const WorldDef& w, std::uint64_t seed, std::size_t length) {
  std::mt19937_64 rng(seed);
  auto g = initial_state(w, seed);
  auto t = open_trace(w, seed);
  for (std::size_t k = 0; k < length; ++k) {
    auto i = testing_support::random_intent(g, rng);
    auto r = respond(g, i);
    record(t, r, i);
    g = std::move(r.next);
  }
  return t;
}

Trace paper_trace() { return play(testing_support::move_take(), {"go north", "take flask", "go south"}); }

std::vector<Span> q(const Trace& t, const char* pattern) { return query(t, parse_pattern(pattern)); }

} // namespace

TEST(Trace, PaperListing) {
  auto t = paper_trace();
  ASSERT_EQ(t.entries.size(), 3u);
  EXPECT_EQ(t.entries[0].intent, CoreIntent(Move{Direction::north}));
  EXPECT_EQ(t.entries[0].resp.verdict, Verdict::failure);
  EXPECT_EQ(t.entries[1].resp.verdict, Verdict::success);
  EXPECT_EQ(t.entries[2].resp.verdict, Verdict::success);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(t.entries[k].index, k);
  EXPECT_EQ(t.world_ref, testing_support::move_take().digest);
  EXPECT_EQ(t.entries[0].digest, state_digest(initial_state(testing_support::move_take())));
}

TEST(Trace, PrintParseRoundTrip) {
  EXPECT_EQ(parse_trace(print_trace(paper_trace())), paper_trace());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto t = random_session(testing_support::farm(), seed, 80);
    EXPECT_EQ(parse_trace(print_trace(t)), t);
  }
}

TEST(Trace, MalformedDocuments) {
  EXPECT_THROW(parse_trace(""), TraceFormatError);
  EXPECT_THROW(parse_trace("{\"seed\": 1}\n"), TraceFormatError);
  auto text = print_trace(paper_trace());
  auto bad = text.substr(0, text.find("success")) + "maybe" + text.substr(text.find("success") + 7);
  try {
    parse_trace(bad);
    FAIL() << "parsed a bad verdict";
  } catch (const TraceFormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Trace, IndicesAreContiguous) {
  auto t = random_session(testing_support::move_take(), 1, 1000);
  ASSERT_EQ(t.entries.size(), 1000u);
  for (std::size_t k = 0; k < t.entries.size(); ++k) EXPECT_EQ(t.entries[k].index, k);
}

TEST(Replay, ExactOnRecordedTraces) {
  EXPECT_TRUE(replay(testing_support::move_take(), paper_trace()).exact);
  EXPECT_TRUE(replay(testing_support::move_take(), open_trace(testing_support::move_take(), 42)).exact);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_TRUE(replay(testing_support::farm(), random_session(testing_support::farm(), seed, 200)).exact);
  }
}

TEST(Replay, DivergesWhenTheWorldChanges) {
  auto doc = testing_support::move_take().document;
  for (auto& e : doc["entities"]) {
    if (e["name"] == "flask") e["room"] = "courtyard";
  }
  auto moved = parse_world(doc);
  EXPECT_THROW(replay(moved, paper_trace()), WorldMismatch);
  auto v = replay(moved, paper_trace(), WorldCheck::ignore);
  EXPECT_FALSE(v.exact);
  EXPECT_EQ(v.at, 1u);
}

TEST(Query, Examples) {
  auto t = paper_trace();
  EXPECT_EQ(q(t, "move _ => failure"), (std::vector<Span>{{0, 0}}));
  EXPECT_EQ(q(t, "move _ => fail"), (std::vector<Span>{{0, 0}}));
  EXPECT_EQ(q(t, "take flask ; ... ; move south"), (std::vector<Span>{{1, 2}}));
  EXPECT_EQ(q(t, "take flask ... move south"), (std::vector<Span>{{1, 2}}));
  EXPECT_EQ(q(t, "go _ => ok"), (std::vector<Span>{{2, 2}}));
  EXPECT_TRUE(q(t, "collect").empty());
  EXPECT_EQ(q(t, "_ ; _ ; _"), (std::vector<Span>{{0, 2}}));
}

TEST(Query, MalformedPatterns) {
  auto offset = [](const char* text) -> std::size_t {
    try {
      parse_pattern(text);
    } catch (const PatternError& e) {
      return e.offset();
    }
    ADD_FAILURE() << text;
    return 999;
  };
  EXPECT_EQ(offset("dance"), 0u);
  EXPECT_EQ(offset("move _ => perhaps"), 10u);
  EXPECT_EQ(offset("take flask ; ; move"), 13u);
  EXPECT_EQ(offset("..."), 0u);
  EXPECT_EQ(offset("=> ok"), 0u);
}

TEST(Query, WildcardMatchesEachEntryOnce) {
  auto pattern = parse_pattern("_");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto t = random_session(testing_support::move_take(), seed, 50);
    auto spans = query(t, pattern);
    ASSERT_EQ(spans.size(), t.entries.size());
    for (std::size_t k = 0; k < spans.size(); ++k) EXPECT_EQ(spans[k], (Span{k, k}));
  }
}

TEST(Query, SpansAreOrderedDisjointAndMatch) {
  const char* patterns[] = {"move _ => fail", "take _ ; ... ; move _", "_ => ok ; _ => ok", "move north ... take _"};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto t = random_session(testing_support::move_take(), seed, 60);
    for (const auto* text : patterns) {
      auto p = parse_pattern(text);
      auto spans = query(t, p);
      for (std::size_t k = 0; k < spans.size(); ++k) {
        EXPECT_LE(spans[k].start, spans[k].end);
        EXPECT_LT(spans[k].end, t.entries.size());
        if (k) EXPECT_GT(spans[k].start, spans[k - 1].end);
        const auto& first = p.steps.front();
        if (!first.gap) EXPECT_TRUE(first.matches(t.entries[spans[k].start]));
        const auto& last = p.steps.back();
        if (!last.gap) EXPECT_TRUE(last.matches(t.entries[spans[k].end]));
      }
    }
  }
}

TEST(Explain, PremisesAndTheirOrigins) {
  const auto& w = testing_support::move_take();
  auto t = play(w, {"take flask", "go south", "take book", "go north"});
  auto why = explain(w, t, 2);
  bool saw_location = false;
  for (const auto& s : why) {
    if (s.premise == Fact(PlayerIn{R("library")})) EXPECT_EQ(s.established_by, 1u);
    if (s.premise == Fact(At{E("book"), R("library")})) {
      saw_location = true;
      EXPECT_EQ(s.established_by, std::nullopt);
    }
  }
  EXPECT_TRUE(saw_location);
  EXPECT_THROW(explain(w, paper_trace(), 0), Error);
  EXPECT_THROW(explain(w, t, 9), Error);
}

TEST(TraceFiles, WriteAndRead) {
  auto path = testing::TempDir() + "trace_roundtrip.jsonl";
  write_trace_file(paper_trace(), path);
  EXPECT_EQ(read_trace_file(path), paper_trace());
}
