#include "intentlang/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "intentlang/step.hpp"

namespace intentlang {

using json = nlohmann::json;

Trace open_trace(const WorldDef& world, std::uint64_t seed) { return Trace{world.digest, seed, {}}; }

void record(Trace& trace, const StepResult& result, const CoreIntent& intent) {
  trace.entries.push_back({trace.entries.size(), intent, result.resp, state_digest(result.next)});
}

// -- serialization -----------------------------------------------------------

std::string print_trace(const Trace& t) {
  std::string out = json{{"world_ref", t.world_ref}, {"seed", t.seed}}.dump() + "\n";
  for (const auto& e : t.entries) {
    json line{{"i", e.index},
              {"intent", to_string(e.intent)},
              {"verdict", std::string(to_string(e.resp.verdict))},
              {"message", e.resp.message},
              {"digest", e.digest}};
    if (!e.resp.payload.empty()) {
      line["payload"] = json::array();
      for (const auto& r : e.resp.payload) line["payload"].push_back({r.type.str(), r.entity.str()});
    }
    out += line.dump() + "\n";
  }
  return out;
}

namespace {

template <typename T>
T field(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw TraceFormatError(line, std::string("missing '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw TraceFormatError(line, std::string("bad '") + key + "'");
  }
}

} // namespace

Trace parse_trace(std::string_view text) {
  Trace t;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    json line;
    try {
      line = json::parse(raw);
    } catch (const json::parse_error&) {
      throw TraceFormatError(line_no, "malformed JSON");
    }
    if (!line.is_object()) throw TraceFormatError(line_no, "expected an object");
    if (!have_header) {
      t.world_ref = field<std::string>(line, "world_ref", line_no);
      t.seed = field<std::uint64_t>(line, "seed", line_no);
      have_header = true;
      continue;
    }
    TraceEntry e;
    e.index = field<std::size_t>(line, "i", line_no);
    if (e.index != t.entries.size()) throw TraceFormatError(line_no, "entry indices must be contiguous from 0");
    auto parsed = parse_command_line(field<std::string>(line, "intent", line_no));
    if (const auto* err = std::get_if<ParseError>(&parsed)) throw TraceFormatError(line_no, "intent: " + err->message);
    e.intent = std::get<CoreIntent>(parsed);
    auto verdict = field<std::string>(line, "verdict", line_no);
    if (verdict != "success" && verdict != "failure") throw TraceFormatError(line_no, "bad verdict '" + verdict + "'");
    e.resp.verdict = verdict == "success" ? Verdict::success : Verdict::failure;
    e.resp.message = field<std::string>(line, "message", line_no);
    e.digest = field<std::string>(line, "digest", line_no);
    if (line.contains("payload")) {
      for (const auto& item : line.at("payload")) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
          throw TraceFormatError(line_no, "bad payload");
        }
        auto type = parse_entity_type(item[0].get<std::string>());
        if (!type) throw TraceFormatError(line_no, "bad payload type");
        e.resp.payload.push_back({*type, EntityId{item[1].get<std::string>()}});
      }
    }
    t.entries.push_back(std::move(e));
  }
  if (!have_header) throw TraceFormatError(line_no, "missing header line");
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void write_trace_file(const Trace& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace file '" + path + "'");
  out << print_trace(t);
}

// -- replay ------------------------------------------------------------------

ReplayVerdict replay(const WorldDef& world, const Trace& t, WorldCheck check) {
  if (check == WorldCheck::require_match && world.digest != t.world_ref) {
    throw WorldMismatch("trace was recorded against world " + t.world_ref + ", not " + world.digest);
  }
  // Digests of another world's states are incomparable; only verdicts are.
  const bool same_world = world.digest == t.world_ref;
  auto g = initial_state(world, t.seed);
  for (const auto& e : t.entries) {
    auto result = respond(g, e.intent);
    auto digest = state_digest(result.next);
    if (result.resp.verdict != e.resp.verdict) {
      return {false, e.index, std::string(to_string(e.resp.verdict)), std::string(to_string(result.resp.verdict))};
    }
    if (same_world && digest != e.digest) return {false, e.index, e.digest, digest};
    g = std::move(result.next);
  }
  return {};
}

// -- patterns ----------------------------------------------------------------

namespace {

struct PatToken {
  std::string text;
  std::size_t offset;
};

std::vector<PatToken> pattern_tokens(std::string_view text) {
  std::vector<PatToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (c == ';') {
      out.push_back({";", i++});
    } else {
      auto start = i;
      while (i < text.size() && text[i] != ';' && text[i] != ' ' && text[i] != '\t' && text[i] != '\n' &&
             text[i] != '\r') {
        ++i;
      }
      out.push_back({std::string(text.substr(start, i - start)), start});
    }
  }
  return out;
}

enum class Arity { none, one, optional };

std::optional<Arity> verb_arity(std::string_view v) {
  if (v == "_") return Arity::optional;
  if (v == "collect" || v == "wait") return Arity::none;
  if (v == "move" || v == "take" || v == "select" || v == "apply" || v == "inquire" || v == "move_near" ||
      v == "move_offscreen") {
    return Arity::one;
  }
  return std::nullopt;
}

std::optional<Verdict> parse_verdict(std::string_view v) {
  if (v == "ok" || v == "success") return Verdict::success;
  if (v == "fail" || v == "failure") return Verdict::failure;
  return std::nullopt;
}

} // namespace

bool PatternStep::matches(const TraceEntry& e) const {
  if (verb && *verb != verb_of(e.intent)) return false;
  if (arg && argument_of(e.intent) != *arg) return false;
  if (verdict && *verdict != e.resp.verdict) return false;
  return true;
}

TracePattern parse_pattern(std::string_view text) {
  TracePattern p;
  auto tokens = pattern_tokens(text);
  std::optional<PatternStep> open;
  std::optional<Arity> arity;
  bool arg_taken = false;

  auto close = [&] {
    if (open) p.steps.push_back(*open);
    open.reset();
  };

  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& tok = tokens[k];
    if (tok.text == ";") {
      if (!open && (p.steps.empty() || !p.steps.back().gap)) throw PatternError(tok.offset, "empty step");
      close();
      continue;
    }
    if (tok.text == "...") {
      close();
      if (!p.steps.empty() && p.steps.back().gap) throw PatternError(tok.offset, "adjacent gaps");
      p.steps.push_back(PatternStep{true, {}, {}, {}});
      continue;
    }
    if (tok.text == "=>") {
      if (!open || open->verdict) throw PatternError(tok.offset, "'=>' must follow a step");
      if (k + 1 >= tokens.size()) throw PatternError(tok.offset + 2, "expected a verdict after '=>'");
      const auto& v = tokens[++k];
      auto verdict = parse_verdict(v.text);
      if (!verdict) throw PatternError(v.offset, "unknown verdict '" + v.text + "'");
      open->verdict = verdict;
      continue;
    }

    bool can_take_arg = open && !open->verdict && !arg_taken && arity != Arity::none &&
                        (arity == Arity::one || tok.text == "_" || !verb_arity(tok.text));
    if (can_take_arg) {
      if (tok.text != "_" && !is_identifier(tok.text)) throw PatternError(tok.offset, "bad argument '" + tok.text + "'");
      if (tok.text != "_") open->arg = tok.text;
      arg_taken = true;
      continue;
    }

    auto verb = tok.text == "go" ? std::string("move") : tok.text;
    auto a = verb_arity(verb);
    if (!a) throw PatternError(tok.offset, "unknown verb '" + tok.text + "'");
    close();
    open = PatternStep{};
    if (verb != "_") open->verb = verb;
    arity = a;
    arg_taken = false;
  }
  close();

  bool concrete = std::any_of(p.steps.begin(), p.steps.end(), [](const PatternStep& s) { return !s.gap; });
  if (!concrete) throw PatternError(0, "pattern needs at least one step");
  return p;
}

namespace {

/// Entries [pos, end) matched by steps[si..]; returns end, lazily.
std::optional<std::size_t> match_from(const std::vector<PatternStep>& steps, std::size_t si,
                                      const std::vector<TraceEntry>& entries, std::size_t pos) {
  if (si == steps.size()) return pos;
  const auto& s = steps[si];
  if (s.gap) {
    for (std::size_t k = pos; k <= entries.size(); ++k) {
      if (auto end = match_from(steps, si + 1, entries, k)) return end;
    }
    return std::nullopt;
  }
  if (pos >= entries.size() || !s.matches(entries[pos])) return std::nullopt;
  return match_from(steps, si + 1, entries, pos + 1);
}

} // namespace

std::vector<Span> query(const Trace& t, const TracePattern& p) {
  // Lazy leading and trailing gaps never change which entries a match covers.
  std::vector<PatternStep> steps = p.steps;
  while (!steps.empty() && steps.front().gap) steps.erase(steps.begin());
  while (!steps.empty() && steps.back().gap) steps.pop_back();

  std::vector<Span> out;
  std::size_t pos = 0;
  while (pos < t.entries.size()) {
    auto end = match_from(steps, 0, t.entries, pos);
    if (!end || *end == pos) {
      ++pos;
      continue;
    }
    out.push_back({pos, *end - 1});
    pos = *end;
  }
  return out;
}

// -- provenance --------------------------------------------------------------

std::vector<PremiseSource> explain(const WorldDef& world, const Trace& t, std::size_t index) {
  if (index >= t.entries.size()) throw Error("no trace entry " + std::to_string(index));
  std::vector<Context> contexts;
  auto g = initial_state(world, t.seed);
  contexts.push_back(abstract(g));
  for (std::size_t k = 0; k < index; ++k) {
    g = respond(g, t.entries[k].intent).next;
    contexts.push_back(abstract(g));
  }
  auto verdict = typecheck(contexts.back(), t.entries[index].intent);
  if (!verdict.ok) throw Error("entry " + std::to_string(index) + " is not well-typed: missing " + to_string(verdict.premises.front()));

  std::vector<PremiseSource> out;
  for (const auto& premise : verdict.premises) {
    std::size_t j = index;
    while (j > 0 && contexts[j - 1].contains(premise)) --j;
    out.push_back({premise, j == 0 ? std::nullopt : std::optional<std::size_t>(j - 1)});
  }
  return out;
}

} // namespace intentlang
