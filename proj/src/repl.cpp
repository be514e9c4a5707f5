#include "intentlang/repl.hpp"

#include <istream>
#include <ostream>

#include "intentlang/step.hpp"
#include "intentlang/typing.hpp"

namespace intentlang {

namespace {

struct Line {
  std::string utterance; // as the player entered it
  CoreIntent intent;
};

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void print_choices(const std::vector<Choice>& choices, std::ostream& out) {
  if (choices.empty()) out << "(no actions available)\n";
  for (std::size_t k = 0; k < choices.size(); ++k) out << "  " << k + 1 << ". " << choices[k].id << "\n";
}

} // namespace

Trace repl(const WorldDef& world, Profile profile, std::uint64_t seed, std::istream& in, std::ostream& out) {
  auto g = initial_state(world, seed);
  auto trace = open_trace(world, seed);
  std::vector<std::string> utterances; // parallel to trace entries

  auto prompt = [&] {
    if (profile == Profile::hypertext) print_choices(enumerate_choices(g), out);
    out << "> " << std::flush;
  };

  std::string raw;
  prompt();
  while (std::getline(in, raw)) {
    auto line = trim(raw);
    if (line.empty()) {
      prompt();
      continue;
    }
    if (line[0] == ':') {
      if (line == ":quit" || line == ":q") break;
      if (line == ":trace") {
        for (std::size_t k = 0; k < trace.entries.size(); ++k) {
          out << "PLAYER: " << utterances[k] << "\n"
              << "GAME: " << to_string(trace.entries[k].resp.verdict) << "\n";
        }
      } else if (line.rfind(":save", 0) == 0) {
        auto path = trim(line.substr(5));
        if (path.empty()) {
          out << "usage: :save <file>\n";
        } else {
          try {
            write_trace_file(trace, path);
            out << "saved " << trace.entries.size() << " steps to " << path << "\n";
          } catch (const Error& e) {
            out << "error: " << e.what() << "\n";
          }
        }
      } else {
        out << "unknown command " << line << " (try :quit, :trace, :save <file>)\n";
      }
      prompt();
      continue;
    }

    std::optional<CoreIntent> intent;
    switch (profile) {
    case Profile::cli:
    case Profile::farm: {
      auto parsed = parse_command_line(line);
      if (const auto* err = std::get_if<ParseError>(&parsed)) {
        out << "  " << raw << "\n  " << std::string(err->offset + raw.find(line), ' ') << "^\n"
            << "error: " << err->message << "\n";
      } else {
        intent = std::get<CoreIntent>(parsed);
      }
      break;
    }
    case Profile::hypertext: {
      auto choices = enumerate_choices(g);
      std::size_t pick = 0;
      bool numeric = line.find_first_not_of("0123456789") == std::string::npos && line.size() < 9;
      if (numeric) pick = std::stoul(line);
      if (!numeric || pick < 1 || pick > choices.size()) {
        out << "Pick a number from 1 to " << choices.size() << ".\n";
      } else {
        intent = choices[pick - 1].intent;
      }
      break;
    }
    case Profile::wasd: {
      auto r = map_key(line);
      if (std::holds_alternative<Unbound>(r)) out << "Key '" << line << "' does nothing.\n";
      else intent = std::get<CoreIntent>(r);
      break;
    }
    case Profile::birdseye: {
      try {
        auto r = elaborate_click(g, line);
        if (const auto* rej = std::get_if<ClickRejected>(&r)) {
          out << (rej->reason == ClickRejected::Reason::no_op ? "You are already there.\n" : "That is out of range.\n");
        } else {
          intent = std::get<CoreIntent>(r);
        }
      } catch (const UndeclaredIdentifier&) {
        out << "There is no " << line << " here.\n";
      }
      break;
    }
    }

    if (intent) {
      auto result = respond(g, *intent);
      record(trace, result, *intent);
      utterances.push_back(line);
      g = std::move(result.next);
      out << format_response(trace.entries.back().resp) << "\n";
    }
    prompt();
  }
  return trace;
}

} // namespace intentlang
