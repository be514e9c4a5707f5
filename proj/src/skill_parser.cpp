#include <algorithm>
#include <cctype>
#include <set>

#include "intentlang/skill.hpp"

namespace intentlang::skill {

namespace {

enum class Tok { ident, punct, end };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (i_ >= src_.size()) {
        out.push_back({Tok::end, "", here()});
        return out;
      }
      auto pos = here();
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) advance();
        out.push_back({Tok::ident, std::string(src_.substr(start, i_ - start)), pos});
        continue;
      }
      auto two = src_.substr(i_, 2);
      if (two == "=>" || two == "||") {
        advance();
        advance();
        out.push_back({Tok::punct, std::string(two), pos});
        continue;
      }
      if (std::string_view("()[]<>,:;=|.+").find(c) != std::string_view::npos) {
        advance();
        out.push_back({Tok::punct, std::string(1, c), pos});
        continue;
      }
      throw SkillSyntaxError(pos, std::string("unexpected character '") + c + "'");
    }
  }

private:
  SourcePos here() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '#' || src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;
};

const std::set<std::string, std::less<>> prim_verbs = {"select", "apply",   "inquire", "move_near", "move_offscreen",
                                                        "take",   "move",    "go",      "collect",   "wait"};

const std::set<std::string, std::less<>> keywords = {"action", "fun", "do", "recv", "case", "of", "fail"};

template <typename T>
ExprPtr make(T node, SourcePos pos) {
  return std::make_shared<const Expr>(Expr{std::move(node), pos});
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SkillSet definitions() {
    SkillSet out;
    while (!at_end()) {
      auto def = definition();
      auto dup = std::find_if(out.begin(), out.end(), [&](const SkillDef& d) { return d.name == def.name; });
      if (dup != out.end()) throw SkillSyntaxError(def.pos, "duplicate skill '" + def.name + "'");
      out.push_back(std::move(def));
    }
    return out;
  }

  ResourceType standalone_type() {
    auto t = type();
    if (!at_end()) fail("unexpected '" + peek().text + "' after type");
    return t;
  }

private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is(std::string_view text) const { return peek().kind != Tok::end && peek().text == text; }
  bool is_ident() const { return peek().kind == Tok::ident; }

  [[noreturn]] void fail(const std::string& what) const { throw SkillSyntaxError(peek().pos, what); }

  const Token& take() { return toks_[p_ < toks_.size() - 1 ? p_++ : p_]; }

  bool accept(std::string_view text) {
    if (!is(text)) return false;
    take();
    return true;
  }

  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "', found " + describe(peek()));
  }

  static std::string describe(const Token& t) { return t.kind == Tok::end ? "end of input" : "'" + t.text + "'"; }

  std::string name(const char* what) {
    if (!is_ident() || keywords.contains(peek().text)) fail(std::string("expected ") + what + ", found " + describe(peek()));
    return take().text;
  }

  SkillDef definition() {
    if (!is("action") && !is("fun")) fail("expected 'action' or 'fun', found " + describe(peek()));
    SkillDef def;
    def.pos = take().pos;
    def.name = name("a skill name");
    if (accept("[")) {
      do {
        TypeBinder b;
        b.name = name("a type variable");
        if (accept(":")) b.kind = name("a kind");
        if (b.kind != "croptype") fail("unknown kind '" + b.kind + "'");
        def.type_params.push_back(std::move(b));
      } while (accept(","));
      expect("]");
    }
    if (accept("(")) {
      if (!is(")")) {
        do def.params.push_back(binding());
        while (accept(","));
      }
      expect(")");
    }
    if (accept(":")) def.returns = type();
    expect("=");
    def.body = expr();
    if (accept(":")) {
      if (def.returns) fail("return type given twice");
      def.returns = type();
    }
    return def;
  }

  Binding binding() {
    Binding b;
    b.pos = peek().pos;
    b.var = name("a variable");
    expect(":");
    b.type = type();
    return b;
  }

  ResourceType type() {
    ResourceType t;
    do t.members.push_back(atom_type());
    while (accept("+"));
    return t;
  }

  EntityType atom_type() {
    EntityType a;
    a.ctor = name("a type");
    if (accept("(")) {
      a.param = name("a type parameter");
      expect(")");
    }
    return a;
  }

  // expr := par (';' expr)?
  ExprPtr expr() {
    auto pos = peek().pos;
    auto first = par();
    if (accept(";")) return make(Seq{first, expr()}, pos);
    return first;
  }

  // par := unit ('||' unit)*, left-associative
  ExprPtr par() {
    auto pos = peek().pos;
    auto left = unit();
    while (accept("||")) left = make(Par{left, unit()}, pos);
    return left;
  }

  Arg arg() {
    Arg a;
    a.pos = peek().pos;
    a.name = name("an argument");
    if (accept("(")) {
      a.param = name("a type parameter");
      expect(")");
    }
    return a;
  }

  ExprPtr unit() {
    auto pos = peek().pos;
    if (accept("(")) {
      auto inner = expr();
      expect(")");
      return inner;
    }
    if (accept("fail")) return make(Fail{}, pos);
    if (accept("do")) {
      DoRecv d;
      d.action = expr();
      expect("recv");
      expect("<");
      if (!is(">")) {
        do d.pattern.push_back(binding());
        while (accept(","));
      }
      expect(">");
      expect(".");
      d.body = expr();
      return make(std::move(d), pos);
    }
    if (accept("case")) return case_expr(pos);
    if (is_ident() && prim_verbs.contains(peek().text)) return prim(pos);
    auto id = name("an expression");
    if (accept("(")) {
      Call c{id, {}};
      if (!is(")")) {
        do c.args.push_back(arg());
        while (accept(","));
      }
      expect(")");
      return make(std::move(c), pos);
    }
    return make(Name{id}, pos);
  }

  ExprPtr prim(SourcePos pos) {
    Prim p;
    p.verb = take().text;
    if (p.verb == "go") p.verb = "move";
    if (p.verb == "collect") return make(std::move(p), pos);
    if (p.verb == "wait") {
      // `wait`, `wait day` and `wait(day)` all mean one day passes.
      if (accept("(")) {
        if (name("'day'") != "day") fail("wait only takes 'day'");
        expect(")");
      } else if (is("day")) {
        take();
      }
      return make(std::move(p), pos);
    }
    p.arg = arg();
    return make(std::move(p), pos);
  }

  ExprPtr case_expr(SourcePos pos) {
    Case c;
    c.scrutinee = name("a variable after 'case'");
    expect("of");
    accept("|");
    do {
      CaseBranch b;
      b.pos = peek().pos;
      bool angled = accept("<");
      if (!angled && accept("success")) {
        b.kind = CaseBranch::Kind::success;
      } else if (!angled && accept("failure")) {
        b.kind = CaseBranch::Kind::failure;
      } else {
        b.binding = binding();
        if (angled) expect(">");
      }
      expect("=>");
      // A branch body runs to the next `|`; parenthesize a case to sequence after it.
      b.body = expr();
      c.branches.push_back(std::move(b));
    } while (accept("|"));
    return make(std::move(c), pos);
  }

  std::vector<Token> toks_;
  std::size_t p_ = 0;
};

} // namespace

std::string ResourceType::str() const {
  std::string out;
  for (std::size_t k = 0; k < members.size(); ++k) out += (k ? " + " : "") + members[k].str();
  return out;
}

const SkillDef* find_skill(const SkillSet& defs, std::string_view name) {
  for (const auto& d : defs) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::string to_string(const Expr& e) {
  struct V {
    std::string operator()(const Prim& p) const { return p.arg ? p.verb + " " + p.arg->str() : p.verb; }
    std::string operator()(const Seq& s) const { return to_string(*s.first) + "; " + to_string(*s.second); }
    std::string operator()(const Par& p) const {
      return "(" + to_string(*p.left) + " || " + to_string(*p.right) + ")";
    }
    std::string operator()(const Call& c) const {
      std::string out = c.name + "(";
      for (std::size_t k = 0; k < c.args.size(); ++k) out += (k ? ", " : "") + c.args[k].str();
      return out + ")";
    }
    std::string operator()(const Name& n) const { return n.name; }
    std::string operator()(const Case& c) const {
      std::string out = "case " + c.scrutinee + " of";
      for (std::size_t k = 0; k < c.branches.size(); ++k) {
        const auto& b = c.branches[k];
        out += k ? " | " : " ";
        if (b.kind == CaseBranch::Kind::success) out += "success";
        else if (b.kind == CaseBranch::Kind::failure) out += "failure";
        else out += b.binding->var + ":" + b.binding->type.str();
        out += " => " + to_string(*b.body);
      }
      return "(" + out + ")";
    }
    std::string operator()(const DoRecv& d) const {
      std::string out = "do " + to_string(*d.action) + " recv <";
      for (std::size_t k = 0; k < d.pattern.size(); ++k) {
        out += (k ? ", " : "") + d.pattern[k].var + ":" + d.pattern[k].type.str();
      }
      return out + ">. " + to_string(*d.body);
    }
    std::string operator()(const Fail&) const { return "fail"; }
  };
  return std::visit(V{}, e.node);
}

SkillSet parse_skills(std::string_view source) { return Parser(Lexer(source).run()).definitions(); }

ResourceType parse_resource_type(std::string_view text) { return Parser(Lexer(text).run()).standalone_type(); }

} // namespace intentlang::skill
