#include "recon/domain.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "recon/error.hpp"

namespace recon {

namespace {

enum class Tok { name, var, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    if (c == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && is_name_char(text[j])) ++j;
      if (j == i + 1) throw SyntaxError("empty variable name", line, column);
      tok.kind = Tok::var;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') throw SyntaxError("unterminated string", line, column);
      tok.kind = Tok::string;
      tok.text = std::string(text.substr(i + 1, j - i - 1));
      advance(j - i + 1);
    } else if (is_name_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      tok.kind = Tok::name;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::string_view("(),:;+-|=").find(c) != std::string_view::npos) {
      tok.kind = Tok::punct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", line, column);
    }
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.column = column;
  tokens.push_back(end);
  return tokens;
}

bool is_statement_keyword(std::string_view s) {
  return s == "type" || s == "predicate" || s == "mutex" || s == "action";
}

bool is_clause_keyword(std::string_view s) {
  return s == "verbs" || s == "pre" || s == "eff" || s == "aka";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Domain parse() {
    Domain domain;
    while (peek().kind != Tok::end) {
      const Token& t = peek();
      if (is_punct(";")) {
        next();
      } else if (t.kind == Tok::name && t.text == "type") {
        next();
        domain.types.push_back(parse_type());
      } else if (t.kind == Tok::name && t.text == "predicate") {
        next();
        domain.predicates.push_back(parse_predicate());
      } else if (t.kind == Tok::name && t.text == "mutex") {
        next();
        domain.mutexes.push_back(parse_mutex());
      } else if (t.kind == Tok::name && t.text == "action") {
        next();
        domain.schemas.push_back(parse_action());
      } else if (t.kind == Tok::name && peek(1).kind == Tok::punct && peek(1).text == "(") {
        domain.schemas.push_back(parse_action());
      } else {
        fail("expected a statement (type, predicate, mutex, action)");
      }
    }
    return domain;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::punct && peek(ahead).text == p;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(what + ", found " + found, t.line, t.column);
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    next();
  }
  std::string expect_name(std::string_view what) {
    if (peek().kind != Tok::name) fail("expected " + std::string(what));
    return next().text;
  }

  TypeDecl parse_type() {
    TypeDecl decl;
    decl.name = expect_name("type name");
    if (is_punct(":") || is_punct("=")) {
      next();
    } else {
      fail("expected ':' after type name");
    }
    decl.members.push_back(expect_name("type member"));
    while (is_punct(",")) {
      next();
      decl.members.push_back(expect_name("type member"));
    }
    return decl;
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    expect_punct("(");
    while (!is_punct(")")) {
      if (peek().kind != Tok::var) fail("expected parameter variable");
      Param p;
      p.var = next().text;
      if (is_punct(":")) {
        next();
        p.types.push_back(expect_name("parameter type"));
        while (is_punct("|")) {
          next();
          p.types.push_back(expect_name("parameter type"));
        }
      }
      params.push_back(std::move(p));
      if (is_punct(",")) next();
    }
    expect_punct(")");
    return params;
  }

  bool at_phrase_stop() const {
    const Token& t = peek();
    if (t.kind != Tok::name) return true;
    if (is_statement_keyword(t.text)) return true;
    if (is_clause_keyword(t.text) && is_punct(":", 1)) return true;
    if (is_punct("(", 1)) return true;
    return false;
  }

  std::vector<std::string> parse_phrases() {
    std::vector<std::string> phrases;
    while (true) {
      if (peek().kind == Tok::string) {
        phrases.push_back(next().text);
      } else {
        std::string phrase;
        while (!at_phrase_stop()) {
          if (!phrase.empty()) phrase += ' ';
          phrase += next().text;
        }
        if (phrase.empty()) fail("expected a phrase");
        phrases.push_back(std::move(phrase));
      }
      if (!is_punct(",")) break;
      next();
    }
    return phrases;
  }

  PredicateDecl parse_predicate() {
    PredicateDecl decl;
    decl.name = expect_name("predicate name");
    decl.params = parse_params();
    if (peek().kind == Tok::name && peek().text == "aka") {
      next();
      if (is_punct(":")) next();
      decl.aka = parse_phrases();
    }
    return decl;
  }

  AtomPattern parse_atom() {
    AtomPattern atom;
    atom.predicate = expect_name("predicate");
    if (is_punct("(")) {
      next();
      while (!is_punct(")")) {
        if (peek().kind != Tok::var) fail("expected variable");
        atom.vars.push_back(next().text);
        if (is_punct(",")) next();
      }
      next();
    } else {
      while (peek().kind == Tok::var) atom.vars.push_back(next().text);
    }
    return atom;
  }

  MutexRule parse_mutex() {
    MutexRule rule;
    rule.first = parse_atom();
    expect_punct("|");
    rule.second = parse_atom();
    return rule;
  }

  bool at_atom_list_end() const {
    return peek().kind == Tok::end || is_punct(";") || at_clause() ||
           (peek().kind == Tok::name && (is_statement_keyword(peek().text) || is_punct("(", 1)));
  }

  bool at_clause() const {
    return peek().kind == Tok::name && is_clause_keyword(peek().text) && peek().text != "aka" &&
           is_punct(":", 1);
  }

  ActionSchema parse_action() {
    ActionSchema schema;
    schema.template_name = expect_name("action template name");
    schema.params = parse_params();
    while (true) {
      if (is_punct(";")) {
        next();
        continue;
      }
      if (!at_clause()) break;
      const std::string clause = next().text;
      next();  // ':'
      if (clause == "verbs") {
        auto verbs = parse_phrases();
        schema.verbs.insert(schema.verbs.end(), verbs.begin(), verbs.end());
      } else if (clause == "pre") {
        while (!at_atom_list_end()) {
          schema.preconditions.push_back(parse_atom());
          if (!is_punct(",")) break;
          next();
        }
      } else {
        while (!at_atom_list_end()) {
          bool add = true;
          if (is_punct("+") || is_punct("-")) add = next().text == "+";
          auto atom = parse_atom();
          (add ? schema.add_effects : schema.delete_effects).push_back(std::move(atom));
          if (!is_punct(",")) break;
          next();
        }
      }
    }
    return schema;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void semantic(const std::string& message) { throw Error(Errc::semantic, message); }

std::string default_verb(std::string_view template_name) {
  auto stem = template_name.substr(0, template_name.find('.'));
  const auto cut = stem.find('_');
  return std::string(stem.substr(0, cut));
}

void validate(Domain& domain) {
  std::map<std::string, std::size_t> arity;
  for (const auto& p : domain.predicates) {
    if (!is_valid_symbol(p.name)) semantic("invalid predicate name '" + p.name + "'");
    if (!arity.emplace(p.name, p.arity()).second) semantic("duplicate predicate '" + p.name + "'");
  }
  auto check_atom = [&](const AtomPattern& atom, const std::string& where) {
    auto it = arity.find(atom.predicate);
    if (it == arity.end()) semantic(where + ": undeclared predicate '" + atom.predicate + "'");
    if (it->second != atom.vars.size()) {
      semantic(where + ": predicate '" + atom.predicate + "' expects " + std::to_string(it->second) +
               " argument(s), got " + std::to_string(atom.vars.size()));
    }
  };
  for (const auto& rule : domain.mutexes) {
    check_atom(rule.first, "mutex");
    check_atom(rule.second, "mutex");
  }
  std::set<std::string> templates;
  for (auto& schema : domain.schemas) {
    const std::string& name = schema.template_name;
    if (name.size() <= 8 || !name.ends_with("_sct.yml")) {
      semantic("action template '" + name + "' must end in _sct.yml");
    }
    if (!templates.insert(name).second) semantic("duplicate action '" + name + "'");
    std::set<std::string> vars;
    for (const auto& p : schema.params) {
      if (!vars.insert(p.var).second) semantic(name + ": duplicate parameter " + p.var);
    }
    auto check_vars = [&](const AtomPattern& atom) {
      check_atom(atom, name);
      for (const auto& v : atom.vars) {
        if (!vars.contains(v)) semantic(name + ": undeclared parameter " + v + " in '" + atom.predicate + "'");
      }
    };
    for (const auto& a : schema.preconditions) check_vars(a);
    for (const auto& a : schema.add_effects) check_vars(a);
    for (const auto& a : schema.delete_effects) check_vars(a);
    if (schema.verbs.empty()) schema.verbs.push_back(default_verb(name));
  }
}

bool token_of(std::string_view type, std::string_view class_name) {
  std::size_t start = 0;
  while (start <= class_name.size()) {
    auto end = class_name.find('_', start);
    if (end == std::string_view::npos) end = class_name.size();
    if (class_name.substr(start, end - start) == type) return true;
    start = end + 1;
  }
  return false;
}

}  // namespace

bool Param::is_effector() const {
  return types.size() == 1 && types.front() == kEffectorType;
}

std::size_t ActionSchema::param_index(std::string_view var) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].var == var) return i;
  }
  return std::string::npos;
}

const PredicateDecl* Domain::find_predicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ActionSchema* Domain::find_schema(std::string_view template_name) const {
  for (const auto& s : schemas) {
    if (s.template_name == template_name) return &s;
  }
  return nullptr;
}

bool Domain::admits(std::string_view type, std::string_view class_name) const {
  // Depth bound guards against cyclic type declarations.
  auto rec = [&](auto&& self, std::string_view t, int depth) -> bool {
    if (t == kAnyType) return true;
    if (t == kEffectorType) return false;
    if (t == class_name) return true;
    if (depth < 16) {
      for (const auto& decl : types) {
        if (decl.name != t) continue;
        for (const auto& member : decl.members) {
          if (self(self, member, depth + 1)) return true;
        }
        return false;
      }
    }
    return token_of(t, class_name);
  };
  return rec(rec, type, 0);
}

bool Domain::admits(const Param& param, std::string_view class_name) const {
  if (param.types.empty()) return true;
  return std::any_of(param.types.begin(), param.types.end(),
                     [&](const std::string& t) { return admits(t, class_name); });
}

std::optional<std::string> Domain::paired_predicate(std::string_view name) const {
  std::string other;
  if (name.starts_with(kNegationPrefix)) {
    other = std::string(name.substr(kNegationPrefix.size()));
  } else {
    other = std::string(kNegationPrefix) + std::string(name);
  }
  const auto* self = find_predicate(name);
  const auto* pair = find_predicate(other);
  if (self == nullptr || pair == nullptr || self->arity() != pair->arity()) return std::nullopt;
  return other;
}

std::vector<Literal> Domain::conflicts(const Literal& literal, const std::set<Literal>& state) const {
  std::set<Literal> found;
  if (auto pair = paired_predicate(literal.predicate)) {
    Literal opposite{*pair, literal.args};
    if (state.contains(opposite)) found.insert(std::move(opposite));
  }
  auto unify = [&](const AtomPattern& from, const AtomPattern& to) {
    if (from.predicate != literal.predicate || from.vars.size() != literal.args.size()) return;
    std::map<std::string, std::string> binding;
    for (std::size_t i = 0; i < from.vars.size(); ++i) {
      auto [it, inserted] = binding.emplace(from.vars[i], literal.args[i]);
      if (!inserted && it->second != literal.args[i]) return;
    }
    for (const auto& s : state) {
      if (s.predicate != to.predicate || s.args.size() != to.vars.size()) continue;
      bool ok = true;
      for (std::size_t j = 0; j < to.vars.size() && ok; ++j) {
        auto it = binding.find(to.vars[j]);
        ok = it == binding.end() || it->second == s.args[j];
      }
      if (ok && s != literal) found.insert(s);
    }
  };
  for (const auto& rule : mutexes) {
    unify(rule.first, rule.second);
    unify(rule.second, rule.first);
  }
  return {found.begin(), found.end()};
}

std::optional<Literal> Domain::parse_literal(std::string_view text) const {
  std::vector<const PredicateDecl*> by_length;
  for (const auto& p : predicates) by_length.push_back(&p);
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const auto* a, const auto* b) { return a->name.size() > b->name.size(); });
  for (const auto* p : by_length) {
    if (p->arity() == 0) {
      if (text == p->name) return Literal{p->name, {}};
      continue;
    }
    if (text.size() <= p->name.size() + 1 || !text.starts_with(p->name) || text[p->name.size()] != '_') {
      continue;
    }
    std::vector<std::string> args;
    auto rest = text.substr(p->name.size() + 1);
    bool ok = true;
    std::size_t start = 0;
    while (ok) {
      auto end = rest.find(' ', start);
      auto part = rest.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      if (part.empty()) ok = false;
      else args.emplace_back(part);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    if (ok && args.size() == p->arity()) return Literal{p->name, std::move(args)};
  }
  return std::nullopt;
}

Domain parse_domain(std::string_view text) {
  Domain domain = Parser(tokenize(text)).parse();
  validate(domain);
  domain.source = std::string(text);
  return domain;
}

}  // namespace recon
