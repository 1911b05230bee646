// Theory file parser.
//
// Parsing is two passes. The first builds a raw expression tree per axiom
// without knowing which names are fluents, actions or rigid predicates (a
// body may mention a fluent declared further down). The second resolves
// raw trees against the complete declaration table into sorted terms and
// formulas.

#include <cctype>
#include <charconv>
#include <map>

#include "oblicalc/theory.hpp"

namespace oblicalc {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t {
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Colon,
  Arrow,
  EqEq,
  NotEq,
  Less,
  LessEq,
  SitLess,
  SitLessEq,
  Plus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

struct SyntaxError {
  SourceLoc loc;
  std::string code;
  std::string message;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
    static const std::pair<std::string_view, Tok> kSymbols[] = {
        {"<<=", Tok::SitLessEq}, {"<<", Tok::SitLess}, {"<=", Tok::LessEq}, {"==", Tok::EqEq}, {"!=", Tok::NotEq},
        {"->", Tok::Arrow},      {"<", Tok::Less},     {"(", Tok::LParen},  {")", Tok::RParen}, {"{", Tok::LBrace},
        {"}", Tok::RBrace},      {",", Tok::Comma},    {".", Tok::Dot},     {":", Tok::Colon},  {"+", Tok::Plus},
    };
    bool matched = false;
    for (const auto& [sym, kind] : kSymbols) {
      if (starts(sym)) {
        out.push_back({kind, std::string(sym), loc});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError{loc, "syntax", std::string("unexpected character '") + c + "'"};
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Raw expressions

struct Raw {
  enum class K : std::uint8_t { Ident, Number, Call, Bool, Not, Binary, Compare, Plus, Quant, BoundedQuant };
  explicit Raw(K kind = K::Ident) : k(kind) {}

  K k;
  std::string text;
  std::int64_t number = 0;
  Formula::Kind op = Formula::Kind::True;  // Binary, Compare, quantifier kind
  bool negated = false;                    // `!=`
  std::vector<Param> vars;                 // Quant
  bool has_lower = false;                  // BoundedQuant: args = [lower] middle upper body
  SitRel lower_rel = SitRel::LessEq;
  SitRel upper_rel = SitRel::LessEq;
  std::vector<Raw> args;
  SourceLoc loc;
};

bool is_keyword(std::string_view s) {
  return s == "and" || s == "or" || s == "not" || s == "implies" || s == "iff" || s == "exists" || s == "forall" ||
         s == "true" || s == "false";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  Token expect(Tok kind, std::string_view what) {
    if (!at(kind)) fail("expected " + std::string(what));
    return toks_[pos_++];
  }

  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'");
    ++pos_;
  }

  bool accept(Tok kind) {
    if (!at(kind)) return false;
    ++pos_;
    return true;
  }

  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError{t.loc, "syntax", message + ", found " + found};
  }

  std::int64_t number() {
    const Token t = expect(Tok::Number, "a number");
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw SyntaxError{t.loc, "syntax", "number out of range"};
    return v;
  }

  std::string ident(std::string_view what) { return expect(Tok::Ident, what).text; }

  // formula := iff
  Raw formula() { return iff(); }

  Raw iff() {
    Raw lhs = implies();
    while (at_word("iff")) {
      const SourceLoc loc = peek().loc;
      ++pos_;
      lhs = binary(Formula::Kind::Iff, std::move(lhs), implies(), loc);
    }
    return lhs;
  }

  Raw implies() {
    Raw lhs = disjunction();
    if (at_word("implies")) {
      const SourceLoc loc = peek().loc;
      ++pos_;
      return binary(Formula::Kind::Implies, std::move(lhs), implies(), loc);
    }
    return lhs;
  }

  Raw disjunction() {
    Raw lhs = conjunction();
    while (at_word("or")) {
      const SourceLoc loc = peek().loc;
      ++pos_;
      lhs = binary(Formula::Kind::Or, std::move(lhs), conjunction(), loc);
    }
    return lhs;
  }

  Raw conjunction() {
    Raw lhs = unary();
    while (at_word("and")) {
      const SourceLoc loc = peek().loc;
      ++pos_;
      lhs = binary(Formula::Kind::And, std::move(lhs), unary(), loc);
    }
    return lhs;
  }

  Raw unary() {
    const SourceLoc loc = peek().loc;
    if (accept_word("not")) {
      Raw r{Raw::K::Not};
      r.loc = loc;
      r.args.push_back(unary());
      return r;
    }
    if (at_word("exists") || at_word("forall")) return quantifier();
    return comparison();
  }

  Raw quantifier() {
    const SourceLoc loc = peek().loc;
    const bool exists = peek().text == "exists";
    ++pos_;
    const std::string var = ident("a variable");
    expect(Tok::Colon, "':'");
    Raw r;
    r.loc = loc;
    const bool sorted = peek().kind == Tok::Ident && parse_sort(peek().text) &&
                        (peek(1).kind == Tok::Comma || peek(1).kind == Tok::Dot);
    if (sorted) {
      r.k = Raw::K::Quant;
      r.op = exists ? Formula::Kind::Exists : Formula::Kind::Forall;
      r.vars.push_back({var, *parse_sort(ident("a sort"))});
      while (accept(Tok::Comma)) {
        const std::string v = ident("a variable");
        expect(Tok::Colon, "':'");
        const Token st = expect(Tok::Ident, "a sort");
        auto sort = parse_sort(st.text);
        if (!sort) throw SyntaxError{st.loc, "unknown-sort", "unknown sort '" + st.text + "'"};
        r.vars.push_back({v, *sort});
      }
      expect(Tok::Dot, "'.'");
      r.args.push_back(formula());
      return r;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Dot && !is_constant_name(peek().text))
      throw SyntaxError{peek().loc, "unknown-sort", "unknown sort '" + peek().text + "'"};
    r.k = Raw::K::BoundedQuant;
    r.op = exists ? Formula::Kind::BoundedExists : Formula::Kind::BoundedForall;
    r.text = var;
    Raw first = additive();
    const SitRel rel1 = sit_rel();
    Raw second = additive();
    if (at(Tok::SitLess) || at(Tok::SitLessEq) || at(Tok::EqEq)) {
      const SitRel rel2 = sit_rel();
      r.has_lower = true;
      r.lower_rel = rel1;
      r.upper_rel = rel2;
      r.args.push_back(std::move(first));
      r.args.push_back(std::move(second));
      r.args.push_back(additive());
    } else {
      r.upper_rel = rel1;
      r.args.push_back(std::move(first));
      r.args.push_back(std::move(second));
    }
    expect(Tok::Dot, "'.'");
    r.args.push_back(formula());
    return r;
  }

  SitRel sit_rel() {
    if (accept(Tok::SitLess)) return SitRel::Less;
    if (accept(Tok::SitLessEq)) return SitRel::LessEq;
    if (accept(Tok::EqEq)) return SitRel::Equal;
    fail("expected '<<', '<<=' or '=='");
  }

  Raw comparison() {
    Raw lhs = additive();
    const SourceLoc loc = peek().loc;
    Formula::Kind kind;
    bool negated = false;
    switch (peek().kind) {
      case Tok::EqEq: kind = Formula::Kind::Equal; break;
      case Tok::NotEq:
        kind = Formula::Kind::Equal;
        negated = true;
        break;
      case Tok::Less: kind = Formula::Kind::Less; break;
      case Tok::LessEq: kind = Formula::Kind::LessEq; break;
      case Tok::SitLess: kind = Formula::Kind::SitLess; break;
      case Tok::SitLessEq: kind = Formula::Kind::SitLessEq; break;
      default: return lhs;
    }
    ++pos_;
    Raw r{Raw::K::Compare};
    r.op = kind;
    r.negated = negated;
    r.loc = loc;
    r.args.push_back(std::move(lhs));
    r.args.push_back(additive());
    return r;
  }

  Raw additive() {
    Raw lhs = primary();
    while (at(Tok::Plus)) {
      Raw r{Raw::K::Plus};
      r.loc = peek().loc;
      ++pos_;
      r.args.push_back(std::move(lhs));
      r.args.push_back(primary());
      lhs = std::move(r);
    }
    return lhs;
  }

  Raw primary() {
    const Token& t = peek();
    Raw r;
    r.loc = t.loc;
    if (t.kind == Tok::Number) {
      r.k = Raw::K::Number;
      r.number = number();
      return r;
    }
    if (accept(Tok::LParen)) {
      Raw inner = formula();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind != Tok::Ident) fail("expected a term or formula");
    if (t.text == "true" || t.text == "false") {
      r.k = Raw::K::Bool;
      r.text = t.text;
      ++pos_;
      return r;
    }
    if (is_keyword(t.text)) fail("unexpected keyword");
    r.text = t.text;
    ++pos_;
    if (accept(Tok::LParen)) {
      r.k = Raw::K::Call;
      if (!at(Tok::RParen)) {
        r.args.push_back(formula());
        while (accept(Tok::Comma)) r.args.push_back(formula());
      }
      expect(Tok::RParen, "')'");
    }
    return r;
  }

  std::size_t pos_ = 0;

 private:
  static Raw binary(Formula::Kind kind, Raw lhs, Raw rhs, SourceLoc loc) {
    Raw r{Raw::K::Binary};
    r.op = kind;
    r.loc = loc;
    r.args.push_back(std::move(lhs));
    r.args.push_back(std::move(rhs));
    return r;
  }

  std::vector<Token> toks_;
};

// ---------------------------------------------------------------------------
// Resolution

// Runs a term/formula factory, reporting its SortError at `loc`.
template <typename Fn>
auto guard(SourceLoc loc, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw SyntaxError{loc, "sort-error", e.what()};
  }
}

class Resolver {
 public:
  Resolver(const Theory& th, bool allow_suppressed, bool auto_object_vars)
      : th_(th), allow_suppressed_(allow_suppressed), auto_vars_(auto_object_vars) {}

  std::map<std::string, Sort> scope;

  Formula formula(const Raw& r) {
    using K = Raw::K;
    switch (r.k) {
      case K::Bool: return Formula::truth(r.text == "true");
      case K::Not: return Formula::negate(formula(r.args[0]));
      case K::Binary: return Formula::binary(r.op, formula(r.args[0]), formula(r.args[1]));
      case K::Compare: {
        Term lhs = term(r.args[0]);
        Term rhs = term(r.args[1]);
        Formula f = guard(r.loc, [&] { return Formula::compare(r.op, lhs, rhs); });
        return r.negated ? Formula::negate(f) : f;
      }
      case K::Quant: {
        auto saved = scope;
        std::vector<Term> vars;
        for (const auto& p : r.vars) {
          vars.push_back(Term::variable(p.name, p.sort));
          scope[p.name] = p.sort;
        }
        Formula body = formula(r.args[0]);
        scope = std::move(saved);
        return Formula::quantified(r.op, std::move(vars), std::move(body));
      }
      case K::BoundedQuant: {
        SituationBound b;
        std::size_t i = 0;
        if (r.has_lower) {
          b.lower = term(r.args[i++]);
          b.lower_rel = r.lower_rel;
        }
        const Raw& middle = r.args[i++];
        b.upper = term(r.args[i++]);
        b.upper_rel = r.upper_rel;
        auto saved = scope;
        scope[r.text] = Sort::Situation;
        b.var = Term::variable(r.text, Sort::Situation);
        b.middle = term(middle);
        Formula body = formula(r.args[i]);
        scope = std::move(saved);
        return guard(r.loc, [&] { return Formula::bounded(r.op, b, body); });
      }
      case K::Call: return call_formula(r);
      case K::Ident:
      case K::Number:
      case K::Plus: break;
    }
    throw SyntaxError{r.loc, "syntax", "expected a formula"};
  }

  Term term(const Raw& r) {
    using K = Raw::K;
    switch (r.k) {
      case K::Number:
        return guard(r.loc, [&] { return Term::number(TimePoint{r.number}); });
      case K::Plus: {
        Term lhs = term(r.args[0]);
        Term rhs = term(r.args[1]);
        return guard(r.loc, [&] { return Term::plus(lhs, rhs); });
      }
      case K::Ident: {
        if (r.text == "S0") return Term::initial();
        if (is_constant_name(r.text)) return Term::constant(r.text);
        auto it = scope.find(r.text);
        if (it != scope.end()) return Term::variable(r.text, it->second);
        if (auto_vars_) {
          scope[r.text] = Sort::Object;
          return Term::variable(r.text, Sort::Object);
        }
        throw SyntaxError{r.loc, "unknown-variable", "variable '" + r.text + "' is not in scope"};
      }
      case K::Call: return call_term(r);
      default: break;
    }
    throw SyntaxError{r.loc, "syntax", "expected a term"};
  }

 private:
  void check_arg(const Term& t, Sort sort, const Raw& r, const std::string& where) {
    if (t.sort() != sort)
      throw SyntaxError{r.loc, "sort-error",
                        where + ": expected " + std::string(sort_name(sort)) + ", got " + t.str() + " of sort " +
                            std::string(sort_name(t.sort()))};
  }

  // Object arguments of a fluent plus an optional trailing situation.
  std::pair<std::vector<Term>, std::optional<Term>> fluent_args(const Raw& r, const FluentDecl& decl) {
    const std::size_t n = decl.params.size();
    if (r.args.size() != n && r.args.size() != n + 1)
      throw SyntaxError{r.loc, "arity", "fluent " + decl.name + " takes " + std::to_string(n) + " argument(s) and a situation"};
    std::vector<Term> args;
    for (std::size_t i = 0; i < n; ++i) {
      args.push_back(term(r.args[i]));
      check_arg(args.back(), decl.params[i].sort, r.args[i], decl.name);
    }
    std::optional<Term> sit;
    if (r.args.size() == n + 1) {
      sit = term(r.args[n]);
      check_arg(*sit, Sort::Situation, r.args[n], decl.name);
    } else if (!allow_suppressed_) {
      throw SyntaxError{r.loc, "suppressed-situation", "fluent " + decl.name + " needs a situation argument here"};
    }
    return {std::move(args), std::move(sit)};
  }

  Formula call_formula(const Raw& r) {
    if (r.text == "Poss") {
      if (r.args.size() != 2) throw SyntaxError{r.loc, "arity", "Poss takes an action and a situation"};
      Term a = term(r.args[0]);
      Term s = term(r.args[1]);
      return guard(r.loc, [&] { return Formula::poss(a, s); });
    }
    if (const FluentDecl* f = th_.find_fluent(r.text)) {
      if (f->functional) throw SyntaxError{r.loc, "sort-error", "functional fluent " + r.text + " used as a formula"};
      auto [args, sit] = fluent_args(r, *f);
      return Formula::fluent(r.text, std::move(args), std::move(sit));
    }
    if (th_.find_action(r.text)) throw SyntaxError{r.loc, "sort-error", "action " + r.text + " used as a formula"};
    if (r.text == "do" || r.text == "start" || r.text == "time")
      throw SyntaxError{r.loc, "sort-error", r.text + " is a term, not a formula"};
    if (is_constant_name(r.text) || is_keyword(r.text))
      throw SyntaxError{r.loc, "syntax", "predicate names start with a lowercase letter: " + r.text};
    std::vector<Term> args;
    for (const auto& a : r.args) {
      args.push_back(term(a));
      if (args.back().sort() == Sort::Situation)
        throw SyntaxError{a.loc, "undeclared-fluent", "'" + r.text + "' takes a situation but is not a declared fluent"};
    }
    return Formula::rigid(r.text, std::move(args));
  }

  Term call_term(const Raw& r) {
    if (r.text == "do") {
      if (r.args.size() != 2) throw SyntaxError{r.loc, "arity", "do takes an action and a situation"};
      Term a = term(r.args[0]);
      Term s = term(r.args[1]);
      return guard(r.loc, [&] { return Term::do_(a, s); });
    }
    if (r.text == "start" || r.text == "time") {
      if (r.args.size() != 1) throw SyntaxError{r.loc, "arity", r.text + " takes one argument"};
      Term x = term(r.args[0]);
      return guard(r.loc, [&] { return r.text == "start" ? Term::start(x) : Term::time_of(x); });
    }
    if (const ActionDecl* a = th_.find_action(r.text)) {
      const auto& params = a->sig.params;
      if (r.args.size() != params.size())
        throw SyntaxError{r.loc, "arity", "action " + r.text + " takes " + std::to_string(params.size()) + " argument(s)"};
      std::vector<Term> args;
      for (std::size_t i = 0; i < params.size(); ++i) {
        args.push_back(term(r.args[i]));
        check_arg(args.back(), params[i].sort, r.args[i], r.text);
      }
      return guard(r.loc, [&] { return Term::action(r.text, args); });
    }
    if (const FluentDecl* f = th_.find_fluent(r.text); f && f->functional) {
      auto [args, sit] = fluent_args(r, *f);
      return Term::function(r.text, std::move(args), std::move(sit));
    }
    throw SyntaxError{r.loc, "unknown-function", "'" + r.text + "' is not a declared action or functional fluent"};
  }

  const Theory& th_;
  bool allow_suppressed_;
  bool auto_vars_;
};

// ---------------------------------------------------------------------------
// Statements

struct PendingAxiom {
  enum class Owner : std::uint8_t { Action, Fluent, Obliged, CompPattern, CompFormula } owner;
  std::size_t index;
  std::size_t sub = 0;
  Raw body;
};

struct RawObligation {
  ObligationDecl decl;
  Raw obliged;
};

class TheoryReader {
 public:
  TheoryReader(std::string_view text, std::string name) : p_(lex(text)) { th_.name = std::move(name); }

  ParseResult run() {
    ParseResult result;
    try {
      while (!p_.at(Tok::End)) statement();
    } catch (const SyntaxError& e) {
      diags_.push_back({e.loc, e.code, e.message});
      result.diagnostics = std::move(diags_);
      return result;
    }
    resolve();
    result.theory = std::move(th_);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void statement() {
    const Token t = p_.peek();
    if (t.kind != Tok::Ident) p_.fail("expected a declaration");
    if (t.text == "epoch") return epoch();
    if (t.text == "action") return action();
    if (t.text == "fluent" || t.text == "funfluent") return fluent();
    if (t.text == "poss" && p_.peek(1).kind == Tok::Ident) return detached_poss();
    if (t.text == "ssa" && p_.peek(1).kind == Tok::Ident) return detached_ssa();
    if (t.text == "rigid" || t.text == "init" || t.text == "alphabet") return facts();
    if (t.text == "obliges") return obliges();
    if (t.text == "compensate") return compensate();
    p_.fail("expected a declaration");
  }

  void epoch() {
    th_.epoch_loc = p_.peek().loc;
    p_.expect_word("epoch");
    th_.epoch = TimePoint{p_.number()};
    p_.expect(Tok::Dot, "'.'");
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    p_.expect(Tok::LParen, "'('");
    if (!p_.at(Tok::RParen)) {
      do {
        const std::string name = p_.ident("a parameter name");
        p_.expect(Tok::Colon, "':'");
        const Token st = p_.expect(Tok::Ident, "a sort");
        auto sort = parse_sort(st.text);
        if (!sort) throw SyntaxError{st.loc, "unknown-sort", "unknown sort '" + st.text + "'"};
        for (const auto& q : out)
          if (q.name == name) throw SyntaxError{st.loc, "duplicate-declaration", "parameter " + name + " declared twice"};
        out.push_back({name, *sort});
      } while (p_.accept(Tok::Comma));
    }
    p_.expect(Tok::RParen, "')'");
    return out;
  }

  bool declared(const std::string& name) const { return th_.find_action(name) || th_.find_fluent(name); }

  void action() {
    p_.expect_word("action");
    const Token name = p_.expect(Tok::Ident, "an action name");
    ActionDecl decl;
    decl.loc = name.loc;
    decl.sig = {name.text, params()};
    std::size_t index = th_.actions.size();
    for (std::size_t i = 0; i < th_.actions.size(); ++i)
      if (th_.actions[i].sig.name == name.text) index = i;
    const bool redeclared = declared(name.text);
    if (redeclared)
      diags_.push_back({name.loc, "duplicate-declaration", "'" + name.text + "' is declared twice"});
    if (index == th_.actions.size()) th_.actions.push_back(std::move(decl));
    if (p_.at_word("poss")) {
      const SourceLoc loc = p_.peek().loc;
      p_.expect_word("poss");
      p_.expect(Tok::Colon, "':'");
      Raw body = p_.formula();
      if (has_pending(PendingAxiom::Owner::Action, index)) {
        if (!redeclared) diags_.push_back({loc, "duplicate-apa", "duplicate APA for " + name.text});
      } else {
        th_.actions[index].poss_loc = loc;
        pending_.push_back({PendingAxiom::Owner::Action, index, 0, std::move(body)});
      }
    }
    p_.expect(Tok::Dot, "'.'");
  }

  void fluent() {
    const bool functional = p_.peek().text == "funfluent";
    ++p_.pos_;
    const Token name = p_.expect(Tok::Ident, "a fluent name");
    FluentDecl decl;
    decl.name = name.text;
    decl.loc = name.loc;
    decl.functional = functional;
    decl.params = params();
    if (functional) {
      p_.expect(Tok::Colon, "':'");
      const Token st = p_.expect(Tok::Ident, "a sort");
      auto sort = parse_sort(st.text);
      if (!sort) throw SyntaxError{st.loc, "unknown-sort", "unknown sort '" + st.text + "'"};
      if (*sort != Sort::Object)
        throw SyntaxError{st.loc, "unknown-sort", "functional fluents take values of sort object"};
      decl.value_sort = *sort;
    }
    std::size_t index = th_.fluents.size();
    for (std::size_t i = 0; i < th_.fluents.size(); ++i)
      if (th_.fluents[i].name == name.text) index = i;
    const bool redeclared = declared(name.text);
    if (redeclared)
      diags_.push_back({name.loc, "duplicate-declaration", "'" + name.text + "' is declared twice"});
    if (index == th_.fluents.size()) th_.fluents.push_back(std::move(decl));
    if (p_.at_word("ssa")) {
      const SourceLoc loc = p_.peek().loc;
      p_.expect_word("ssa");
      p_.expect(Tok::Colon, "':'");
      Raw body = p_.formula();
      if (has_pending(PendingAxiom::Owner::Fluent, index)) {
        if (!redeclared) diags_.push_back({loc, "duplicate-ssa", "duplicate SSA for " + name.text});
      } else {
        th_.fluents[index].ssa_loc = loc;
        pending_.push_back({PendingAxiom::Owner::Fluent, index, 0, std::move(body)});
      }
    }
    p_.expect(Tok::Dot, "'.'");
  }

  bool has_pending(PendingAxiom::Owner owner, std::size_t index) const {
    for (const auto& a : pending_)
      if (a.owner == owner && a.index == index) return true;
    return false;
  }

  void detached_poss() {
    const SourceLoc loc = p_.peek().loc;
    p_.expect_word("poss");
    const Token name = p_.expect(Tok::Ident, "an action name");
    p_.expect(Tok::Colon, "':'");
    Raw body = p_.formula();
    p_.expect(Tok::Dot, "'.'");
    std::size_t index = th_.actions.size();
    for (std::size_t i = 0; i < th_.actions.size(); ++i)
      if (th_.actions[i].sig.name == name.text) index = i;
    if (index == th_.actions.size()) {
      diags_.push_back({name.loc, "missing-declaration", "precondition axiom for undeclared action " + name.text});
    } else if (has_pending(PendingAxiom::Owner::Action, index)) {
      diags_.push_back({loc, "duplicate-apa", "duplicate APA for " + name.text});
    } else {
      th_.actions[index].poss_loc = loc;
      pending_.push_back({PendingAxiom::Owner::Action, index, 0, std::move(body)});
    }
  }

  void detached_ssa() {
    const SourceLoc loc = p_.peek().loc;
    p_.expect_word("ssa");
    const Token name = p_.expect(Tok::Ident, "a fluent name");
    p_.expect(Tok::Colon, "':'");
    Raw body = p_.formula();
    p_.expect(Tok::Dot, "'.'");
    std::size_t index = th_.fluents.size();
    for (std::size_t i = 0; i < th_.fluents.size(); ++i)
      if (th_.fluents[i].name == name.text) index = i;
    if (index == th_.fluents.size()) {
      diags_.push_back({name.loc, "missing-declaration", "successor state axiom for undeclared fluent " + name.text});
    } else if (has_pending(PendingAxiom::Owner::Fluent, index)) {
      diags_.push_back({loc, "duplicate-ssa", "duplicate SSA for " + name.text});
    } else {
      th_.fluents[index].ssa_loc = loc;
      pending_.push_back({PendingAxiom::Owner::Fluent, index, 0, std::move(body)});
    }
  }

  GroundAtom ground_atom() {
    GroundAtom atom;
    atom.name = p_.ident("a predicate name");
    p_.expect(Tok::LParen, "'('");
    if (!p_.at(Tok::RParen)) {
      do {
        const Token c = p_.expect(Tok::Ident, "an object constant");
        if (!is_constant_name(c.text)) throw SyntaxError{c.loc, "syntax", "facts take constants, got '" + c.text + "'"};
        atom.args.push_back(c.text);
      } while (p_.accept(Tok::Comma));
    }
    p_.expect(Tok::RParen, "')'");
    return atom;
  }

  void facts() {
    const std::string block = p_.ident("a block name");
    p_.expect(Tok::Colon, "':'");
    while (p_.at(Tok::Ident) && p_.peek(1).kind == Tok::LParen) {
      const SourceLoc loc = p_.peek().loc;
      GroundAtom atom = ground_atom();
      if (block == "init" && p_.accept(Tok::EqEq)) {
        const Token v = p_.expect(Tok::Ident, "an object constant");
        if (!is_constant_name(v.text)) throw SyntaxError{v.loc, "syntax", "values are constants, got '" + v.text + "'"};
        if (!th_.init_functions.emplace(atom, v.text).second)
          diags_.push_back({loc, "duplicate-declaration", "two initial values for " + atom.str()});
      } else if (block == "init") {
        th_.init.insert(std::move(atom));
      } else if (block == "rigid") {
        th_.rigids.insert(std::move(atom));
      } else {
        th_.alphabet.push_back(std::move(atom));
      }
      p_.expect(Tok::Dot, "'.'");
    }
  }

  void obliges() {
    RawObligation o;
    o.decl.loc = p_.peek().loc;
    p_.expect_word("obliges");
    o.decl.trigger = p_.ident("a trigger action");
    p_.expect(Tok::Arrow, "'->'");
    o.obliged = p_.formula();
    bool has_type = false, has_window = false;
    while (!p_.at(Tok::Dot)) {
      const Token kw = p_.expect(Tok::Ident, "'type', 'deadline', 'window' or 'stoppers'");
      if (kw.text == "type") {
        has_type = true;
        const Token t = p_.expect(Tok::Ident, "an obligation type");
        if (t.text == "punctual") {
          o.decl.type = ObligationType::Punctual;
        } else if (t.text == "maintenance") {
          o.decl.type = ObligationType::Maintenance;
        } else if (t.text == "perdurant") {
          o.decl.type = ObligationType::Perdurant;
        } else if (t.text == "achievement") {
          if (p_.accept_word("preemptive"))
            o.decl.type = ObligationType::AchievementPreemptive;
          else if (p_.accept_word("nonpreemptive"))
            o.decl.type = ObligationType::AchievementNonpreemptive;
          else
            p_.fail("expected 'preemptive' or 'nonpreemptive'");
        } else {
          throw SyntaxError{t.loc, "bad-obligation", "unknown obligation type '" + t.text + "'"};
        }
      } else if (kw.text == "deadline") {
        o.decl.deadline_offset = TimePoint{p_.number()};
      } else if (kw.text == "window") {
        has_window = true;
        o.decl.window = TimePoint{p_.number()};
      } else if (kw.text == "stoppers") {
        p_.expect(Tok::LBrace, "'{'");
        if (!p_.at(Tok::RBrace)) {
          do o.decl.stoppers.push_back(p_.ident("an action name"));
          while (p_.accept(Tok::Comma));
        }
        p_.expect(Tok::RBrace, "'}'");
      } else {
        throw SyntaxError{kw.loc, "syntax", "unexpected '" + kw.text + "' in obligation"};
      }
    }
    p_.expect(Tok::Dot, "'.'");
    if (!has_type) diags_.push_back({o.decl.loc, "bad-obligation", "obligation on " + o.decl.trigger + " has no type"});
    if (!has_window && o.decl.type != ObligationType::Punctual)
      diags_.push_back({o.decl.loc, "bad-obligation", "obligation on " + o.decl.trigger + " has no window"});
    obligations_.push_back(std::move(o));
  }

  void compensate() {
    const SourceLoc loc = p_.peek().loc;
    p_.expect_word("compensate");
    Raw pattern = p_.formula();
    p_.expect_word("with");
    p_.expect(Tok::LBrace, "'{'");
    std::vector<Raw> comps;
    if (!p_.at(Tok::RBrace)) {
      do comps.push_back(p_.formula());
      while (p_.accept(Tok::Comma));
    }
    p_.expect(Tok::RBrace, "'}'");
    TimePoint window{10};
    if (p_.accept_word("window")) window = TimePoint{p_.number()};
    p_.expect(Tok::Dot, "'.'");
    comp_raw_.push_back({std::move(pattern), std::move(comps), window, loc});
  }

  // Second pass: resolve every raw body against the full declaration table.
  void resolve() {
    for (auto& ax : pending_) {
      try {
        Resolver r(th_, false, false);
        if (ax.owner == PendingAxiom::Owner::Action) {
          auto& decl = th_.actions[ax.index];
          for (const auto& p : decl.sig.params) r.scope[p.name] = p.sort;
          r.scope["s"] = Sort::Situation;
          decl.precondition = r.formula(ax.body);
        } else {
          auto& decl = th_.fluents[ax.index];
          for (const auto& p : decl.params) r.scope[p.name] = p.sort;
          r.scope["a"] = Sort::Action;
          r.scope["s"] = Sort::Situation;
          if (decl.functional) r.scope[std::string(Theory::kValueVariable)] = decl.value_sort;
          decl.ssa = r.formula(ax.body);
        }
      } catch (const SyntaxError& e) {
        diags_.push_back({e.loc, e.code, e.message});
      }
    }
    for (auto& o : obligations_) {
      try {
        Resolver r(th_, true, false);
        if (const ActionDecl* trig = th_.find_action(o.decl.trigger)) {
          for (const auto& p : trig->sig.params)
            if (p.sort != Sort::Time) r.scope[p.name] = p.sort;
        } else {
          diags_.push_back({o.decl.loc, "bad-obligation", "trigger " + o.decl.trigger + " is not a declared action"});
          continue;
        }
        o.decl.obliged = r.formula(o.obliged);
        th_.obligations.push_back(std::move(o.decl));
      } catch (const SyntaxError& e) {
        diags_.push_back({e.loc, e.code, e.message});
      }
    }
    for (auto& c : comp_raw_) {
      try {
        Resolver r(th_, true, true);
        CompensationRule rule;
        rule.loc = c.loc;
        rule.window = c.window;
        rule.pattern = r.formula(c.pattern);
        for (const auto& f : c.comps) rule.compensations.push_back(r.formula(f));
        th_.compensations.push_back(std::move(rule));
      } catch (const SyntaxError& e) {
        diags_.push_back({e.loc, e.code, e.message});
      }
    }
  }

  struct RawComp {
    Raw pattern;
    std::vector<Raw> comps;
    TimePoint window;
    SourceLoc loc;
  };

  Parser p_;
  Theory th_;
  std::vector<Diagnostic> diags_;
  std::vector<PendingAxiom> pending_;
  std::vector<RawObligation> obligations_;
  std::vector<RawComp> comp_raw_;
};

}  // namespace

ParseResult parse_theory(std::string_view text, std::string name) {
  try {
    return TheoryReader(text, std::move(name)).run();
  } catch (const SyntaxError& e) {
    ParseResult r;
    r.diagnostics.push_back({e.loc, e.code, e.message});
    return r;
  }
}

Formula parse_formula(std::string_view text, const Theory& theory, const std::vector<Param>& scope,
                      bool allow_suppressed) {
  try {
    Parser p(lex(text));
    Raw raw = p.formula();
    if (!p.at(Tok::End)) p.fail("trailing input after formula");
    Resolver r(theory, allow_suppressed, false);
    for (const auto& v : scope) r.scope[v.name] = v.sort;
    return r.formula(raw);
  } catch (const SyntaxError& e) {
    throw Error(std::to_string(e.loc.line) + ":" + std::to_string(e.loc.column) + ": " + e.code + ": " + e.message);
  }
}

GroundAction parse_ground_action(std::string_view text) {
  try {
    Parser p(lex(text));
    GroundAction a;
    a.functor = p.ident("an action name");
    if (is_constant_name(a.functor)) p.fail("action names start with a lowercase letter");
    p.expect(Tok::LParen, "'('");
    std::optional<std::int64_t> time;
    if (!p.at(Tok::RParen)) {
      do {
        if (time) p.fail("the time must be the last argument");
        if (p.at(Tok::Number)) {
          time = p.number();
        } else {
          const Token c = p.expect(Tok::Ident, "an object constant or a time");
          if (!is_constant_name(c.text))
            throw SyntaxError{c.loc, "syntax", "ground actions take constants, got '" + c.text + "'"};
          a.args.push_back(c.text);
        }
      } while (p.accept(Tok::Comma));
    }
    p.expect(Tok::RParen, "')'");
    if (!p.at(Tok::End)) p.fail("trailing input after action");
    if (!time) throw SyntaxError{{1, 1}, "syntax", "action " + a.functor + " has no time argument"};
    a.time = TimePoint{*time};
    return a;
  } catch (const SyntaxError& e) {
    throw Error("column " + std::to_string(e.loc.column) + ": " + e.message);
  }
}

std::vector<GroundAction> parse_trace(std::string_view text) {
  std::vector<GroundAction> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      out.push_back(parse_ground_action(line));
    } catch (const Error& e) {
      throw TraceSyntaxError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace oblicalc
