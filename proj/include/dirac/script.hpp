#pragma once

#include <cctype>

#include "dirac/descent.hpp"

namespace dirac::script {

// ---------------------------------------------------------------------------
// Lexing

struct Token {
  enum class Kind { Ident, Int, Sym, Sep, End };
  Kind kind;
  std::string text;
  int line = 1;
  int col = 1;
};

struct ParseError : std::runtime_error {
  int line, col;
  std::string expected;
  ParseError(int l, int c, std::string exp)
      : std::runtime_error("parse error at line " + std::to_string(l) + ", column " +
                           std::to_string(c) + ": expected " + exp),
        line(l),
        col(c),
        expected(std::move(exp)) {}
};

inline std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Token::Kind k, std::string s, int l, int c) {
    out.push_back({k, std::move(s), l, c});
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ch == '\n' || ch == ';') {
      push(Token::Kind::Sep, ";", line, col);
      if (ch == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      ++col;
      continue;
    }
    int l = line, c = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string s;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_')) {
        s += text[i++];
        ++col;
      }
      push(Token::Kind::Ident, std::move(s), l, c);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string s;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        s += text[i++];
        ++col;
      }
      push(Token::Kind::Int, std::move(s), l, c);
      continue;
    }
    if (ch == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      push(Token::Kind::Sym, "->", l, c);
      i += 2;
      col += 2;
      continue;
    }
    static const std::string singles = "()[]{}:,=/*+-^";
    if (singles.find(ch) != std::string::npos) {
      push(Token::Kind::Sym, std::string(1, ch), l, c);
      ++i;
      ++col;
      continue;
    }
    throw ParseError(l, c, "a token (found '" + std::string(1, ch) + "')");
  }
  push(Token::Kind::End, "", line, col);
  return out;
}

// ---------------------------------------------------------------------------
// Expressions

struct Expr {
  enum class Kind { Num, Var, Add, Sub, Mul, Pow, Neg };
  Kind kind = Kind::Num;
  long num = 0;                // Num value or Pow exponent
  std::string name;            // Var
  std::vector<Expr> args;      // operands

  bool operator==(const Expr&) const = default;

  std::string str() const {
    auto paren = [](const Expr& e, bool need) {
      return need ? "(" + e.str() + ")" : e.str();
    };
    switch (kind) {
      case Kind::Num: return std::to_string(num);
      case Kind::Var: return name;
      case Kind::Add: return args[0].str() + " + " + args[1].str();
      case Kind::Sub:
        return args[0].str() + " - " +
               paren(args[1], args[1].kind == Kind::Add || args[1].kind == Kind::Sub);
      case Kind::Mul:
        return paren(args[0], args[0].kind == Kind::Add || args[0].kind == Kind::Sub) +
               "*" +
               paren(args[1], args[1].kind == Kind::Add || args[1].kind == Kind::Sub ||
                                  args[1].kind == Kind::Mul);
      case Kind::Pow:
        return paren(args[0], args[0].kind != Kind::Num && args[0].kind != Kind::Var) +
               "^" + std::to_string(num);
      case Kind::Neg:
        return "-" + paren(args[0], args[0].kind == Kind::Add || args[0].kind == Kind::Sub);
    }
    return "";
  }
};

// ---------------------------------------------------------------------------
// Statements

struct Statement {
  enum class Kind {
    Base, Ring, Ideal, Alg, Module, Map, Field, Cover,
    Piece, Spec, Check, Omega, Jacobian, Localize, Tor1, MinimalGens,
    Integral, Amitsur, Descend, EvenPart
  };
  Kind kind = Kind::Base;
  std::string name;                                   // defined or primary name
  std::vector<std::string> names;                     // auxiliary names
  std::vector<std::pair<std::string, long>> typed;    // name:degree lists
  std::vector<long> numbers;                          // bare degree lists
  std::vector<Expr> exprs;
  std::vector<std::pair<std::string, Expr>> images;   // map images
  long number = 0;                                    // `at <d>` argument
  std::string word;                                   // base name, check kind, ...

  bool operator==(const Statement&) const = default;

  std::string str() const {
    auto exprlist = [&](const std::vector<Expr>& es) {
      std::string s;
      for (std::size_t i = 0; i < es.size(); ++i) s += (i ? ", " : "") + es[i].str();
      return s;
    };
    switch (kind) {
      case Kind::Base: return "base " + word;
      case Kind::Ring: {
        std::string s = "ring " + name + " = free(";
        for (std::size_t i = 0; i < typed.size(); ++i)
          s += (i ? ", " : "") + typed[i].first + ":" + std::to_string(typed[i].second);
        return s + ")";
      }
      case Kind::Ideal: return "ideal " + name + " = (" + exprlist(exprs) + ")";
      case Kind::Alg: return "alg " + name + " = " + names[0] + " / " + names[1];
      case Kind::Module: {
        if (word == "residue") return "module " + name + " = residue(" + names[0] + ")";
        std::string s = "module " + name + " = free(" + names[0] + ":";
        for (std::size_t i = 0; i < numbers.size(); ++i)
          s += (i ? ", " : " ") + std::to_string(numbers[i]);
        return s + ")";
      }
      case Kind::Map: {
        std::string s = "map " + name + " : " + names[0] + " -> " + names[1] + " = [";
        for (std::size_t i = 0; i < images.size(); ++i)
          s += (i ? ", " : "") + images[i].first + " -> " + images[i].second.str();
        return s + "]";
      }
      case Kind::Field: {
        std::string s = "field " + name + " = extend(" + word;
        for (const auto& [n, v] : typed) s += ", " + n + ":" + std::to_string(v);
        return s + ")";
      }
      case Kind::Cover: return "cover " + name + " = (" + names[0] + ": " + exprlist(exprs) + ")";
      case Kind::Piece: return "piece " + name + " at " + std::to_string(number);
      case Kind::Spec: return "spec " + name;
      case Kind::Check: return "check " + word + " " + name;
      case Kind::Omega: return "omega " + name;
      case Kind::Jacobian: return "jacobian " + name;
      case Kind::Localize: return "localize " + name + " at " + exprs[0].str();
      case Kind::Tor1: return "tor1 " + names[0] + " " + names[1] + " at " + std::to_string(number);
      case Kind::MinimalGens: return "minimalgens " + name;
      case Kind::Integral:
        return "integral " + exprs[0].str() + " in " + name + " over (" +
               [&] {
                 std::string s;
                 for (std::size_t i = 1; i < exprs.size(); ++i)
                   s += (i > 1 ? ", " : "") + exprs[i].str();
                 return s;
               }() + ")";
      case Kind::Amitsur: return "amitsur " + name;
      case Kind::Descend: return "descend " + names[0] + " " + names[1];
      case Kind::EvenPart: return "evenpart " + name;
    }
    return "";
  }
};

struct Script {
  std::vector<Statement> statements;
  bool operator==(const Script&) const = default;

  std::string str() const {
    std::string s;
    for (const auto& st : statements) s += st.str() + "\n";
    return s;
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> ts) : ts_(std::move(ts)) {}

  Script script() {
    Script out;
    skip_seps();
    while (!at(Token::Kind::End)) {
      out.statements.push_back(statement());
      if (!at(Token::Kind::End)) expect_sep();
      skip_seps();
    }
    return out;
  }

  Expr expression() { return expr(); }

 private:
  std::vector<Token> ts_;
  std::size_t i_ = 0;

  const Token& cur() const { return ts_[i_]; }
  bool at(Token::Kind k) const { return cur().kind == k; }
  bool at_sym(const std::string& s) const {
    return cur().kind == Token::Kind::Sym && cur().text == s;
  }
  void advance() { ++i_; }
  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(cur().line, cur().col, expected);
  }
  void skip_seps() {
    while (at(Token::Kind::Sep)) advance();
  }
  void expect_sep() {
    if (!at(Token::Kind::Sep)) fail("';' or newline");
    advance();
  }
  std::string ident() {
    if (!at(Token::Kind::Ident)) fail("an identifier");
    std::string s = cur().text;
    advance();
    return s;
  }
  void sym(const std::string& s) {
    if (!at_sym(s)) fail("'" + s + "'");
    advance();
  }
  std::string keyword() {
    if (!at(Token::Kind::Ident)) fail("a statement keyword");
    return cur().text;
  }
  long integer() {
    bool neg = false;
    if (at_sym("-")) {
      neg = true;
      advance();
    }
    if (!at(Token::Kind::Int)) fail("an integer");
    long v = std::stol(cur().text);
    advance();
    return neg ? -v : v;
  }

  Expr expr() {
    Expr lhs = term();
    while (at_sym("+") || at_sym("-")) {
      bool add = at_sym("+");
      advance();
      Expr rhs = term();
      Expr e;
      e.kind = add ? Expr::Kind::Add : Expr::Kind::Sub;
      e.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(e);
    }
    return lhs;
  }
  Expr term() {
    Expr lhs = factor();
    while (at_sym("*")) {
      advance();
      Expr rhs = factor();
      Expr e;
      e.kind = Expr::Kind::Mul;
      e.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(e);
    }
    return lhs;
  }
  Expr factor() {
    Expr base;
    if (at_sym("-")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.args = {factor()};
      return e;
    } else if (at_sym("(")) {
      advance();
      base = expr();
      sym(")");
    } else if (at(Token::Kind::Int)) {
      base.kind = Expr::Kind::Num;
      base.num = std::stol(cur().text);
      advance();
    } else if (at(Token::Kind::Ident)) {
      base.kind = Expr::Kind::Var;
      base.name = cur().text;
      advance();
    } else {
      fail("an expression");
    }
    while (at_sym("^")) {
      advance();
      if (!at(Token::Kind::Int)) fail("an exponent");
      Expr e;
      e.kind = Expr::Kind::Pow;
      e.num = std::stol(cur().text);
      advance();
      e.args = {std::move(base)};
      base = std::move(e);
    }
    return base;
  }

  Statement statement() {
    std::string kw = keyword();
    advance();
    Statement st;
    if (kw == "base") {
      st.kind = Statement::Kind::Base;
      st.word = ident();
    } else if (kw == "ring") {
      st.kind = Statement::Kind::Ring;
      st.name = ident();
      sym("=");
      if (ident() != "free") fail("'free'");
      sym("(");
      while (!at_sym(")")) {
        std::string g = ident();
        sym(":");
        st.typed.emplace_back(g, integer());
        if (at_sym(",")) advance();
      }
      sym(")");
    } else if (kw == "ideal") {
      st.kind = Statement::Kind::Ideal;
      st.name = ident();
      sym("=");
      sym("(");
      while (!at_sym(")")) {
        st.exprs.push_back(expr());
        if (at_sym(",")) advance();
      }
      sym(")");
    } else if (kw == "alg") {
      st.kind = Statement::Kind::Alg;
      st.name = ident();
      sym("=");
      st.names.push_back(ident());
      sym("/");
      st.names.push_back(ident());
    } else if (kw == "module") {
      st.kind = Statement::Kind::Module;
      st.name = ident();
      sym("=");
      st.word = ident();
      if (st.word != "free" && st.word != "residue") fail("'free' or 'residue'");
      sym("(");
      st.names.push_back(ident());
      if (st.word == "free") {
        sym(":");
        while (!at_sym(")")) {
          st.numbers.push_back(integer());
          if (at_sym(",")) advance();
        }
      }
      sym(")");
    } else if (kw == "map") {
      st.kind = Statement::Kind::Map;
      st.name = ident();
      sym(":");
      st.names.push_back(ident());
      sym("->");
      st.names.push_back(ident());
      sym("=");
      sym("[");
      while (!at_sym("]")) {
        std::string g = ident();
        sym("->");
        st.images.emplace_back(g, expr());
        if (at_sym(",")) advance();
      }
      sym("]");
    } else if (kw == "field") {
      st.kind = Statement::Kind::Field;
      st.name = ident();
      sym("=");
      if (ident() != "extend") fail("'extend'");
      sym("(");
      st.word = ident();
      while (at_sym(",")) {
        advance();
        std::string p = ident();
        sym(":");
        st.typed.emplace_back(p, integer());
      }
      sym(")");
    } else if (kw == "cover") {
      st.kind = Statement::Kind::Cover;
      st.name = ident();
      sym("=");
      sym("(");
      st.names.push_back(ident());
      sym(":");
      while (!at_sym(")")) {
        st.exprs.push_back(expr());
        if (at_sym(",")) advance();
      }
      sym(")");
    } else if (kw == "piece") {
      st.kind = Statement::Kind::Piece;
      st.name = ident();
      if (ident() != "at") fail("'at'");
      st.number = integer();
    } else if (kw == "spec") {
      st.kind = Statement::Kind::Spec;
      st.name = ident();
    } else if (kw == "check") {
      st.kind = Statement::Kind::Check;
      st.word = ident();
      static const char* kinds[] = {"etale", "even", "flat", "unramified", "smooth"};
      if (std::find_if(std::begin(kinds), std::end(kinds),
                       [&](const char* k) { return st.word == k; }) == std::end(kinds))
        fail("one of etale, even, flat, unramified, smooth");
      st.name = ident();
    } else if (kw == "omega") {
      st.kind = Statement::Kind::Omega;
      st.name = ident();
    } else if (kw == "jacobian") {
      st.kind = Statement::Kind::Jacobian;
      st.name = ident();
    } else if (kw == "localize") {
      st.kind = Statement::Kind::Localize;
      st.name = ident();
      if (ident() != "at") fail("'at'");
      st.exprs.push_back(expr());
    } else if (kw == "tor1") {
      st.kind = Statement::Kind::Tor1;
      st.names.push_back(ident());
      st.names.push_back(ident());
      if (ident() != "at") fail("'at'");
      st.number = integer();
    } else if (kw == "minimalgens") {
      st.kind = Statement::Kind::MinimalGens;
      st.name = ident();
    } else if (kw == "integral") {
      st.kind = Statement::Kind::Integral;
      st.exprs.push_back(expr());
      if (ident() != "in") fail("'in'");
      st.name = ident();
      if (ident() != "over") fail("'over'");
      sym("(");
      while (!at_sym(")")) {
        st.exprs.push_back(expr());
        if (at_sym(",")) advance();
      }
      sym(")");
    } else if (kw == "amitsur") {
      st.kind = Statement::Kind::Amitsur;
      st.name = ident();
    } else if (kw == "descend") {
      st.kind = Statement::Kind::Descend;
      st.names.push_back(ident());
      st.names.push_back(ident());
    } else if (kw == "evenpart") {
      st.kind = Statement::Kind::EvenPart;
      st.name = ident();
    } else {
      throw ParseError(ts_[i_ - 1].line, ts_[i_ - 1].col,
                       "a statement keyword (found '" + kw + "')");
    }
    return st;
  }
};

}  // namespace detail

inline Script parse_script(const std::string& text) {
  return detail::Parser(lex(text)).script();
}

// ---------------------------------------------------------------------------
// Execution

struct Options {
  int degree_bound = 32;
};

struct Report {
  std::string echo;
  std::string status;  // exact | verified-to-bound | undecided | error
  std::string payload;
  std::optional<int> bound;
};

struct Session {
  Options opts;
  BaseRing base = BaseRing::Z();
  bool base_set = false;
  std::map<std::string, AlgPtr> algs;
  std::map<std::string, std::vector<Expr>> ideals;
  std::map<std::string, ModPtr> modules;
  std::map<std::string, AlgebraMap> maps;
  std::map<std::string, DiracFieldExtension> fields;
  std::map<std::string, ZariskiCover> covers;

  Report execute(const Statement& st) {
    Report r;
    r.echo = st.str();
    try {
      run(st, r);
    } catch (const std::exception& e) {
      r.status = "error";
      r.payload = e.what();
      r.bound.reset();
    }
    return r;
  }

 private:
  static BaseRing parse_base(const std::string& w) {
    if (w == "Z") return BaseRing::Z();
    if (w == "Q") return BaseRing::Q();
    if (w.size() > 1 && w[0] == 'F') {
      unsigned long p = std::stoul(w.substr(1));
      return BaseRing::Fp(p);
    }
    throw std::invalid_argument("unknown base ring '" + w + "'");
  }

  AlgPtr alg_of(const std::string& n) const {
    auto it = algs.find(n);
    if (it == algs.end()) throw std::invalid_argument("undefined algebra '" + n + "'");
    return it->second;
  }
  ModPtr mod_of(const std::string& n) const {
    auto it = modules.find(n);
    if (it == modules.end()) throw std::invalid_argument("undefined module '" + n + "'");
    return it->second;
  }

  Element eval(const Expr& e, const FreeAlgPtr& f) const {
    switch (e.kind) {
      case Expr::Kind::Num: return Element::constant(f, e.num);
      case Expr::Kind::Var: return Element::generator(f, e.name);
      case Expr::Kind::Add: return eval(e.args[0], f) + eval(e.args[1], f);
      case Expr::Kind::Sub: return eval(e.args[0], f) - eval(e.args[1], f);
      case Expr::Kind::Mul: return eval(e.args[0], f) * eval(e.args[1], f);
      case Expr::Kind::Pow: return elem_pow(eval(e.args[0], f), e.num);
      case Expr::Kind::Neg: return -eval(e.args[0], f);
    }
    throw std::logic_error("unreachable");
  }

  MapDesc desc_of(const std::string& n) const {
    if (auto it = maps.find(n); it != maps.end()) return it->second;
    if (auto it = fields.find(n); it != fields.end()) return it->second;
    throw std::invalid_argument("undefined map or field '" + n + "'");
  }

  RelativePresentation relative_of(const std::string& n) const {
    auto it = maps.find(n);
    if (it == maps.end()) throw std::invalid_argument("undefined map '" + n + "'");
    const AlgebraMap& f = it->second;
    return make_relative(f.source, f.target, f.target->relations.gens);
  }

  void run(const Statement& st, Report& r) {
    using K = Statement::Kind;
    r.status = "exact";
    switch (st.kind) {
      case K::Base: {
        BaseRing b = parse_base(st.word);
        base = b;
        base_set = true;
        r.payload = "base set to " + st.word;
        return;
      }
      case K::Ring: {
        if (!base_set) throw std::invalid_argument("no base ring declared");
        GradedSet gens;
        for (const auto& [n, d] : st.typed) gens.entries.push_back({n, d});
        AlgPtr a = make_free_presented(base, gens);
        algs[st.name] = a;
        r.payload = "free algebra on " + std::to_string(gens.size()) + " generator(s)";
        return;
      }
      case K::Ideal: {
        ideals[st.name] = st.exprs;
        r.payload = "ideal with " + std::to_string(st.exprs.size()) + " generator(s)";
        return;
      }
      case K::Alg: {
        AlgPtr a = alg_of(st.names[0]);
        auto it = ideals.find(st.names[1]);
        if (it == ideals.end())
          throw std::invalid_argument("undefined ideal '" + st.names[1] + "'");
        std::vector<Element> rels = a->relations.gens;
        for (const auto& e : it->second) rels.push_back(eval(e, a->free));
        AlgPtr q = make_presented(a->free, std::move(rels));
        algs[st.name] = q;
        r.payload = "quotient with " + std::to_string(q->relations.gens.size()) +
                    " relation(s)";
        return;
      }
      case K::Module: {
        AlgPtr a = alg_of(st.names[0]);
        ModPtr m;
        if (st.word == "residue") {
          m = residue_module(a);
        } else {
          m = free_module(a, st.numbers);
        }
        modules[st.name] = m;
        r.payload = "module with " + std::to_string(m->ngens()) + " generator(s)";
        return;
      }
      case K::Map: {
        AlgPtr a = alg_of(st.names[0]);
        AlgPtr b = alg_of(st.names[1]);
        std::vector<Element> images(a->free->ngens(), Element::zero(b->free));
        std::vector<bool> seen(a->free->ngens(), false);
        for (const auto& [g, e] : st.images) {
          int idx = a->free->generators.index_of(g);
          if (idx < 0) throw std::invalid_argument("unknown source generator '" + g + "'");
          images[static_cast<std::size_t>(idx)] = eval(e, b->free);
          seen[static_cast<std::size_t>(idx)] = true;
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
          if (!seen[i])
            throw std::invalid_argument("map is missing the image of a generator");
        maps[st.name] = make_algebra_map(a, b, std::move(images));
        r.payload = "map on " + std::to_string(a->free->ngens()) + " generator(s)";
        return;
      }
      case K::Field: {
        BaseRing k = parse_base(st.word);
        std::map<std::string, long> p;
        for (const auto& [n, v] : st.typed) p[n] = v;
        for (const char* req : {"t", "u", "e", "lambda"})
          if (!p.count(req))
            throw std::invalid_argument(std::string("field extension needs '") + req + "'");
        long l0 = p.count("l0") ? p["l0"] : 1;
        fields[st.name] = make_field_extension(k, p["t"], p["u"], p["e"],
                                               Scalar(k, p["lambda"]), l0);
        r.payload = "field extension of ramification index " + std::to_string(p["e"]);
        return;
      }
      case K::Cover: {
        AlgPtr a = alg_of(st.names[0]);
        std::vector<Element> els;
        for (const auto& e : st.exprs) els.push_back(eval(e, a->free));
        covers[st.name] = make_cover(a, std::move(els));
        r.payload = "cover by " + std::to_string(st.exprs.size()) + " element(s)";
        return;
      }
      case K::Piece: {
        if (auto it = modules.find(st.name); it != modules.end()) {
          r.payload = module_piece(*it->second, st.number).str();
          return;
        }
        AlgPtr a = alg_of(st.name);
        r.payload = graded_piece_basis(*a, st.number).inv.str();
        return;
      }
      case K::Spec: {
        AlgPtr a = alg_of(st.name);
        SpecSpace s =
            a->base().characteristic() > 0 ? spec_finite(a) : spec_special(a);
        r.payload = to_json(s);
        return;
      }
      case K::Check: {
        MapDesc d = st.word == "smooth" ? MapDesc(relative_of(st.name)) : desc_of(st.name);
        if (st.word == "etale") {
          auto e = etale_certificate(d);
          switch (e.status) {
            case EtaleResult::Status::Etale: r.payload = "etale via " + e.via; return;
            case EtaleResult::Status::NotEtale: r.payload = "not etale: " + e.via; return;
            case EtaleResult::Status::Undecided:
              r.status = "undecided";
              r.payload = e.via;
              return;
          }
        } else if (st.word == "even") {
          auto e = is_even_map(d, opts.degree_bound);
          switch (e.status) {
            case EvenMapResult::Status::Even:
              r.status = "verified-to-bound";
              r.bound = e.bound;
              r.payload = "even";
              return;
            case EvenMapResult::Status::NotEven:
              r.payload = "not even, witness degree " + std::to_string(e.witness);
              return;
            case EvenMapResult::Status::Undecided:
              r.status = "undecided";
              r.payload = "undecided";
              return;
          }
        } else if (st.word == "flat") {
          auto f = map_flatness_status(d, opts.degree_bound);
          switch (f.status) {
            case FlatnessResult::Status::Flat:
              r.status = "verified-to-bound";
              r.bound = opts.degree_bound;
              r.payload = "flat: " + f.witness;
              return;
            case FlatnessResult::Status::NotFlat:
              r.payload = "not flat: " + f.witness;
              return;
            case FlatnessResult::Status::Undecided:
              r.status = "undecided";
              r.payload = f.witness;
              return;
          }
        } else if (st.word == "unramified") {
          r.payload = is_unramified(d) ? "unramified" : "ramified";
          return;
        } else {  // smooth
          auto s = is_standard_smooth(std::get<RelativePresentation>(d));
          r.payload = (s.ok ? "standard smooth: " : "not standard smooth: ") + s.detail;
          return;
        }
        return;
      }
      case K::Omega: {
        auto rp = relative_of(st.name);
        ModPtr om = kaehler(rp);
        std::string degs;
        for (std::size_t i = 0; i < om->ngens(); ++i)
          degs += (i ? "," : "") + std::to_string(om->generator_degrees[i]);
        r.payload = "generators [" + degs + "], relations " + std::to_string(om->nrels());
        return;
      }
      case K::Jacobian: {
        auto rows = jacobian(relative_of(st.name));
        std::string s = "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          s += i ? ", [" : "[";
          for (std::size_t j = 0; j < rows[i].size(); ++j)
            s += (j ? ", " : "") + rows[i][j].str();
          s += "]";
        }
        r.payload = s + "]";
        return;
      }
      case K::Localize: {
        AlgPtr a = alg_of(st.name);
        auto L = localize(a, eval(st.exprs[0], a->free));
        r.payload = "localized at " + L.f.str() + " (degree " + std::to_string(L.fdeg) + ")";
        return;
      }
      case K::Tor1: {
        auto inv = tor1(*mod_of(st.names[0]), *mod_of(st.names[1]), st.number);
        r.payload = inv.str();
        return;
      }
      case K::MinimalGens: {
        auto mg = minimal_generators(*mod_of(st.name));
        std::string degs;
        for (std::size_t i = 0; i < mg.size(); ++i)
          degs += (i ? "," : "") + std::to_string(mg[i]);
        r.payload = std::to_string(mg.size()) + " generator(s) at degrees [" + degs + "]";
        return;
      }
      case K::Integral: {
        AlgPtr a = alg_of(st.name);
        Element y = eval(st.exprs[0], a->free);
        std::vector<Element> sub;
        for (std::size_t i = 1; i < st.exprs.size(); ++i)
          sub.push_back(eval(st.exprs[i], a->free));
        auto cert = integral_certificate(a, y, sub, opts.degree_bound);
        r.status = "verified-to-bound";
        r.bound = opts.degree_bound;
        r.payload = cert ? "monic relation of degree " + std::to_string(cert->n) : "none";
        return;
      }
      case K::Amitsur: {
        auto it = covers.find(st.name);
        if (it == covers.end())
          throw std::invalid_argument("undefined cover '" + st.name + "'");
        bool ok = amitsur_check(it->second, opts.degree_bound);
        r.status = "verified-to-bound";
        r.bound = opts.degree_bound;
        r.payload = ok ? "exact" : "fails";
        return;
      }
      case K::Descend: {
        auto it = covers.find(st.names[0]);
        if (it == covers.end())
          throw std::invalid_argument("undefined cover '" + st.names[0] + "'");
        auto res = descend_module(trivial_datum(it->second, mod_of(st.names[1])),
                                  opts.degree_bound);
        r.status = "verified-to-bound";
        r.bound = res.verified_to;
        r.payload = "descended module with " + std::to_string(res.module->ngens()) +
                    " generator(s)";
        return;
      }
      case K::EvenPart: {
        AlgPtr a = alg_of(st.name);
        auto gens = even_generators(*a, opts.degree_bound);
        std::string s;
        for (std::size_t i = 0; i < gens.size(); ++i) s += (i ? ", " : "") + gens[i].str();
        r.status = "verified-to-bound";
        r.bound = opts.degree_bound;
        r.payload = "[" + s + "]";
        return;
      }
    }
  }
};

inline std::vector<Report> execute(const Script& s, const Options& opts) {
  Session session;
  session.opts = opts;
  std::vector<Report> out;
  for (const auto& st : s.statements) out.push_back(session.execute(st));
  return out;
}

// ---------------------------------------------------------------------------
// Emission

inline std::string emit_text(const Report& r) {
  if (r.status == "error") return "error: " + r.payload + "\n";
  std::string s = r.echo + " => " + r.payload;
  if (r.bound) s += " [verified to " + std::to_string(*r.bound) + "]";
  if (r.status == "undecided") s += " [undecided]";
  return s + "\n";
}

inline std::string emit_text(const std::vector<Report>& rs) {
  std::string s;
  for (const auto& r : rs) s += emit_text(r);
  return s;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string emit_json(const std::vector<Report>& rs) {
  std::ostringstream os;
  os << "{\"reports\":[";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) os << ",";
    os << "{";
    if (rs[i].bound) os << "\"bound\":" << *rs[i].bound << ",";
    os << "\"echo\":\"" << detail::json_escape(rs[i].echo) << "\","
       << "\"payload\":\"" << detail::json_escape(rs[i].payload) << "\","
       << "\"status\":\"" << rs[i].status << "\"}";
  }
  os << "]}";
  return os.str();
}

}  // namespace dirac::script
