#pragma once

// Shared surface-syntax machinery: lexer, cursor, and constraint-atom
// parsing used by both the process-language and the formula parsers.

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tadi/cstore.hpp"

namespace tadi {

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int l)
      : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l) {}
};

namespace detail {

enum class TokKind : std::uint8_t { Ident, Var, Int, Punct, End };

struct Tok {
  TokKind kind{};
  std::string text;
  int line = 0;
};

inline std::vector<Tok> lex(const std::string& src) {
  static const std::vector<std::string> puncts = {
      "<->", ":-", "->", "||", "[]", "/\\", "\\/", "(", ")", "[", "]",
      "{",   "}",  "|",  ",",  ".",  "=",   "~",   ":", "/", "_"};
  std::vector<Tok> out;
  int line = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '%') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      out.push_back({TokKind::Ident, src.substr(i, j - i), line});
      i = j;
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '#') {
      std::size_t j = i + 1;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      while (j < src.size() && src[j] == '\'') ++j;  // primes
      out.push_back({TokKind::Var, src.substr(i, j - i), line});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      out.push_back({TokKind::Int, src.substr(i, j - i), line});
      i = j;
      continue;
    }
    bool matched = false;
    for (const std::string& p : puncts) {
      if (src.compare(i, p.size(), p) == 0) {
        out.push_back({TokKind::Punct, p, line});
        i += p.size();
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ParseError(std::string("unexpected character '") + c + "'", line);
  }
  out.push_back({TokKind::End, "", line});
  return out;
}

struct Cursor {
  std::vector<Tok> toks;
  std::size_t i = 0;

  explicit Cursor(const std::string& src) : toks(lex(src)) {}

  const Tok& peek(std::size_t ahead = 0) const {
    std::size_t j = i + ahead;
    return j < toks.size() ? toks[j] : toks.back();
  }
  bool done() const { return peek().kind == TokKind::End; }
  int line() const { return peek().line; }

  bool at_punct(const std::string& p) const {
    return peek().kind == TokKind::Punct && peek().text == p;
  }
  bool at_ident(const std::string& s) const {
    return peek().kind == TokKind::Ident && peek().text == s;
  }
  bool at_var() const { return peek().kind == TokKind::Var; }

  Tok eat() { return toks[i < toks.size() ? i++ : toks.size() - 1]; }

  bool eat_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    eat();
    return true;
  }
  bool eat_ident(const std::string& s) {
    if (!at_ident(s)) return false;
    eat();
    return true;
  }
  void expect_punct(const std::string& p) {
    if (!eat_punct(p))
      throw ParseError("expected '" + p + "', found '" + peek().text + "'",
                       line());
  }
  std::string expect_var() {
    if (!at_var())
      throw ParseError("expected a variable, found '" + peek().text + "'",
                       line());
    return eat().text;
  }
  std::string expect_ident() {
    if (peek().kind != TokKind::Ident)
      throw ParseError("expected an identifier, found '" + peek().text + "'",
                       line());
    return eat().text;
  }
};

/// One constraint atom.  In rule bodies (`schematic`), value slots may hold
/// variables; elsewhere they must be literal tokens.
inline Atom parse_atom(Cursor& cur, bool schematic) {
  auto parse_value = [&cur, schematic]() -> std::string {
    if (cur.peek().kind == TokKind::Ident) return cur.eat().text;
    if (schematic && cur.at_var()) return cur.eat().text;
    throw ParseError("expected a token" +
                         std::string(schematic ? " or variable" : "") +
                         ", found '" + cur.peek().text + "'",
                     cur.line());
  };

  if (cur.at_ident("last")) {
    cur.eat();
    cur.expect_punct("(");
    std::string v = cur.expect_var();
    cur.expect_punct(",");
    std::string tok = parse_value();
    cur.expect_punct(")");
    return Atom::last(std::move(v), std::move(tok));
  }
  if (cur.at_var()) {
    std::string head = cur.eat().text;
    cur.expect_punct("=");
    cur.expect_punct("[");
    std::string value = parse_value();
    cur.expect_punct("|");
    if (cur.eat_punct("_")) {
      cur.expect_punct("]");
      return Atom::stream_any(std::move(head), std::move(value));
    }
    std::string tail = cur.expect_var();
    cur.expect_punct("]");
    return Atom::stream_eq(std::move(head), std::move(value), std::move(tail));
  }
  if (cur.peek().kind == TokKind::Ident) {
    std::string name = cur.eat().text;
    std::vector<std::string> args;
    if (cur.eat_punct("(")) {
      if (!cur.eat_punct(")")) {
        do {
          args.push_back(cur.expect_var());
        } while (cur.eat_punct(","));
        cur.expect_punct(")");
      }
    }
    return Atom::prop(std::move(name), std::move(args));
  }
  throw ParseError("expected a constraint atom, found '" + cur.peek().text + "'",
                   cur.line());
}

inline std::vector<Atom> parse_atom_list(Cursor& cur, bool schematic) {
  std::vector<Atom> atoms;
  do {
    atoms.push_back(parse_atom(cur, schematic));
  } while (cur.eat_punct(","));
  return atoms;
}

}  // namespace detail
}  // namespace tadi
