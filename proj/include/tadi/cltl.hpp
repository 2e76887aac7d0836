#pragma once

// Linear temporal formulas over constraint atoms: construction, parsing,
// and three-valued satisfaction over conditional traces.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tadi/cstore.hpp"
#include "tadi/parse.hpp"
#include "tadi/traces.hpp"

namespace tadi {

// ── formulas ─────────────────────────────────────────────────────────────────

enum class FormulaKind : std::uint8_t {
  True,
  False,
  Atom,    // a constraint
  Not,     // ~f
  And,     // n-ary conjunction, flattened/sorted/deduplicated
  Exists,  // exists V. f
  Next,    // X f
  Until,   // f U g (reflexive)
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind{};
  Constraint atom;            // Atom
  std::vector<FormulaPtr> subs;  // Not/Next: 1, Until: 2, And: n, Exists: 1
  std::string var;            // Exists
};

inline int formula_cmp(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.var != b.var) return a.var < b.var ? -1 : 1;
  if (a.kind == FormulaKind::Atom) {
    if (a.atom == b.atom) return 0;
    return a.atom < b.atom ? -1 : 1;
  }
  if (a.subs.size() != b.subs.size())
    return a.subs.size() < b.subs.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.subs.size(); ++i)
    if (int c = formula_cmp(*a.subs[i], *b.subs[i])) return c;
  return 0;
}

inline bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
  return a == b || formula_cmp(*a, *b) == 0;
}

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return formula_cmp(*a, *b) < 0;
  }
};

// ── smart constructors ───────────────────────────────────────────────────────

inline FormulaPtr f_true() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::True;
    return f;
  }();
  return t;
}

inline FormulaPtr f_false() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::False;
    return f;
  }();
  return t;
}

inline FormulaPtr f_atom(Constraint c) {
  if (c.is_false()) return f_false();
  if (c.is_true()) return f_true();
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Atom;
  f->atom = std::move(c);
  return f;
}

inline FormulaPtr f_not(FormulaPtr a) {
  if (a->kind == FormulaKind::True) return f_false();
  if (a->kind == FormulaKind::False) return f_true();
  if (a->kind == FormulaKind::Not) return a->subs[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->subs = {std::move(a)};
  return f;
}

inline FormulaPtr f_and(std::vector<FormulaPtr> parts) {
  std::vector<FormulaPtr> flat;
  for (auto& p : parts) {
    if (p->kind == FormulaKind::And)
      flat.insert(flat.end(), p->subs.begin(), p->subs.end());
    else if (p->kind == FormulaKind::True)
      continue;
    else if (p->kind == FormulaKind::False)
      return f_false();
    else
      flat.push_back(std::move(p));
  }
  std::sort(flat.begin(), flat.end(), FormulaLess{});
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const FormulaPtr& a, const FormulaPtr& b) {
                           return formula_eq(a, b);
                         }),
             flat.end());
  if (flat.empty()) return f_true();
  if (flat.size() == 1) return flat[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::And;
  f->subs = std::move(flat);
  return f;
}

inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return f_and(std::vector<FormulaPtr>{std::move(a), std::move(b)});
}

inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return f_not(f_and(f_not(std::move(a)), f_not(std::move(b))));
}

inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_not(f_and(std::move(a), f_not(std::move(b))));
}

inline FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) {
  return f_and(f_implies(a, b), f_implies(b, a));
}

inline FormulaPtr f_next(FormulaPtr a) {
  if (a->kind == FormulaKind::True || a->kind == FormulaKind::False) return a;
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Next;
  f->subs = {std::move(a)};
  return f;
}

inline FormulaPtr f_until(FormulaPtr a, FormulaPtr b) {
  if (b->kind == FormulaKind::True || b->kind == FormulaKind::False) return b;
  if (a->kind == FormulaKind::False) return b;  // only the reflexive instant
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Until;
  f->subs = {std::move(a), std::move(b)};
  return f;
}

inline FormulaPtr f_eventually(FormulaPtr a) {
  return f_until(f_true(), std::move(a));
}

inline FormulaPtr f_always(FormulaPtr a) {
  return f_not(f_eventually(f_not(std::move(a))));
}

inline std::set<std::string> formula_free_vars(const FormulaPtr& f);

inline FormulaPtr f_exists(std::string x, FormulaPtr a) {
  if (!formula_free_vars(a).count(x)) return a;
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Exists;
  f->var = std::move(x);
  f->subs = {std::move(a)};
  return f;
}

// ── inspection ───────────────────────────────────────────────────────────────

inline std::set<std::string> formula_free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      break;
    case FormulaKind::Atom: {
      auto vs = f->atom.vars();
      out.insert(vs.begin(), vs.end());
      break;
    }
    case FormulaKind::Exists: {
      out = formula_free_vars(f->subs[0]);
      out.erase(f->var);
      break;
    }
    default:
      for (const auto& s : f->subs) {
        auto vs = formula_free_vars(s);
        out.insert(vs.begin(), vs.end());
      }
  }
  return out;
}

inline bool formula_quantifier_free(const FormulaPtr& f) {
  if (f->kind == FormulaKind::Exists) return false;
  for (const auto& s : f->subs)
    if (!formula_quantifier_free(s)) return false;
  return true;
}

/// Capture-avoiding substitution of variables for variables.
inline FormulaPtr formula_subst(const ConstraintSystem& sys,
                                const FormulaPtr& f,
                                std::map<std::string, std::string> m,
                                std::size_t& fresh) {
  for (auto it = m.begin(); it != m.end();)
    it = it->first == it->second ? m.erase(it) : std::next(it);
  if (m.empty()) return f;
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Atom:
      return f_atom(f->atom.renamed(sys, m));
    case FormulaKind::Not:
      return f_not(formula_subst(sys, f->subs[0], m, fresh));
    case FormulaKind::And: {
      std::vector<FormulaPtr> subs;
      for (const auto& s : f->subs)
        subs.push_back(formula_subst(sys, s, m, fresh));
      return f_and(std::move(subs));
    }
    case FormulaKind::Next:
      return f_next(formula_subst(sys, f->subs[0], m, fresh));
    case FormulaKind::Until:
      return f_until(formula_subst(sys, f->subs[0], m, fresh),
                     formula_subst(sys, f->subs[1], m, fresh));
    case FormulaKind::Exists: {
      std::map<std::string, std::string> inner = m;
      inner.erase(f->var);
      std::string bound = f->var;
      FormulaPtr body = f->subs[0];
      for (const auto& [from, to] : inner) {
        (void)from;
        if (to == bound) {  // would capture: alpha-rename the binder
          std::string nb = "#" + std::to_string(++fresh);
          std::size_t unused = 0;
          body = formula_subst(sys, body, {{bound, nb}}, unused);
          bound = nb;
          break;
        }
      }
      return f_exists(bound, formula_subst(sys, body, inner, fresh));
    }
  }
  return f;
}

inline std::string formula_str(const FormulaPtr& f) {
  std::ostringstream os;
  switch (f->kind) {
    case FormulaKind::True:
      os << "true";
      break;
    case FormulaKind::False:
      os << "false";
      break;
    case FormulaKind::Atom:
      os << "{" << f->atom.str() << "}";
      break;
    case FormulaKind::Not:
      os << "~" << formula_str(f->subs[0]);
      break;
    case FormulaKind::And:
      os << "(";
      for (std::size_t i = 0; i < f->subs.size(); ++i) {
        if (i) os << " /\\ ";
        os << formula_str(f->subs[i]);
      }
      os << ")";
      break;
    case FormulaKind::Exists:
      os << "exists " << f->var << ".(" << formula_str(f->subs[0]) << ")";
      break;
    case FormulaKind::Next:
      os << "X " << formula_str(f->subs[0]);
      break;
    case FormulaKind::Until:
      os << "(" << formula_str(f->subs[0]) << " U " << formula_str(f->subs[1])
         << ")";
      break;
  }
  return os.str();
}

// ── formula parser ───────────────────────────────────────────────────────────

namespace detail {

inline FormulaPtr parse_formula(const ConstraintSystem& sys, Cursor& cur);

inline bool at_atom_start(const Cursor& cur) {
  // A variable starts an atom only when followed by '='; identifiers start
  // atoms unless they are formula keywords.
  if (cur.at_punct("{")) return true;
  if (cur.at_var()) {
    const std::string& t = cur.peek().text;
    if ((t == "X" || t == "F" || t == "G" || t == "U") &&
        !(cur.peek(1).kind == TokKind::Punct && cur.peek(1).text == "="))
      return false;
    return cur.peek(1).kind == TokKind::Punct && cur.peek(1).text == "=";
  }
  if (cur.peek().kind == TokKind::Ident) {
    const std::string& t = cur.peek().text;
    return t != "true" && t != "false" && t != "exists";
  }
  return false;
}

inline FormulaPtr parse_formula_unary(const ConstraintSystem& sys, Cursor& cur) {
  if (cur.eat_punct("~")) return f_not(parse_formula_unary(sys, cur));
  if (cur.at_var() && !at_atom_start(cur)) {
    const std::string& t = cur.peek().text;
    if (t == "X") {
      cur.eat();
      return f_next(parse_formula_unary(sys, cur));
    }
    if (t == "F") {
      cur.eat();
      return f_eventually(parse_formula_unary(sys, cur));
    }
    if (t == "G") {
      cur.eat();
      return f_always(parse_formula_unary(sys, cur));
    }
  }
  if (cur.eat_ident("exists")) {
    std::vector<std::string> bound;
    do {
      bound.push_back(cur.expect_var());
    } while (cur.eat_punct(","));
    cur.expect_punct(".");
    FormulaPtr body = parse_formula_unary(sys, cur);
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      body = f_exists(*it, std::move(body));
    return body;
  }
  if (cur.eat_ident("true")) return f_true();
  if (cur.eat_ident("false")) return f_false();
  if (cur.at_punct("{") || at_atom_start(cur)) {
    int line = cur.line();
    std::vector<Atom> atoms;
    if (cur.eat_punct("{")) {
      if (!cur.eat_punct("}")) {
        atoms = parse_atom_list(cur, false);
        cur.expect_punct("}");
      }
    } else {
      atoms.push_back(parse_atom(cur, false));
    }
    try {
      return f_atom(Constraint::make(sys, std::move(atoms)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line);
    }
  }
  if (cur.eat_punct("(")) {
    FormulaPtr f = parse_formula(sys, cur);
    cur.expect_punct(")");
    return f;
  }
  throw ParseError("expected a formula, found '" + cur.peek().text + "'",
                   cur.line());
}

inline FormulaPtr parse_formula_until(const ConstraintSystem& sys, Cursor& cur) {
  FormulaPtr lhs = parse_formula_unary(sys, cur);
  if (cur.at_var() && cur.peek().text == "U" &&
      !(cur.peek(1).kind == TokKind::Punct && cur.peek(1).text == "=")) {
    cur.eat();
    return f_until(std::move(lhs), parse_formula_until(sys, cur));
  }
  return lhs;
}

inline FormulaPtr parse_formula_conj(const ConstraintSystem& sys, Cursor& cur) {
  std::vector<FormulaPtr> parts{parse_formula_until(sys, cur)};
  while (cur.eat_punct("/\\")) parts.push_back(parse_formula_until(sys, cur));
  return f_and(std::move(parts));
}

inline FormulaPtr parse_formula_disj(const ConstraintSystem& sys, Cursor& cur) {
  FormulaPtr f = parse_formula_conj(sys, cur);
  while (cur.eat_punct("\\/")) f = f_or(f, parse_formula_conj(sys, cur));
  return f;
}

inline FormulaPtr parse_formula_impl(const ConstraintSystem& sys, Cursor& cur) {
  FormulaPtr f = parse_formula_disj(sys, cur);
  if (cur.eat_punct("->")) return f_implies(f, parse_formula_impl(sys, cur));
  return f;
}

inline FormulaPtr parse_formula(const ConstraintSystem& sys, Cursor& cur) {
  FormulaPtr f = parse_formula_impl(sys, cur);
  while (cur.eat_punct("<->")) f = f_iff(f, parse_formula_impl(sys, cur));
  return f;
}

}  // namespace detail

/// Parse a single formula (used for testimonies and ad-hoc checks).
inline FormulaPtr parse_formula(const ConstraintSystem& sys,
                                const std::string& src) {
  detail::Cursor cur(src);
  FormulaPtr f = detail::parse_formula(sys, cur);
  if (!cur.done())
    throw ParseError("trailing input after formula: '" + cur.peek().text + "'",
                     cur.line());
  return f;
}

/// One specification: a formula attached to a process symbol.
struct Spec {
  std::string name;
  std::vector<std::string> params;
  FormulaPtr formula;
};

struct SpecFile {
  std::vector<Spec> specs;

  const Spec* spec_for(const std::string& name) const {
    for (const auto& s : specs)
      if (s.name == name) return &s;
    return nullptr;
  }
};

/// Parse `spec name(params) : formula.` entries.
inline SpecFile parse_specs(const ConstraintSystem& sys,
                            const std::string& src) {
  detail::Cursor cur(src);
  SpecFile out;
  while (!cur.done()) {
    int line = cur.line();
    if (!cur.eat_ident("spec"))
      throw ParseError("expected 'spec', found '" + cur.peek().text + "'",
                       line);
    Spec s;
    s.name = cur.expect_ident();
    if (cur.eat_punct("(")) {
      if (!cur.eat_punct(")")) {
        do {
          s.params.push_back(cur.expect_var());
        } while (cur.eat_punct(","));
        cur.expect_punct(")");
      }
    }
    cur.expect_punct(":");
    s.formula = detail::parse_formula(sys, cur);
    cur.expect_punct(".");
    std::set<std::string> pset(s.params.begin(), s.params.end());
    for (const std::string& v : formula_free_vars(s.formula))
      if (!pset.count(v))
        throw ParseError("free variable " + v + " in spec for " + s.name, line);
    for (const auto& prev : out.specs)
      if (prev.name == s.name)
        throw ParseError("duplicate spec for " + s.name, line);
    out.specs.push_back(std::move(s));
  }
  return out;
}

// ── three-valued satisfaction ────────────────────────────────────────────────

enum class Truth : std::uint8_t { False, Unknown, True };

inline Truth t_not(Truth a) {
  if (a == Truth::True) return Truth::False;
  if (a == Truth::False) return Truth::True;
  return Truth::Unknown;
}
inline Truth t_and(Truth a, Truth b) {
  if (a == Truth::False || b == Truth::False) return Truth::False;
  if (a == Truth::True && b == Truth::True) return Truth::True;
  return Truth::Unknown;
}
inline Truth t_or(Truth a, Truth b) { return t_not(t_and(t_not(a), t_not(b))); }

inline const char* truth_str(Truth t) {
  switch (t) {
    case Truth::False:
      return "false";
    case Truth::Unknown:
      return "unknown";
    case Truth::True:
      return "true";
  }
  return "?";
}

namespace detail {

struct SatContext {
  const ConstraintSystem& sys;
  const Trace& trace;
  std::map<std::pair<std::size_t, const Formula*>, Truth> memo;

  std::size_t horizon() const { return trace.states.size(); }

  /// Store at the replication point (End traces): the last conditional store.
  Constraint final_store() const {
    for (auto it = trace.states.rbegin(); it != trace.states.rend(); ++it)
      if (!it->stutt) return it->store;
    return Constraint::top();
  }

  Truth atom_at(std::size_t i, const Constraint& c) {
    if (i >= horizon()) {
      if (trace.ending == TraceEnd::Cut) return Truth::Unknown;
      return entails(sys, final_store(), c) ? Truth::True : Truth::False;
    }
    const TraceState& s = trace.states[i];
    if (s.stutt) {
      for (const auto& n : s.cond_neg)
        if (n == c) return Truth::False;
      return atom_at(i + 1, c);
    }
    return entails(sys, s.store, c) ? Truth::True : Truth::False;
  }

  Truth sat(std::size_t i, const FormulaPtr& f) {
    if (i > horizon()) i = horizon();  // all positions past the edge coincide
    auto key = std::make_pair(i, f.get());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Truth r = compute(i, f);
    memo[key] = r;
    return r;
  }

  Truth compute(std::size_t i, const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::True:
        return Truth::True;
      case FormulaKind::False:
        return Truth::False;
      case FormulaKind::Atom:
        return atom_at(i, f->atom);
      case FormulaKind::Not:
        return t_not(sat(i, f->subs[0]));
      case FormulaKind::And: {
        Truth r = Truth::True;
        for (const auto& s : f->subs) r = t_and(r, sat(i, s));
        return r;
      }
      case FormulaKind::Next:
        return sat(i + 1, f->subs[0]);
      case FormulaKind::Until: {
        // Reflexive until.  At the edge the suffix is constant (End) or
        // unknown (Cut); in both cases the fixpoint collapses to the goal.
        if (i >= horizon()) return sat(i, f->subs[1]);
        Truth goal = sat(i, f->subs[1]);
        if (goal == Truth::True) return Truth::True;
        return t_or(goal, t_and(sat(i, f->subs[0]), sat(i + 1, f)));
      }
      case FormulaKind::Exists:
        return exists_at(i, f);
    }
    return Truth::Unknown;
  }

  Truth exists_at(std::size_t i, const FormulaPtr& f) {
    const std::string& x = f->var;
    if (!formula_free_vars(f->subs[0]).count(x)) return sat(i, f->subs[0]);
    for (const auto& s : trace.states)
      if (s.stutt) return Truth::Unknown;  // variants are not defined here

    // Substitution witnesses: x may co-refer with a variable the trace
    // already constrains (x-variants where x carries exactly that info).
    std::set<std::string> candidates;
    for (const auto& s : trace.states) {
      auto vs = s.store.vars();
      candidates.insert(vs.begin(), vs.end());
    }
    for (const std::string& y : candidates) {
      if (y == x) continue;
      std::size_t fresh = 0;
      FormulaPtr inst = formula_subst(sys, f->subs[0], {{x, y}}, fresh);
      SatContext sub{sys, trace, {}};
      if (sub.sat(i, inst) == Truth::True) return Truth::True;
    }

    // Collect the atoms of the body that mention x; a variant trace adds
    // them to the stores from some arrival position onward (or never).
    std::vector<Atom> xatoms;
    collect_x_atoms(f->subs[0], x, xatoms);
    std::sort(xatoms.begin(), xatoms.end());
    xatoms.erase(std::unique(xatoms.begin(), xatoms.end()), xatoms.end());
    std::size_t n = horizon();
    if (xatoms.empty()) return sat(i, f->subs[0]);
    if (xatoms.size() > 4) return Truth::Unknown;  // search space too large

    std::vector<std::size_t> arrival(xatoms.size(), 0);
    const std::size_t never = n + 1;
    bool any_unknown = false;
    while (true) {
      Trace variant = trace;
      bool ok = true;
      for (std::size_t a = 0; a < xatoms.size() && ok; ++a) {
        for (std::size_t j = arrival[a]; j < n && ok; ++j) {
          variant.states[j].store = merge(
              sys, variant.states[j].store,
              Constraint::make(sys, {xatoms[a]}));
          if (variant.states[j].store.is_false()) ok = false;
        }
      }
      if (ok) {
        SatContext sub{sys, variant, {}};
        Truth r = sub.sat(i, f->subs[0]);
        if (r == Truth::True) return Truth::True;
        if (r == Truth::Unknown) any_unknown = true;
      }
      // advance the arrival tuple
      std::size_t k = 0;
      while (k < arrival.size()) {
        if (++arrival[k] <= never) break;
        arrival[k] = 0;
        ++k;
      }
      if (k == arrival.size()) break;
    }
    (void)any_unknown;
    // A failed witness search over this family does not refute all variants.
    return Truth::Unknown;
  }

  static void collect_x_atoms(const FormulaPtr& f, const std::string& x,
                              std::vector<Atom>& out) {
    if (f->kind == FormulaKind::Atom) {
      for (const Atom& a : f->atom.atoms())
        if (a.mentions(x)) out.push_back(a);
      return;
    }
    if (f->kind == FormulaKind::Exists && f->var == x) return;
    for (const auto& s : f->subs) collect_x_atoms(s, x, out);
  }
};

}  // namespace detail

inline Truth satisfies(const ConstraintSystem& sys, const Trace& t,
                       const FormulaPtr& f) {
  detail::SatContext ctx{sys, t, {}};
  return ctx.sat(0, f);
}

}  // namespace tadi
