#pragma once

// Cylindric constraint system over token streams: stream equations, stream
// membership with anonymous tail, last-value atoms and declared propositions,
// with merge / entailment / variable hiding.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tadi {

// ── atoms ────────────────────────────────────────────────────────────────────

enum class AtomKind : std::uint8_t {
  StreamEq,     // X=[v|T]   stream X starts with cell v, tail T
  StreamEqAny,  // X=[v|_]   stream X starts with cell v, tail unnamed
  LastVal,      // last(X,v) the final value of stream X is v
  Prop,         // p(X,...)  declared proposition over variables
};

/// Identifiers starting with an uppercase letter or '#' are variables;
/// everything else in a value slot is a token literal.
inline bool is_var_name(const std::string& s) {
  return !s.empty() && ((s[0] >= 'A' && s[0] <= 'Z') || s[0] == '#');
}

struct Atom {
  AtomKind kind{};
  std::string var;    // head variable (StreamEq, StreamEqAny, LastVal)
  std::string value;  // token (StreamEq, StreamEqAny, LastVal)
  std::string tail;   // tail variable (StreamEq only)
  std::string name;   // proposition name (Prop only)
  std::vector<std::string> args;  // proposition arguments (Prop only)

  friend auto operator<=>(const Atom&, const Atom&) = default;

  static Atom stream_eq(std::string x, std::string v, std::string t) {
    Atom a;
    a.kind = AtomKind::StreamEq;
    a.var = std::move(x);
    a.value = std::move(v);
    a.tail = std::move(t);
    return a;
  }
  static Atom stream_any(std::string x, std::string v) {
    Atom a;
    a.kind = AtomKind::StreamEqAny;
    a.var = std::move(x);
    a.value = std::move(v);
    return a;
  }
  static Atom last(std::string x, std::string v) {
    Atom a;
    a.kind = AtomKind::LastVal;
    a.var = std::move(x);
    a.value = std::move(v);
    return a;
  }
  static Atom prop(std::string n, std::vector<std::string> as) {
    Atom a;
    a.kind = AtomKind::Prop;
    a.name = std::move(n);
    a.args = std::move(as);
    return a;
  }

  std::set<std::string> vars() const {
    std::set<std::string> out;
    switch (kind) {
      case AtomKind::StreamEq:
        out.insert(var);
        if (is_var_name(tail)) out.insert(tail);
        break;
      case AtomKind::StreamEqAny:
      case AtomKind::LastVal:
        out.insert(var);
        break;
      case AtomKind::Prop:
        for (const auto& a : args)
          if (is_var_name(a)) out.insert(a);
        break;
    }
    return out;
  }

  bool mentions(const std::string& x) const { return vars().count(x) > 0; }

  Atom renamed(const std::map<std::string, std::string>& m) const {
    auto sub = [&m](const std::string& s) {
      auto it = m.find(s);
      return it == m.end() ? s : it->second;
    };
    Atom a = *this;
    a.var = sub(a.var);
    a.tail = sub(a.tail);
    for (auto& x : a.args) x = sub(x);
    return a;
  }

  std::string str() const {
    std::ostringstream os;
    switch (kind) {
      case AtomKind::StreamEq:
        os << var << "=[" << value << "|" << tail << "]";
        break;
      case AtomKind::StreamEqAny:
        os << var << "=[" << value << "|_]";
        break;
      case AtomKind::LastVal:
        os << "last(" << var << "," << value << ")";
        break;
      case AtomKind::Prop:
        os << name;
        if (!args.empty()) {
          os << "(";
          for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) os << ",";
            os << args[i];
          }
          os << ")";
        }
        break;
    }
    return os.str();
  }
};

// ── constraint system declaration ────────────────────────────────────────────

/// Inference rule `head :- body`; a missing head denotes falsity.  Identifier
/// case distinguishes schematic variables from literal tokens (is_var_name).
struct HornRule {
  std::optional<Atom> head;
  std::vector<Atom> body;
};

struct ConstraintSystem {
  std::set<std::string> tokens;
  std::map<std::string, std::size_t> props;  // name -> arity
  std::vector<HornRule> rules;

  void validate(const Atom& a) const {
    switch (a.kind) {
      case AtomKind::StreamEq:
      case AtomKind::StreamEqAny:
      case AtomKind::LastVal:
        if (!is_var_name(a.value) && !tokens.count(a.value))
          throw std::invalid_argument("undeclared token: " + a.value);
        break;
      case AtomKind::Prop: {
        auto it = props.find(a.name);
        if (it == props.end())
          throw std::invalid_argument("undeclared proposition: " + a.name);
        if (it->second != a.args.size())
          throw std::invalid_argument("arity mismatch for " + a.name);
        break;
      }
    }
  }
};

// ── saturation ───────────────────────────────────────────────────────────────

namespace detail {

struct Saturation {
  std::set<Atom> atoms;
  bool bottom = false;
};

/// Match one rule atom pattern against a ground atom, extending the
/// substitution (schematic identifiers bind; literals must coincide).
inline bool match_atom(const Atom& pat, const Atom& ground,
                       std::map<std::string, std::string>& sub) {
  if (pat.kind != ground.kind) return false;
  auto bind = [&sub](const std::string& p, const std::string& g) {
    if (!is_var_name(p)) return p == g;
    auto it = sub.find(p);
    if (it != sub.end()) return it->second == g;
    sub.emplace(p, g);
    return true;
  };
  switch (pat.kind) {
    case AtomKind::StreamEq:
      return bind(pat.var, ground.var) && bind(pat.value, ground.value) &&
             bind(pat.tail, ground.tail);
    case AtomKind::StreamEqAny:
    case AtomKind::LastVal:
      return bind(pat.var, ground.var) && bind(pat.value, ground.value);
    case AtomKind::Prop: {
      if (pat.name != ground.name || pat.args.size() != ground.args.size())
        return false;
      for (std::size_t i = 0; i < pat.args.size(); ++i)
        if (!bind(pat.args[i], ground.args[i])) return false;
      return true;
    }
  }
  return false;
}

template <typename Fn>
inline void match_body(const std::vector<Atom>& body, std::size_t idx,
                       const std::set<Atom>& atoms,
                       std::map<std::string, std::string>& sub, Fn&& emit) {
  if (idx == body.size()) {
    emit(sub);
    return;
  }
  for (const Atom& g : atoms) {
    auto saved = sub;
    if (match_atom(body[idx], g, sub)) match_body(body, idx + 1, atoms, sub, emit);
    sub = std::move(saved);
  }
}

/// Monotone closure: tail-weakening of stream equations plus horn rules.
/// Never derives last-value pins; growing the input only grows the output.
inline Saturation saturate(const ConstraintSystem& sys,
                           const std::vector<Atom>& in) {
  Saturation s;
  s.atoms.insert(in.begin(), in.end());
  bool changed = true;
  while (changed && !s.bottom) {
    changed = false;
    std::vector<Atom> fresh;
    for (const Atom& a : s.atoms)
      if (a.kind == AtomKind::StreamEq)
        fresh.push_back(Atom::stream_any(a.var, a.value));
    for (const HornRule& r : sys.rules) {
      std::map<std::string, std::string> sub;
      match_body(r.body, 0, s.atoms, sub,
                 [&](const std::map<std::string, std::string>& theta) {
                   if (!r.head) {
                     s.bottom = true;
                     return;
                   }
                   fresh.push_back(r.head->renamed(theta));
                 });
      if (s.bottom) return s;
    }
    for (Atom& a : fresh)
      if (s.atoms.insert(std::move(a)).second) changed = true;
  }
  if (s.bottom) return s;

  // Cell conflicts: each stream head carries a single first cell.
  std::map<std::string, std::set<std::pair<std::string, std::string>>> cells;
  std::map<std::string, std::set<std::string>> anyvals;
  std::map<std::string, std::set<std::string>> lastvals;
  for (const Atom& a : s.atoms) {
    switch (a.kind) {
      case AtomKind::StreamEq:
        cells[a.var].insert({a.value, a.tail});
        break;
      case AtomKind::StreamEqAny:
        anyvals[a.var].insert(a.value);
        break;
      case AtomKind::LastVal:
        lastvals[a.var].insert(a.value);
        break;
      case AtomKind::Prop:
        break;
    }
  }
  for (const auto& [v, cs] : cells)
    if (cs.size() > 1) s.bottom = true;
  for (const auto& [v, vs] : anyvals)
    if (vs.size() > 1) s.bottom = true;
  for (const auto& [v, vs] : lastvals)
    if (vs.size() > 1) s.bottom = true;

  // The tail order is well-founded: following cells never returns to a
  // stream already passed. A cyclic chain makes a stream its own suffix —
  // nothing a monotone sequence of tells can build, and it would put every
  // asserted last-value beyond refutation. Renaming is what creates these.
  if (!s.bottom) {
    std::map<std::string, std::string> tail_of;
    for (const auto& [v, cs] : cells) tail_of.emplace(v, cs.begin()->second);
    for (const auto& [start, t] : tail_of) {
      (void)t;
      std::set<std::string> seen;
      std::string cur = start;
      while (tail_of.count(cur)) {
        if (!seen.insert(cur).second) {
          s.bottom = true;
          break;
        }
        cur = tail_of.at(cur);
      }
      if (s.bottom) break;
    }
  }
  return s;
}

/// Current last-value pin per stream: follow the chain of cells; a chain that
/// stops at a named, cell-less variable pins the value of its final edge.
/// Anonymous tails and cycles pin nothing.
inline std::map<std::string, std::string> chain_pins(const std::set<Atom>& atoms) {
  std::map<std::string, std::pair<std::string, std::string>> heads;
  std::set<std::string> has_cell;
  for (const Atom& a : atoms) {
    if (a.kind == AtomKind::StreamEq) {
      heads.emplace(a.var, std::make_pair(a.value, a.tail));
      has_cell.insert(a.var);
    } else if (a.kind == AtomKind::StreamEqAny) {
      has_cell.insert(a.var);
    }
  }
  std::map<std::string, std::string> pins;
  for (const auto& [start, cell] : heads) {
    (void)cell;
    std::set<std::string> visited;
    std::string cur = start;
    std::string lastv;
    bool ok = true;
    while (heads.count(cur)) {
      if (!visited.insert(cur).second) {
        ok = false;  // cycle: infinite stream, no final value
        break;
      }
      lastv = heads[cur].first;
      cur = heads[cur].second;
    }
    if (ok && !has_cell.count(cur)) pins[start] = lastv;
  }
  return pins;
}

}  // namespace detail

// ── constraints ──────────────────────────────────────────────────────────────

/// An element of the constraint lattice: false, or a finite consistent set of
/// atoms kept in monotone-minimal canonical form.  Entailment additionally
/// consults the (defeasible) chain pins, so `{X=[a|Y],Y=[b|Z]}` entails
/// `last(X,b)` even though the pin is not part of the stored atom set.
class Constraint {
 public:
  Constraint() = default;  // true

  static Constraint top() { return Constraint(); }

  static Constraint bottom() {
    Constraint c;
    c.false_ = true;
    return c;
  }

  static Constraint make(const ConstraintSystem& sys, std::vector<Atom> atoms) {
    for (const Atom& a : atoms) sys.validate(a);
    detail::Saturation s = detail::saturate(sys, atoms);
    if (s.bottom) return bottom();
    // Greedy minimisation from the full closure: a deterministic function of
    // the closure alone, so equal closures yield identical cores.
    std::vector<Atom> core(s.atoms.begin(), s.atoms.end());
    for (std::size_t i = 0; i < core.size();) {
      std::vector<Atom> rest = core;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      if (detail::saturate(sys, rest).atoms == s.atoms)
        core = std::move(rest);
      else
        ++i;
    }
    Constraint c;
    c.core_ = std::move(core);
    c.view_ = std::move(s.atoms);
    c.pins_ = detail::chain_pins(c.view_);
    return c;
  }

  bool is_false() const { return false_; }
  bool is_true() const { return !false_ && core_.empty(); }

  /// Canonical atom core (sorted, monotone-minimal).
  const std::vector<Atom>& atoms() const { return core_; }

  /// Full monotone closure of the core.
  const std::set<Atom>& view() const { return view_; }

  /// Current last-value pins derived from the stream chains.
  const std::map<std::string, std::string>& pins() const { return pins_; }

  std::set<std::string> vars() const {
    std::set<std::string> out;
    for (const Atom& a : core_) {
      auto vs = a.vars();
      out.insert(vs.begin(), vs.end());
    }
    return out;
  }

  bool mentions(const std::string& x) const { return vars().count(x) > 0; }

  Constraint renamed(const ConstraintSystem& sys,
                     const std::map<std::string, std::string>& m) const {
    if (false_) return *this;
    std::vector<Atom> as;
    as.reserve(core_.size());
    for (const Atom& a : core_) as.push_back(a.renamed(m));
    return make(sys, std::move(as));
  }

  /// Coarser canonical image: saturates the chain pins through the horn rules
  /// and then drops asserted last-value atoms that merely restate a pin.
  /// Mutually entailing constraints have equal canonical images; values
  /// themselves stay structurally finer.
  Constraint canonical(const ConstraintSystem& sys) const {
    if (false_) return *this;
    std::set<Atom> s = view_;
    std::set<std::string> asserted;
    for (const Atom& a : s)
      if (a.kind == AtomKind::LastVal) asserted.insert(a.var);
    for (const auto& [v, t] : pins_)
      if (!asserted.count(v)) s.insert(Atom::last(v, t));
    detail::Saturation sat =
        detail::saturate(sys, std::vector<Atom>(s.begin(), s.end()));
    if (sat.bottom) return bottom();
    std::vector<Atom> kept;
    for (const Atom& a : sat.atoms) {
      if (a.kind == AtomKind::LastVal) {
        auto it = pins_.find(a.var);
        if (it != pins_.end() && it->second == a.value) continue;
      }
      kept.push_back(a);
    }
    return make(sys, std::move(kept));
  }

  friend bool operator==(const Constraint& a, const Constraint& b) {
    return a.false_ == b.false_ && a.core_ == b.core_;
  }
  friend auto operator<=>(const Constraint& a, const Constraint& b) {
    if (auto c = a.false_ <=> b.false_; c != 0) return c;
    return a.core_ <=> b.core_;
  }

  std::size_t hash() const {
    std::size_t h = false_ ? 0x9e3779b97f4a7c15ull : 0xc2b2ae3d27d4eb4full;
    std::hash<std::string> hs;
    for (const Atom& a : core_) h = h * 1099511628211ull ^ hs(a.str());
    return h;
  }

  std::string str() const {
    if (false_) return "false";
    if (core_.empty()) return "true";
    std::ostringstream os;
    for (std::size_t i = 0; i < core_.size(); ++i) {
      if (i) os << ", ";
      os << core_[i].str();
    }
    return os.str();
  }

 private:
  bool false_ = false;
  std::vector<Atom> core_;      // sorted canonical core
  std::set<Atom> view_;         // monotone closure of the core
  std::map<std::string, std::string> pins_;
};

// ── lattice operations ───────────────────────────────────────────────────────

/// Does `c` entail a single atom?
inline bool entails_atom(const Constraint& c, const Atom& a) {
  if (c.is_false()) return true;
  if (c.view().count(a)) return true;
  if (a.kind == AtomKind::LastVal) {
    auto it = c.pins().find(a.var);
    return it != c.pins().end() && it->second == a.value;
  }
  return false;
}

inline bool entails(const ConstraintSystem&, const Constraint& c,
                    const Constraint& d) {
  if (c.is_false()) return true;
  if (d.is_false()) return false;
  for (const Atom& a : d.atoms())
    if (!entails_atom(c, a)) return false;
  return true;
}

inline Constraint merge(const ConstraintSystem& sys, const Constraint& c,
                        const Constraint& d) {
  if (c.is_false() || d.is_false()) return Constraint::bottom();
  std::vector<Atom> atoms = c.atoms();
  atoms.insert(atoms.end(), d.atoms().begin(), d.atoms().end());
  return Constraint::make(sys, std::move(atoms));
}

/// Existential hiding: keep every monotone consequence not mentioning x.
/// True when an asserted last-value atom disagrees with the value pinned by
/// the constraint's own stream chains.  Such a constraint is unrealizable in
/// the intended stream model even though the (monotone) store algebra keeps
/// it consistent; callers that reason about realizable stores check this.
inline bool pin_conflicted(const Constraint& c) {
  if (c.is_false()) return false;
  const auto& pins = c.pins();
  for (const Atom& a : c.view()) {
    if (a.kind != AtomKind::LastVal) continue;
    auto it = pins.find(a.var);
    if (it != pins.end() && it->second != a.value) return true;
  }
  return false;
}

inline Constraint hide(const ConstraintSystem& sys, const std::string& x,
                       const Constraint& c) {
  if (c.is_false()) return c;
  std::vector<Atom> kept;
  for (const Atom& a : c.view())
    if (!a.mentions(x)) kept.push_back(a);
  return Constraint::make(sys, std::move(kept));
}

}  // namespace tadi
