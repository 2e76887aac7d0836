#pragma once

// Conditional timed traces: sequences of conditional stores (or stuttering
// states carrying only negative information) with a finite observed prefix
// that either replicates forever (End) or has an unknown continuation (Cut).

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tadi/cstore.hpp"

namespace tadi {

enum class TraceEnd : std::uint8_t {
  End,  // the final store replicates forever
  Cut,  // observation stops; the continuation is unknown
};

struct TraceState {
  bool stutt = false;
  Constraint cond_pos;               // positive condition (conditional stores)
  std::vector<Constraint> cond_neg;  // negative conditions (both kinds)
  Constraint store;                  // the store (conditional stores only)

  static TraceState cond(Constraint pos, std::vector<Constraint> neg,
                         Constraint st) {
    TraceState s;
    s.cond_pos = std::move(pos);
    s.cond_neg = std::move(neg);
    s.store = std::move(st);
    return s;
  }
  static TraceState stuttering(std::vector<Constraint> neg) {
    TraceState s;
    s.stutt = true;
    s.cond_neg = std::move(neg);
    return s;
  }
};

struct Trace {
  std::vector<TraceState> states;
  TraceEnd ending = TraceEnd::End;

  std::string str() const {
    std::ostringstream os;
    for (const auto& s : states) {
      if (s.stutt) {
        os << "<stutt";
        for (const auto& n : s.cond_neg) os << " ~(" << n.str() << ")";
        os << "> ";
        continue;
      }
      os << "<(" << s.cond_pos.str();
      for (const auto& n : s.cond_neg) os << ", ~(" << n.str() << ")";
      os << ") -> " << s.store.str() << "> ";
    }
    os << (ending == TraceEnd::End ? "[end]" : "[cut]");
    return os.str();
  }
};

/// Stores never shrink along a trace.
inline bool trace_monotone(const ConstraintSystem& sys, const Trace& t) {
  const Constraint* prev = nullptr;
  for (const auto& s : t.states) {
    if (s.stutt) continue;
    if (prev && !entails(sys, s.store, *prev)) return false;
    prev = &s.store;
  }
  return true;
}

/// A trace is closed when every state's own store satisfies its conditions:
/// the positive condition is entailed and no negative condition is.
inline bool trace_closed(const ConstraintSystem& sys, const Trace& t) {
  for (const auto& s : t.states) {
    for (const auto& n : s.cond_neg)
      if (n.is_true()) return false;  // nothing can avoid entailing true
    if (s.stutt) continue;
    if (!entails(sys, s.store, s.cond_pos)) return false;
    for (const auto& n : s.cond_neg)
      if (entails(sys, s.store, n)) return false;
  }
  return true;
}

/// Project a variable out of a trace: stores and positive conditions are
/// hidden; negative conditions mentioning the variable are dropped (a hidden
/// variable cannot be observed).
inline Trace hide_trace(const ConstraintSystem& sys, const std::string& x,
                        const Trace& t) {
  Trace out;
  out.ending = t.ending;
  for (const auto& s : t.states) {
    TraceState ns = s;
    ns.cond_neg.clear();
    for (const auto& n : s.cond_neg)
      if (!n.mentions(x)) ns.cond_neg.push_back(n);
    if (!s.stutt) {
      ns.cond_pos = hide(sys, x, s.cond_pos);
      ns.store = hide(sys, x, s.store);
    }
    out.states.push_back(std::move(ns));
  }
  return out;
}

}  // namespace tadi
