#pragma once

// One-pass tableau decision procedure for csLTL.
//
// A tableau node carries a finite label of formulas. Conjunctive rules split
// in place, disjunctive rules fork the branch, quantifiers are eliminated
// with reserved witness names, and a label made of elementary formulas only
// jumps to the next stage, carrying its positive constraint atoms. One
// eventuality per branch is distinguished at a time (FIFO); its unfolding
// records the branch context so that a postponed eventuality in a repeating
// context closes the branch instead of looping forever. Branches close on
// contradictions against the merged constraint store; an open branch yields
// its stage-indexed constraint content as a satisfiable testimony formula.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tadi/cltl.hpp"
#include "tadi/cstore.hpp"

namespace tadi {

// ── labels ──────────────────────────────────────────────────────────────────

/// A tableau label: a finite set of formulas, sorted and deduplicated.
using Label = std::vector<FormulaPtr>;

namespace detail {

inline bool label_contains(const Label& l, const FormulaPtr& f) {
  auto it = std::lower_bound(l.begin(), l.end(), f, FormulaLess{});
  return it != l.end() && formula_eq(*it, f);
}

/// Inserts at the sorted position; `true` (the neutral element) is dropped.
/// Returns true when the label changed.
inline bool label_insert(Label& l, const FormulaPtr& f) {
  if (f->kind == FormulaKind::True) return false;
  auto it = std::lower_bound(l.begin(), l.end(), f, FormulaLess{});
  if (it != l.end() && formula_eq(*it, f)) return false;
  l.insert(it, f);
  return true;
}

inline Label label_without(const Label& l, const FormulaPtr& f) {
  Label out;
  out.reserve(l.size());
  for (const auto& g : l)
    if (!formula_eq(g, f)) out.push_back(g);
  return out;
}

inline std::set<std::string> label_free_vars(const Label& l) {
  std::set<std::string> vs;
  for (const auto& f : l) {
    auto fv = formula_free_vars(f);
    vs.insert(fv.begin(), fv.end());
  }
  return vs;
}

/// The witness names visible in a label. Quantified variables stand for a
/// process's local streams: a witness may coincide with another local
/// (reserved `#` names, minted by the rules here) but never with one of the
/// input's own free variables — locals live at fresh locations. Both
/// quantifier rules therefore instantiate at the visible witness names plus
/// one fresh representative, and at nothing else.
inline std::set<std::string> label_witness_vars(const Label& l) {
  std::set<std::string> vs;
  for (const auto& f : l)
    for (const auto& v : formula_free_vars(f))
      if (!v.empty() && v[0] == '#') vs.insert(v);
  return vs;
}

}  // namespace detail

// ── node classification ─────────────────────────────────────────────────────

/// Elementary formulas survive until the stage jump: constraint atoms and
/// their negations, next-formulas and their negations.
inline bool is_elementary(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Atom:
    case FormulaKind::Next:
      return true;
    case FormulaKind::Not: {
      FormulaKind k = f->subs[0]->kind;
      return k == FormulaKind::Atom || k == FormulaKind::Next;
    }
    default:
      return false;
  }
}

/// Merge of all positive constraint atoms of a label.
inline Constraint label_store(const ConstraintSystem& sys, const Label& l) {
  Constraint d = Constraint::top();
  for (const auto& f : l)
    if (f->kind == FormulaKind::Atom) d = merge(sys, d, f->atom);
  return d;
}

/// A node is inconsistent when it contains a complementary pair of formulas,
/// the formula false, or a negated constraint that the merge of the positive
/// constraints entails. The merged store itself being false — including a
/// last-value assertion that disagrees with the store's own chain — also
/// closes the node: no store reachable by a real computation supports it.
inline bool is_inconsistent(const ConstraintSystem& sys, const Label& l) {
  for (const auto& f : l) {
    if (f->kind == FormulaKind::False) return true;
    if (f->kind == FormulaKind::Not && detail::label_contains(l, f->subs[0]))
      return true;
  }
  Constraint d = label_store(sys, l);
  if (d.is_false() || pin_conflicted(d)) return true;
  for (const auto& f : l)
    if (f->kind == FormulaKind::Not && f->subs[0]->kind == FormulaKind::Atom &&
        entails(sys, d, f->subs[0]->atom))
      return true;
  return false;
}

// ── nodes ───────────────────────────────────────────────────────────────────

struct Node {
  Label label;
  FormulaPtr distinguished;       // eventuality currently being unfolded
  std::vector<FormulaPtr> queue;  // FIFO of pending eventualities
  std::size_t stage = 0;          // stage jumps since the root
};

namespace detail {

/// Adds a formula to a node's label; newly arriving until-formulas are
/// queued unless they are the node's distinguished eventuality.
inline void node_insert(Node& n, const FormulaPtr& f) {
  if (!label_insert(n.label, f)) return;
  if (f->kind != FormulaKind::Until) return;
  if (n.distinguished && formula_eq(f, n.distinguished)) return;
  for (const auto& q : n.queue)
    if (formula_eq(q, f)) return;
  n.queue.push_back(f);
}

inline void queue_remove(Node& n, const FormulaPtr& f) {
  n.queue.erase(
      std::remove_if(n.queue.begin(), n.queue.end(),
                     [&](const FormulaPtr& q) { return formula_eq(q, f); }),
      n.queue.end());
}

}  // namespace detail

inline Node make_node(const std::vector<FormulaPtr>& formulas) {
  Node n;
  for (const auto& f : formulas) detail::node_insert(n, f);
  return n;
}

// ── expansion ───────────────────────────────────────────────────────────────

struct Expansion {
  std::string rule;            // which rule fired
  std::vector<Node> children;  // empty only for "end"
};

/// Applies exactly one rule to the node: conjunctive rules first, then
/// quantifier elimination, then forking rules, and the stage jump only once
/// every formula is elementary. Within a class the structurally smallest
/// formula is reduced, so expansion is deterministic.
inline Expansion expand(const ConstraintSystem& sys, const Node& n,
                        std::size_t& fresh) {
  const FormulaPtr* alpha = nullptr;
  const FormulaPtr* quant = nullptr;
  const FormulaPtr* beta = nullptr;
  for (const auto& f : n.label) {
    switch (f->kind) {
      case FormulaKind::And:
        if (!alpha) alpha = &f;
        break;
      case FormulaKind::Exists:
        if (!quant) quant = &f;
        break;
      case FormulaKind::Until:
        if (!beta) beta = &f;
        break;
      case FormulaKind::Not: {
        FormulaKind k = f->subs[0]->kind;
        if (k == FormulaKind::And || k == FormulaKind::Until) {
          if (!beta) beta = &f;
        } else if (k == FormulaKind::Exists) {
          if (!quant) quant = &f;
        }
        break;
      }
      default:
        break;
    }
  }

  if (alpha) {
    const FormulaPtr& f = *alpha;
    Node child = n;
    child.label = detail::label_without(n.label, f);
    for (const auto& s : f->subs) detail::node_insert(child, s);
    return {"and", {std::move(child)}};
  }

  if (quant) {
    const FormulaPtr& f = *quant;
    if (f->kind == FormulaKind::Exists) {
      // One branch per witness candidate: each visible witness name (the
      // new local may coincide with another local already in play — a cell
      // pins head and tail, so a fresh name cannot stand in for it) and one
      // fresh name for a stream unrelated to anything in sight. On a label
      // without witness names this is the plain fresh-witness rule.
      std::set<std::string> targets = detail::label_witness_vars(n.label);
      targets.insert("#" + std::to_string(++fresh));
      std::vector<Node> children;
      children.reserve(targets.size());
      for (const auto& v : targets) {
        Node child = n;
        child.label = detail::label_without(n.label, f);
        std::map<std::string, std::string> m{{f->var, v}};
        detail::node_insert(child, formula_subst(sys, f->subs[0], m, fresh));
        children.push_back(std::move(child));
      }
      return {"exists", std::move(children)};
    }
    // Negated quantifier: refute the body at every candidate the positive
    // rule could pick — the visible witness names and one representative
    // fresh name standing in for all the unrelated streams.
    const FormulaPtr& ex = f->subs[0];
    std::set<std::string> targets = detail::label_witness_vars(n.label);
    targets.insert("#" + std::to_string(++fresh));
    Node child = n;
    child.label = detail::label_without(n.label, f);
    for (const auto& v : targets) {
      std::map<std::string, std::string> m{{ex->var, v}};
      detail::node_insert(child,
                          f_not(formula_subst(sys, ex->subs[0], m, fresh)));
    }
    return {"not-exists", {std::move(child)}};
  }

  if (beta) {
    const FormulaPtr& f = *beta;
    if (f->kind == FormulaKind::Until) {
      const FormulaPtr& lhs = f->subs[0];
      const FormulaPtr& rhs = f->subs[1];
      bool dist = n.distinguished && formula_eq(f, n.distinguished);

      Node fulfil = n;
      fulfil.label = detail::label_without(n.label, f);
      if (dist) fulfil.distinguished = nullptr;
      detail::queue_remove(fulfil, f);
      detail::node_insert(fulfil, rhs);

      FormulaPtr ctx = f_true();
      if (dist) {
        // Disjunction of the negated context formulas. Positive constraint
        // atoms are left out: the store only grows, so their negations can
        // never become true later and would be dead weight in the context.
        Label gamma;
        for (const auto& g : detail::label_without(n.label, f))
          if (g->kind != FormulaKind::Atom) gamma.push_back(g);
        ctx = f_not(f_and(std::move(gamma)));
      }
      FormulaPtr carried = f_until(f_and(ctx, lhs), rhs);
      Node wait = n;
      wait.label = detail::label_without(n.label, f);
      if (dist)  // an all-atom context collapses the carried formula; then
                 // fulfilment is forced next stage and nothing is pending
        wait.distinguished =
            carried->kind == FormulaKind::Until ? carried : nullptr;
      detail::node_insert(wait, lhs);
      detail::node_insert(wait, f_not(rhs));
      detail::node_insert(wait, f_next(carried));
      return {"until", {std::move(fulfil), std::move(wait)}};
    }
    if (f->subs[0]->kind == FormulaKind::Until) {
      const FormulaPtr& u = f->subs[0];
      Node now = n;
      now.label = detail::label_without(n.label, f);
      detail::node_insert(now, f_not(u->subs[0]));
      detail::node_insert(now, f_not(u->subs[1]));
      Node later = n;
      later.label = detail::label_without(n.label, f);
      detail::node_insert(later, u->subs[0]);
      detail::node_insert(later, f_not(u->subs[1]));
      detail::node_insert(later, f_not(f_next(u)));
      return {"not-until", {std::move(now), std::move(later)}};
    }
    // Negated conjunction: one child per refuted conjunct, simplified
    // against the label first. A refutation that is already present makes
    // the formula redundant; one that contradicts the label is dropped; and
    // the refutations living at the next stage are deferred as a single
    // next-stage disjunction, so that independent forks do not multiply
    // before the stage boundary where most of them resolve.
    Label rest = detail::label_without(n.label, f);
    std::vector<FormulaPtr> now_opts;
    std::vector<FormulaPtr> next_parts;
    bool redundant = false;
    for (const auto& s : f->subs[0]->subs) {
      FormulaPtr g = f_not(s);
      if (g->kind == FormulaKind::True || detail::label_contains(rest, g)) {
        redundant = true;
        break;
      }
      Label probe = rest;
      detail::label_insert(probe, g);
      if (is_inconsistent(sys, probe)) continue;  // this option closes now
      if (g->kind == FormulaKind::Next)
        next_parts.push_back(g->subs[0]);
      else if (g->kind == FormulaKind::Not &&
               g->subs[0]->kind == FormulaKind::Next)
        next_parts.push_back(f_not(g->subs[0]->subs[0]));
      else
        now_opts.push_back(g);
    }
    if (redundant) {
      Node c = n;
      c.label = std::move(rest);
      return {"not-and", {std::move(c)}};
    }
    if (!next_parts.empty()) {
      FormulaPtr d = next_parts[0];
      for (std::size_t i = 1; i < next_parts.size(); ++i)
        d = f_or(d, next_parts[i]);
      now_opts.push_back(f_next(std::move(d)));
    }
    if (now_opts.empty()) {  // every refutation contradicts the label
      Node c = n;
      c.label = std::move(rest);
      detail::node_insert(c, f_false());
      return {"not-and", {std::move(c)}};
    }
    std::vector<Node> children;
    children.reserve(now_opts.size());
    for (const auto& g : now_opts) {
      Node c = n;
      c.label = rest;
      detail::node_insert(c, g);
      children.push_back(std::move(c));
    }
    return {"not-and", std::move(children)};
  }

  // All formulas elementary: jump to the next stage, or end the branch when
  // nothing is owed to the future.
  bool has_next = false;
  for (const auto& f : n.label)
    if (f->kind == FormulaKind::Next ||
        (f->kind == FormulaKind::Not && f->subs[0]->kind == FormulaKind::Next))
      has_next = true;
  if (!has_next) return {"end", {}};

  Node child;
  child.stage = n.stage + 1;
  child.distinguished = n.distinguished;
  child.queue = n.queue;
  for (const auto& f : n.label) {
    if (f->kind == FormulaKind::Next) {
      detail::node_insert(child, f->subs[0]);
    } else if (f->kind == FormulaKind::Not &&
               f->subs[0]->kind == FormulaKind::Next) {
      detail::node_insert(child, f_not(f->subs[0]->subs[0]));
    } else if (f->kind == FormulaKind::Atom) {
      detail::node_insert(child, f);  // the store only grows
    }
    // Negated constraints hold at their own instant only; they are dropped.
  }
  return {"next", {std::move(child)}};
}

// ── systematic construction ─────────────────────────────────────────────────

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

/// Node-count cap: an explicit option beats the TADI_NODE_CAP environment
/// variable, which beats the built-in default.
inline std::size_t env_node_cap() {
  if (const char* e = std::getenv("TADI_NODE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(e, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultNodeCap;
}

struct BuildOptions {
  std::size_t node_cap = env_node_cap();
};

/// An open branch, reported as its stage-indexed constraint content.
struct OpenBranch {
  std::vector<Label> contents;  // constraint formulas per stage
  bool cyclic = false;
  std::size_t loop_start = 0;   // first stage of the repeating segment
};

struct Tableau {
  bool closed = false;
  bool truncated = false;
  std::size_t nodes = 0;
  std::optional<OpenBranch> open_branch;
};

namespace detail {

/// Canonical rendering of a stage-entry label: reserved witness names are
/// renormalized by order of appearance so that equivalent labels that differ
/// only in witness numbering render identically.
inline std::string snapshot_key(const ConstraintSystem& sys, const Label& l) {
  std::vector<FormulaPtr> fs(l);
  std::size_t scratch = 0;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<std::string> strs;
    strs.reserve(fs.size());
    for (const auto& f : fs) strs.push_back(formula_str(f));
    std::vector<std::size_t> idx(fs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return strs[a] < strs[b]; });
    std::map<std::string, std::string> ren;
    for (std::size_t i : idx) {
      const std::string& s = strs[i];
      for (std::size_t p = 0; p < s.size(); ++p) {
        if (s[p] != '#' && s[p] != '%') continue;
        std::size_t q = p + 1;
        while (q < s.size() && std::isdigit(static_cast<unsigned char>(s[q])))
          ++q;
        if (q == p + 1) continue;
        std::string name = s.substr(p, q - p);
        if (!ren.count(name))
          ren.emplace(name, "%" + std::to_string(ren.size() + 1));
        p = q - 1;
      }
    }
    std::vector<FormulaPtr> out;
    out.reserve(fs.size());
    for (std::size_t i : idx)
      out.push_back(ren.empty() ? fs[i] : formula_subst(sys, fs[i], ren, scratch));
    fs = std::move(out);
  }
  std::vector<std::string> strs;
  strs.reserve(fs.size());
  for (const auto& f : fs) strs.push_back(formula_str(f));
  std::sort(strs.begin(), strs.end());
  std::string key;
  for (const auto& s : strs) {
    key += s;
    key += '\n';
  }
  return key;
}

struct BranchState {
  Node node;
  std::vector<std::string> snapshots;  // stage-entry keys, by stage
  std::vector<Label> contents;         // constraint content per closed stage
  std::set<std::string> distinguished_ever;
  std::size_t distinguished_since = 0;
  std::size_t fresh = 0;  // witness counter, branch-local after a fork
};

inline Label constraint_content(const Label& l) {
  Label out;
  for (const auto& f : l)
    if (f->kind == FormulaKind::Atom ||
        (f->kind == FormulaKind::Not && f->subs[0]->kind == FormulaKind::Atom))
      out.push_back(f);
  return out;
}

/// Stage-entry bookkeeping: prune queue entries that left the label, then
/// promote the oldest pending eventuality if none is distinguished.
inline void settle(BranchState& b) {
  Node& n = b.node;
  while (!n.queue.empty() && !label_contains(n.label, n.queue.front()))
    n.queue.erase(n.queue.begin());
  if (!n.distinguished && !n.queue.empty()) {
    n.distinguished = n.queue.front();
    n.queue.erase(n.queue.begin());
    b.distinguished_ever.insert(formula_str(n.distinguished));
    b.distinguished_since = n.stage;
  }
}

inline bool all_eventualities_distinguished(const BranchState& b) {
  for (const auto& f : b.node.label) {
    if (f->kind != FormulaKind::Until) continue;
    if (b.node.distinguished && formula_eq(f, b.node.distinguished)) continue;
    if (!b.distinguished_ever.count(formula_str(f))) return false;
  }
  return true;
}

}  // namespace detail

/// Builds the tableau for a finite set of formulas depth-first. Stops at the
/// first open branch (the set is satisfiable) or once every branch closed.
inline Tableau build(const ConstraintSystem& sys,
                     const std::vector<FormulaPtr>& formulas,
                     const BuildOptions& opts = {}) {
  Tableau t;
  detail::BranchState root;
  for (const auto& f : formulas) detail::node_insert(root.node, f);
  detail::settle(root);
  root.snapshots.push_back(detail::snapshot_key(sys, root.node.label));

  std::vector<detail::BranchState> stack;
  stack.push_back(std::move(root));
  bool any_open = false;

  while (!stack.empty()) {
    if (t.nodes >= opts.node_cap) {
      t.truncated = true;
      break;
    }
    detail::BranchState b = std::move(stack.back());
    stack.pop_back();
    ++t.nodes;

    if (is_inconsistent(sys, b.node.label)) continue;  // branch closed

    Expansion e = expand(sys, b.node, b.fresh);
    if (e.rule == "end") {
      // Last node holds constraint formulas only: the branch is open.
      OpenBranch ob;
      ob.contents = std::move(b.contents);
      ob.contents.push_back(detail::constraint_content(b.node.label));
      t.open_branch = std::move(ob);
      any_open = true;
      break;
    }
    if (e.rule == "next") {
      detail::BranchState child;
      child.node = std::move(e.children[0]);
      child.snapshots = std::move(b.snapshots);
      child.contents = std::move(b.contents);
      child.contents.push_back(detail::constraint_content(b.node.label));
      child.distinguished_ever = std::move(b.distinguished_ever);
      child.distinguished_since = b.distinguished_since;
      child.fresh = b.fresh;
      detail::settle(child);
      std::string key = detail::snapshot_key(sys, child.node.label);
      std::size_t loop_start = child.snapshots.size();
      for (std::size_t i = 0; i < child.snapshots.size(); ++i)
        if (child.snapshots[i] == key) {
          loop_start = i;
          break;
        }
      if (loop_start < child.snapshots.size()) {
        if (child.node.distinguished &&
            child.distinguished_since <= loop_start)
          continue;  // a whole cycle without progress on the eventuality
        if (detail::all_eventualities_distinguished(child)) {
          OpenBranch ob;
          ob.contents = std::move(child.contents);
          ob.cyclic = true;
          ob.loop_start = loop_start;
          t.open_branch = std::move(ob);
          any_open = true;
          break;
        }
        // Some eventuality has not had its fair turn yet: keep expanding.
      }
      child.snapshots.push_back(std::move(key));
      stack.push_back(std::move(child));
      continue;
    }
    for (auto it = e.children.rbegin(); it != e.children.rend(); ++it) {
      if (is_inconsistent(sys, it->label)) {  // a closed leaf; skip the copies
        ++t.nodes;
        continue;
      }
      detail::BranchState child;
      child.node = std::move(*it);
      child.snapshots = b.snapshots;
      child.contents = b.contents;
      child.distinguished_ever = b.distinguished_ever;
      child.distinguished_since = b.distinguished_since;
      child.fresh = b.fresh;
      stack.push_back(std::move(child));
    }
  }
  t.closed = !any_open && !t.truncated;
  return t;
}

// ── testimony extraction ────────────────────────────────────────────────────

/// The stage-indexed conjunction of an open branch's constraint content; for
/// a cyclic branch the repeating segment contributes an always-block of the
/// content common to its stages. Witness names are kept as minted (`#n`):
/// they mark the streams a quantifier may still alias when the testimony is
/// fed back through the tableau.
inline FormulaPtr extract_testimony(const ConstraintSystem& sys,
                                    const OpenBranch& br) {
  (void)sys;
  const auto& cs = br.contents;
  FormulaPtr tail;
  std::size_t upto;  // stages [0, upto) are spelled out position by position
  if (br.cyclic) {
    Label inter = cs[br.loop_start];
    for (std::size_t i = br.loop_start + 1; i < cs.size(); ++i) {
      Label keep;
      for (const auto& f : inter)
        if (detail::label_contains(cs[i], f)) keep.push_back(f);
      inter = std::move(keep);
    }
    tail = f_always(f_and(inter));
    upto = cs.size();
  } else {
    tail = f_and(cs.back());
    upto = cs.size() - 1;
  }
  FormulaPtr acc = std::move(tail);
  for (std::size_t i = upto; i-- > 0;)
    acc = f_and(f_and(cs[i]), f_next(acc));
  return acc;
}

/// Presentation form of a testimony or model: the reserved witness names
/// (`#n`) become plain variables bound by a leading existential block, so the
/// printed formula parses back.  Closing over fresh names preserves
/// satisfiability and every implication from or against witness-free
/// formulas, which is what reports are consumed for.
inline FormulaPtr present_witnesses(const ConstraintSystem& sys,
                                    const FormulaPtr& f) {
  std::set<std::string> used = formula_free_vars(f);
  std::vector<std::string> hidden;
  for (const auto& v : used)
    if (!v.empty() && v[0] == '#') hidden.push_back(v);
  if (hidden.empty()) return f;
  std::map<std::string, std::string> m;
  std::vector<std::string> names;
  std::size_t n = 0;
  for (const auto& h : hidden) {
    std::string cand;
    do {
      cand = "W" + std::to_string(++n);
    } while (used.count(cand));
    m[h] = cand;
    names.push_back(cand);
  }
  std::size_t fresh = 0;
  FormulaPtr body = formula_subst(sys, f, std::move(m), fresh);
  for (auto it = names.rbegin(); it != names.rend(); ++it)
    body = f_exists(*it, std::move(body));
  return body;
}

// ── verdict wrappers ────────────────────────────────────────────────────────

enum class Validity : std::uint8_t { Valid, NotValid, Inconclusive };

struct ValidityResult {
  Validity verdict = Validity::Inconclusive;
  FormulaPtr testimony;  // set when NotValid
  std::size_t nodes = 0;
  bool truncated = false;
};

/// Decides validity by building the tableau for the plain negation.
inline ValidityResult is_valid(const ConstraintSystem& sys, const FormulaPtr& f,
                               const BuildOptions& opts = {}) {
  Tableau t = build(sys, {f_not(f)}, opts);
  ValidityResult r;
  r.nodes = t.nodes;
  r.truncated = t.truncated;
  if (t.closed) {
    r.verdict = Validity::Valid;
  } else if (t.open_branch) {
    r.verdict = Validity::NotValid;
    r.testimony = extract_testimony(sys, *t.open_branch);
  }
  return r;
}

enum class Satisfiability : std::uint8_t {
  Satisfiable,
  Unsatisfiable,
  Inconclusive
};

struct SatResult {
  Satisfiability verdict = Satisfiability::Inconclusive;
  FormulaPtr model;  // set when Satisfiable
  std::size_t nodes = 0;
  bool truncated = false;
};

/// Decides satisfiability of a conjunction of formulas.
inline SatResult check_sat(const ConstraintSystem& sys,
                           const std::vector<FormulaPtr>& fs,
                           const BuildOptions& opts = {}) {
  Tableau t = build(sys, fs, opts);
  SatResult r;
  r.nodes = t.nodes;
  r.truncated = t.truncated;
  if (t.open_branch) {
    r.verdict = Satisfiability::Satisfiable;
    r.model = extract_testimony(sys, *t.open_branch);
  } else if (t.closed) {
    r.verdict = Satisfiability::Unsatisfiable;
  }
  return r;
}

}  // namespace tadi
