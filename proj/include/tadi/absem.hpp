#pragma once

// Abstract semantics: the agent-to-formula transformer and the one-step
// consequence operator over process interpretations.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tadi/cltl.hpp"
#include "tadi/cstore.hpp"
#include "tadi/lang.hpp"

namespace tadi {

struct UnboundProcessError : std::runtime_error {
  explicit UnboundProcessError(const std::string& name)
      : std::runtime_error("no formula bound for process: " + name) {}
};

// ── interpretations ──────────────────────────────────────────────────────────

/// Maps process symbols to formulas over formal parameters.  A lookup at a
/// call site renames formals to actuals, so interpretations behave the same
/// under any choice of parameter names.
class Interpretation {
 public:
  void bind(const std::string& proc, std::vector<std::string> params,
            FormulaPtr formula) {
    entries_[proc] = Entry{std::move(params), std::move(formula)};
  }

  bool binds(const std::string& proc) const { return entries_.count(proc); }

  /// Result used for symbols with no entry; null means lookups throw.
  void set_fallback(FormulaPtr f) { fallback_ = std::move(f); }

  FormulaPtr lookup(const ConstraintSystem& sys, const std::string& proc,
                    const std::vector<std::string>& args,
                    std::size_t& fresh) const {
    auto it = entries_.find(proc);
    if (it == entries_.end()) {
      if (fallback_) return fallback_;
      throw UnboundProcessError(proc);
    }
    const Entry& e = it->second;
    if (e.params.size() != args.size()) throw UnboundProcessError(proc);
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < e.params.size(); ++i) m[e.params[i]] = args[i];
    return formula_subst(sys, e.formula, std::move(m), fresh);
  }

  std::vector<std::string> symbols() const {
    std::vector<std::string> out;
    for (const auto& [name, e] : entries_) {
      (void)e;
      out.push_back(name);
    }
    return out;
  }

  const std::vector<std::string>& params_of(const std::string& proc) const {
    auto it = entries_.find(proc);
    if (it == entries_.end()) throw UnboundProcessError(proc);
    return it->second.params;
  }

 private:
  struct Entry {
    std::vector<std::string> params;
    FormulaPtr formula;
  };
  std::map<std::string, Entry> entries_;
  FormulaPtr fallback_;
};

/// The specification file read as an interpretation (strict: symbols without
/// a spec have no binding).
inline Interpretation interp_of_specs(const SpecFile& specs) {
  Interpretation out;
  for (const Spec& s : specs.specs) out.bind(s.name, s.params, s.formula);
  return out;
}

// ── agent-to-formula transformer ─────────────────────────────────────────────

inline FormulaPtr abstract_agent(const ConstraintSystem& sys,
                                 const AgentPtr& a, const Interpretation& i,
                                 std::size_t& fresh) {
  switch (a->kind) {
    case AgentKind::Skip:
      return f_true();
    case AgentKind::Tell:
      return f_next(f_atom(a->c));
    case AgentKind::Par: {
      std::vector<FormulaPtr> parts;
      for (const auto& s : a->subs)
        parts.push_back(abstract_agent(sys, s, i, fresh));
      return f_and(std::move(parts));
    }
    case AgentKind::Exists: {
      FormulaPtr body = abstract_agent(sys, a->subs[0], i, fresh);
      for (auto it = a->bound.rbegin(); it != a->bound.rend(); ++it)
        body = f_exists(*it, std::move(body));
      return body;
    }
    case AgentKind::Choice: {
      std::vector<FormulaPtr> negs;
      for (const auto& arm : a->arms) negs.push_back(f_not(f_atom(arm.guard)));
      FormulaPtr all_out = f_and(negs);
      FormulaPtr fired = f_false();
      for (auto it = a->arms.rbegin(); it != a->arms.rend(); ++it) {
        FormulaPtr armf =
            f_and(f_atom(it->guard),
                  f_next(abstract_agent(sys, it->body, i, fresh)));
        fired = f_or(std::move(armf), std::move(fired));
      }
      return f_or(f_always(all_out), f_until(all_out, std::move(fired)));
    }
    case AgentKind::Now: {
      FormulaPtr cond = f_atom(a->c);
      FormulaPtr then_part =
          f_and(cond, abstract_agent(sys, a->subs[0], i, fresh));
      FormulaPtr else_part =
          f_and(f_not(cond), abstract_agent(sys, a->subs[1], i, fresh));
      return f_or(std::move(then_part), std::move(else_part));
    }
    case AgentKind::Call:
      return f_next(i.lookup(sys, a->callee, a->args, fresh));
  }
  return f_true();
}

// ── one-step consequence operator ────────────────────────────────────────────

/// One application of the consequence operator: each declared symbol maps to
/// the disjunction of its declarations' abstracted bodies (formals renamed to
/// the first declaration's parameter tuple); undeclared symbols map to False.
inline Interpretation abstract_step(const Program& prog,
                                    const Interpretation& i,
                                    std::size_t& fresh) {
  Interpretation out;
  out.set_fallback(f_false());
  std::set<std::string> done;
  for (const Declaration& lead : prog.decls) {
    if (!done.insert(lead.name).second) continue;
    FormulaPtr dis = f_false();
    auto decls = prog.decls_for(lead.name);
    for (auto it = decls.rbegin(); it != decls.rend(); ++it) {
      const Declaration* d = *it;
      AgentPtr body = d->body;
      if (d->params != lead.params) {
        std::map<std::string, std::string> m;
        for (std::size_t k = 0; k < d->params.size(); ++k)
          m[d->params[k]] = lead.params[k];
        body = agent_subst(prog.system, body, std::move(m), fresh);
      }
      dis = f_or(abstract_agent(prog.system, body, i, fresh), std::move(dis));
    }
    out.bind(lead.name, lead.params, std::move(dis));
  }
  return out;
}

// ── canonical disjunctive presentation ───────────────────────────────────────

namespace detail {

/// Disjunctive normal view at the propositional top level: a list of
/// conjunct lists.  Temporal operators, atoms, and irreducible negations are
/// leaves; Exists distributes over the disjuncts of its body.
inline std::vector<std::vector<FormulaPtr>> dnf_view(const FormulaPtr& f,
                                                    bool& overflow);

/// Rebuild one disjunct, absorbing sibling conjuncts into a sole
/// quantifier block when no variable would be captured.
inline FormulaPtr assemble(std::vector<FormulaPtr> conj) {
  std::vector<FormulaPtr> blocks, rest;
  for (auto& g : conj)
    (g->kind == FormulaKind::Exists ? blocks : rest).push_back(std::move(g));
  if (blocks.size() == 1) {
    std::vector<std::string> binders;
    FormulaPtr body = blocks[0];
    while (body->kind == FormulaKind::Exists) {
      binders.push_back(body->var);
      body = body->subs[0];
    }
    bool capture = false;
    for (const auto& g : rest) {
      std::set<std::string> fv = formula_free_vars(g);
      for (const auto& b : binders)
        if (fv.count(b)) capture = true;
    }
    if (!capture) {
      rest.push_back(body);
      FormulaPtr inner = f_and(std::move(rest));
      for (auto it = binders.rbegin(); it != binders.rend(); ++it)
        inner = f_exists(*it, std::move(inner));
      return inner;
    }
  }
  for (auto& b : blocks) rest.push_back(std::move(b));
  return f_and(std::move(rest));
}

inline std::vector<std::vector<FormulaPtr>> dnf_view(const FormulaPtr& f,
                                                    bool& overflow) {
  constexpr std::size_t kMaxDisjuncts = 512;
  switch (f->kind) {
    case FormulaKind::True:
      return {{}};
    case FormulaKind::False:
      return {};
    case FormulaKind::And: {
      std::vector<std::vector<FormulaPtr>> acc{{}};
      for (const auto& g : f->subs) {
        auto d = dnf_view(g, overflow);
        std::vector<std::vector<FormulaPtr>> next;
        for (const auto& left : acc)
          for (const auto& right : d) {
            std::vector<FormulaPtr> joined = left;
            joined.insert(joined.end(), right.begin(), right.end());
            next.push_back(std::move(joined));
          }
        if (next.size() > kMaxDisjuncts) {
          overflow = true;
          return {{f}};
        }
        acc = std::move(next);
      }
      return acc;
    }
    case FormulaKind::Not: {
      const FormulaPtr& g = f->subs[0];
      if (g->kind == FormulaKind::And) {
        std::vector<std::vector<FormulaPtr>> acc;
        for (const auto& h : g->subs) {
          auto d = dnf_view(f_not(h), overflow);
          acc.insert(acc.end(), d.begin(), d.end());
          if (acc.size() > kMaxDisjuncts) {
            overflow = true;
            return {{f}};
          }
        }
        return acc;
      }
      return {{f}};
    }
    case FormulaKind::Exists: {
      auto d = dnf_view(f->subs[0], overflow);
      std::vector<std::vector<FormulaPtr>> out;
      for (auto& conj : d)
        out.push_back({f_exists(f->var, assemble(std::move(conj)))});
      return out;
    }
    default:
      return {{f}};
  }
}

}  // namespace detail

/// Present a formula as a flat disjunction of quantified conjunctions:
/// distribute conjunction over disjunction at the propositional top level,
/// distribute Exists over disjuncts, and absorb conjuncts into a sole
/// quantifier block.  Equivalence-preserving; used for readable reports and
/// the structural shape of abstracted declarations.
inline FormulaPtr canonicalize(const FormulaPtr& f) {
  bool overflow = false;
  auto d = detail::dnf_view(f, overflow);
  if (overflow) return f;
  FormulaPtr out = f_false();
  for (auto it = d.rbegin(); it != d.rend(); ++it)
    out = f_or(detail::assemble(std::move(*it)), std::move(out));
  return out;
}

}  // namespace tadi
