#pragma once

// Declaration-level correctness checking.  Each declaration body is
// abstracted into a one-step formula under the specification
// interpretation; the declaration passes when that formula implies the
// symbol's own specification.  A failed implication is reported together
// with a testimony — one run shape the declaration admits but the
// specification forbids — and the testimony is certified before the
// declaration is called incorrect.

#include <chrono>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tadi/absem.hpp"
#include "tadi/tableau.hpp"

namespace tadi {

// ── verdicts ─────────────────────────────────────────────────────────────────

/// What a check concluded: the abstraction implies the specification
/// (PartiallyCorrect), it demonstrably violates it (Incorrect, with a
/// certified testimony), or a tableau budget ran out before either could be
/// established (Inconclusive).
enum class Verdict : std::uint8_t { PartiallyCorrect, Incorrect, Inconclusive };

inline const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::PartiallyCorrect:
      return "PartiallyCorrect";
    case Verdict::Incorrect:
      return "Incorrect";
    default:
      return "Inconclusive";
  }
}

/// Outcome of checking a single declaration.
struct DeclCheck {
  std::string proc;
  std::size_t decl_index = 0;  // position in the program's declaration list
  Verdict verdict = Verdict::Inconclusive;
  FormulaPtr testimony;  // set when Incorrect
  std::size_t nodes = 0;  // tableau nodes spent across all checks
  bool truncated = false;  // some tableau hit its node cap
};

// ── testimony certification ──────────────────────────────────────────────────

namespace detail {

/// Highest numeric suffix among the reserved witness names (#k) free in a
/// formula, so new mints never collide with names already in play.
inline std::size_t witness_mint_floor(const FormulaPtr& f) {
  std::size_t floor = 0;
  for (const auto& v : formula_free_vars(f)) {
    if (v.size() < 2 || v.size() > 8 || v[0] != '#') continue;
    bool digits = true;
    for (std::size_t i = 1; i < v.size(); ++i)
      digits = digits && std::isdigit(static_cast<unsigned char>(v[i]));
    if (digits) floor = std::max(floor, std::stoul(v.substr(1)));
  }
  return floor;
}

/// Tries to discharge `lhs -> rhs` by strengthening: pick one disjunct of
/// `rhs`, instantiate its leading quantifiers with witness names drawn from
/// `lhs` (or fresh ones), and prove the quantifier-free instance instead.
/// The instance entails its disjunction, so success certifies the original
/// implication; failure proves nothing and the caller falls back to the
/// direct tableau.  The payoff is that each attempt stays tiny, while the
/// direct tableau on a testimony-sized left side can exhaust any budget.
inline bool entails_by_instance(const ConstraintSystem& sys,
                                const FormulaPtr& lhs, const FormulaPtr& rhs,
                                std::size_t& nodes, const BuildOptions& opts) {
  bool overflow = false;
  auto view = dnf_view(rhs, overflow);

  std::vector<std::string> cands;
  for (const auto& v : formula_free_vars(lhs))
    if (!v.empty() && v[0] == '#') cands.push_back(v);
  std::size_t mint = std::max(witness_mint_floor(lhs), witness_mint_floor(rhs));

  BuildOptions per_instance = opts;
  per_instance.node_cap = std::min<std::size_t>(opts.node_cap, 20'000);

  for (auto& conj : view) {
    FormulaPtr disjunct = assemble(std::move(conj));
    std::vector<std::string> binders;
    FormulaPtr body = disjunct;
    while (body->kind == FormulaKind::Exists) {
      binders.push_back(body->var);
      body = body->subs[0];
    }

    // Every map from binders to candidate names; the extra choice per
    // binder mints a stream unrelated to anything in the testimony.
    const std::size_t base = cands.size() + 1;
    std::size_t total = 1;
    bool too_wide = false;
    for (std::size_t i = 0; i < binders.size(); ++i) {
      total *= base;
      if (total > 256) {
        too_wide = true;
        break;
      }
    }
    if (too_wide) continue;

    for (std::size_t code = 0; code < total; ++code) {
      std::map<std::string, std::string> m;
      std::size_t rest = code;
      std::size_t next_mint = mint;
      for (const auto& b : binders) {
        std::size_t pick = rest % base;
        rest /= base;
        m[b] = pick < cands.size() ? cands[pick]
                                   : "#" + std::to_string(++next_mint);
      }
      std::size_t fresh = 0;
      FormulaPtr instance =
          binders.empty() ? body : formula_subst(sys, body, m, fresh);
      ValidityResult v = is_valid(sys, f_implies(lhs, instance), per_instance);
      nodes += v.nodes;
      if (v.verdict == Validity::Valid) return true;
    }
  }
  return false;
}

inline Verdict worse(Verdict a, Verdict b) {
  if (a == Verdict::Incorrect || b == Verdict::Incorrect)
    return Verdict::Incorrect;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive)
    return Verdict::Inconclusive;
  return Verdict::PartiallyCorrect;
}

}  // namespace detail

// ── declaration check ────────────────────────────────────────────────────────

/// Checks one declaration against the specification interpretation, which
/// must bind the declared symbol and every symbol its body calls (lookups
/// throw UnboundProcessError otherwise).  An Incorrect verdict is only
/// reported once its testimony is certified on both counts: the testimony
/// is a behavior the declaration's step formula admits, and it cannot be
/// reconciled with the symbol's specification.  If certification runs out
/// of budget the verdict degrades to Inconclusive rather than accuse the
/// declaration on an unchecked witness.
inline DeclCheck check_declaration(const ConstraintSystem& sys,
                                   const Declaration& r,
                                   const Interpretation& s,
                                   const BuildOptions& opts = {}) {
  DeclCheck out;
  out.proc = r.name;

  std::size_t fresh = 0;
  Program one;
  one.system = sys;
  one.decls = {r};
  Interpretation stepped = abstract_step(one, s, fresh);
  FormulaPtr psi = stepped.lookup(sys, r.name, r.params, fresh);
  FormulaPtr spec = s.lookup(sys, r.name, r.params, fresh);

  ValidityResult main = is_valid(sys, f_implies(psi, spec), opts);
  out.nodes += main.nodes;
  out.truncated |= main.truncated;
  if (main.verdict == Validity::Valid) {
    out.verdict = Verdict::PartiallyCorrect;
    return out;
  }
  if (main.verdict == Validity::Inconclusive) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }

  FormulaPtr testimony = main.testimony;
  bool admitted =
      detail::entails_by_instance(sys, testimony, psi, out.nodes, opts);
  if (!admitted) {
    ValidityResult direct = is_valid(sys, f_implies(testimony, psi), opts);
    out.nodes += direct.nodes;
    out.truncated |= direct.truncated;
    if (direct.verdict != Validity::Valid) {
      out.verdict = Verdict::Inconclusive;
      return out;
    }
  }
  SatResult meet = check_sat(sys, {testimony, spec}, opts);
  out.nodes += meet.nodes;
  out.truncated |= meet.truncated;
  if (meet.verdict != Satisfiability::Unsatisfiable) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }

  out.verdict = Verdict::Incorrect;
  out.testimony = std::move(testimony);
  return out;
}

// ── whole-program check ──────────────────────────────────────────────────────

/// Per-declaration outcomes with a program-level aggregate: the program is
/// PartiallyCorrect exactly when every declaration's check succeeded.
struct Report {
  Verdict overall = Verdict::PartiallyCorrect;
  std::vector<DeclCheck> decls;            // one entry per declaration
  std::map<std::string, Verdict> symbols;  // worst verdict per symbol
  std::size_t nodes = 0;
  std::int64_t millis = 0;
};

/// Checks every declaration in program order.  Specified symbols with no
/// declaration abstract to the empty disjunction, which implies anything,
/// so they pass vacuously (the empty program is always PartiallyCorrect).
inline Report check_program(const Program& d, const Interpretation& s,
                            const BuildOptions& opts = {}) {
  auto start = std::chrono::steady_clock::now();
  Report rep;
  for (std::size_t i = 0; i < d.decls.size(); ++i) {
    DeclCheck c = check_declaration(d.system, d.decls[i], s, opts);
    c.decl_index = i;
    rep.nodes += c.nodes;
    rep.overall = detail::worse(rep.overall, c.verdict);
    auto [it, inserted] = rep.symbols.emplace(c.proc, c.verdict);
    if (!inserted) it->second = detail::worse(it->second, c.verdict);
    rep.decls.push_back(std::move(c));
  }
  std::size_t fresh = 0;
  for (const auto& p : s.symbols()) {
    if (d.declares(p)) continue;
    FormulaPtr spec = s.lookup(d.system, p, s.params_of(p), fresh);
    ValidityResult v = is_valid(d.system, f_implies(f_false(), spec), opts);
    rep.nodes += v.nodes;
    Verdict w = v.verdict == Validity::Valid ? Verdict::PartiallyCorrect
                                             : Verdict::Inconclusive;
    rep.overall = detail::worse(rep.overall, w);
    rep.symbols.emplace(p, w);
  }
  rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  return rep;
}

// ── uncovered elements ───────────────────────────────────────────────────────

enum class Uncovered : std::uint8_t { Yes, No, Inconclusive };

struct UncoveredResult {
  Uncovered verdict = Uncovered::Inconclusive;
  std::size_t nodes = 0;
  bool truncated = false;
};

/// Decides whether `candidate` names behavior the specification allows for
/// `p` that the program's one-step abstraction can never produce — a gap in
/// the program rather than a fault in a declaration.  The candidate must be
/// satisfiable (a vacuous formula carries no information), must imply the
/// symbol's specification, and must be irreconcilable with the symbol's
/// step formula.  Symbols the program never declares step to the empty
/// disjunction, so any admissible candidate for them is uncovered.
inline UncoveredResult check_uncovered(const FormulaPtr& candidate,
                                       const std::string& p, const Program& d,
                                       const Interpretation& s,
                                       const BuildOptions& opts = {}) {
  UncoveredResult out;
  const ConstraintSystem& sys = d.system;

  SatResult nonvacuous = check_sat(sys, {candidate}, opts);
  out.nodes += nonvacuous.nodes;
  out.truncated |= nonvacuous.truncated;
  if (nonvacuous.verdict == Satisfiability::Inconclusive) return out;
  if (nonvacuous.verdict == Satisfiability::Unsatisfiable) {
    out.verdict = Uncovered::No;
    return out;
  }

  std::size_t fresh = 0;
  const std::vector<std::string>& params = s.params_of(p);
  FormulaPtr spec = s.lookup(sys, p, params, fresh);
  ValidityResult demanded = is_valid(sys, f_implies(candidate, spec), opts);
  out.nodes += demanded.nodes;
  out.truncated |= demanded.truncated;
  if (demanded.verdict == Validity::Inconclusive) return out;
  if (demanded.verdict == Validity::NotValid) {
    out.verdict = Uncovered::No;
    return out;
  }

  Interpretation stepped = abstract_step(d, s, fresh);
  FormulaPtr step = stepped.lookup(sys, p, params, fresh);
  SatResult meet = check_sat(sys, {candidate, step}, opts);
  out.nodes += meet.nodes;
  out.truncated |= meet.truncated;
  if (meet.verdict == Satisfiability::Inconclusive) return out;
  out.verdict = meet.verdict == Satisfiability::Unsatisfiable ? Uncovered::Yes
                                                              : Uncovered::No;
  return out;
}

}  // namespace tadi
